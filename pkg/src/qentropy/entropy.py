"""Entropy functionals on the positive cone.

All values are in nats.  The von Neumann and Shannon entropies used here are
the degree-1 homogeneous extensions

    H(rho) = Tr eta(rho) - eta(Tr rho),      S({p_k}) = sum eta(p_k) - eta(sum p_k),

with eta(x) = -x ln x and eta(0) = 0, so inputs need not be normalized.
The relative entropy is the Lindblad form, which carries the extra
``Tr sigma - Tr rho`` term and applies to trace-non-increasing maps; it
returns ``math.inf`` when supp(rho) is not contained in supp(sigma).
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import CLIP_TOL, spectral_decompose

SUPPORT_TOL = 1e-9


def eta(x: float) -> float:
    """eta(x) = -x ln x for x > 0, eta(0) = 0."""
    if x < 0:
        if x < -1e-12:
            raise ValueError(f"eta requires a nonnegative argument, got {x}")
        return 0.0
    if x == 0.0:
        return 0.0
    return -x * math.log(x)


def _eta_sum(values: np.ndarray) -> float:
    v = values[values > 0]
    if v.size == 0:
        return 0.0
    return float(-np.sum(v * np.log(v)))


def shannon_ext(weights) -> float:
    """Homogeneous Shannon entropy of a finite nonnegative weight sequence."""
    w = np.asarray(weights, dtype=float).reshape(-1)
    if w.size and w.min() < -1e-12:
        raise ValueError(f"weights must be nonnegative, got min {w.min():.3e}")
    w = np.clip(w, 0.0, None)
    value = _eta_sum(w) - eta(float(w.sum()))
    return max(value, 0.0) if value > -1e-9 else value


def binary(p: float) -> float:
    """Binary entropy h2(p) = eta(p) + eta(1 - p) on [0, 1]."""
    if not -1e-12 <= p <= 1 + 1e-12:
        raise ValueError(f"binary entropy requires p in [0, 1], got {p}")
    p = min(max(p, 0.0), 1.0)
    return eta(p) + eta(1.0 - p)


def von_neumann(rho: np.ndarray, clip_tol: float = CLIP_TOL) -> float:
    """Homogeneous von Neumann entropy of a PSD operator (0 for the zero operator)."""
    evals = spectral_decompose(rho, clip_tol).eigenvalues
    if evals.size and evals[-1] < -1e-10:
        raise ValueError(f"operator is not PSD: min eigenvalue {evals[-1]:.3e}")
    evals = np.clip(evals, 0.0, None)
    value = _eta_sum(evals) - eta(float(evals.sum()))
    return max(value, 0.0) if value > -1e-9 else value


def relative_entropy(
    rho: np.ndarray,
    sigma: np.ndarray,
    clip_tol: float = CLIP_TOL,
    support_tol: float = SUPPORT_TOL,
) -> float:
    """Lindblad relative entropy H(rho || sigma) for PSD trace-class operators.

    Computed in the eigenbasis of rho as

        sum_i p_i ln p_i - sum_{ij} p_i |<i_rho|j_sigma>|^2 ln q_j
        + Tr sigma - Tr rho,

    over the clipped spectra.  Returns ``math.inf`` when some rho-eigenvector
    with eigenvalue p_i leaks weight p_i * ||(I - Pi_sigma)|i>||^2 beyond
    ``support_tol`` outside the support of sigma, so that rounding noise never
    masquerades as a structural support violation.
    """
    dr = spectral_decompose(rho, clip_tol)
    ds = spectral_decompose(sigma, clip_tol)
    if dr.eigenvalues.size and dr.eigenvalues[-1] < -1e-10:
        raise ValueError("rho is not PSD")
    if ds.eigenvalues.size and ds.eigenvalues[-1] < -1e-10:
        raise ValueError("sigma is not PSD")

    p = np.clip(dr.eigenvalues, 0.0, None)
    q = np.clip(ds.eigenvalues, 0.0, None)
    tr_rho = float(p.sum())
    tr_sigma = float(q.sum())

    sup_p = p > 0
    sup_q = q > 0
    # |<i_rho | j_sigma>|^2 for supported eigenvectors only.
    overlaps = np.abs(dr.eigenvectors[:, sup_p].conj().T @ ds.eigenvectors[:, sup_q]) ** 2

    if np.any(sup_p):
        residual = p[sup_p] * (1.0 - overlaps.sum(axis=1))
        if np.max(residual) > support_tol:
            return math.inf

    pi = p[sup_p]
    value = float(np.sum(pi * np.log(pi)))
    value -= float((pi[:, None] * overlaps * np.log(q[sup_q])[None, :]).sum())
    value += tr_sigma - tr_rho
    return max(value, 0.0) if value > -1e-9 else value
