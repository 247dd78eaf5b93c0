"""Projected-gradient searches on the unit sphere and the complex Stiefel manifold.

Both searches are multi-start with per-start seeds derived as ``seed + index``
and a deterministic max/min reduction (lowest start index wins ties), so a
fixed ``(seed, n_starts)`` pair always yields the same result regardless of
how the starts would be scheduled.

Objectives report Wirtinger gradients d(value)/d(conj(x)); the real ascent
direction is twice that, which the backtracking line search absorbs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import as_rng, random_pure

GRAD_TOL = 1e-7


@dataclass
class SearchResult:
    value: float
    point: np.ndarray
    start_index: int
    iterations: int
    start_values: list


def numeric_sphere_grad(value_fn, phi: np.ndarray, h: float = 1e-6) -> np.ndarray:
    """Central-difference Wirtinger gradient on the ambient space."""
    grad = np.zeros_like(phi)
    for i in range(phi.size):
        for unit in (1.0, 1.0j):
            e = np.zeros_like(phi)
            e[i] = unit * h
            diff = (value_fn(phi + e) - value_fn(phi - e)) / (2 * h)
            grad[i] += 0.5 * diff * unit
    return grad


def _sphere_ascent(value_and_grad, phi0, iters, grad_tol):
    phi = phi0 / np.linalg.norm(phi0)
    value, grad = value_and_grad(phi)
    step = 1.0
    used = 0
    prev_phi = prev_tangent = None
    for it in range(iters):
        used = it + 1
        tangent = grad - (phi.conj() @ grad) * phi
        gnorm = np.linalg.norm(tangent)
        if not np.isfinite(gnorm) or gnorm <= grad_tol:
            break
        # Barzilai-Borwein initial step; backtracking keeps it safe.
        if prev_phi is not None:
            s = phi - prev_phi
            y = prev_tangent - tangent  # ascent: curvature pairs with -grad
            sy = float(np.real(np.sum(s.conj() * y)))
            if sy > 1e-18:
                step = min(max(float(np.real(np.sum(s.conj() * s))) / sy, 1e-10), 1e3)
        prev_phi, prev_tangent = phi, tangent
        improved = False
        while step > 1e-14:
            trial = phi + step * tangent
            trial /= np.linalg.norm(trial)
            tv, tg = value_and_grad(trial)
            if tv > value + 1e-4 * step * gnorm**2:
                phi, value, grad = trial, tv, tg
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return value, phi, used


def maximize_on_sphere(
    value_and_grad,
    dim: int,
    n_starts: int,
    seed,
    iters: int = 200,
    grad_tol: float = GRAD_TOL,
    extra_starts=(),
) -> SearchResult:
    """Multi-start projected gradient ascent over unit vectors.

    ``extra_starts`` (e.g. warm starts carried over from a smaller truncation)
    are ascended after the seeded random starts and share the same
    deterministic reduction.
    """
    base = int(seed)
    starts = [random_pure(dim, base + i) for i in range(n_starts)]
    starts.extend(np.asarray(v, dtype=complex).reshape(-1) for v in extra_starts)
    if not starts:
        raise ValueError("need at least one start")
    best = None
    values = []
    for idx, phi0 in enumerate(starts):
        value, phi, used = _sphere_ascent(value_and_grad, phi0, iters, grad_tol)
        values.append(float(value))
        if best is None or value > best.value:
            best = SearchResult(float(value), phi, idx, used, [])
    best.start_values = values
    return best


def stiefel_qf(m: np.ndarray) -> np.ndarray:
    """Thin-QR retraction with the R-diagonal gauge fixed for reproducibility."""
    q, r = np.linalg.qr(m)
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return q * (d.conjugate() / np.abs(d))


def _stiefel_tangent(u, grad):
    sym = u.conj().T @ grad
    return grad - u @ ((sym + sym.conj().T) / 2)


def _stiefel_descent(value_and_grad, u0, iters, grad_tol):
    u = stiefel_qf(u0)
    value, grad = value_and_grad(u)
    step = 1.0
    used = 0
    prev_u = prev_tangent = None
    for it in range(iters):
        used = it + 1
        tangent = _stiefel_tangent(u, grad)
        gnorm = np.linalg.norm(tangent)
        if not np.isfinite(gnorm) or gnorm <= grad_tol:
            break
        # Barzilai-Borwein initial step; backtracking keeps it safe.
        if prev_u is not None:
            s = u - prev_u
            y = tangent - prev_tangent
            sy = float(np.real(np.sum(s.conj() * y)))
            if sy > 1e-18:
                step = min(max(float(np.real(np.sum(s.conj() * s))) / sy, 1e-10), 1e3)
        prev_u, prev_tangent = u, tangent
        improved = False
        while step > 1e-14:
            trial = stiefel_qf(u - step * tangent)
            tv, tg = value_and_grad(trial)
            if tv < value - 1e-4 * step * gnorm**2:
                u, value, grad = trial, tv, tg
                improved = True
                break
            step *= 0.5
        if not improved:
            break
    return value, u, used


def minimize_on_stiefel(
    value_and_grad,
    shape,
    n_starts: int,
    seed,
    iters: int = 64,
    grad_tol: float = GRAD_TOL,
    extra_starts=(),
) -> SearchResult:
    """Multi-start projected gradient descent over isometries of the given shape.

    Canonical starts supplied through ``extra_starts`` run first so that
    structurally exact optima (singleton or spectral ensembles) are never lost
    to random initialization; they take part in the same deterministic
    reduction.
    """
    rows, cols = shape
    if rows < cols:
        raise ValueError(f"no isometry with shape {shape}")
    starts = [np.asarray(u, dtype=complex) for u in extra_starts]
    rng_base = int(seed)
    for i in range(n_starts):
        rng = as_rng(rng_base + i)
        g = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
        starts.append(g)
    best = None
    values = []
    for idx, u0 in enumerate(starts):
        value, u, used = _stiefel_descent(value_and_grad, u0, iters, grad_tol)
        values.append(float(value))
        if best is None or value < best.value:
            best = SearchResult(float(value), u, idx, used, [])
    best.start_values = values
    return best
