"""Ensemble optimizations over decompositions of a state.

Every decomposition of rho into m members of rank <= k is parametrized by an
isometry U on the Stiefel manifold St(m*k, rank rho): unnormalized components
are psi_{ia} = sum_j U_{(ia),j} sqrt(p_j) |e_j> over the eigensystem of rho,
and member i collects its k components.  The average is then rho by
construction, so rank and average constraints are structural, never penalties.

All optima are reported as witnessed bounds with an explicit direction tag
(``upper_bound_of_inf`` or ``lower_bound_of_sup``); the artifact never claims
to have found the optimum, only the best ensemble seen.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import entropy as ent
from .channels import KrausChannel, apply
from .linalg import (
    check_density,
    hermitize,
    matrix_to_json,
    partial_trace,
    spectral_decompose,
)
from .optim import minimize_on_stiefel, stiefel_qf

_WEIGHT_FLOOR = 1e-14
_EIG_FLOOR = 1e-18

UPPER_BOUND_OF_INF = "upper_bound_of_inf"
LOWER_BOUND_OF_SUP = "lower_bound_of_sup"


@dataclass
class Ensemble:
    """Finite ensemble {(weight_i, rho_i)} of density operators of one dimension."""

    weights: np.ndarray
    members: list

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        self.members = [np.asarray(m, dtype=complex) for m in self.members]
        if self.weights.size != len(self.members) or not self.members:
            raise ValueError("need one weight per member")
        if self.weights.min() < -1e-12:
            raise ValueError("ensemble weights must be nonnegative")
        if abs(self.weights.sum() - 1.0) > 1e-10:
            raise ValueError(f"weights must sum to 1, got {self.weights.sum()!r}")
        dim = self.members[0].shape[0]
        for m in self.members:
            if m.shape != (dim, dim):
                raise ValueError("ensemble members must share a common dimension")

    @property
    def dim(self) -> int:
        return self.members[0].shape[0]

    def average(self) -> np.ndarray:
        avg = np.zeros((self.dim, self.dim), dtype=complex)
        for w, m in zip(self.weights, self.members):
            avg += w * m
        return avg

    def to_json(self) -> dict:
        return {
            "weights": [float(w) for w in self.weights],
            "members": [matrix_to_json(m) for m in self.members],
        }


def spectral_ensemble(rho: np.ndarray) -> Ensemble:
    """Eigen-decomposition of a unit-trace state as a pure-state ensemble."""
    dec = spectral_decompose(check_density(rho))
    weights, members = [], []
    for lam, i in zip(dec.eigenvalues, range(dec.rank)):
        v = dec.eigenvectors[:, i]
        weights.append(lam)
        members.append(np.outer(v, v.conj()))
    return Ensemble(np.array(weights) / np.sum(weights), members)


def ensemble_from_isometry(rho: np.ndarray, m: int, params: np.ndarray) -> Ensemble:
    """Pure-state decomposition of rho from an m x rank parameter matrix.

    ``params`` is orthonormalized column-wise (thin QR); the resulting
    isometry U mixes the scaled eigenvectors sqrt(p_j)|e_j> into m pure
    components whose average is exactly rho.
    """
    rho = check_density(rho)
    if abs(np.real(np.trace(rho)) - 1.0) > 1e-9:
        raise ValueError("rho must have unit trace")
    dec = spectral_decompose(rho)
    r = dec.rank
    if m < r:
        raise ValueError(f"need at least rank(rho) = {r} members, got m = {m}")
    params = np.asarray(params, dtype=complex)
    if params.shape != (m, r):
        raise ValueError(f"params must have shape ({m}, {r}), got {params.shape}")
    u = stiefel_qf(params)
    a = dec.eigenvectors[:, :r] * np.sqrt(np.clip(dec.eigenvalues[:r], 0, None))
    comps = (a @ u.T).T  # rows are unnormalized pure components
    weights = np.linalg.norm(comps, axis=1) ** 2
    members = []
    kept = []
    for w, psi in zip(weights, comps):
        if w < _WEIGHT_FLOOR:
            continue
        kept.append(w)
        members.append(np.outer(psi, psi.conj()) / w)
    return Ensemble(np.array(kept), members)


@dataclass
class RoofResult:
    """Witnessed value of an ensemble optimization with provenance."""

    value: float
    ensemble: Ensemble
    direction: str
    n_starts: int
    seed: int
    iterations: int

    def to_json(self) -> dict:
        return {
            "value": float(self.value),
            "direction": self.direction,
            "n_starts": self.n_starts,
            "seed": self.seed,
            "iterations": self.iterations,
            "ensemble": self.ensemble.to_json(),
        }


# ---------------------------------------------------------------------------
# Batched homogeneous entropy with its matrix derivative


def _entropy_batch(omegas: np.ndarray):
    """H_hom and D = ln(Tr w) I - ln w for a stack of PSD matrices.

    D is the Frechet derivative matrix: d H_hom = Tr[D dw].  Rows with
    negligible total weight contribute zero value and zero derivative.
    """
    omegas = (omegas + omegas.conj().transpose(0, 2, 1)) / 2
    mu, w = np.linalg.eigh(omegas)
    mu = np.clip(mu, 0.0, None)
    totals = mu.sum(axis=1)
    safe = totals > 1e-15
    floor = np.maximum(totals, 1e-300)[:, None] * _EIG_FLOOR
    log_mu = np.log(np.maximum(mu, floor))
    h = -np.sum(np.where(mu > 0, mu * log_mu, 0.0), axis=1)
    h = np.where(safe, h + totals * np.log(np.maximum(totals, 1e-300)), 0.0)
    coeff = np.where(
        safe[:, None], np.log(np.maximum(totals, 1e-300))[:, None] - log_mu, 0.0
    )
    d = (w * coeff[:, None, :]) @ w.conj().transpose(0, 2, 1)
    return h, d


class _Functional:
    """Per-member functional f_hom(M(rho_i)) with its adjoint for gradients."""

    def forward(self, rhos):
        return rhos

    def backward(self, dmats, comps):
        # gradient wrt conj(psi_{ia}) is M†(D_i) psi_{ia}
        return np.einsum("mde,mae->mad", dmats, comps)

    def member_values(self, rhos):
        h, d = _entropy_batch(self.forward(rhos))
        return h, d


class _InputEntropy(_Functional):
    pass


class _ChannelOutput(_Functional):
    def __init__(self, phi: KrausChannel):
        self.kraus = np.stack(phi.kraus)

    def forward(self, rhos):
        k = self.kraus
        return np.einsum("vod,mde,vpe->mop", k, rhos, k.conj(), optimize=True)

    def backward(self, dmats, comps):
        k = self.kraus
        dback = np.einsum("vod,mop,vpe->mde", k.conj(), dmats, k, optimize=True)
        return np.einsum("mde,mae->mad", dback, comps)


class _ReducedEntropy(_Functional):
    def __init__(self, dims):
        self.da, self.db = int(dims[0]), int(dims[1])

    def forward(self, rhos):
        m = rhos.shape[0]
        r5 = rhos.reshape(m, self.da, self.db, self.da, self.db)
        return np.einsum("mabcb->mac", r5)

    def backward(self, dmats, comps):
        m, k, _ = comps.shape
        c4 = comps.reshape(m, k, self.da, self.db)
        g4 = np.einsum("mxa,mkab->mkxb", dmats, c4)
        return g4.reshape(m, k, self.da * self.db)


def _roof_objective(a, m, k, functional, sign, extra_logref=None):
    """Objective U -> (F, Wirtinger gradient) for minimize_on_stiefel.

    ``sign`` = +1 minimizes sum_i f(member_i), -1 minimizes the negative
    (i.e. maximizes).  ``extra_logref`` adds the relative-entropy term
    -Tr(rho_i L) used by the defect functional.
    """

    def value_and_grad(u):
        comps = (a @ u.T).T.reshape(m, k, a.shape[0])
        rhos = np.einsum("mad,mae->mde", comps, comps.conj())
        h, dmats = functional.member_values(rhos)
        if extra_logref is not None:
            # sum_i pi_i H(rho_i || avg) = -sum_i [H_hom(rho_i~) + Tr(rho_i~ ln avg)]
            value = -float(h.sum()) - float(
                np.real(np.einsum("mde,ed->", rhos, extra_logref))
            )
            grad_comps = -functional.backward(dmats, comps) - np.einsum(
                "de,mae->mad", extra_logref, comps
            )
        else:
            value = sign * float(h.sum())
            grad_comps = sign * functional.backward(dmats, comps)
        gpsi = grad_comps.reshape(m * k, a.shape[0])
        grad_u = gpsi @ a.conj()
        return value, grad_u

    return value_and_grad


def _canonical_starts(m, k, r):
    starts = []
    if k >= r:
        u = np.zeros((m * k, r), dtype=complex)
        u[np.arange(r), np.arange(r)] = 1.0  # member 0 carries the whole state
        starts.append(u)
    if m >= r:
        u = np.zeros((m * k, r), dtype=complex)
        u[np.arange(r) * k, np.arange(r)] = 1.0  # spectral ensemble
        starts.append(u)
    return starts


def _decompose_target(rho):
    rho = check_density(rho)
    if abs(np.real(np.trace(rho)) - 1.0) > 1e-9:
        raise ValueError("roof optimizations need a unit-trace input")
    dec = spectral_decompose(rho)
    r = dec.rank
    a = dec.eigenvectors[:, :r] * np.sqrt(np.clip(dec.eigenvalues[:r], 0, None))
    return a, r


def _ensemble_from_u(a, u, m, k):
    comps = (a @ u.T).T.reshape(m, k, a.shape[0])
    rhos = np.einsum("mad,mae->mde", comps, comps.conj())
    weights = np.real(np.trace(rhos, axis1=1, axis2=2))
    kept_w, members = [], []
    for w, x in zip(weights, rhos):
        if w < _WEIGHT_FLOOR:
            continue
        kept_w.append(float(w))
        members.append(hermitize(x / w, tol=np.inf))
    return Ensemble(np.array(kept_w), members)


def _run_roof(rho, k, m, functional, sign, n_starts, seed, iters, extra_logref=None,
              extra_starts=()):
    a, r = _decompose_target(rho)
    if m is None:
        m = rho.shape[0] ** 2
    if k < 1:
        raise ValueError("member rank bound k must be at least 1")
    if m * k < r:
        raise ValueError(f"m*k = {m * k} cannot reach rank {r}")
    objective = _roof_objective(a, m, k, functional, sign, extra_logref)
    starts = list(extra_starts) + _canonical_starts(m, k, r)
    best = minimize_on_stiefel(
        objective, (m * k, r), n_starts, seed, iters=iters, extra_starts=starts
    )
    ensemble = _ensemble_from_u(a, best.point, m, k)
    return ensemble, best


def ensemble_average_output_entropy(phi: KrausChannel, ens: Ensemble) -> float:
    return float(
        sum(w * ent.von_neumann(apply(phi, rho)) for w, rho in zip(ens.weights, ens.members))
    )


def ensemble_average_entropy(ens: Ensemble) -> float:
    return float(sum(w * ent.von_neumann(rho) for w, rho in zip(ens.weights, ens.members)))


def ensemble_average_reduced_entropy(ens: Ensemble, dims) -> float:
    return float(
        sum(
            w * ent.von_neumann(partial_trace(rho, dims, [0]))
            for w, rho in zip(ens.weights, ens.members)
        )
    )


def ensemble_average_relative_entropy(ens: Ensemble, sigma: np.ndarray) -> float:
    return float(
        sum(w * ent.relative_entropy(rho, sigma) for w, rho in zip(ens.weights, ens.members))
    )


def sigma_co_output_entropy(
    phi: KrausChannel,
    rho: np.ndarray,
    m: int = None,
    n_starts: int = 32,
    seed: int = 0,
    iters: int = 64,
) -> RoofResult:
    """sigma-convex-hull value of the output entropy at rho (pure-state ensembles).

    Minimizes sum_i pi_i H_Phi(rho_i) over pure decompositions of size <= m;
    the reported value is an upper bound of the infimum, achieved by the
    witness ensemble.
    """
    if rho.shape[0] != phi.d_in:
        raise ValueError("state dimension does not match the channel input")
    ensemble, best = _run_roof(rho, 1, m, _ChannelOutput(phi), +1, n_starts, seed, iters)
    value = ensemble_average_output_entropy(phi, ensemble)
    return RoofResult(value, ensemble, UPPER_BOUND_OF_INF, n_starts, seed, best.iterations)


def k_approximator(
    rho: np.ndarray,
    k: int,
    m: int = None,
    n_starts: int = 32,
    seed: int = 0,
    iters: int = 64,
    functional: str = "input_entropy",
    phi: KrausChannel = None,
    extra_starts=(),
) -> RoofResult:
    """k-th approximator: sup of the ensemble average of f over rank-<=k ensembles.

    ``functional`` is "input_entropy" (f = H) or "output_entropy" (f = H_Phi,
    requires ``phi``).  Members are built from <= k pure components of a
    partitioned isometry, so the rank constraint holds by construction.  The
    singleton ensemble is always among the starts when k >= rank(rho), making
    the value exact in that regime.
    """
    if functional == "input_entropy":
        func = _InputEntropy()
    elif functional == "output_entropy":
        if phi is None:
            raise ValueError("output_entropy approximator needs a channel")
        func = _ChannelOutput(phi)
    else:
        raise ValueError(f"unknown functional {functional!r}")
    ensemble, best = _run_roof(
        rho, k, m, func, -1, n_starts, seed, iters, extra_starts=extra_starts
    )
    if functional == "input_entropy":
        value = ensemble_average_entropy(ensemble)
    else:
        value = ensemble_average_output_entropy(phi, ensemble)
    return RoofResult(value, ensemble, LOWER_BOUND_OF_SUP, n_starts, seed, best.iterations)


def delta_k(
    rho: np.ndarray,
    k: int,
    m: int = None,
    n_starts: int = 32,
    seed: int = 0,
    iters: int = 64,
) -> RoofResult:
    """Approximation defect: inf of sum_i pi_i H(rho_i || rho) over rank-<=k ensembles.

    The reported value is re-evaluated through the relative entropy on the
    witness ensemble, so it cross-checks the identity with H(rho) - Hhat_k.
    """
    rho = check_density(rho)
    dec = spectral_decompose(rho)
    v = dec.eigenvectors[:, : dec.rank]
    lam = np.clip(dec.eigenvalues[: dec.rank], 1e-300, None)
    logref = (v * np.log(lam)) @ v.conj().T  # ln rho on its support
    ensemble, best = _run_roof(
        rho, k, m, _InputEntropy(), +1, n_starts, seed, iters, extra_logref=logref
    )
    value = ensemble_average_relative_entropy(ensemble, rho)
    return RoofResult(value, ensemble, UPPER_BOUND_OF_INF, n_starts, seed, best.iterations)


def eof(
    rho_ab: np.ndarray,
    split,
    m: int = None,
    n_starts: int = 32,
    seed: int = 0,
    iters: int = 64,
) -> RoofResult:
    """Entanglement of formation: convex roof of the reduced entropy.

    Minimizes sum_i pi_i H(Tr_B rho_i) over pure-state decompositions of the
    bipartite state; exact (= entanglement entropy) for pure inputs, where the
    decomposition is forced.
    """
    da, db = int(split[0]), int(split[1])
    if da * db != rho_ab.shape[0]:
        raise ValueError(f"split {split} inconsistent with dimension {rho_ab.shape[0]}")
    ensemble, best = _run_roof(
        rho_ab, 1, m, _ReducedEntropy((da, db)), +1, n_starts, seed, iters
    )
    value = ensemble_average_reduced_entropy(ensemble, (da, db))
    return RoofResult(value, ensemble, UPPER_BOUND_OF_INF, n_starts, seed, best.iterations)


def ensemblewise_monotonicity_gap(phi: KrausChannel, ens: Ensemble):
    """(lhs, rhs) of the ensemble-wise relative entropy contraction.

    lhs = sum_i pi_i H(Phi(rho_i) || Phi(avg)), rhs = sum_i pi_i H(rho_i || avg);
    lhs <= rhs for every CP trace-non-increasing channel, which is the
    ensemble-wise route to Delta_k(H_Phi) <= Delta_k(H).
    """
    avg = ens.average()
    if abs(np.real(np.trace(avg)) - 1.0) > 1e-9:
        raise ValueError("ensemble average must have unit trace")
    rhs = ensemble_average_relative_entropy(ens, avg)
    out_avg = apply(phi, avg)
    lhs = float(
        sum(
            w * ent.relative_entropy(apply(phi, rho), out_avg)
            for w, rho in zip(ens.weights, ens.members)
        )
    )
    return lhs, rhs
