"""Kraus-represented channels and parametric Kraus families.

A channel is a finite list of ``d_out x d_in`` Kraus operators, either
trace preserving (sum V†V = I) or trace non-increasing (sum V†V <= I).
A :class:`KrausFamily` is a rule ``k -> V_k`` evaluated under truncation and
models channels whose natural Kraus collection is infinite (the damped
projector channel of :func:`family_example1` is the main such example).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .linalg import (
    as_rng,
    check_pure,
    hermitize,
    matrix_from_json,
    matrix_to_json,
    random_isometry,
    spectral_decompose,
    tensor,
)

TRACE_PRESERVING = "trace_preserving"
TRACE_NON_INCREASING = "trace_non_increasing"

KRAUS_TOL = 1e-8
RANK_TOL = 1e-9


@dataclass
class KrausChannel:
    """Completely positive map given by a finite Kraus operator list."""

    kraus: list
    d_in: int
    d_out: int
    tp_mode: str = TRACE_PRESERVING

    def __post_init__(self):
        if not self.kraus:
            raise ValueError("a channel needs at least one Kraus operator")
        self.kraus = [np.asarray(v, dtype=complex) for v in self.kraus]
        for v in self.kraus:
            if v.shape != (self.d_out, self.d_in):
                raise ValueError(
                    f"Kraus operator shape {v.shape} does not match "
                    f"({self.d_out}, {self.d_in})"
                )
        if self.tp_mode not in (TRACE_PRESERVING, TRACE_NON_INCREASING):
            raise ValueError(f"unknown tp_mode {self.tp_mode!r}")
        gram = self.kraus_gram()
        if self.tp_mode == TRACE_PRESERVING:
            defect = np.max(np.abs(gram - np.eye(self.d_in)))
            if defect > KRAUS_TOL:
                raise ValueError(f"sum V†V deviates from identity by {defect:.3e}")
        else:
            top = np.max(np.linalg.eigvalsh(hermitize(gram, tol=KRAUS_TOL)))
            if top > 1 + KRAUS_TOL:
                raise ValueError(f"sum V†V exceeds identity: max eigenvalue {top:.6f}")

    def kraus_gram(self) -> np.ndarray:
        """sum_k V_k† V_k."""
        g = np.zeros((self.d_in, self.d_in), dtype=complex)
        for v in self.kraus:
            g += v.conj().T @ v
        return g

    def __len__(self):
        return len(self.kraus)


def apply(phi: KrausChannel, rho: np.ndarray) -> np.ndarray:
    """Apply the channel: sum_k V_k rho V_k†."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (phi.d_in, phi.d_in):
        raise ValueError(f"input shape {rho.shape} does not match d_in={phi.d_in}")
    out = np.zeros((phi.d_out, phi.d_out), dtype=complex)
    for v in phi.kraus:
        out += v @ rho @ v.conj().T
    return out


def apply_to_pure(phi: KrausChannel, psi: np.ndarray) -> np.ndarray:
    """Channel output on |psi><psi| without forming the input projector."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    cols = np.column_stack([v @ psi for v in phi.kraus])
    return cols @ cols.conj().T


CHOI_CONVENTION = "unnormalized sum_ij Phi(|i><j|) x |i><j|, output factor first"


@dataclass
class ChoiMatrix:
    matrix: np.ndarray
    d_in: int
    d_out: int
    convention: str = CHOI_CONVENTION


def choi(phi: KrausChannel) -> ChoiMatrix:
    """Choi matrix (Phi x id) applied to the unnormalized maximally entangled operator.

    With row-major tensor indexing the Choi is simply sum_k vec(V_k) vec(V_k)†,
    vec taken row-major, so Tr(Choi) = d_in for a trace-preserving channel.
    """
    vecs = np.column_stack([v.reshape(-1) for v in phi.kraus])
    return ChoiMatrix(hermitize(vecs @ vecs.conj().T, tol=np.inf), phi.d_in, phi.d_out)


def choi_rank(phi: KrausChannel, rank_tol: float = RANK_TOL) -> int:
    """Number of Choi eigenvalues above rank_tol * lambda_max."""
    evals = np.linalg.eigvalsh(choi(phi).matrix)
    top = evals[-1]
    if top <= 0:
        return 0
    return int(np.count_nonzero(evals > rank_tol * top))


def complementary(phi: KrausChannel) -> KrausChannel:
    """Complementary channel to the environment of the Stinespring dilation.

    The environment dimension equals the number of supplied Kraus operators m
    and <k| out |j> = Tr(V_k rho V_j†).  Realized through Kraus operators
    W_i with <k| W_i |x> = <b_i| V_k |x> over the output basis {b_i}.
    """
    m = len(phi.kraus)
    stacked = np.stack(phi.kraus)  # (m, d_out, d_in)
    ws = [stacked[:, i, :] for i in range(phi.d_out)]
    return KrausChannel(ws, d_in=phi.d_in, d_out=m, tp_mode=phi.tp_mode)


def compose(psi: KrausChannel, phi: KrausChannel) -> KrausChannel:
    """psi after phi, Kraus set {W_j V_k}."""
    if phi.d_out != psi.d_in:
        raise ValueError(f"cannot compose: inner dims {phi.d_out} != {psi.d_in}")
    ops = [w @ v for w in psi.kraus for v in phi.kraus]
    mode = (
        TRACE_PRESERVING
        if phi.tp_mode == psi.tp_mode == TRACE_PRESERVING
        else TRACE_NON_INCREASING
    )
    return KrausChannel(ops, d_in=phi.d_in, d_out=psi.d_out, tp_mode=mode)


def tensor_channels(phi: KrausChannel, psi: KrausChannel) -> KrausChannel:
    """Tensor product channel with Kraus set {V_k x W_j}."""
    ops = [tensor(v, w) for v in phi.kraus for w in psi.kraus]
    mode = (
        TRACE_PRESERVING
        if phi.tp_mode == psi.tp_mode == TRACE_PRESERVING
        else TRACE_NON_INCREASING
    )
    return KrausChannel(
        ops, d_in=phi.d_in * psi.d_in, d_out=phi.d_out * psi.d_out, tp_mode=mode
    )


def mix(channels, weights) -> KrausChannel:
    """Convex mixture by Kraus-set union with sqrt(weight) scaling."""
    channels = list(channels)
    w = np.asarray(weights, dtype=float)
    if len(channels) != w.size or not channels:
        raise ValueError("need one weight per channel")
    if w.min() < 0 or abs(w.sum() - 1.0) > 1e-10:
        raise ValueError(f"weights must form a probability vector, got sum {w.sum()!r}")
    d_in, d_out = channels[0].d_in, channels[0].d_out
    for ch in channels:
        if (ch.d_in, ch.d_out) != (d_in, d_out):
            raise ValueError("all mixed channels must share input/output dimensions")
    ops = []
    for ch, wk in zip(channels, w):
        ops.extend(np.sqrt(wk) * v for v in ch.kraus)
    mode = (
        TRACE_PRESERVING
        if all(ch.tp_mode == TRACE_PRESERVING for ch in channels)
        else TRACE_NON_INCREASING
    )
    return KrausChannel(ops, d_in=d_in, d_out=d_out, tp_mode=mode)


# ---------------------------------------------------------------------------
# Named constructors


def make_identity(dim: int) -> KrausChannel:
    return KrausChannel([np.eye(dim, dtype=complex)], d_in=dim, d_out=dim)


def make_completely_depolarizing(sigma: np.ndarray, d_in: int) -> KrausChannel:
    """Constant-output channel rho -> Tr(rho) * sigma for a unit-trace target."""
    sigma = hermitize(sigma)
    tr = float(np.real(np.trace(sigma)))
    if abs(tr - 1.0) > 1e-9:
        raise ValueError("depolarizing target must have unit trace")
    dec = spectral_decompose(sigma)
    ops = []
    for a in range(dec.rank):
        s = dec.eigenvalues[a]
        if s <= 0:
            continue
        va = dec.eigenvectors[:, a]
        for i in range(d_in):
            op = np.zeros((sigma.shape[0], d_in), dtype=complex)
            op[:, i] = np.sqrt(s) * va
            ops.append(op)
    return KrausChannel(ops, d_in=d_in, d_out=sigma.shape[0])


def make_pinching(dim: int, blocks) -> KrausChannel:
    """Pinching onto a partition of the computational basis indices."""
    seen = sorted(i for b in blocks for i in b)
    if seen != list(range(dim)):
        raise ValueError("blocks must partition range(dim)")
    ops = []
    for b in blocks:
        p = np.zeros((dim, dim), dtype=complex)
        for i in b:
            p[i, i] = 1.0
        ops.append(p)
    return KrausChannel(ops, d_in=dim, d_out=dim)


def _example1_weights(alpha: float, n: int) -> np.ndarray:
    """Diagonal Kraus weights of the damped projector channel, rows = terms.

    Coordinate i (0-based) carries damping c_{i+1} = alpha / ln(i+1) for
    i >= 1; term 1 is sqrt(I - sum_k c_k P_k), term k >= 2 is sqrt(c_k) P_k.
    """
    if not 0.0 <= alpha <= math.log(2.0) + 1e-12:
        raise ValueError(f"alpha must lie in [0, ln 2], got {alpha}")
    if n < 2:
        raise ValueError("the damped projector channel needs dimension >= 2")
    k = np.arange(2, n + 1)
    c = np.zeros(n)
    c[1:] = alpha / np.log(k)
    w = np.zeros((n, n))
    w[0] = np.sqrt(np.clip(1.0 - c, 0.0, None))
    w[np.arange(1, n), np.arange(1, n)] = np.sqrt(c[1:])
    return w


def make_example1(alpha: float, n: int) -> KrausChannel:
    """Damped projector channel sum_k c_k P_k rho P_k with c_k = alpha / ln k.

    Rank-one projectors P_k = |k><k| in the computational basis; the leading
    Kraus operator is sqrt(I - sum_{k>=2} c_k P_k).  Trace preserving for any
    alpha in [0, ln 2].  Materializes n dense n x n operators, so large
    truncations should go through :func:`family_example1` instead.
    """
    w = _example1_weights(alpha, n)
    ops = [np.diag(w[0].astype(complex))]
    for i in range(1, n):
        if w[i, i] > 0:
            op = np.zeros((n, n), dtype=complex)
            op[i, i] = w[i, i]
            ops.append(op)
    return KrausChannel(ops, d_in=n, d_out=n)


def make_block_pair(p_proj: np.ndarray, sigma: np.ndarray, varsigma: np.ndarray):
    """Pair of block channels built from a projector P and two pure states.

    Phi(rho) = P rho P + Tr((I-P) rho) |sigma><sigma| and
    Psi(rho) = Tr(P rho) |varsigma><varsigma| + (I-P) rho (I-P), with sigma
    supported in ran(I-P) and varsigma in ran(P).  Either composition of the
    two collapses every input to the fixed plane spanned by the two pure
    states: (Psi o Phi)(rho) = Tr(P rho) varsigma + Tr((I-P) rho) sigma.
    """
    p = hermitize(p_proj)
    dim = p.shape[0]
    if np.max(np.abs(p @ p - p)) > 1e-9:
        raise ValueError("P is not a projector")
    q = np.eye(dim) - p
    s = check_pure(sigma)
    v = check_pure(varsigma)
    if np.linalg.norm(p @ s) > 1e-9:
        raise ValueError("sigma must be supported in ran(I - P)")
    if np.linalg.norm(q @ v) > 1e-9:
        raise ValueError("varsigma must be supported in ran(P)")

    def basis_of(proj):
        dec = spectral_decompose(proj)
        return [dec.eigenvectors[:, i] for i in range(dim) if dec.eigenvalues[i] > 0.5]

    phi_ops = [p] + [np.outer(s, f.conj()) for f in basis_of(q)]
    psi_ops = [q] + [np.outer(v, e.conj()) for e in basis_of(p)]
    phi = KrausChannel(phi_ops, d_in=dim, d_out=dim)
    psi = KrausChannel(psi_ops, d_in=dim, d_out=dim)
    return phi, psi


def random_channel(
    d_in: int, d_out: int, choi_rank: int, trace_preserving: bool, seed
) -> KrausChannel:
    """Random channel from a Haar-like isometry split into choi_rank blocks.

    The trace-non-increasing variant scales the whole Kraus set by a random
    factor in (0, 1).  Deterministic for a fixed seed.
    """
    if choi_rank < 1 or choi_rank > d_in * d_out:
        raise ValueError(f"choi_rank must lie in [1, {d_in * d_out}]")
    if d_out * choi_rank < d_in:
        raise ValueError(
            f"no isometry exists: d_out*choi_rank = {d_out * choi_rank} < d_in = {d_in}"
        )
    rng = as_rng(seed)
    q = random_isometry(d_out * choi_rank, d_in, rng)
    ops = [q[k * d_out : (k + 1) * d_out, :] for k in range(choi_rank)]
    if trace_preserving:
        return KrausChannel(ops, d_in=d_in, d_out=d_out, tp_mode=TRACE_PRESERVING)
    scale = math.sqrt(max(rng.uniform(), 1e-12))
    return KrausChannel(
        [scale * v for v in ops], d_in=d_in, d_out=d_out, tp_mode=TRACE_NON_INCREASING
    )


# ---------------------------------------------------------------------------
# Parametric Kraus families


@dataclass(frozen=True)
class KrausFamily:
    """Generator k -> V_k for a countable Kraus collection, evaluated at truncation N.

    ``term(k, N)`` returns the k-th Kraus operator (1-based) at truncation N;
    the truncated collection is always interpreted as a trace-non-increasing
    operation (the dropped tail shows up as a truncation deficit).
    ``diagonal_at`` is set when every V_k is diagonal and returns the
    (n_terms x d_in) matrix of diagonals, which unlocks the cheap large-N
    paths in :mod:`qentropy.pce`.
    """

    name: str
    params: dict
    dims_at: Callable[[int], tuple]
    n_terms_at: Callable[[int], int]
    term: Callable[[int, int], np.ndarray]
    diagonal_at: Optional[Callable[[int], np.ndarray]] = None
    norm_sq_tail: Optional[Callable[[int], float]] = None
    known_class: Optional[str] = None

    def kraus_at(self, n: int) -> list:
        return [self.term(k, n) for k in range(1, self.n_terms_at(n) + 1)]

    def channel_at(self, n: int) -> KrausChannel:
        d_in, d_out = self.dims_at(n)
        return KrausChannel(
            self.kraus_at(n), d_in=d_in, d_out=d_out, tp_mode=TRACE_NON_INCREASING
        )

    def truncation_deficit(self, n: int) -> float:
        """max-norm of I - sum_{k<=N} V_k† V_k."""
        d_in, _ = self.dims_at(n)
        if self.diagonal_at is not None:
            g = np.sum(np.abs(self.diagonal_at(n)) ** 2, axis=0)
            return float(np.max(np.abs(1.0 - g)))
        g = np.zeros((d_in, d_in), dtype=complex)
        for v in self.kraus_at(n):
            g += v.conj().T @ v
        return float(np.max(np.abs(np.eye(d_in) - g)))


def family_example1(alpha: float) -> KrausFamily:
    """Damped projector family; PCE by the Kraus criterion with h_k = 2 ln k."""

    def term(k, n):
        if k == 1:
            return np.diag(_example1_weights(alpha, n)[0].astype(complex))
        op = np.zeros((n, n), dtype=complex)
        op[k - 1, k - 1] = math.sqrt(alpha / math.log(k))
        return op

    return KrausFamily(
        name="example1",
        params={"alpha": float(alpha)},
        dims_at=lambda n: (n, n),
        n_terms_at=lambda n: n,
        term=term,
        diagonal_at=lambda n: _example1_weights(alpha, n),
        norm_sq_tail=lambda n: math.inf,
    )


def family_identity() -> KrausFamily:
    """Identity channel at each truncated dimension (class B built-in)."""
    return KrausFamily(
        name="identity",
        params={},
        dims_at=lambda n: (n, n),
        n_terms_at=lambda n: 1,
        term=lambda k, n: np.eye(n, dtype=complex),
        diagonal_at=lambda n: np.ones((1, n)),
        norm_sq_tail=lambda n: 0.0,
        known_class="B",
    )


def family_depolarizing(target_dim: int) -> KrausFamily:
    """Completely depolarizing to the maximally mixed state on target_dim (class A)."""
    d = int(target_dim)

    def term(k, n):
        i, a = divmod(k - 1, d)
        op = np.zeros((d, n), dtype=complex)
        op[a, i] = 1.0 / math.sqrt(d)
        return op

    return KrausFamily(
        name="depolarizing",
        params={"target_dim": d},
        dims_at=lambda n: (n, d),
        n_terms_at=lambda n: n * d,
        term=term,
        norm_sq_tail=lambda n: math.inf,
        known_class="A",
    )


def family_mixture(p: float) -> KrausFamily:
    """(1-p) identity + p completely-depolarizing-to-pure (class C built-in)."""
    if not 0 < p < 1:
        raise ValueError("mixture weight must lie strictly in (0, 1)")

    def term(k, n):
        if k == 1:
            return math.sqrt(1 - p) * np.eye(n, dtype=complex)
        op = np.zeros((n, n), dtype=complex)
        op[0, k - 2] = math.sqrt(p)
        return op

    return KrausFamily(
        name="mixture",
        params={"p": float(p)},
        dims_at=lambda n: (n, n),
        n_terms_at=lambda n: n + 1,
        term=term,
        norm_sq_tail=lambda n: math.inf,
        known_class="C",
    )


def family_geometric(dim: int) -> KrausFamily:
    """Trace-non-increasing family with ||V_k||^2 = 2^-k on a fixed dimension."""
    d = int(dim)
    return KrausFamily(
        name="geometric",
        params={"dim": d},
        dims_at=lambda n: (d, d),
        n_terms_at=lambda n: n,
        term=lambda k, n: 2.0 ** (-k / 2) * np.eye(d, dtype=complex),
        diagonal_at=lambda n: np.sqrt(2.0 ** -np.arange(1, n + 1))[:, None]
        * np.ones((n, d)),
        norm_sq_tail=lambda n: 2.0 ** (-n),
    )


def family_from_channel(ch: KrausChannel, name: str = "channel") -> KrausFamily:
    """Wrap a finite channel as a truncation-independent family."""
    m = len(ch.kraus)
    return KrausFamily(
        name=name,
        params={"n_kraus": m},
        dims_at=lambda n: (ch.d_in, ch.d_out),
        n_terms_at=lambda n: m,
        term=lambda k, n: ch.kraus[k - 1],
        norm_sq_tail=lambda n: 0.0,
    )


_FAMILY_BUILDERS = {
    "example1": lambda spec: family_example1(float(spec["alpha"])),
    "identity": lambda spec: family_identity(),
    "depolarizing": lambda spec: family_depolarizing(int(spec.get("target_dim", 2))),
    "mixture": lambda spec: family_mixture(float(spec.get("p", 0.5))),
    "geometric": lambda spec: family_geometric(int(spec.get("dim", 2))),
}


def family_from_json(spec: dict) -> KrausFamily:
    """Build a named family from a parameter object like {"family": "example1", "alpha": 0.5}."""
    try:
        name = spec["family"]
    except (KeyError, TypeError) as exc:
        raise ValueError("family spec needs a 'family' key") from exc
    if name not in _FAMILY_BUILDERS:
        raise ValueError(f"unknown family {name!r}; known: {sorted(_FAMILY_BUILDERS)}")
    return _FAMILY_BUILDERS[name](spec)


# ---------------------------------------------------------------------------
# JSON channel format


def channel_to_json(phi: KrausChannel) -> dict:
    return {
        "d_in": phi.d_in,
        "d_out": phi.d_out,
        "tp_mode": phi.tp_mode,
        "kraus": [matrix_to_json(v) for v in phi.kraus],
    }


def channel_from_json(obj: dict) -> KrausChannel:
    try:
        return KrausChannel(
            [matrix_from_json(m) for m in obj["kraus"]],
            d_in=int(obj["d_in"]),
            d_out=int(obj["d_out"]),
            tp_mode=obj.get("tp_mode", TRACE_PRESERVING),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"not a channel object: {exc}") from exc
