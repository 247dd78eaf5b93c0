"""Dense complex linear algebra and state-space primitives.

Everything here works on plain ``numpy`` arrays: operators are square
complex matrices, pure states are 1-D unit vectors.  Density operators are
PSD matrices whose trace is *not* required to be 1 (the entropy functionals
in :mod:`qentropy.entropy` are homogeneous, so subnormalized operators are
first-class citizens).

All randomness is explicit: generators take a seed (or a
``numpy.random.Generator``) and are deterministic for a fixed seed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

HERMIT_TOL = 1e-10
PSD_TOL = 1e-10
CLIP_TOL = 1e-12


def as_rng(seed) -> np.random.Generator:
    """Return ``seed`` itself if it is already a Generator, else seed a new one."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def hermitize(a: np.ndarray, tol: float = HERMIT_TOL) -> np.ndarray:
    """Return (a + a†)/2 after checking the Hermitian defect.

    Defects up to ``tol`` are treated as numerical noise and silently
    symmetrized; anything larger is a caller bug and raises.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    defect = np.max(np.abs(a - a.conj().T)) if a.size else 0.0
    if defect > tol:
        raise ValueError(f"matrix is not Hermitian: defect {defect:.3e} > {tol:.1e}")
    return (a + a.conj().T) / 2


def check_density(rho: np.ndarray, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Validate a density operator (Hermitian, PSD within psd_tol, trace >= 0)."""
    rho = hermitize(rho)
    evals = np.linalg.eigvalsh(rho)
    if evals.size and evals[0] < -psd_tol:
        raise ValueError(f"operator is not PSD: min eigenvalue {evals[0]:.3e}")
    if np.real(np.trace(rho)) < -psd_tol:
        raise ValueError("density operator has negative trace")
    return rho


def check_pure(psi: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Validate a pure state vector (unit Euclidean norm within tol)."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol:
        raise ValueError(f"state vector is not normalized: |norm - 1| = {abs(nrm - 1.0):.3e}")
    return psi


def projector(psi: np.ndarray) -> np.ndarray:
    """Rank-one projector |psi><psi|."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    return np.outer(psi, psi.conj())


@dataclass
class SpectralDecomposition:
    """Eigensystem of a Hermitian operator with small eigenvalues clipped to 0.

    ``eigenvalues`` are sorted in descending order; ``eigenvectors`` holds the
    matching orthonormal columns.  Each eigenvector carries a deterministic
    phase (first component above threshold made real positive) so repeated
    runs are byte-identical.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    clip_tol: float

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T

    @property
    def rank(self) -> int:
        return int(np.count_nonzero(self.eigenvalues))


def _fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Make the first significant component of each column real positive."""
    v = vectors.copy()
    for j in range(v.shape[1]):
        col = v[:, j]
        mags = np.abs(col)
        top = mags.max()
        if top == 0.0:
            continue
        i0 = int(np.argmax(mags > 1e-8 * top))
        pivot = col[i0]
        if pivot != 0:
            v[:, j] = col * (pivot.conjugate() / abs(pivot))
    return v


def spectral_decompose(a: np.ndarray, clip_tol: float = CLIP_TOL) -> SpectralDecomposition:
    """Spectral decomposition of a Hermitian matrix.

    Eigenvalues with magnitude below ``clip_tol * max|eigenvalue|`` are
    replaced by exactly 0.  The clipped operator is never renormalized.
    """
    a = hermitize(a)
    evals, evecs = np.linalg.eigh(a)
    evals = evals[::-1].copy()
    evecs = evecs[:, ::-1].copy()
    top = np.max(np.abs(evals)) if evals.size else 0.0
    if top > 0:
        evals[np.abs(evals) < clip_tol * top] = 0.0
    else:
        evals[:] = 0.0
    return SpectralDecomposition(evals, _fix_phases(evecs), clip_tol)


def tensor(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with row-major pair indexing ((i, j) -> i*dim_b + j)."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho: np.ndarray, dims, keep) -> np.ndarray:
    """Trace out all tensor factors not listed in ``keep``.

    Parameters
    ----------
    rho : square matrix on the full space, dimension prod(dims).
    dims : sequence of factor dimensions, row-major tensor order.
    keep : indices of the factors to keep, in their original order.
    """
    rho = np.asarray(rho, dtype=complex)
    dims = [int(d) for d in dims]
    if any(d <= 0 for d in dims):
        raise ValueError("factor dimensions must be positive")
    total = int(np.prod(dims))
    if rho.shape != (total, total):
        raise ValueError(f"split {dims} inconsistent with operator shape {rho.shape}")
    keep = sorted(int(k) for k in (keep if np.iterable(keep) else [keep]))
    n = len(dims)
    if any(k < 0 or k >= n for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"keep indices {keep} out of range for {n} factors")
    reshaped = rho.reshape(dims + dims)
    traced = sorted(set(range(n)) - set(keep), reverse=True)
    ndims = list(dims)
    for ax in traced:
        reshaped = np.trace(reshaped, axis1=ax, axis2=ax + len(ndims))
        del ndims[ax]
    d_keep = int(np.prod([dims[k] for k in keep]))
    return reshaped.reshape(d_keep, d_keep)


def purify(rho: np.ndarray, clip_tol: float = CLIP_TOL) -> np.ndarray:
    """Minimal purification of rho/Tr(rho).

    Returns a unit vector on dim x rank, system factor first: tracing out the
    reference (second) factor recovers the normalized input.  The reference
    dimension equals the numerical rank.
    """
    rho = hermitize(rho)
    tr = float(np.real(np.trace(rho)))
    if tr <= 0:
        raise ValueError("cannot purify an operator with nonpositive trace")
    dec = spectral_decompose(rho / tr, clip_tol)
    r = dec.rank
    d = rho.shape[0]
    psi = np.zeros(d * r, dtype=complex)
    for i in range(r):
        lam = dec.eigenvalues[i]
        if lam <= 0:
            continue
        ref = np.zeros(r)
        ref[i] = 1.0
        psi += np.sqrt(lam) * np.kron(dec.eigenvectors[:, i], ref)
    return psi / np.linalg.norm(psi)


def trace_norm(a: np.ndarray) -> float:
    """Trace norm of a Hermitian matrix (sum of absolute eigenvalues)."""
    a = hermitize(a)
    return float(np.sum(np.abs(np.linalg.eigvalsh(a))))


def jordan_parts(a: np.ndarray, clip_tol: float = CLIP_TOL):
    """Jordan decomposition a = [a]+ - [a]- into PSD parts with orthogonal supports."""
    dec = spectral_decompose(a, clip_tol)
    v = dec.eigenvectors
    plus = (v * np.maximum(dec.eigenvalues, 0.0)) @ v.conj().T
    minus = (v * np.maximum(-dec.eigenvalues, 0.0)) @ v.conj().T
    return hermitize(plus), hermitize(minus)


def random_density(dim: int, rank: int, seed) -> np.ndarray:
    """Unit-trace random density operator with exactly the declared rank."""
    if not 1 <= rank <= dim:
        raise ValueError(f"rank must lie in [1, {dim}], got {rank}")
    rng = as_rng(seed)
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return hermitize(rho / np.real(np.trace(rho)), tol=np.inf)


def random_pure(dim: int, seed) -> np.ndarray:
    """Haar-random unit vector."""
    rng = as_rng(seed)
    psi = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return psi / np.linalg.norm(psi)


def random_isometry(rows: int, cols: int, seed) -> np.ndarray:
    """Haar-like isometry with orthonormal columns (rows >= cols)."""
    if rows < cols:
        raise ValueError(f"no isometry with shape ({rows}, {cols})")
    rng = as_rng(seed)
    g = rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))
    q, r = np.linalg.qr(g)
    # Fix the gauge so the result is unique and reproducible.
    d = np.diagonal(r).copy()
    d[d == 0] = 1.0
    return q * (d.conjugate() / np.abs(d))


# JSON matrix format: {"rows": r, "cols": c, "data": [[re, im], ...]} row-major.

def matrix_to_json(a: np.ndarray) -> dict:
    a = np.atleast_2d(np.asarray(a, dtype=complex))
    return {
        "rows": int(a.shape[0]),
        "cols": int(a.shape[1]),
        "data": [[float(z.real), float(z.imag)] for z in a.reshape(-1)],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"not a matrix object: {exc}") from exc
    if rows <= 0 or cols <= 0:
        raise ValueError("matrix dimensions must be positive")
    if len(data) != rows * cols:
        raise ValueError(f"expected {rows * cols} entries, got {len(data)}")
    flat = np.array([complex(re, im) for re, im in data])
    return flat.reshape(rows, cols)


def vector_from_json(obj: dict) -> np.ndarray:
    a = matrix_from_json(obj)
    if 1 not in a.shape:
        raise ValueError(f"expected a vector, got shape {a.shape}")
    return a.reshape(-1)
