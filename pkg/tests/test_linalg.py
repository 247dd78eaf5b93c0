"""Tests for the linear algebra core."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qentropy import linalg
from _oracles import direct_entropy


def rand_herm(dim, seed):
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2


class TestSpectral:
    def test_identity(self):
        dec = linalg.spectral_decompose(np.eye(2), clip_tol=1e-12)
        np.testing.assert_allclose(dec.eigenvalues, [1.0, 1.0])

    def test_diagonal(self):
        dec = linalg.spectral_decompose(np.diag([0.7, 0.3]))
        np.testing.assert_allclose(dec.eigenvalues, [0.7, 0.3])

    def test_reconstruction_random(self):
        a = rand_herm(8, 42)
        dec = linalg.spectral_decompose(a)
        scale = max(1.0, np.max(np.abs(a)))
        assert np.max(np.abs(a - dec.reconstruct())) <= 1e-9 * scale

    def test_orthonormal_eigenvectors(self):
        dec = linalg.spectral_decompose(rand_herm(6, 1))
        gram = dec.eigenvectors.conj().T @ dec.eigenvectors
        assert np.max(np.abs(gram - np.eye(6))) <= 1e-9

    def test_phase_convention_deterministic(self):
        a = rand_herm(5, 7)
        d1 = linalg.spectral_decompose(a)
        d2 = linalg.spectral_decompose(a.copy())
        np.testing.assert_array_equal(d1.eigenvectors, d2.eigenvectors)

    def test_non_hermitian_rejected(self):
        with pytest.raises(ValueError, match="Hermitian"):
            linalg.spectral_decompose(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_small_eigenvalues_clipped(self):
        a = np.diag([1.0, 1e-15])
        dec = linalg.spectral_decompose(a, clip_tol=1e-12)
        assert dec.eigenvalues[1] == 0.0
        assert dec.rank == 1

    def test_clip_is_relative_to_top_eigenvalue(self):
        # the threshold scales with the largest eigenvalue magnitude
        dec = linalg.spectral_decompose(np.diag([1e6, 1e-8]), clip_tol=1e-12)
        assert dec.eigenvalues[1] == 0.0
        dec = linalg.spectral_decompose(np.diag([1.0, 1e-8]), clip_tol=1e-12)
        assert dec.eigenvalues[1] == pytest.approx(1e-8)


class TestTensorAndPartialTrace:
    def test_tensor_identities(self):
        np.testing.assert_array_equal(linalg.tensor(np.eye(2), np.eye(2)), np.eye(4))

    def test_tensor_projectors(self):
        p0 = np.diag([1.0, 0.0])
        p1 = np.diag([0.0, 1.0])
        out = linalg.tensor(p0, p1)
        expected = np.zeros((4, 4))
        expected[1, 1] = 1.0
        np.testing.assert_array_equal(out, expected)

    def test_tensor_trace_multiplicative(self):
        rng = np.random.default_rng(3)
        a = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        b = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        assert np.trace(linalg.tensor(a, b)) == pytest.approx(np.trace(a) * np.trace(b))

    def test_bell_reduction(self):
        bell = np.zeros(4, dtype=complex)
        bell[0] = bell[3] = 1 / np.sqrt(2)
        reduced = linalg.partial_trace(linalg.projector(bell), (2, 2), [0])
        np.testing.assert_allclose(reduced, np.eye(2) / 2, atol=1e-12)

    def test_product_reduction(self):
        ra = linalg.random_density(3, 2, 0)
        rb = linalg.random_density(4, 4, 1)
        np.testing.assert_allclose(
            linalg.partial_trace(linalg.tensor(ra, rb), (3, 4), [0]), ra, atol=1e-12
        )

    def test_trace_bookkeeping(self):
        rho = linalg.random_density(12, 5, 11)
        for keep in ([0], [1], [0, 1]):
            pt = linalg.partial_trace(rho, (4, 3), keep)
            assert abs(np.trace(pt) - np.trace(rho)) <= 1e-12

    def test_bad_split(self):
        with pytest.raises(ValueError, match="split"):
            linalg.partial_trace(np.eye(6), (4, 2), [0])


class TestPurify:
    def test_pure_input(self):
        psi = linalg.random_pure(4, 0)
        out = linalg.purify(linalg.projector(psi))
        assert out.size == 4  # reference dimension is exactly the rank
        red = linalg.partial_trace(linalg.projector(out), (4, 1), [0])
        assert np.max(np.abs(red - linalg.projector(psi))) <= 1e-9

    def test_maximally_mixed(self):
        out = linalg.purify(np.eye(2) / 2)
        red = linalg.partial_trace(linalg.projector(out), (2, 2), [0])
        np.testing.assert_allclose(red, np.eye(2) / 2, atol=1e-9)

    def test_rank3_in_dim5(self):
        rho = linalg.random_density(5, 3, 21)
        out = linalg.purify(rho)
        assert out.size == 15
        red = linalg.partial_trace(linalg.projector(out), (5, 3), [0])
        assert np.max(np.abs(red - rho)) <= 1e-9

    def test_subnormalized_input(self):
        rho = 0.3 * linalg.random_density(4, 2, 5)
        out = linalg.purify(rho)
        red = linalg.partial_trace(linalg.projector(out), (4, 2), [0])
        assert np.max(np.abs(red - rho / 0.3)) <= 1e-9

    def test_zero_rejected(self):
        with pytest.raises(ValueError, match="trace"):
            linalg.purify(np.zeros((3, 3)))


class TestTraceNormAndJordan:
    def test_trace_norm_values(self):
        assert linalg.trace_norm(np.diag([0.5, -0.5])) == pytest.approx(1.0)
        rho = linalg.random_density(5, 3, 2)
        assert linalg.trace_norm(rho) == pytest.approx(np.trace(rho).real)

    def test_orthogonal_pure_distance(self):
        a = linalg.projector(np.array([1, 0], dtype=complex))
        b = linalg.projector(np.array([0, 1], dtype=complex))
        assert linalg.trace_norm(a - b) == pytest.approx(2.0)

    def test_jordan_diagonal(self):
        plus, minus = linalg.jordan_parts(np.diag([0.3, -0.7]))
        np.testing.assert_allclose(plus, np.diag([0.3, 0.0]), atol=1e-12)
        np.testing.assert_allclose(minus, np.diag([0.0, 0.7]), atol=1e-12)

    def test_jordan_psd_input(self):
        rho = linalg.random_density(4, 4, 8)
        plus, minus = linalg.jordan_parts(rho)
        np.testing.assert_allclose(plus, rho, atol=1e-10)
        assert np.max(np.abs(minus)) <= 1e-10

    @given(st.integers(0, 500))
    @settings(max_examples=30, deadline=None)
    def test_jordan_reconstruction_property(self, seed):
        a = rand_herm(5, seed)
        plus, minus = linalg.jordan_parts(a)
        assert np.max(np.abs(a - (plus - minus))) <= 1e-10
        assert abs(np.trace(plus @ minus)) <= 1e-9
        assert linalg.trace_norm(a) == pytest.approx(
            np.trace(plus).real + np.trace(minus).real, abs=1e-9
        )


class TestRandomGenerators:
    def test_density_deterministic(self):
        np.testing.assert_array_equal(
            linalg.random_density(4, 2, 7), linalg.random_density(4, 2, 7)
        )

    def test_density_rank_and_trace(self):
        rho = linalg.random_density(6, 3, 9)
        assert np.trace(rho).real == pytest.approx(1.0)
        evals = np.linalg.eigvalsh(rho)
        assert evals.min() >= -1e-10
        assert np.count_nonzero(evals > 1e-10) == 3
        assert np.max(np.abs(rho - rho.conj().T)) <= 1e-10

    def test_pure_norm(self):
        assert abs(np.linalg.norm(linalg.random_pure(5, 3)) - 1) <= 1e-12

    def test_bad_rank(self):
        with pytest.raises(ValueError, match="rank"):
            linalg.random_density(3, 4, 0)

    @given(st.integers(0, 300))
    @settings(max_examples=25, deadline=None)
    def test_purify_roundtrip_property(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 6))
        rank = int(rng.integers(1, dim + 1))
        rho = linalg.random_density(dim, rank, rng)
        out = linalg.purify(rho)
        ref = out.size // dim
        red = linalg.partial_trace(linalg.projector(out), (dim, ref), [0])
        assert np.max(np.abs(red - rho)) <= 1e-9
        # homogeneous entropy is preserved through the spectrum
        assert direct_entropy(red) == pytest.approx(direct_entropy(rho), abs=1e-8)


class TestJson:
    def test_roundtrip(self):
        rng = np.random.default_rng(4)
        a = rng.standard_normal((3, 5)) + 1j * rng.standard_normal((3, 5))
        np.testing.assert_array_equal(linalg.matrix_from_json(linalg.matrix_to_json(a)), a)

    def test_vector(self):
        v = np.array([1.0, 2.0j])
        out = linalg.vector_from_json(linalg.matrix_to_json(v.reshape(1, -1)))
        np.testing.assert_array_equal(out, v)

    def test_bad_payload(self):
        with pytest.raises(ValueError):
            linalg.matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
