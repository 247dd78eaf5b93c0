"""Tests for Kraus channels, Choi matrices, complements, and families."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qentropy import channels as ch
from qentropy import entropy as ent
from qentropy import linalg
from _oracles import gram_rank, mixed_state


def random_cptp(d_in, d_out, rank, seed):
    return ch.random_channel(d_in, d_out, rank, True, seed)


class TestApply:
    def test_identity(self):
        rho = linalg.random_density(3, 2, 0)
        np.testing.assert_allclose(ch.apply(ch.make_identity(3), rho), rho, atol=1e-12)

    def test_depolarizing_constant_output(self):
        sigma = linalg.random_density(3, 2, 1)
        dep = ch.make_completely_depolarizing(sigma, 4)
        for seed in range(3):
            rho = linalg.random_density(4, 4, seed)
            np.testing.assert_allclose(ch.apply(dep, rho), sigma, atol=1e-10)

    @given(st.integers(0, 400))
    @settings(max_examples=40, deadline=None)
    def test_cptp_output_psd_trace(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 6))
        phi = ch.random_channel(dim, dim, int(rng.integers(1, dim + 1)), True, rng)
        rho = mixed_state(dim, int(rng.integers(1, dim + 1)), rng)
        out = ch.apply(phi, rho)
        assert abs(np.trace(out).real - 1.0) <= 1e-9
        assert np.linalg.eigvalsh((out + out.conj().T) / 2).min() >= -1e-10

    def test_trace_non_increasing(self):
        phi = ch.random_channel(4, 4, 2, False, 5)
        rho = linalg.random_density(4, 4, 0)
        assert np.trace(ch.apply(phi, rho)).real <= 1.0 + 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="d_in"):
            ch.apply(ch.make_identity(3), np.eye(4))


class TestChoi:
    def test_identity_rank_one(self):
        for d in (2, 3, 5):
            assert ch.choi_rank(ch.make_identity(d)) == 1

    @given(st.integers(0, 300))
    @settings(max_examples=30, deadline=None)
    def test_generic_rank_matches_gram_oracle(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 5))
        k = int(rng.integers(1, d + 1))
        phi = ch.random_channel(d, d, k, True, rng)
        assert ch.choi_rank(phi) == k == gram_rank(phi.kraus)

    def test_complete_depolarizing_qubit_rank_four(self):
        paulis = [
            np.eye(2),
            np.array([[0, 1], [1, 0]]),
            np.array([[0, -1j], [1j, 0]]),
            np.diag([1, -1]),
        ]
        phi = ch.KrausChannel([p / 2 for p in paulis], d_in=2, d_out=2)
        rho = linalg.random_density(2, 2, 3)
        np.testing.assert_allclose(ch.apply(phi, rho), np.eye(2) / 2, atol=1e-10)
        assert ch.choi_rank(phi) == 4

    def test_choi_psd(self):
        phi = random_cptp(3, 4, 5, 9)
        evals = np.linalg.eigvalsh(ch.choi(phi).matrix)
        assert evals.min() >= -1e-10

    def test_choi_matches_defining_construction(self):
        # (Phi x id) applied to sum_ij |ii><jj|, built literally
        phi = random_cptp(3, 4, 2, 15)
        d = phi.d_in
        direct = np.zeros((4 * d, 4 * d), dtype=complex)
        for i in range(d):
            for j in range(d):
                eij = np.zeros((d, d), dtype=complex)
                eij[i, j] = 1.0
                direct += linalg.tensor(ch.apply(phi, eij), eij)
        np.testing.assert_allclose(ch.choi(phi).matrix, direct, atol=1e-12)
        assert np.trace(ch.choi(phi).matrix).real == pytest.approx(d)

    def test_rank_submultiplicative_and_tensor(self):
        a = random_cptp(3, 3, 2, 1)
        b = random_cptp(3, 3, 3, 2)
        assert ch.choi_rank(ch.compose(b, a)) <= ch.choi_rank(a) * ch.choi_rank(b)
        assert ch.choi_rank(ch.tensor_channels(a, b)) == 6


class TestComplementary:
    def test_identity_complement_is_trace(self):
        comp = ch.complementary(ch.make_identity(3))
        assert comp.d_out == 1
        rho = linalg.random_density(3, 2, 4)
        assert ch.apply(comp, rho)[0, 0] == pytest.approx(1.0)

    def test_unitary_complement_rank_one(self):
        u = linalg.random_isometry(4, 4, 0)
        phi = ch.KrausChannel([u], d_in=4, d_out=4)
        comp = ch.complementary(phi)
        out = ch.apply(comp, linalg.random_density(4, 3, 1))
        assert np.linalg.matrix_rank(out) == 1

    def test_entrywise_definition(self):
        phi = random_cptp(3, 4, 2, 7)
        comp = ch.complementary(phi)
        rho = linalg.random_density(3, 3, 2)
        out = ch.apply(comp, rho)
        for k in range(2):
            for j in range(2):
                expected = np.trace(phi.kraus[k] @ rho @ phi.kraus[j].conj().T)
                assert out[k, j] == pytest.approx(expected, abs=1e-12)

    @given(st.integers(0, 300))
    @settings(max_examples=30, deadline=None)
    def test_pure_state_entropies_coincide(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 5))
        phi = ch.random_channel(dim, dim, int(rng.integers(1, dim + 1)), True, rng)
        psi = linalg.random_pure(dim, rng)
        pure = linalg.projector(psi)
        h_out = ent.von_neumann(ch.apply(phi, pure))
        h_exch = ent.von_neumann(ch.apply(ch.complementary(phi), pure))
        assert abs(h_out - h_exch) <= 1e-8

    def test_purification_identity(self):
        # entropy exchange equals the output entropy of Phi (x) id on a purification
        phi = random_cptp(3, 3, 2, 11)
        rho = linalg.random_density(3, 2, 5)
        psi_hat = linalg.purify(rho)
        ref = psi_hat.size // 3
        extended = ch.tensor_channels(phi, ch.make_identity(ref))
        lhs = ent.von_neumann(ch.apply(ch.complementary(phi), rho))
        rhs = ent.von_neumann(ch.apply(extended, linalg.projector(psi_hat)))
        assert abs(lhs - rhs) <= 1e-8

    def test_double_complement_pure_entropies(self):
        phi = random_cptp(4, 3, 2, 13)
        double = ch.complementary(ch.complementary(phi))
        psi = linalg.random_pure(4, 6)
        pure = linalg.projector(psi)
        assert ent.von_neumann(ch.apply(double, pure)) == pytest.approx(
            ent.von_neumann(ch.apply(phi, pure)), abs=1e-8
        )


class TestComposeTensorMix:
    def test_compose_with_identity(self):
        phi = random_cptp(3, 3, 2, 0)
        both = ch.compose(ch.make_identity(3), phi)
        rho = linalg.random_density(3, 3, 1)
        np.testing.assert_allclose(ch.apply(both, rho), ch.apply(phi, rho), atol=1e-12)

    def test_tensor_of_depolarizings(self):
        s1 = linalg.projector(linalg.random_pure(2, 0))
        s2 = linalg.projector(linalg.random_pure(3, 1))
        t = ch.tensor_channels(
            ch.make_completely_depolarizing(s1, 2), ch.make_completely_depolarizing(s2, 3)
        )
        rho = linalg.random_density(6, 6, 2)
        np.testing.assert_allclose(ch.apply(t, rho), linalg.tensor(s1, s2), atol=1e-10)

    def test_mix_identity_and_depolarizing(self):
        sigma = linalg.projector(linalg.random_pure(3, 4))
        p = 0.3
        mixed = ch.mix(
            [ch.make_identity(3), ch.make_completely_depolarizing(sigma, 3)], [1 - p, p]
        )
        rho = linalg.random_density(3, 3, 5)
        np.testing.assert_allclose(
            ch.apply(mixed, rho), (1 - p) * rho + p * sigma, atol=1e-10
        )

    def test_mix_bad_weights(self):
        with pytest.raises(ValueError, match="probability"):
            ch.mix([ch.make_identity(2), ch.make_identity(2)], [0.6, 0.6])

    def test_compose_dimension_mismatch(self):
        with pytest.raises(ValueError, match="compose"):
            ch.compose(ch.make_identity(3), ch.make_identity(4))


class TestExample1:
    def test_alpha_zero_is_identity(self):
        phi = ch.make_example1(0.0, 5)
        rho = linalg.random_density(5, 3, 0)
        np.testing.assert_allclose(ch.apply(phi, rho), rho, atol=1e-12)

    def test_damping_coefficients(self):
        alpha = math.log(2)
        w = ch._example1_weights(alpha, 4)
        c = [w[i, i] ** 2 for i in range(1, 4)]
        assert c[0] == pytest.approx(1.0)
        assert c[1] == pytest.approx(math.log(2) / math.log(3), abs=1e-12)
        assert c[2] == pytest.approx(0.5, abs=1e-12)

    @pytest.mark.parametrize("alpha", [0.1, 0.5, math.log(2)])
    @pytest.mark.parametrize("n", [2, 5, 16, 64])
    def test_trace_preserving(self, alpha, n):
        phi = ch.make_example1(alpha, n)
        assert np.max(np.abs(phi.kraus_gram() - np.eye(n))) <= 1e-9

    def test_alpha_out_of_range(self):
        with pytest.raises(ValueError, match="alpha"):
            ch.make_example1(0.8, 4)

    def test_family_matches_constructor(self):
        fam = ch.family_example1(0.4)
        phi = ch.make_example1(0.4, 6)
        out_fam = sum(v @ np.eye(6) / 6 @ v.conj().T for v in fam.kraus_at(6))
        out_ch = ch.apply(phi, np.eye(6) / 6)
        np.testing.assert_allclose(out_fam, out_ch, atol=1e-12)

    def test_family_diagonal_consistency(self):
        fam = ch.family_example1(0.3)
        w = fam.diagonal_at(8)
        for k in range(1, 9):
            np.testing.assert_allclose(np.diag(fam.term(k, 8)), w[k - 1], atol=1e-12)

    def test_truncation_deficit_zero(self):
        fam = ch.family_example1(0.5)
        assert fam.truncation_deficit(32) <= 1e-12


class TestBlockPair:
    def test_qubit_measure_prepare(self):
        p = np.diag([1.0, 0.0]).astype(complex)
        sigma = np.array([0, 1], dtype=complex)
        varsigma = np.array([1, 0], dtype=complex)
        phi, psi = ch.make_block_pair(p, sigma, varsigma)
        comp = ch.compose(psi, phi)
        for seed in range(4):
            rho = linalg.random_density(2, 2, seed)
            out = ch.apply(comp, rho)
            expect = np.trace(p @ rho) * linalg.projector(varsigma) + np.trace(
                (np.eye(2) - p) @ rho
            ) * linalg.projector(sigma)
            assert np.max(np.abs(out - expect)) <= 1e-10

    def test_trace_preserving_and_invariant_block(self):
        rng = np.random.default_rng(5)
        u = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))[0]
        p = u[:, :3] @ u[:, :3].conj().T
        phi, psi = ch.make_block_pair(p, u[:, 4], u[:, 1])
        assert np.max(np.abs(phi.kraus_gram() - np.eye(6))) <= 1e-9
        assert np.max(np.abs(psi.kraus_gram() - np.eye(6))) <= 1e-9
        # a state inside ran(P) passes through Phi untouched
        inside = linalg.projector(u[:, 0])
        np.testing.assert_allclose(ch.apply(phi, inside), inside, atol=1e-10)

    def test_composition_collapses_to_fixed_plane(self):
        rng = np.random.default_rng(5)
        u = np.linalg.qr(rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6)))[0]
        p = u[:, :3] @ u[:, :3].conj().T
        s_vec, v_vec = u[:, 4], u[:, 1]
        phi, psi = ch.make_block_pair(p, s_vec, v_vec)
        comp = ch.compose(psi, phi)
        for seed in range(3):
            rho = linalg.random_density(6, 4, seed)
            out = ch.apply(comp, rho)
            expect = np.trace(p @ rho) * linalg.projector(v_vec) + np.trace(
                (np.eye(6) - p) @ rho
            ) * linalg.projector(s_vec)
            assert np.max(np.abs(out - expect)) <= 1e-10
            assert np.sum(np.linalg.eigvalsh(out) > 1e-9) <= 2

    def test_support_condition_enforced(self):
        p = np.diag([1.0, 0.0]).astype(complex)
        with pytest.raises(ValueError, match="supported"):
            ch.make_block_pair(p, np.array([1, 0], dtype=complex), np.array([1, 0], dtype=complex))


class TestFamilies:
    def test_geometric_norms(self):
        fam = ch.family_geometric(3)
        norms = [np.linalg.norm(fam.term(k, 8), 2) ** 2 for k in range(1, 9)]
        np.testing.assert_allclose(norms, [2.0**-k for k in range(1, 9)], atol=1e-12)
        assert fam.norm_sq_tail(8) == pytest.approx(2.0**-8)

    def test_family_channels_validate(self):
        for fam in (ch.family_identity(), ch.family_geometric(2), ch.family_mixture(0.4)):
            phi = fam.channel_at(6)
            assert phi.tp_mode == ch.TRACE_NON_INCREASING

    def test_depolarizing_family_constant_output(self):
        fam = ch.family_depolarizing(2)
        phi = fam.channel_at(5)
        out = ch.apply(phi, linalg.random_density(5, 3, 2))
        np.testing.assert_allclose(out, np.eye(2) / 2, atol=1e-10)

    def test_family_from_json(self):
        fam = ch.family_from_json({"family": "example1", "alpha": 0.5})
        assert fam.name == "example1" and fam.params["alpha"] == 0.5
        with pytest.raises(ValueError, match="unknown family"):
            ch.family_from_json({"family": "nope"})

    def test_mixture_applies_as_convex_combination(self):
        fam = ch.family_mixture(0.25)
        phi = fam.channel_at(4)
        rho = linalg.random_density(4, 4, 3)
        expect = 0.75 * rho + 0.25 * linalg.projector(np.eye(4, dtype=complex)[:, 0])
        np.testing.assert_allclose(ch.apply(phi, rho), expect, atol=1e-10)


class TestJsonAndValidation:
    def test_channel_roundtrip(self):
        phi = random_cptp(3, 4, 2, 21)
        back = ch.channel_from_json(ch.channel_to_json(phi))
        assert back.d_in == 3 and back.d_out == 4
        for a, b in zip(phi.kraus, back.kraus):
            np.testing.assert_array_equal(a, b)

    def test_tp_validation(self):
        with pytest.raises(ValueError, match="identity"):
            ch.KrausChannel([np.eye(2) * 0.5], d_in=2, d_out=2)

    def test_tni_validation(self):
        with pytest.raises(ValueError, match="exceeds"):
            ch.KrausChannel(
                [np.eye(2) * 1.5], d_in=2, d_out=2, tp_mode=ch.TRACE_NON_INCREASING
            )

    def test_random_channel_isometry(self):
        phi = ch.random_channel(3, 3, 2, True, 1)
        assert np.max(np.abs(phi.kraus_gram() - np.eye(3))) <= 1e-10

    def test_random_channel_determinism(self):
        a = ch.random_channel(3, 4, 2, False, 9)
        b = ch.random_channel(3, 4, 2, False, 9)
        for x, y in zip(a.kraus, b.kraus):
            np.testing.assert_array_equal(x, y)

    def test_random_channel_bad_params(self):
        with pytest.raises(ValueError):
            ch.random_channel(4, 1, 2, True, 0)
        with pytest.raises(ValueError):
            ch.random_channel(2, 2, 9, True, 0)


class TestFiniteChoiRankBound:
    @given(st.integers(0, 300))
    @settings(max_examples=40, deadline=None)
    def test_pure_output_entropy_bounded_by_log_rank(self, seed):
        rng = np.random.default_rng(seed)
        dim = int(rng.integers(2, 6))
        m = int(rng.integers(1, 5))
        phi = ch.random_channel(dim, dim, m, True, rng)
        psi = linalg.random_pure(dim, rng)
        h = ent.von_neumann(ch.apply(phi, linalg.projector(psi)))
        assert h <= math.log(m) + 1e-8
