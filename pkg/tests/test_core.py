import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from waveop.checks import g_residual, random_problem
from waveop.core import (
    DegenerateSpectrum,
    EnergyExpansion,
    PerturbationProblem,
    Spectrum,
    WaveOperator,
    apply_wave_operator,
    build_f_operator,
    build_g_operator,
    eigenvalue_residual,
    energy_expansion,
    first_order_corrections,
    second_order_corrections,
    split_diagonal,
    third_order_corrections,
)
from waveop.linalg import commutator
from waveop.oracle import sum_over_states_corrections


def zero_problem(dim=4):
    return PerturbationProblem(Spectrum(np.arange(dim, dtype=float)), np.zeros((dim, dim)))


class TestTypes:
    def test_spectrum_rejects_nan(self):
        with pytest.raises(ValueError):
            Spectrum([0.0, np.nan])

    def test_spectrum_is_read_only(self):
        s = Spectrum([0.0, 1.0])
        with pytest.raises(ValueError):
            s.values[0] = 3.0

    def test_problem_dimension_mismatch(self):
        with pytest.raises(ValueError):
            PerturbationProblem(Spectrum([0.0, 1.0]), np.zeros((3, 3)))

    def test_problem_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            PerturbationProblem(Spectrum([0.0, 1.0]), [[0.0, 1.0], [0.0, 0.0]])

    def test_problem_rejects_infinite_coupling(self):
        with pytest.raises(ValueError):
            PerturbationProblem(Spectrum([0.0, 1.0]), np.zeros((2, 2)), lam=math.inf)

    def test_degeneracy_tolerance_scales_with_range(self):
        assert Spectrum([0.0, 1.0]).degeneracy_tol == 1e-8
        assert Spectrum([0.0, 1e3]).degeneracy_tol == pytest.approx(1e-5)

    def test_expansion_length_mismatch(self):
        with pytest.raises(ValueError):
            EnergyExpansion(Spectrum([0.0, 1.0]), [0.0], [0.0, 0.0], [0.0, 0.0])


class TestSplitDiagonal:
    def test_zero(self):
        h_d, h_nd = split_diagonal(np.zeros((3, 3)))
        assert not h_d.any() and not h_nd.any()

    def test_diagonal(self):
        h = np.diag([1.0, 2.0, 3.0])
        h_d, h_nd = split_diagonal(h)
        np.testing.assert_array_equal(h_d, h)
        assert not h_nd.any()

    def test_two_by_two(self):
        h_d, h_nd = split_diagonal(np.array([[1.0, 2.0], [2.0, 3.0]]))
        np.testing.assert_array_equal(h_d, [[1.0, 0.0], [0.0, 3.0]])
        np.testing.assert_array_equal(h_nd, [[0.0, 2.0], [2.0, 0.0]])

    def test_reconstructs_bitwise(self, rng):
        h = rng.normal(size=(6, 6))
        h_d, h_nd = split_diagonal(h)
        np.testing.assert_array_equal(h_d + h_nd, h)


class TestFirstOrder:
    def test_zero(self):
        assert not first_order_corrections(zero_problem()).any()

    @pytest.mark.parametrize("c", [0.0, 0.4, -2.0])
    def test_diagonal_readoff(self, c):
        p = PerturbationProblem(Spectrum([0.0, 1.0]), [[0.0, c], [c, 1.0]])
        np.testing.assert_array_equal(first_order_corrections(p), [0.0, 1.0])


class TestFOperator:
    def test_zero(self):
        assert not build_f_operator(zero_problem()).any()

    def test_two_level(self, two_level):
        np.testing.assert_array_equal(build_f_operator(two_level), [[0.0, 0.3], [-0.3, 0.0]])

    def test_degenerate_names_pair(self):
        p = PerturbationProblem(Spectrum([0.0, 2.0, 1.0, 2.0 + 1e-10]), np.ones((4, 4)))
        with pytest.raises(DegenerateSpectrum) as info:
            build_f_operator(p)
        assert (info.value.i, info.value.j) == (1, 3)
        assert "levels 1 and 3" in str(info.value)

    def test_gap_just_above_tolerance_is_accepted(self):
        p = PerturbationProblem(Spectrum([0.0, 2e-8]), [[0.0, 1.0], [1.0, 0.0]])
        assert np.isfinite(build_f_operator(p)).all()

    def test_commutator_condition(self, random_problems):
        for p in random_problems:
            f = build_f_operator(p)
            _, h_nd = split_diagonal(p.h)
            err = np.abs(commutator(f, p.h0.as_matrix()) - h_nd).max()
            assert err <= 1e-12 * np.abs(p.h).max()

    def test_antisymmetric(self, random_problems):
        for p in random_problems:
            f = build_f_operator(p)
            np.testing.assert_allclose(f, -f.T, rtol=0, atol=1e-14)
            assert not np.diag(f).any()


class TestSecondOrder:
    def test_zero(self):
        assert not second_order_corrections(zero_problem()).any()

    def test_two_level(self, two_level):
        # E0 = (1 - sqrt(1 + 4 lam^2 c^2)) / 2 = -c^2 lam^2 + O(lam^4)
        np.testing.assert_allclose(second_order_corrections(two_level), [-0.09, 0.09], rtol=1e-15)

    def test_propagates_degeneracy(self):
        p = PerturbationProblem(Spectrum([1.0, 1.0]), np.ones((2, 2)))
        with pytest.raises(DegenerateSpectrum):
            second_order_corrections(p)


class TestGOperator:
    def test_zero(self):
        assert not build_g_operator(zero_problem()).any()

    def test_diagonal_h_gives_zero_generators(self):
        p = PerturbationProblem(Spectrum([0.0, 1.0, 3.0]), np.diag([0.5, -1.0, 2.0]))
        assert not build_f_operator(p).any()
        assert not build_g_operator(p).any()

    def test_two_level_g_vanishes(self, two_level):
        # [F, h_ND] is diagonal for two levels and eps1 = 0
        np.testing.assert_array_equal(build_g_operator(two_level), np.zeros((2, 2)))

    def test_residual_random_6x6(self):
        rng = np.random.default_rng(3)
        p = random_problem(rng, dims=(6, 6))
        f = build_f_operator(p)
        g = build_g_operator(p, f)
        gap = np.min(np.diff(np.sort(p.h0.values)))
        scale = np.abs(p.h).max() ** 2 / gap
        res = g_residual(p, f, g, second_order_corrections(p, f))
        assert np.abs(res).max() <= 1e-10 * scale
        assert not np.diag(g).any()


class TestThirdOrder:
    def test_zero(self):
        assert not third_order_corrections(zero_problem()).any()

    def test_two_level_odd_terms_vanish(self, two_level):
        np.testing.assert_allclose(third_order_corrections(two_level), [0.0, 0.0], atol=1e-16)

    def test_two_level_with_diagonal_shift(self):
        # h = [[0, c], [c, d]]: E0 = (1 + lam d - sqrt((1 + lam d)^2 + 4 lam^2 c^2)) / 2,
        # whose lam^3 coefficient is c^2 d.
        c, d = 0.3, 0.7
        p = PerturbationProblem(Spectrum([0.0, 1.0]), [[0.0, c], [c, d]])
        np.testing.assert_allclose(third_order_corrections(p), [c**2 * d, -(c**2) * d], rtol=1e-14)


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2**32 - 1))
def test_operator_route_matches_sum_over_states(seed):
    p = random_problem(np.random.default_rng(seed))
    e = energy_expansion(p)
    s1, s2, s3 = sum_over_states_corrections(p)
    np.testing.assert_allclose(e.eps1, s1, rtol=1e-12)
    np.testing.assert_allclose(e.eps2, s2, rtol=1e-10, atol=1e-10)
    np.testing.assert_allclose(e.eps3, s3, rtol=1e-9, atol=1e-9)


class TestWaveOperator:
    def test_identity_at_zero_coupling(self, random_problems):
        for p in random_problems[:5]:
            w = WaveOperator.from_problem(p)
            for n in range(p.dim):
                np.testing.assert_array_equal(apply_wave_operator(w, 0.0, n), np.eye(p.dim)[n])

    def test_zero_perturbation(self):
        w = WaveOperator.from_problem(zero_problem())
        for lam in (0.1, 1.0, 7.0):
            np.testing.assert_array_equal(apply_wave_operator(w, lam, 2), np.eye(4)[2])

    def test_two_level_is_a_rotation(self, two_level):
        w = WaveOperator.from_problem(two_level)
        x = 0.05 * 0.3
        np.testing.assert_allclose(apply_wave_operator(w, 0.05, 0), [math.cos(x), -math.sin(x)], atol=1e-15)

    def test_index_out_of_range(self, two_level):
        with pytest.raises(IndexError):
            apply_wave_operator(WaveOperator.from_problem(two_level), 0.1, 2)

    def test_mismatched_generators(self):
        with pytest.raises(ValueError):
            WaveOperator(np.zeros((2, 2)), np.zeros((3, 3)))


class TestEigenvalueResidual:
    def test_zero_coupling(self, random_problems):
        p = random_problems[0].with_coupling(0.0)
        w = WaveOperator.from_problem(p)
        e = energy_expansion(p)
        for n in range(p.dim):
            assert eigenvalue_residual(p, w, e, n) <= 1e-14 * np.abs(p.h0.values).max()

    def test_zero_perturbation(self):
        p = zero_problem().with_coupling(0.5)
        w = WaveOperator.from_problem(p)
        assert eigenvalue_residual(p, w, energy_expansion(p), 1) == 0.0

    def test_two_level_regression(self, two_level):
        # Closed form with x = lam c, psi = (cos x, -sin x), E = -lam^2 c^2, evaluated
        # at 50 digits: 3.5999961525014848e-8.
        p = two_level.with_coupling(0.01)
        r = eigenvalue_residual(p, WaveOperator.from_problem(p), energy_expansion(p), 0)
        assert r <= 5e-6
        assert r == pytest.approx(3.5999961525014848e-8, rel=1e-6)
