"""Tests for correlations module."""

import math
from dataclasses import replace

import numpy as np
import pytest

from dqdcorr.engine.correlations import (
    INCOHERENT_THETA,
    block_sigma,
    concurrence_analytic,
    concurrence_numeric,
    concurrence_printed_form,
    correlated_coherence,
    correlated_coherence_closed_form,
    l1_coherence,
    local_unitary,
    printed_sigma,
    pure_state_concurrence,
    r_eigenvalues_numeric,
    r_spectrum_analytic,
    reduced_a,
    reduced_b,
    rotated_state,
    wootters,
)
from dqdcorr.engine.errors import InvalidParameterError, UnsupportedParameterError
from dqdcorr.engine.model import ModelParams, analytic_spectrum
from dqdcorr.engine.numkernel import SIGMA_Y_SIGMA_Y, partial_trace
from dqdcorr.engine.thermal import gibbs_analytic, gibbs_numeric

POINTS = [
    (10.0, 15.0, 160.0, 0.0),
    (10.0, 15.0, 160.0, 30.0),
    (10.0, 15.0, 10.0, 8.0),
    (10.0, 15.0, 10.0 / 3.0, 20.0),
    (1.0, 8.0, 20.0, 1.0),
    (2.0, 2.0, 7.0, 100.0),
    (3.0, -2.0, -5.0, 2.0),
]


def state(d1, d2, v, t):
    return gibbs_analytic(ModelParams(delta1=d1, delta2=d2, v=v), t)


class TestGroundStateConcurrence:
    """Tests for the T = 0 concurrence values."""

    @pytest.mark.parametrize(
        "d1,d2,v,expected",
        [
            (10.0, 15.0, 160.0, 0.988),
            (10.0, 15.0, 10.0 / 6.0, 0.066),
            (1.0, 8.0, 20.0, 0.912),
        ],
    )
    def test_quoted_values(self, d1, d2, v, expected):
        assert concurrence_analytic(state(d1, d2, v, 0.0)) == pytest.approx(expected, abs=2e-3)

    def test_equals_coulomb_ratio(self, strong_coulomb):
        # A pure ground state has C = V / sqrt((Δ1 + Δ2)^2 + V^2).
        c = concurrence_analytic(gibbs_analytic(strong_coulomb, 0.0))
        assert c == pytest.approx(160.0 / math.hypot(25.0, 160.0), abs=1e-12)

    def test_matches_pure_state_formula(self, weak_coulomb):
        psi = analytic_spectrum(weak_coulomb).ground_state
        c = concurrence_analytic(gibbs_analytic(weak_coulomb, 0.0))
        assert c == pytest.approx(pure_state_concurrence(psi), abs=1e-12)

    @pytest.mark.parametrize("delta", [1.0, 2.0, 5.0, 10.0])
    def test_uncoupled_dots_not_entangled(self, delta):
        s = state(delta, delta, 0.0, 0.1)
        assert concurrence_analytic(s) < 1e-9
        assert concurrence_numeric(s) < 1e-9

    def test_maximally_mixed(self, strong_coulomb):
        assert concurrence_analytic(gibbs_analytic(strong_coulomb, math.inf)) == 0.0


class TestRSpectrum:
    """Tests for r_spectrum_analytic and the numeric R eigenvalues."""

    @pytest.mark.parametrize("d1,d2,v,t", POINTS)
    def test_matches_numeric(self, d1, d2, v, t):
        p = ModelParams(delta1=d1, delta2=d2, v=v)
        analytic = r_spectrum_analytic(gibbs_analytic(p, t)).lambdas
        numeric = r_eigenvalues_numeric(gibbs_numeric(p, t))
        np.testing.assert_allclose(analytic, numeric, atol=1e-9)

    @pytest.mark.parametrize("d1,d2,v,t", POINTS)
    def test_trace_of_r(self, d1, d2, v, t):
        s = state(d1, d2, v, t)
        rho_tilde = SIGMA_Y_SIGMA_Y @ s.rho @ SIGMA_Y_SIGMA_Y
        expected = float(np.trace(s.rho @ rho_tilde))
        assert np.sum(r_spectrum_analytic(s).lambdas) == pytest.approx(expected, abs=1e-12)

    def test_sorted_and_non_negative(self):
        spectrum = r_spectrum_analytic(state(10.0, 15.0, 10.0, 8.0))
        assert np.all(np.diff(spectrum.lambdas) <= 0)
        assert np.all(spectrum.lambdas >= 0)
        np.testing.assert_allclose(spectrum.roots**2, spectrum.block_lambdas, atol=1e-15)

    @pytest.mark.parametrize("d1,d2,v,t", POINTS)
    def test_concurrence_matches_numeric(self, d1, d2, v, t):
        p = ModelParams(delta1=d1, delta2=d2, v=v)
        c = concurrence_analytic(gibbs_analytic(p, t))
        assert c == pytest.approx(concurrence_numeric(gibbs_numeric(p, t)), abs=1e-9)

    @pytest.mark.parametrize("d1,d2,v,t", POINTS)
    def test_printed_form_agrees(self, d1, d2, v, t):
        s = state(d1, d2, v, t)
        assert concurrence_printed_form(s) == pytest.approx(concurrence_analytic(s), abs=1e-9)

    def test_printed_sigma_differs(self):
        el = state(10.0, 15.0, 10.0, 8.0).elements
        plus, minus = block_sigma(el)
        printed_plus, printed_minus = printed_sigma(el)
        assert abs(plus - printed_plus) > 1e-6 or abs(minus - printed_minus) > 1e-6


class TestWootters:
    """Tests for wootters and pure_state_concurrence."""

    def test_sorts_roots(self):
        assert wootters([0.1, 0.9, 0.2, 0.05]) == pytest.approx(0.55)

    def test_clamps_at_zero(self):
        assert wootters([0.3, 0.3, 0.3, 0.1]) == 0.0

    def test_bell_like_state(self, make_state):
        a, b = 0.705, 0.055
        norm = math.sqrt(2 * (a * a + b * b))
        a, b = a / norm, b / norm
        s = make_state(a * a, a * b, a * b, a * a, b * b, b * b)
        expected = 2 * abs(a * a - b * b)
        assert concurrence_numeric(s) == pytest.approx(expected, abs=1e-9)
        assert concurrence_analytic(s) == pytest.approx(expected, abs=1e-12)

    def test_pure_state_shape(self):
        with pytest.raises(InvalidParameterError):
            pure_state_concurrence([1.0, 0.0])


class TestReducedStates:
    """Tests for reduced_a and reduced_b."""

    @pytest.mark.parametrize("d1,d2,v,t", POINTS)
    def test_match_partial_trace(self, d1, d2, v, t):
        s = state(d1, d2, v, t)
        np.testing.assert_allclose(reduced_a(s), partial_trace(s.rho, "A"), atol=1e-12)
        np.testing.assert_allclose(reduced_b(s), partial_trace(s.rho, "B"), atol=1e-12)

    def test_diagonal_is_half(self, strong_coulomb):
        s = gibbs_analytic(strong_coulomb, 10.0)
        assert reduced_a(s)[0, 0] == pytest.approx(0.5, abs=1e-12)
        assert reduced_b(s)[1, 1] == pytest.approx(0.5, abs=1e-12)

    def test_ground_state_off_diagonal(self, strong_coulomb):
        ll, lr, _, _ = analytic_spectrum(strong_coulomb).ground_state
        s = gibbs_analytic(strong_coulomb, 0.0)
        assert reduced_a(s)[0, 1] == pytest.approx(2 * ll * lr, abs=1e-12)
        assert reduced_a(s)[0, 1] == pytest.approx(-0.0776, abs=1e-3)


class TestLocalUnitary:
    """Tests for local_unitary function."""

    def test_identity_at_zero(self):
        np.testing.assert_array_equal(local_unitary(0.0), np.eye(2))

    def test_composition(self):
        u = local_unitary(INCOHERENT_THETA)
        np.testing.assert_allclose(u @ u, local_unitary(math.pi / 2), atol=1e-15)
        np.testing.assert_allclose(u @ u.T, np.eye(2), atol=1e-15)

    def test_incoherent_basis_diagonalizes_reduced_state(self, strong_coulomb):
        s = gibbs_analytic(strong_coulomb, 5.0)
        u = local_unitary(INCOHERENT_THETA)
        for reduced in (reduced_a(s), reduced_b(s)):
            rotated = u @ reduced @ u.T
            assert abs(rotated[0, 1]) < 1e-15

    def test_phi_unsupported(self):
        with pytest.raises(UnsupportedParameterError, match="phi"):
            local_unitary(0.1, phi=0.5)

    @pytest.mark.parametrize("theta", [-0.1, 2.0, math.nan])
    def test_theta_out_of_range(self, theta):
        with pytest.raises(InvalidParameterError, match="theta"):
            local_unitary(theta)


class TestL1Coherence:
    """Tests for l1_coherence function."""

    def test_diagonal_is_incoherent(self):
        assert l1_coherence(np.diag([0.1, 0.2, 0.3, 0.4])) == 0.0

    def test_sum_of_off_diagonal(self):
        assert l1_coherence([[0.5, -0.2], [-0.2, 0.5]]) == pytest.approx(0.4)

    def test_ground_state(self, strong_coulomb):
        s = gibbs_analytic(strong_coulomb, 0.0)
        assert l1_coherence(s.rho) == pytest.approx(1.31, abs=1e-2)

    def test_rejects_non_square(self):
        with pytest.raises(InvalidParameterError):
            l1_coherence(np.ones((2, 3)))


class TestCorrelatedCoherence:
    """Tests for correlated_coherence and its closed form."""

    def test_incoherent_basis_has_no_local_coherence(self, strong_coulomb):
        m = correlated_coherence(gibbs_analytic(strong_coulomb, 20.0))
        assert m.c_l1_local < 1e-12
        assert m.c_cc == pytest.approx(m.c_l1_total, abs=1e-12)

    def test_energy_basis(self, strong_coulomb):
        s = gibbs_analytic(strong_coulomb, 20.0)
        m = correlated_coherence(s, theta=0.0)
        assert m.c_l1_total == pytest.approx(l1_coherence(s.rho), abs=1e-15)
        assert m.c_l1_local == pytest.approx(
            l1_coherence(reduced_a(s)) + l1_coherence(reduced_b(s)), abs=1e-15
        )
        assert m.c_cc == pytest.approx(m.c_l1_total - m.c_l1_local, abs=1e-15)

    @pytest.mark.parametrize("d1,d2,v,t", POINTS)
    def test_closed_form(self, d1, d2, v, t):
        s = state(d1, d2, v, t)
        closed = correlated_coherence_closed_form(s)
        assert closed == pytest.approx(correlated_coherence(s).c_cc, abs=1e-12)

    @pytest.mark.parametrize("d1,d2,v,t", POINTS)
    def test_bounds_concurrence(self, d1, d2, v, t):
        m = correlated_coherence(state(d1, d2, v, t))
        assert m.c_cc >= m.concurrence - 1e-10

    @pytest.mark.parametrize("v", [10.0, 10.0 / 3.0])
    def test_captures_entanglement_at_low_temperature(self, v):
        m = correlated_coherence(state(10.0, 15.0, v, 0.01))
        assert m.c_cc == pytest.approx(m.concurrence, abs=1e-6)

    def test_maximally_mixed(self, strong_coulomb):
        m = correlated_coherence(gibbs_analytic(strong_coulomb, math.inf))
        assert m.c_l1_total < 1e-15
        assert m.c_cc < 1e-15

    def test_local_coherence_per_dot(self, strong_coulomb):
        s = gibbs_analytic(strong_coulomb, 20.0)
        m = correlated_coherence(s, theta=0.0)
        assert m.c_l1_a == pytest.approx(2.0 * abs(reduced_a(s)[0, 1]), abs=1e-15)
        assert m.c_l1_b == pytest.approx(2.0 * abs(reduced_b(s)[0, 1]), abs=1e-15)
        assert m.c_l1_a + m.c_l1_b == m.c_l1_local
        assert m.c_l1_a > 0.0

    def test_as_dict(self, strong_coulomb):
        d = correlated_coherence(gibbs_analytic(strong_coulomb, 1.0), theta=0.3).as_dict()
        assert d["theta"] == 0.3
        assert d["phi"] == 0.0
        assert set(d) >= {"concurrence", "c_l1_total", "c_l1_local", "c_cc"}

    def test_concurrence_invariant_under_local_rotation(self):
        rng = np.random.default_rng(2024)
        for _ in range(100):
            d1, d2 = rng.uniform(0.0, 20.0, size=2)
            v = rng.uniform(0.0, 200.0)
            t = 10.0 ** rng.uniform(-1.0, 2.0)
            theta = rng.uniform(0.0, math.pi / 2)
            s = state(d1, d2, v, t)
            rotated = replace(s, rho=rotated_state(s, theta))
            assert concurrence_numeric(rotated) == pytest.approx(
                concurrence_analytic(s), abs=1e-10
            )
