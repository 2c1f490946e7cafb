import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st

from lilucb.confidence import (
    InfeasibleError,
    LilParams,
    UcbParams,
    VacuousBoundError,
    Variant,
    lil_failure_probability,
    lil_radius,
    ls_radius,
    map_confidence_heuristic,
    map_confidence_theory,
    min_exploration_a,
    rho,
    theorem_failure_bound,
    ucb_index,
    validate_params,
)

mpmath.mp.dps = 50
mpf = mpmath.mpf

STRICT = Variant.STRICT
PLUS2 = Variant.PLUS_TWO


def mp_radius(t, eps, delta, sigma, plus_two):
    eps, delta, sigma = mpf(eps), mpf(delta), mpf(sigma)
    inner = (1 + eps) * t + (2 if plus_two else 0)
    return (1 + mpmath.sqrt(eps)) * mpmath.sqrt(
        2 * sigma**2 * (1 + eps) * mpmath.log(mpmath.log(inner) / delta) / t)


def mp_rho(eps):
    eps = mpf(eps)
    return (2 + eps) / eps * (1 / mpmath.log(1 + eps)) ** (1 + eps)


class TestLilRadius:
    def test_plus_two_t1(self):
        r = lil_radius(1, LilParams(eps=0.0, delta=0.01, scale=0.5))
        assert r == pytest.approx(1.5328434384510360, rel=1e-12)
        assert r == pytest.approx(float(mp_radius(1, 0, "0.01", "0.5", True)), rel=1e-12)

    @pytest.mark.parametrize("t", [1, 2, 7, 100, 12345])
    @pytest.mark.parametrize("variant", [STRICT, PLUS2])
    def test_matches_high_precision(self, t, variant):
        p = LilParams(eps=0.5, delta=0.02, scale=0.7, variant=variant)
        expected = mp_radius(t, "0.5", "0.02", "0.7", variant is PLUS2)
        assert lil_radius(t, p) == pytest.approx(float(expected), rel=1e-12)

    def test_sigma_is_linear(self):
        for t in (1, 10, 1000):
            a = lil_radius(t, LilParams(eps=0.01, delta=0.05, scale=0.5))
            b = lil_radius(t, LilParams(eps=0.01, delta=0.05, scale=1.0))
            assert b == pytest.approx(2 * a, rel=1e-14)

    def test_rejects_t0_and_invalid_strict(self):
        with pytest.raises(ValueError):
            lil_radius(0, LilParams())
        with pytest.raises(ValueError):
            lil_radius(5, LilParams(eps=0.01, delta=0.1, variant=STRICT))
        with pytest.raises(ValueError):
            lil_radius(5, LilParams(eps=0.0, delta=0.001, variant=STRICT))

    def test_strict_defined_from_t1_when_valid(self):
        # valid strict parameters keep the radius defined at every t >= 1
        p = LilParams(eps=1.0, delta=0.05, scale=1.0, variant=STRICT)
        assert lil_radius(1, p) > 0

    @pytest.mark.parametrize("eps", [0.0, 0.01, 1.0])
    @pytest.mark.parametrize("delta", [0.005, 0.02, 0.1, 0.2])
    def test_plus_two_strictly_decreasing_in_t(self, eps, delta):
        p = LilParams(eps=eps, delta=delta, scale=0.5)
        # geometric grid plus a dense prefix over [1, 1e6]
        ts = np.unique(np.concatenate([np.arange(1, 2000),
                                       np.geomspace(2000, 1e6, 400).astype(int)]))
        radii = [lil_radius(int(t), p) for t in ts]
        assert all(b < a for a, b in zip(radii, radii[1:]))
        assert lil_radius(10**12, p) < 1e-4

    def test_monotone_in_eps_and_delta(self):
        for t in (1, 10, 1000, 10**6):
            by_eps = [lil_radius(t, LilParams(eps=e, delta=0.05)) for e in (0, 0.01, 0.1, 0.5, 1)]
            assert all(b > a for a, b in zip(by_eps, by_eps[1:]))
            by_delta = [lil_radius(t, LilParams(eps=0.01, delta=d)) for d in (0.005, 0.02, 0.1, 0.2, 0.9)]
            assert all(b < a for a, b in zip(by_delta, by_delta[1:]))


class TestUcbIndex:
    def test_example(self):
        up = UcbParams(LilParams(eps=0.0, delta=0.02, scale=0.5), beta=0.5, a=6)
        assert ucb_index(0.5, 4, up) == pytest.approx(1.6244024770947408, rel=1e-12)

    def test_beta_zero_limit(self):
        lil = LilParams(eps=0.01, delta=0.05)
        # beta must be positive; a tiny beta approaches mean + radius
        up = UcbParams(lil, beta=1e-15, a=1)
        assert ucb_index(0.2, 9, up) == pytest.approx(0.2 + lil_radius(9, lil), rel=1e-12)
        with pytest.raises(ValueError):
            UcbParams(lil, beta=0.0)

    @given(st.floats(-10, 10), st.floats(-10, 10), st.integers(1, 10**6))
    def test_offset_independent_of_mean(self, m1, m2, t):
        up = UcbParams(LilParams(eps=0.01, delta=0.05), beta=1.0)
        d1 = ucb_index(m1, t, up) - m1
        d2 = ucb_index(m2, t, up) - m2
        assert d1 == pytest.approx(d2, abs=1e-12)

    @given(st.lists(st.tuples(st.floats(-1, 1), st.integers(1, 500)), min_size=2, max_size=20),
           st.sampled_from([0.0, 0.25, 3.0, -2.0]))
    def test_argmax_invariant_under_shift(self, arms, shift):
        up = UcbParams(LilParams(eps=0.0, delta=0.02), beta=0.5)
        base = [ucb_index(m, t, up) for m, t in arms]
        shifted = [ucb_index(m + shift, t, up) for m, t in arms]
        top = max(base)
        # a shift can only reorder exact floating ties; compare away from them
        if sorted(base)[-2] < top - 1e-9:
            assert int(np.argmax(base)) == int(np.argmax(shifted))


class TestLsRadius:
    def test_example(self):
        r = ls_radius(4, 10, LilParams(eps=0.01, delta=0.05, scale=0.5))
        assert r == pytest.approx(1.0024606499948318, rel=1e-12)

    def test_rejects_single_arm(self):
        with pytest.raises(ValueError):
            ls_radius(4, 1, LilParams())

    @pytest.mark.parametrize("n", [2, 3, 10, 1000])
    def test_dominates_plus_two_radius(self, n):
        p = LilParams(eps=0.01, delta=0.05, scale=0.5)
        for t in (1, 5, 100, 10**5):
            assert ls_radius(t, n, p) >= lil_radius(t, p)


class TestGuaranteeConstants:
    def test_rho_values(self):
        assert rho(1.0) == pytest.approx(float(mp_rho(1)), rel=1e-12)
        assert rho(1.0) == pytest.approx(3 / math.log(2) ** 2, rel=1e-12)
        assert rho(0.01) == pytest.approx(2.11534e4, rel=1e-5)

    def test_rho_decreasing(self):
        grid = np.linspace(0.01, 2.0, 400)
        values = [rho(e) for e in grid]
        assert all(b < a for a, b in zip(values, values[1:]))

    def test_rho_rejects_nonpositive(self):
        for e in (0.0, -0.5):
            with pytest.raises(ValueError):
                rho(e)

    def test_min_exploration_a(self):
        assert min_exploration_a(0.01, 1.0) == pytest.approx(45.28660615870329, rel=1e-12)

    def test_min_exploration_a_infeasible(self):
        with pytest.raises(InfeasibleError):
            min_exploration_a(0.2, 1.0)

    def test_min_exploration_a_large_beta_limit(self):
        delta = 0.01
        denom = 1 - delta - math.sqrt(math.sqrt(delta) * math.log(1 / delta))
        limit = (1 + math.log(2 * math.log(1 / delta)) / math.log(1 / delta)) / denom
        assert min_exploration_a(delta, 1e9) == pytest.approx(limit, rel=1e-6)

    def test_failure_bound(self):
        assert theorem_failure_bound(1e-4, 1.0) == pytest.approx(0.027487414412951964, rel=1e-12)
        assert theorem_failure_bound(1e-12, 1.0) < 1e-5

    def test_failure_bound_vacuous(self):
        with pytest.raises(VacuousBoundError):
            theorem_failure_bound(0.1, 0.01)

    def test_deviation_failure_probability(self):
        assert lil_failure_probability(1.0, 0.05) == pytest.approx(0.015610267357542058, rel=1e-12)


class TestConfidenceMaps:
    def test_theory_map(self):
        assert map_confidence_theory(0.1, 0.01) == pytest.approx(1.0900824427371811e-4, rel=1e-12)
        assert map_confidence_theory(0.15, 1.0) == pytest.approx(0.1, rel=1e-12)

    def test_theory_map_increasing_in_nu(self):
        values = [map_confidence_theory(nu, 0.01) for nu in np.linspace(0.01, 0.99, 99)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_heuristic_map(self):
        assert map_confidence_heuristic(0.1) == pytest.approx(0.02)
        assert map_confidence_heuristic(0.5) == pytest.approx(0.1)
        assert map_confidence_heuristic(1e-12) == pytest.approx(2e-13)
        with pytest.raises(ValueError):
            map_confidence_heuristic(1.0)


class TestValidateParams:
    def test_strict_ok(self):
        assert validate_params(LilParams(eps=1.0, delta=0.2, variant=STRICT)) is None

    def test_strict_violation_names_range(self):
        msg = validate_params(LilParams(eps=0.01, delta=0.1, variant=STRICT))
        assert msg is not None and "0.00366" in msg

    def test_plus_two_full_range(self):
        assert validate_params(LilParams(eps=0.0, delta=0.9)) is None

    def test_other_violations(self):
        assert validate_params(LilParams(delta=1.0)) is not None
        assert validate_params(LilParams(scale=0.0)) is not None
        assert validate_params(LilParams(eps=-0.1)) is not None
