import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betlab.core import (
    NullSpec,
    PathState,
    fraction_bounds,
    predictable_min_wealth,
    wealth_update,
)


class TestFractionBounds:
    def test_symmetric_null(self):
        b = fraction_bounds(NullSpec(0.5))
        assert b.lo == -2.0 and b.hi == 2.0

    def test_quarter_null(self):
        b = fraction_bounds(NullSpec(0.25))
        assert math.isclose(b.lo, -4.0 / 3.0) and b.hi == 4.0

    def test_high_null(self):
        b = fraction_bounds(NullSpec(0.9))
        assert math.isclose(b.lo, -10.0) and math.isclose(b.hi, 10.0 / 9.0)

    @pytest.mark.parametrize("m", [0.0, 1.0, -0.1, 1.5])
    def test_rejects_boundary_means(self, m):
        with pytest.raises(ValueError):
            NullSpec(m)


class TestWealthUpdate:
    def test_all_in_loss_bankrupts(self):
        null = NullSpec(0.5)
        s = wealth_update(PathState(), 2.0, 0.0, null)
        assert s.bankrupt and s.log_wealth == -math.inf and s.wealth == 0.0

    def test_no_bet_keeps_unit_wealth(self):
        null = NullSpec(0.5)
        s = PathState()
        for x in (0.0, 0.3, 1.0):
            s = wealth_update(s, 0.0, x, null)
        assert s.log_wealth == 0.0 and s.n == 3

    def test_quarter_win(self):
        s = wealth_update(PathState(), 1.0, 0.75, NullSpec(0.5))
        assert math.isclose(s.wealth, 1.25, rel_tol=1e-15)

    def test_rejects_bad_inputs(self):
        null = NullSpec(0.5)
        with pytest.raises(ValueError):
            wealth_update(PathState(), 2.5, 0.5, null)
        with pytest.raises(ValueError):
            wealth_update(PathState(), 0.5, 1.1, null)

    def test_clamps_observations_within_tolerance(self):
        s = wealth_update(PathState(), 1.0, 1.0 + 5e-13, NullSpec(0.5))
        assert math.isclose(s.wealth, 1.5, rel_tol=1e-12)
        assert s.sum_x == 1.0

    def test_history_accumulates_when_enabled(self):
        null = NullSpec(0.5)
        s = PathState().with_history()
        s = wealth_update(s, 0.1, 0.25, null)
        s = wealth_update(s, 0.1, 0.75, null)
        assert s.history == (0.25, 0.75)
        assert PathState().history is None

    @given(
        lams=st.lists(st.floats(-1.9, 1.9), min_size=1, max_size=30),
        xs=st.lists(st.sampled_from([0.0, 0.25, 0.5, 0.75, 1.0]), min_size=1, max_size=30),
    )
    @settings(max_examples=100, deadline=None)
    def test_bankruptcy_is_absorbing(self, lams, xs):
        null = NullSpec(0.5)
        s = wealth_update(PathState(), 2.0, 0.0, null)  # bankrupt at step 1
        for lam, x in zip(lams, xs):
            s = wealth_update(s, lam, x, null)
            assert s.bankrupt and s.log_wealth == -math.inf

    def test_log_domain_matches_direct_product(self, rng):
        # brute-force oracle: the plain running product in linear arithmetic
        null = NullSpec(0.3)
        n = 10_000
        xs = rng.random(n)
        lams = rng.uniform(-0.9, 0.9, n)
        s = PathState()
        direct = 1.0
        for lam, x in zip(lams, xs):
            # every multiplier stays >= 0.37 here, so the product is exact-safe
            s = wealth_update(s, lam, x, null)
            direct *= 1.0 + lam * (x - null.m)
        assert math.isclose(s.wealth, direct, rel_tol=1e-9)

    def test_one_step_multiplier_is_fair_in_expectation(self):
        # analytic martingale check on finitely supported null distributions
        cases = [
            ([0.0, 1.0], [0.5, 0.5], 0.5),
            ([0.0, 0.5, 1.0], [0.25, 0.5, 0.25], 0.5),
            ([0.1, 0.9], [0.75, 0.25], 0.3),
        ]
        for points, probs, m in cases:
            assert math.isclose(sum(p * v for p, v in zip(probs, points)), m, abs_tol=1e-15)
            for lam in (-1.0, -0.2, 0.0, 0.4, 1.0):
                e = sum(p * (1.0 + lam * (v - m)) for p, v in zip(probs, points))
                assert math.isclose(e, 1.0, abs_tol=1e-12)


class TestPredictableMinWealth:
    def test_basic_two_point_minimum(self):
        assert math.isclose(predictable_min_wealth(PathState(), 0.3, NullSpec(0.5)), 0.85)

    def test_no_bet(self):
        assert predictable_min_wealth(PathState(), 0.0, NullSpec(0.5)) == 1.0

    def test_negative_fraction_from_wealth_two(self):
        s = wealth_update(PathState(), 2.0, 1.0, NullSpec(0.5))  # wealth 2
        assert math.isclose(predictable_min_wealth(s, -1.0, NullSpec(0.5)), 1.0)

    def test_lower_bounds_every_realized_update(self):
        null = NullSpec(0.5)
        state = wealth_update(PathState(), 0.5, 0.75, null)
        for lam in (-1.5, -0.3, 0.0, 0.7, 1.9):
            floor = predictable_min_wealth(state, lam, null)
            for x in (0.0, 0.25, 0.5, 0.75, 1.0):
                nxt = wealth_update(state, lam, x, null)
                assert nxt.wealth >= floor - 1e-12
