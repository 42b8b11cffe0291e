import math

import numpy as np
import pytest

from conftest import PERIOD, const, random_fifo_ttf, ttf
from ttf import (TTF, BoundPair, PeriodMismatchError, TimeInterval, approximate, arrival,
                 eval_many, evaluate, global_max, global_min, interval_contains, is_fifo,
                 link, link_bounds, lower_bound, max_over, mean_value, min_over, minimum,
                 minimum_bounds, undercut_intervals, upper_bound)

# randomized cases per property; raise for a longer soak
CASES = 300


def _close(a, b, tol=1e-6):
    return abs(a - b) <= tol * max(1.0, abs(b))


def _taus(rng, n=50):
    return rng.uniform(-PERIOD, 2 * PERIOD, size=n)


# =============================================================================
# construction and evaluation
# =============================================================================

def test_constant_evaluates_everywhere():
    f = const(5)
    assert evaluate(f, 1234) == 5
    assert f.is_constant
    assert global_min(f) == global_max(f) == 5


def test_evaluate_linear_segment_and_periodicity():
    f = ttf([(0, 10), (100, 20)], period=200)
    assert evaluate(f, 50) == pytest.approx(15)
    assert evaluate(f, 250) == pytest.approx(15)
    # wrap segment (100, 20) -> (200, 10)
    assert evaluate(f, 150) == pytest.approx(15)
    assert evaluate(f, -50) == pytest.approx(15)
    assert arrival(f, 50) == pytest.approx(65)


def test_global_extrema_at_breakpoints():
    f = ttf([(0, 10), (100, 20)], period=200)
    assert (global_min(f), global_max(f)) == (10, 20)


def test_mean_and_window_extrema():
    f = ttf([(0, 10), (100, 20)], period=200)
    assert mean_value(f) == pytest.approx(15)
    assert min_over(f, 20, 60) == pytest.approx(12)
    assert max_over(f, 20, 60) == pytest.approx(16)
    # window wrapping over the period end contains the breakpoint at 0
    assert min_over(f, 150, 250) == pytest.approx(10)
    assert max_over(f, 0, 1000) == 20


@pytest.mark.parametrize("times, values, period", [
    ([], [], 100),
    ([0, 10], [1], 100),
    ([10, 0], [1, 1], 100),
    ([0, 100], [1, 1], 100),
    ([0], [-1], 100),
    ([0], [1], 0),
])
def test_invalid_ttf_rejected(times, values, period):
    with pytest.raises(ValueError):
        TTF(times, values, period)


def test_is_fifo():
    assert is_fifo(const(5))
    assert not is_fifo(ttf([(0, 10), (5, 0)], period=10))
    assert is_fifo(ttf([(0, 10), (5, 5.5)], period=10))


def test_ttf_arrays_are_read_only():
    f = ttf([(0, 10), (100, 20)])
    with pytest.raises(ValueError):
        f.values[0] = 3


def test_interval_contains_wraps():
    iv = TimeInterval(900, 1100)
    assert interval_contains(iv, 950, PERIOD)
    assert interval_contains(iv, 50, PERIOD)
    assert not interval_contains(iv, 500, PERIOD)
    assert interval_contains(TimeInterval(0, PERIOD), 123, PERIOD)


# =============================================================================
# algebra on small cases
# =============================================================================

def test_link_constants():
    f = link(const(2), const(3))
    assert f.is_constant
    assert evaluate(f, 77) == pytest.approx(5)


def test_link_zero_is_identity():
    g = ttf([(0, 10), (300, 40), (600, 20)])
    f = link(const(0), g)
    taus = np.linspace(0, PERIOD, 101)
    assert np.allclose(eval_many(f, taus), eval_many(g, taus))


def test_minimum_trivial_cases():
    f = const(2)
    assert minimum(f, const(3)) is f
    g = ttf([(0, 10), (300, 40)])
    assert minimum(g, g) is g


def test_minimum_crossing():
    f = const(5, period=100)
    g = ttf([(0, 2), (50, 8)], period=100)
    env = minimum(f, g)
    taus = np.linspace(0, 100, 10_001)
    expected = np.minimum(5.0, eval_many(g, taus))
    assert np.allclose(eval_many(env, taus), expected, atol=1e-9)
    assert np.allclose(eval_many(env, np.linspace(25, 75, 51)), 5.0, atol=1e-9)


def test_undercut_intervals_small_cases():
    assert undercut_intervals(const(2), const(3)) == [TimeInterval(0.0, PERIOD)]
    g = ttf([(0, 10), (300, 40)])
    assert undercut_intervals(g, g) == []

    f = const(5, period=100)
    g = ttf([(0, 2), (50, 8)], period=100)
    [inside] = undercut_intervals(f, g)
    assert (inside.begin, inside.end) == pytest.approx((25, 75))
    # g < 5 on [0, 25) and (75, 100): one interval wrapping past the period
    [wrapped] = undercut_intervals(g, f)
    assert (wrapped.begin, wrapped.end) == pytest.approx((75, 125))


def test_undercut_tolerance_hides_small_gaps():
    assert undercut_intervals(const(3 - 1e-12), const(3), tolerance=1e-9) == []


def test_period_mismatch():
    with pytest.raises(PeriodMismatchError):
        link(const(1, 100), const(1, 200))
    with pytest.raises(PeriodMismatchError):
        minimum(const(1, 100), const(1, 200))


# =============================================================================
# approximation
# =============================================================================

def test_approximate_degenerate_cases():
    f = ttf([(0, 10), (300, 40)])
    assert approximate(f, 0.0).is_exact
    assert approximate(const(7), 0.5).is_exact
    with pytest.raises(ValueError):
        approximate(f, -0.1)


def test_approximate_sawtooth_shrinks_and_sandwiches():
    times = np.arange(1000) * (PERIOD / 1000)
    values = 100.0 + (np.arange(1000) % 50)
    f = TTF(times, values, PERIOD)
    eps = 0.1
    bounds = approximate(f, eps)
    taus = np.linspace(0, PERIOD, 10_000, endpoint=False)
    exact = eval_many(f, taus)
    lo, hi = eval_many(bounds.lower, taus), eval_many(bounds.upper, taus)
    assert np.all(lo <= exact + 1e-9)
    assert np.all(exact <= hi + 1e-9)
    assert np.all(hi <= (1 + eps) * exact + 1e-9)
    assert np.all(lo >= exact / (1 + eps) - 1e-9)
    assert len(bounds.lower) < len(f) and len(bounds.upper) < len(f)


def test_bound_pair_composition():
    a = BoundPair.exact(const(2))
    b = BoundPair.exact(const(3))
    assert link_bounds(a, b).is_exact
    assert minimum_bounds(a, b).lower is a.lower
    loose = BoundPair(const(1), const(4))
    pair = link_bounds(loose, b)
    assert evaluate(pair.lower, 0) == pytest.approx(4)
    assert evaluate(pair.upper, 0) == pytest.approx(7)
    assert pair.point_count == 2


# =============================================================================
# randomized properties
# =============================================================================

def test_link_matches_pointwise_chaining(rng):
    for _ in range(CASES):
        f, g = random_fifo_ttf(rng), random_fifo_ttf(rng)
        h = link(f, g)
        for tau in _taus(rng, 20):
            expected = evaluate(f, tau) + evaluate(g, tau + evaluate(f, tau))
            assert _close(evaluate(h, tau), expected)


def test_fifo_closed_under_link_and_minimum(rng):
    for _ in range(CASES):
        f, g = random_fifo_ttf(rng), random_fifo_ttf(rng)
        assert is_fifo(f) and is_fifo(g)
        assert is_fifo(link(f, g))
        assert is_fifo(minimum(f, g))


def test_link_is_associative(rng):
    for _ in range(CASES // 3):
        f, g, h = (random_fifo_ttf(rng) for _ in range(3))
        left, right = link(link(f, g), h), link(f, link(g, h))
        for tau in _taus(rng, 20):
            assert _close(evaluate(left, tau), evaluate(right, tau))


def test_minimum_is_lower_envelope(rng):
    for _ in range(CASES):
        f, g = random_fifo_ttf(rng), random_fifo_ttf(rng)
        env = minimum(f, g)
        taus = _taus(rng)
        expected = np.minimum(eval_many(f, taus), eval_many(g, taus))
        assert np.allclose(eval_many(env, taus), expected, rtol=1e-9, atol=1e-9)


def test_undercut_intervals_agree_with_sampling(rng):
    for _ in range(CASES):
        f, g = random_fifo_ttf(rng), random_fifo_ttf(rng)
        intervals = undercut_intervals(f, g)
        for tau in rng.uniform(0, PERIOD, size=50):
            diff = evaluate(g, tau) - evaluate(f, tau)
            inside = any(interval_contains(iv, tau, PERIOD) for iv in intervals)
            if diff > 1e-6:
                assert inside
            elif diff < -1e-6:
                assert not inside


@pytest.mark.parametrize("eps", [0.1, 1.0])
def test_approximation_sandwich(rng, eps):
    for _ in range(CASES):
        f = link(random_fifo_ttf(rng), random_fifo_ttf(rng))
        lo, hi = lower_bound(f, eps), upper_bound(f, eps)
        assert len(lo) <= len(f) and len(hi) <= len(f)
        assert is_fifo(lo) and is_fifo(hi)
        taus = _taus(rng)
        exact = eval_many(f, taus)
        tol = 1e-9 * np.maximum(1.0, exact)
        assert np.all(eval_many(lo, taus) <= exact + tol)
        assert np.all(eval_many(hi, taus) >= exact - tol)
        assert np.all(eval_many(hi, taus) <= (1 + eps) * exact + tol)


def test_evaluation_is_periodic_and_vectorised(rng):
    for _ in range(CASES):
        f = random_fifo_ttf(rng)
        taus = rng.uniform(0, PERIOD, size=20)
        shifted = taus + PERIOD * rng.integers(-3, 4, size=20)
        direct = np.array([evaluate(f, t) for t in taus])
        assert np.allclose(eval_many(f, shifted), direct, rtol=1e-9, atol=1e-9)
        assert np.allclose([evaluate(f, t) for t in shifted], direct, rtol=1e-9, atol=1e-9)


def test_global_extrema_match_dense_sampling(rng):
    for _ in range(CASES // 3):
        f = random_fifo_ttf(rng)
        dense = eval_many(f, np.concatenate([np.linspace(0, PERIOD, 2001), f.times]))
        assert math.isclose(dense.min(), global_min(f), abs_tol=1e-9)
        assert math.isclose(dense.max(), global_max(f), abs_tol=1e-9)
