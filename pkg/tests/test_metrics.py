import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopcpt.core import PredictionInterval
from hopcpt.metrics import covered_flags, delta_cov, evaluate, local_coverage, winkler_score

# Six hand-scored steps at alpha = 0.5 (so 2/alpha = 4):
#   [0,2] y=1   covered        W = 2
#   [0,2] y=3   above by 1     W = 2 + 4*1   = 6
#   [1,2] y=0.5 below by 0.5   W = 1 + 4*0.5 = 3
#   [-1,1] y=1  on upper bound W = 2
#   [-1,1] y=-1 on lower bound W = 2
#   [0,4] y=2   covered        W = 4
FIXTURE_ALPHA = 0.5
FIXTURE_BOUNDS = [(0, 2), (0, 2), (1, 2), (-1, 1), (-1, 1), (0, 4)]
FIXTURE_Y = [1.0, 3.0, 0.5, 1.0, -1.0, 2.0]


def fixture_intervals():
    return [PredictionInterval(lo, hi, FIXTURE_ALPHA) for lo, hi in FIXTURE_BOUNDS]


def test_fixture_by_hand():
    ivs = fixture_intervals()
    assert list(covered_flags(ivs, FIXTURE_Y)) == [True, False, False, True, True, True]
    assert [winkler_score(iv, y, FIXTURE_ALPHA) for iv, y in zip(ivs, FIXTURE_Y)] == [2, 6, 3, 2, 2, 4]
    report = evaluate(ivs, FIXTURE_Y, FIXTURE_ALPHA, window_sizes=(3,))
    assert abs(report.delta_cov - (0.5 - 2 / 6)) <= 1e-12
    assert abs(report.mean_pi_width - 13 / 6) <= 1e-12
    assert abs(report.mean_winkler - 19 / 6) <= 1e-12
    # windows: 2 misses of 3 -> gap -1/6; no misses -> gap capped at 0
    assert abs(report.local_coverage[3] - 1 / 12) <= 1e-12
    assert abs(report.mean_pi_width_norm - (13 / 6) / (8.5 / 6)) <= 1e-12
    assert report.n_test == 6 and report.n_uninformative == 0


def test_local_coverage_rolling_fixture():
    # rolling windows of 3 miss 2, 2, 1, 0 times -> capped gaps -1/6, -1/6, 0, 0
    lc = local_coverage(fixture_intervals(), FIXTURE_Y, FIXTURE_ALPHA, 3, rolling=True)
    assert abs(lc - 1 / 12) <= 1e-12


def test_local_coverage_two_windows():
    ivs = [PredictionInterval(-1, 1, 0.1)] * 20
    y = np.zeros(20)
    y[[12, 17]] = 5.0  # second window misses twice
    assert abs(local_coverage(ivs, y, 0.1, 10) - 0.05) <= 1e-12
    assert local_coverage(ivs[:10], y[:10], 0.1, 10) == 0.0


def test_local_coverage_drops_remainder_and_rejects_short():
    ivs = [PredictionInterval(-1, 1, 0.1)] * 13
    y = np.zeros(13)
    y[11] = 9.0  # in the dropped tail
    assert local_coverage(ivs, y, 0.1, 10) == 0.0
    with pytest.raises(ValueError):
        local_coverage(ivs, y, 0.1, 20)
    assert 20 not in evaluate(ivs, y, 0.1, window_sizes=(10, 20)).local_coverage


def test_winkler_branches_exact():
    iv = PredictionInterval(1.0, 3.0, 0.2)
    assert winkler_score(iv, 2.0, 0.2) == 2.0
    assert winkler_score(iv, 0.0, 0.2) == 2.0 + 10.0 * 1.0
    assert winkler_score(iv, 4.5, 0.2) == 2.0 + 10.0 * 1.5
    assert winkler_score(iv, 3.0, 0.2) == 2.0


def test_uninformative_counted():
    ivs = [PredictionInterval(0, math.inf, 0.1, informative=False), PredictionInterval(0, 1, 0.1)]
    r = evaluate(ivs, [0.5, 0.5], 0.1, window_sizes=())
    assert r.n_uninformative == 1 and math.isinf(r.mean_pi_width)


def test_length_mismatch():
    with pytest.raises(ValueError):
        delta_cov([PredictionInterval(0, 1, 0.1)], [1.0, 2.0], 0.1)


cases = st.lists(st.tuples(st.floats(-10, 10), st.floats(0, 5), st.floats(-15, 15)), min_size=1, max_size=60)


def build(rows, alpha):
    return [PredictionInterval(c - h, c + h, alpha) for c, h, _ in rows], [y for _, _, y in rows]


@settings(max_examples=200)
@given(cases, st.floats(0.01, 0.99))
def test_delta_cov_bounds_and_winkler_dominates_width(rows, alpha):
    ivs, y = build(rows, alpha)
    d = delta_cov(ivs, y, alpha)
    assert alpha - 1 - 1e-12 <= d <= alpha + 1e-12
    for iv, t in zip(ivs, y):
        assert winkler_score(iv, t, alpha) >= iv.width


@settings(max_examples=100)
@given(cases, st.floats(0.01, 0.5), st.integers(1, 10))
def test_widening_never_hurts_local_coverage(rows, alpha, k):
    if len(rows) < k:
        return
    ivs, y = build(rows, alpha)
    wider = [PredictionInterval(iv.lower - 1, iv.upper + 1, alpha) for iv in ivs]
    for rolling in (False, True):
        narrow_lc = local_coverage(ivs, y, alpha, k, rolling)
        wide_lc = local_coverage(wider, y, alpha, k, rolling)
        assert 0.0 <= wide_lc <= narrow_lc + 1e-12


def _hits(misses, n=100):
    ivs = [PredictionInterval(-1, 1, 0.1)] * n
    y = np.zeros(n)
    y[list(misses)] = 5.0
    return ivs, y


@pytest.mark.parametrize("n_miss, expected", [(0, 0.1), (8, 0.02), (15, -0.05)])
def test_delta_cov_examples(n_miss, expected):
    ivs, y = _hits(range(n_miss))
    assert abs(delta_cov(ivs, y, 0.1) - expected) <= 1e-15


@pytest.mark.parametrize("bounds, y, alpha, expected", [
    ((0, 1), 0.5, 0.1, 1.0), ((0, 1), 1.5, 0.1, 11.0), ((0, 1), -0.25, 0.5, 2.0),
])
def test_winkler_examples(bounds, y, alpha, expected):
    assert winkler_score(PredictionInterval(*bounds, alpha), y, alpha) == expected


def test_evaluate_trivial_cases():
    y = np.array([1.0, -2.0, 3.5])
    r = evaluate([PredictionInterval(v, v, 0.1) for v in y], y, 0.1, window_sizes=())
    assert (r.delta_cov, r.mean_pi_width, r.mean_winkler) == (0.1, 0.0, 0.0)
    r = evaluate([PredictionInterval(v - 1.5, v + 1.5, 0.1) for v in y], y, 0.1, window_sizes=(1, 3))
    assert r.mean_winkler == 3.0 and r.local_coverage == {1: 0.0, 3: 0.0}


@settings(max_examples=200)
@given(cases, st.floats(0.01, 0.99))
def test_winkler_equals_width_iff_covered(rows, alpha):
    ivs, y = build(rows, alpha)
    for iv, t in zip(ivs, y):
        assert (winkler_score(iv, t, alpha) == iv.width) == iv.covers(t)


def test_local_coverage_depends_on_order_only_across_windows():
    base = local_coverage(*_hits([3, 7], 40), 0.1, 10)  # one failing window among four
    moved = local_coverage(*_hits([33, 37], 40), 0.1, 10)  # same window moved to the end
    split = local_coverage(*_hits([3, 13], 40), 0.1, 10)  # misses spread over two windows
    assert base == moved == 0.025
    assert split == 0.0
    assert delta_cov(*_hits([3, 7], 40), 0.1) == delta_cov(*_hits([3, 13], 40), 0.1)


@settings(max_examples=100)
@given(st.sets(st.integers(0, 59)), st.integers(0, 59), st.integers(1, 20), st.booleans())
def test_local_coverage_monotone_under_added_miss(misses, extra, k, rolling):
    before = local_coverage(*_hits(misses, 60), 0.1, k, rolling)
    after = local_coverage(*_hits(misses | {extra}, 60), 0.1, k, rolling)
    assert after >= before - 1e-15
