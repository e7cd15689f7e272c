import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from rwg import stats
from rwg.stats import (NoFiniteWaitingTimeError, expected_waiting_time, histogram, mean_scores, percentile,
                       rank_by_mean, solve_probability, success_probability, top_fraction_count,
                       top_fraction_episodes, variance_scores)

from _bruteforce import bf_mean, bf_percentile, bf_ranks, bf_top, bf_var, random_tensors


def test_brute_force_equivalence_100_tensors():
    for S in random_tensors():
        rows = S.tolist()
        m, v = mean_scores(S), variance_scores(S)
        assert np.allclose(m, [bf_mean(r) for r in rows], rtol=1e-12, atol=1e-12)
        assert np.allclose(v, [bf_var(r) for r in rows], rtol=1e-12, atol=1e-12)
        assert rank_by_mean(m).tolist() == bf_ranks(m.tolist())
        for q in ("50", "90", "99.9", "100", "0.1"):
            assert percentile(m, float(q)) == bf_percentile(m.tolist(), q)
        for f in ("0.001", "0.05", "0.5", "1"):
            assert [tuple(p) for p in top_fraction_episodes(S, float(f)).tolist()] == bf_top(rows, f)


@given(arrays(np.float64, st.tuples(st.integers(1, 30), st.integers(1, 30)),
              elements=st.floats(-1e3, 1e3, allow_nan=False)))
@settings(max_examples=100, deadline=None)
def test_variance_relation_to_population_variance(S):
    e = S.shape[1]
    assert np.allclose(variance_scores(S), e / (e + 1) * S.var(axis=1), rtol=1e-12, atol=1e-9)


def test_variance_constant_row_is_zero():
    assert variance_scores(np.full((3, 20), 200.0)).tolist() == [0.0, 0.0, 0.0]


def test_ranks_stable_on_ties():
    assert rank_by_mean([3.0, 1.0, 3.0, 1.0]).tolist() == [2, 0, 3, 1]


def test_percentile_examples():
    x = np.arange(1, 1001, dtype=float)
    assert percentile(x, 99.9) == 999.0
    assert percentile(x, 100) == 1000.0
    assert percentile([5.0], 99.9) == 5.0
    with pytest.raises(ValueError):
        percentile(x, 0)


def test_top_fraction_count():
    assert top_fraction_count(200_000, 0.001) == 200
    assert top_fraction_count(10, 0.001) == 1
    assert top_fraction_count(1000, 0.001) == 1


def test_histogram_properties():
    rng = np.random.default_rng(5)
    x = rng.normal(size=777)
    h = histogram(x, 40)
    assert h.counts.sum() == 777 and h.bins == 40
    assert h.edges[0] == x.min() and h.edges[-1] == x.max()
    widths = np.diff(h.edges)
    assert np.allclose(widths, widths[0])
    # max value lands in the closed last bin
    assert h.counts[-1] >= 1
    d = histogram([2.0, 2.0, 2.0], 4)
    assert d.edges[0] == 1.5 and d.edges[-1] == 2.5 and d.counts.sum() == 3


def test_solve_probability_inclusive():
    assert solve_probability([195.0, 194.99, 200.0, 10.0], 195) == 0.5


def test_success_probability_oracle():
    mp.mp.dps = 30
    direct = 1 - (1 - mp.mpf("0.03")) ** 100
    assert abs(success_probability(0.03, 100) - float(direct)) < 1e-9
    assert success_probability(0.03, 100) == pytest.approx(0.95244749, abs=1e-8)
    assert success_probability(0.0, 100) == 0.0
    assert success_probability(1.0, 1) == 1.0


def test_expected_waiting_time_grid():
    with pytest.raises(NoFiniteWaitingTimeError):
        expected_waiting_time(0.0)
    for p in np.linspace(0.001, 1.0, 200):
        assert expected_waiting_time(float(p)) == pytest.approx(1 / p, rel=1e-15)
    assert expected_waiting_time(0.03) == pytest.approx(33.333333, abs=1e-5)
    with pytest.raises(ValueError):
        expected_waiting_time(1.5)


def test_analyze_slice_report():
    S = np.array([[200.0] * 4, [10.0, 20.0, 30.0, 40.0], [195.0, 195.0, 190.0, 200.0]])
    rep = stats.analyze_slice(S, 195.0, label="0")
    assert rep.best_mean == 200.0
    assert rep.solve_fraction == pytest.approx(2 / 3)  # mean exactly 195 counts
    assert rep.expected_waiting_time == pytest.approx(1.5)
    assert rep.stats.rank.tolist() == [2, 0, 1]
    assert rep.variance_vs_mean.shape == (3, 2)
    none = stats.analyze_slice(S, 1000.0)
    assert none.solve_fraction == 0 and none.expected_waiting_time is None


def test_empty_inputs_rejected():
    with pytest.raises(ValueError):
        mean_scores(np.zeros((0, 3)))
    with pytest.raises(ValueError):
        histogram([], 10)
