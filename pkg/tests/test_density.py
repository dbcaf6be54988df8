import numpy as np
import pytest
from scipy.integrate import trapezoid
from hypothesis import given, settings, strategies as st

from conformfair.density import (
    DensityConfig, density_scores, filter_densest, kde, keep_count, scott_bandwidth,
)
from conformfair.exceptions import ConfigError, InsufficientDataError
from oracles import brute_filter, naive_kde


def test_identical_points_have_equal_scores():
    scores = density_scores(np.full((5, 2), 0.3))
    assert np.all(scores == scores[0])


def test_isolated_point_is_least_dense():
    scores = density_scores(np.array([[0.0], [0.01], [0.02], [0.9]]))
    assert scores[3] < scores[:3].min()


def test_permutation_equivariance():
    X = np.random.default_rng(0).random((20, 2))
    perm = np.random.default_rng(1).permutation(20)
    np.testing.assert_allclose(density_scores(X, perm), density_scores(X)[perm], rtol=1e-12)


def test_matches_naive_loops():
    X = np.random.default_rng(2).random((25, 3))
    np.testing.assert_allclose(density_scores(X), naive_kde(X.tolist(), X.tolist()), rtol=1e-10)


def test_fraction_one_keeps_everything_in_density_order():
    X = np.random.default_rng(3).random((12, 2))
    idx = np.arange(12)
    kept = filter_densest(X, idx, 1.0)
    assert sorted(kept.tolist()) == idx.tolist()
    scores = density_scores(X)
    assert np.all(np.diff(scores[kept]) <= 0)


def test_outliers_excluded():
    rng = np.random.default_rng(4)
    X = np.vstack([0.5 + 0.01 * rng.normal(size=(8, 2)), [[0.0, 0.0], [1.0, 1.0]]])
    kept = filter_densest(X, np.arange(10), 0.8)
    assert kept.size == 8 and 8 not in kept and 9 not in kept


def test_keep_count():
    assert filter_densest(np.random.default_rng(5).random((7, 2)), None, 0.2).size == 2
    assert keep_count(0.7, 10) == 7
    assert keep_count(0.01, 50) == 2
    assert keep_count(0.5, 1) == 1


def test_errors():
    with pytest.raises(InsufficientDataError):
        density_scores(np.zeros((1, 2)))
    with pytest.raises(ConfigError):
        DensityConfig(fraction=0.0)
    with pytest.raises(ConfigError):
        DensityConfig(bandwidth_rule="silverman")


def test_bandwidth_floor():
    X = np.column_stack([np.linspace(0, 1, 10), np.zeros(10)])
    assert scott_bandwidth(X)[1] == 1e-6


@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(2, 30),
       st.sampled_from([0.1, 0.2, 0.5, 0.7, 1.0]))
@settings(max_examples=60, deadline=None)
def test_filter_matches_brute_force(seed, m, n, fraction):
    rng = np.random.default_rng(seed)
    X = rng.random((n + 5, m))
    idx = np.sort(rng.choice(n + 5, size=n, replace=False))
    assert filter_densest(X, idx, fraction).tolist() == brute_filter(X, idx.tolist(), fraction)


@given(st.integers(0, 2**32 - 1), st.integers(5, 60))
@settings(max_examples=20, deadline=None)
def test_kept_denser_than_excluded(seed, n):
    X = np.random.default_rng(seed).random((n, 2))
    kept = filter_densest(X, None, 0.3)
    scores = density_scores(X)
    excluded = np.setdiff1d(np.arange(n), kept)
    if excluded.size:
        assert scores[kept].min() >= scores[excluded].max()


def test_density_integrates_to_one():
    x = np.random.default_rng(6).random((40, 1))
    h = scott_bandwidth(x)[0]
    grid = np.linspace(x.min() - 5 * h, x.max() + 5 * h, 20001)
    total = trapezoid(kde(x, grid[:, None]), grid)
    assert total == pytest.approx(1.0, abs=0.01)
