import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conformfair import conformance
from conformfair.conformance import (
    Constraint, ConstraintSet, ConformanceProfiler, derive_ccs, min_violation, raw_importance, violation,
)
from conformfair.exceptions import EmptyFamilyError, InsufficientDataError, ShapeError
from oracles import eq1_violation


def single(coeffs, lower, upper, scale=1.0, q=1.0):
    return ConstraintSet((Constraint(coeffs, lower, upper, scale, q),))


def as_tuples(cs):
    return [(c.coeffs, c.lower, c.upper, c.scale, c.importance) for c in cs.constraints]


def test_inside_bounds_is_zero():
    cs = single((1.0, 0.0), 0.708, 0.902)
    assert violation(cs, np.array([0.8, 0.3])) == 0.0


def test_hand_overshoot():
    cs = single((1.0, 0.0), 0.0, 1.0)
    assert violation(cs, np.array([2.0, 0.0])) == pytest.approx(1 - math.exp(-1), abs=1e-12)


def test_weighted_sum():
    # per-constraint violations 0.5 and 0.25 with importances 0.6 and 0.4
    d1, d2 = -math.log(0.5), -math.log(0.75)
    cs = ConstraintSet((Constraint((1.0, 0.0), 0.0, 0.0, 1.0, 0.6),
                        Constraint((0.0, 1.0), 0.0, 0.0, 1.0, 0.4)))
    assert violation(cs, np.array([d1, d2])) == pytest.approx(0.4, abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        violation(single((1.0, 0.0), 0, 1), np.zeros(3))


def test_identical_columns_give_zero_variance_direction():
    x = np.linspace(0, 1, 20)
    cs = derive_ccs(np.column_stack([x, x]))
    first = cs.constraints[0]
    np.testing.assert_allclose(np.abs(first.coeffs), [1 / math.sqrt(2)] * 2, atol=1e-12)
    assert first.coeffs[0] * first.coeffs[1] < 0
    assert first.upper - first.lower <= 1e-12
    assert first.importance == max(c.importance for c in cs.constraints)


def test_constraint_shape():
    cs = derive_ccs(np.random.default_rng(0).random((50, 2)))
    assert len(cs.constraints) == 2
    for c in cs.constraints:
        assert len(c.coeffs) == 2 and c.lower <= c.upper and c.scale > 0


def test_too_few_tuples():
    with pytest.raises(InsufficientDataError):
        derive_ccs(np.zeros((1, 2)))


def test_min_violation_rules():
    inside = single((1.0, 0.0), 0.0, 1.0)
    outside = single((1.0, 0.0), 5.0, 6.0)
    t = np.array([0.5, 0.5])
    assert min_violation([inside], t) == (0.0, 0)
    assert min_violation([outside, inside], t)[1] == 1
    assert min_violation([outside, outside], t) == (pytest.approx(violation(outside, t)), 0)
    with pytest.raises(EmptyFamilyError):
        min_violation([], t)


def test_importance_formula():
    q = raw_importance([0.1, 0.2, 0.3])
    np.testing.assert_allclose(q, [1.0, 0.5, conformance.IMPORTANCE_FLOOR])
    np.testing.assert_array_equal(raw_importance([0.4, 0.4]), [1.0, 1.0])


@st.composite
def subsets(draw, max_m=4):
    m = draw(st.integers(2, max_m))
    n = draw(st.integers(2, 40))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    X = rng.random((n, m))
    if draw(st.booleans()):
        X[:, 1] = X[:, 0]  # degenerate direction
    return X


@given(subsets())
@settings(max_examples=80, deadline=None)
def test_structural_invariants(X):
    cs = derive_ccs(X)
    C = cs.coeffs
    np.testing.assert_allclose(np.linalg.norm(C, axis=1), 1.0, atol=1e-9)
    off = C @ C.T - np.eye(len(C))
    assert np.abs(off).max() <= 1e-6
    assert abs(cs.importance.sum() - 1) <= 1e-9 and (cs.importance >= 0).all()
    assert (cs.scale >= conformance.SCALE_FLOOR).all()
    # every profiled tuple conforms exactly, evaluated alone and in bulk
    assert np.all(cs.violation(X) == 0.0)
    assert all(cs.violation(row) == 0.0 for row in X)


@given(subsets(), arrays(np.float64, 4, elements=st.floats(-2, 3)))
@settings(max_examples=80, deadline=None)
def test_semantics_agree_and_range(X, t):
    cs = derive_ccs(X)
    t = t[:X.shape[1]]
    v = cs.violation(t)
    assert 0.0 <= v < 1.0
    assert (v == 0.0) == bool(cs.satisfies(t)[0])
    assert v == pytest.approx(eq1_violation(as_tuples(cs), t), abs=1e-9)


@given(subsets(), st.integers(0, 3), st.floats(0.0, 2.0), st.floats(0.0, 2.0))
@settings(max_examples=60, deadline=None)
def test_monotone_along_projection(X, which, a, b):
    cs = derive_ccs(X)
    c = cs.constraints[which % len(cs.constraints)]
    direction = np.asarray(c.coeffs)
    base = X.mean(axis=0)
    near, far = sorted((a, b))
    start = base + (c.upper - direction @ base) * direction
    assert cs.violation(start + far * direction) >= cs.violation(start + near * direction)


def test_serialization_roundtrip():
    sets = [derive_ccs(np.random.default_rng(s).random((30, 3)), source=(s % 2, 1)) for s in range(3)]
    back = conformance.loads(conformance.dumps(sets))
    for a, b in zip(sets, back):
        assert a.source == b.source
        for field in ("coeffs", "lower", "upper", "scale", "importance"):
            assert np.abs(getattr(a, field) - getattr(b, field)).max() <= 1e-12


def test_profiler_estimator():
    X = np.random.default_rng(1).random((60, 2))
    prof = ConformanceProfiler(density_fraction=0.5).fit(X)
    assert prof.profiled_index_.size == 30
    np.testing.assert_array_equal(prof.transform(X[prof.profiled_index_]).ravel(), 0.0)
    assert prof.get_params() == {"density_fraction": 0.5}
    assert (prof.score_samples(X) > 0).any()
