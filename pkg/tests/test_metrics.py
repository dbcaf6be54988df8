import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conformfair.exceptions import MissingGroupError, ShapeError
from conformfair.metrics import disparate_impact, evaluate
from oracles import count_metrics


def test_ratio_example():
    # minority selects 1 of 4, majority 2 of 4
    labels = [1, 0, 1, 0, 1, 0, 1, 0]
    preds = [1, 0, 0, 0, 1, 1, 0, 0]
    groups = [1, 1, 1, 1, 0, 0, 0, 0]
    r = evaluate(labels, preds, groups)
    assert (r.di, r.di_star) == (0.5, 0.5)


def test_identical_profiles():
    labels = [1, 0, 1, 0]
    r = evaluate(labels * 2, [1, 0, 1, 0] * 2, [0, 0, 0, 0, 1, 1, 1, 1])
    assert r.di_star == 1.0 and r.aod_star == 1.0


def test_constant_predictor():
    r = evaluate([1, 0, 1, 0], [1, 1, 1, 1], [0, 0, 1, 1])
    assert r.group_rates["W"].tpr == 1.0 and r.group_rates["W"].tnr == 0.0
    assert r.bal_acc == 0.5


def test_aod_example():
    # minority: FPR 0.2 higher, TPR 0.1 higher than the majority
    w_labels = [1] * 10 + [0] * 10
    w_preds = [1] * 5 + [0] * 5 + [1] * 2 + [0] * 8
    u_labels = [1] * 10 + [0] * 10
    u_preds = [1] * 6 + [0] * 4 + [1] * 4 + [0] * 6
    r = evaluate(w_labels + u_labels, w_preds + u_preds, [0] * 20 + [1] * 20)
    assert r.aod == pytest.approx(0.15, abs=1e-12)
    assert r.aod_star == pytest.approx(0.85, abs=1e-12)


def test_zero_selection_conventions():
    flags = set()
    assert disparate_impact(0.0, 0.0, flags) == (1.0, 1.0) and "sr_W_zero" in flags
    assert disparate_impact(0.3, 0.0, set()) == (math.inf, 0.0)
    assert disparate_impact(0.0, 0.4, set()) == (0.0, 0.0)


def test_degenerate_denominator_flag():
    r = evaluate([1, 1, 0, 1], [1, 0, 0, 1], [0, 0, 1, 1])
    assert r.group_rates["W"].fpr == 0.0
    assert any("W" in f for f in r.flags)


def test_errors():
    with pytest.raises(MissingGroupError):
        evaluate([1, 0], [1, 0], [0, 0])
    with pytest.raises(ShapeError):
        evaluate([1, 0], [1, 0, 1], [0, 1])


def test_record_is_flat():
    rec = evaluate([1, 0, 1, 0], [1, 0, 0, 0], [0, 0, 1, 1], metadata={"method": "x"}).to_record()
    assert rec["method"] == "x" and "sr_U" in rec and "tpr_W" in rec
    assert all(not isinstance(v, (dict, list)) for v in rec.values())


instances = st.integers(2, 30).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
    st.lists(st.integers(0, 1), min_size=n, max_size=n),
)).filter(lambda t: 0 < sum(t[2]) < len(t[2]))


@given(instances)
@settings(max_examples=200)
def test_rate_identities_and_flip(inst):
    labels, preds, groups = inst
    r = evaluate(labels, preds, groups)
    flipped = evaluate(labels, [1 - p for p in preds], groups)
    for g in ("W", "U"):
        a, b = r.group_rates[g], flipped.group_rates[g]
        if a.positives:
            assert a.tpr + a.fnr == 1.0
            assert (a.tpr, a.fnr) == (b.fnr, b.tpr)
        if a.negatives:
            assert a.tnr + a.fpr == 1.0
            assert (a.tnr, a.fpr) == (b.fpr, b.tnr)


@given(instances)
@settings(max_examples=200)
def test_group_swap_symmetry(inst):
    labels, preds, groups = inst
    r = evaluate(labels, preds, groups)
    s = evaluate(labels, preds, [1 - g for g in groups])
    assert r.di_star == s.di_star
    assert r.aod == -s.aod and r.aod_star == s.aod_star


@given(instances)
@settings(max_examples=200)
def test_matches_counting_oracle(inst):
    labels, preds, groups = inst
    r = evaluate(labels, preds, groups)
    o = count_metrics(labels, preds, groups)
    assert (r.di, r.di_star, r.aod, r.aod_star, r.bal_acc) == (
        o["di"], o["di_star"], o["aod"], o["aod_star"], o["bal_acc"])
    for g in ("W", "U"):
        for name, value in o["rates"][g].items():
            assert getattr(r.group_rates[g], name) == value
