"""Group confusion rates, disparate impact, average odds difference, BalAcc."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._validation import check_binary, check_same_length
from .exceptions import MissingGroupError, ShapeError

GROUP_NAMES = {0: "W", 1: "U"}


@dataclass(frozen=True)
class GroupRates:
    count: int
    positives: int
    negatives: int
    sr: float
    tpr: float
    tnr: float
    fpr: float
    fnr: float


def _rate(num, den, flag, flags):
    if den == 0:
        flags.add(flag)
        return 0.0
    return num / den


def group_rates(labels, preds, flags=None, suffix=""):
    """Confusion rates of one population; zero denominators give 0 and a flag."""
    flags = set() if flags is None else flags
    labels = np.asarray(labels)
    preds = np.asarray(preds)
    pos = int((labels == 1).sum())
    neg = int((labels == 0).sum())
    tp = int(((labels == 1) & (preds == 1)).sum())
    tn = int(((labels == 0) & (preds == 0)).sum())
    return GroupRates(
        count=int(labels.size), positives=pos, negatives=neg,
        sr=_rate(int((preds == 1).sum()), labels.size, f"sr{suffix}_undefined", flags),
        tpr=_rate(tp, pos, f"tpr{suffix}_undefined", flags),
        tnr=_rate(tn, neg, f"tnr{suffix}_undefined", flags),
        fpr=_rate(neg - tn, neg, f"fpr{suffix}_undefined", flags),
        fnr=_rate(pos - tp, pos, f"fnr{suffix}_undefined", flags),
    )


@dataclass(frozen=True)
class EvaluationReport:
    """Fairness and utility of one set of predictions.

    ``di`` keeps the raw direction (above 1 favours the minority);
    ``di_star`` and ``aod_star`` are the folded forms where 1 is best.
    """

    group_rates: dict
    di: float
    di_star: float
    aod: float
    aod_star: float
    bal_acc: float
    flags: frozenset = frozenset()
    metadata: dict = field(default_factory=dict)

    def to_record(self):
        """Flat dict for one CSV/JSON row."""
        rec = dict(self.metadata)
        rec.update(di=self.di, di_star=self.di_star, aod=self.aod,
                   aod_star=self.aod_star, bal_acc=self.bal_acc)
        for g, rates in sorted(self.group_rates.items()):
            for name in ("sr", "tpr", "tnr", "fpr", "fnr"):
                rec[f"{name}_{g}"] = getattr(rates, name)
        rec["flags"] = ";".join(sorted(self.flags))
        return rec


def disparate_impact(sr_u, sr_w, flags):
    """Return ``(di, di_star)`` with the zero-selection-rate conventions."""
    if sr_w == 0:
        flags.add("sr_W_zero")
        if sr_u == 0:
            return 1.0, 1.0
        return float("inf"), 0.0
    di = sr_u / sr_w
    # min/max rather than min(di, 1/di): same value, but bitwise symmetric
    # under swapping the groups
    return di, min(sr_u, sr_w) / max(sr_u, sr_w)


def evaluate(labels, preds, groups, metadata=None):
    """Evaluate binary predictions against labels, per group and overall."""
    check_same_length(labels=labels, preds=preds, groups=groups)
    labels = check_binary(labels, "labels")
    preds = check_binary(preds, "preds")
    groups = check_binary(groups, "groups")
    if labels.size == 0:
        raise ShapeError("cannot evaluate empty vectors")
    for g in (0, 1):
        if not (groups == g).any():
            raise MissingGroupError(f"group {GROUP_NAMES[g]} is absent")
    flags = set()
    rates = {
        GROUP_NAMES[g]: group_rates(labels[groups == g], preds[groups == g], flags, f"_{GROUP_NAMES[g]}")
        for g in (0, 1)
    }
    w, u = rates["W"], rates["U"]
    di, di_star = disparate_impact(u.sr, w.sr, flags)
    aod = ((u.fpr - w.fpr) + (u.tpr - w.tpr)) / 2
    overall = group_rates(labels, preds, flags)
    bal_acc = (overall.tpr + overall.tnr) / 2
    return EvaluationReport(rates, di, di_star, aod, 1 - abs(aod), bal_acc,
                            frozenset(flags), dict(metadata or {}))
