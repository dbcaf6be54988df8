"""Independent reference implementations used to cross-check the library.

Written with plain Python loops and the ``math`` module so that they share
no code path with the vectorized implementations under test.
"""

import math
import statistics


def eq1_violation(constraints, t):
    """Straight transcription of the graded violation.

    ``constraints`` is a list of ``(coeffs, lower, upper, scale, importance)``.
    """
    total = 0.0
    for coeffs, lower, upper, scale, q in constraints:
        f = sum(c * x for c, x in zip(coeffs, t))
        if f > upper:
            dist = f - upper
        elif f < lower:
            dist = lower - f
        else:
            dist = 0.0
        total += q * (1.0 - math.exp(-dist / scale))
    return total


def scott(sample):
    n, m = len(sample), len(sample[0])
    h = []
    for j in range(m):
        sd = statistics.stdev(row[j] for row in sample)
        h.append(max(sd * n ** (-1.0 / (m + 4)), 1e-6))
    return h


def naive_kde(sample, points, h=None):
    """Product-Gaussian KDE, one kernel term at a time."""
    h = h or scott(sample)
    m = len(h)
    norm = len(sample) * math.prod(h) * (2 * math.pi) ** (m / 2)
    out = []
    for p in points:
        acc = 0.0
        for s in sample:
            acc += math.exp(-0.5 * sum(((p[j] - s[j]) / h[j]) ** 2 for j in range(m)))
        out.append(acc / norm)
    return out


def brute_filter(X, idx, fraction):
    """Densest ``ceil(fraction * |idx|)`` members (at least 2), ties to lower index."""
    sample = [list(X[i]) for i in idx]
    scores = naive_kde(sample, sample)
    ranked = sorted(zip(idx, scores), key=lambda pair: (-pair[1], pair[0]))
    k = min(max(2, math.ceil(round(fraction * len(idx), 9))), len(idx))
    return [i for i, _ in ranked[:k]]


def count_metrics(labels, preds, groups):
    """Group confusion counts turned into the reported measures."""
    rates = {}
    for g, name in ((0, "W"), (1, "U")):
        tp = fp = tn = fn = 0
        for y, p, gg in zip(labels, preds, groups):
            if gg != g:
                continue
            if y == 1 and p == 1:
                tp += 1
            elif y == 1:
                fn += 1
            elif p == 1:
                fp += 1
            else:
                tn += 1
        count = tp + fp + tn + fn
        pos, neg = tp + fn, fp + tn
        rates[name] = {
            "sr": (tp + fp) / count,
            "tpr": tp / pos if pos else 0.0,
            "fnr": fn / pos if pos else 0.0,
            "tnr": tn / neg if neg else 0.0,
            "fpr": fp / neg if neg else 0.0,
        }
    u, w = rates["U"], rates["W"]
    if w["sr"] == 0:
        di, di_star = (1.0, 1.0) if u["sr"] == 0 else (math.inf, 0.0)
    else:
        di = u["sr"] / w["sr"]
        lo, hi = sorted((u["sr"], w["sr"]))
        di_star = lo / hi
    aod = ((u["fpr"] - w["fpr"]) + (u["tpr"] - w["tpr"])) / 2
    tp = sum(1 for y, p in zip(labels, preds) if y == 1 and p == 1)
    tn = sum(1 for y, p in zip(labels, preds) if y == 0 and p == 0)
    pos = sum(1 for y in labels if y == 1)
    neg = len(labels) - pos
    tpr = tp / pos if pos else 0.0
    tnr = tn / neg if neg else 0.0
    return {"rates": rates, "di": di, "di_star": di_star, "aod": aod,
            "aod_star": 1 - abs(aod), "bal_acc": (tpr + tnr) / 2}
