"""Independent reference computations used by the tests.

These are written for clarity, not speed, and share no code with the
package under test.
"""

import math
from fractions import Fraction


def gini_exact(counts):
    n = sum(counts)
    if n == 0:
        return Fraction(0)
    return 1 - sum(Fraction(c, n) ** 2 for c in counts)


def best_root_split(X, y):
    """Exhaustive search over every (feature, midpoint) pair in exact arithmetic.

    Returns (feature, threshold) of the split with the lowest weighted child
    Gini, ties to the lowest feature then threshold, or None when the node is
    pure or no split strictly lowers impurity.
    """
    labels = sorted(set(y))
    n = len(y)

    def counts(idx):
        return [sum(1 for i in idx if y[i] == lab) for lab in labels]

    parent = gini_exact(counts(range(n)))
    if parent == 0:
        return None
    best = None
    for f in range(len(X[0])):
        values = sorted(set(Fraction(row[f]) for row in X))
        for a, b in zip(values, values[1:]):
            thr = (a + b) / 2
            left = [i for i in range(n) if Fraction(X[i][f]) <= thr]
            right = [i for i in range(n) if Fraction(X[i][f]) > thr]
            imp = (len(left) * gini_exact(counts(left)) + len(right) * gini_exact(counts(right))) / n
            if best is None or imp < best[0]:
                best = (imp, f, thr)
    if best is None or best[0] >= parent:
        return None
    return best[1], float(best[2])


def gaussian_log_joint(x, prior, means, variances):
    """log(prior * prod_j N(x_j; mean_j, var_j)), evaluated term by term."""
    total = math.log(prior)
    for xj, m, v in zip(x, means, variances):
        density = math.exp(-((xj - m) ** 2) / (2 * v)) / math.sqrt(2 * math.pi * v)
        total += math.log(density)
    return total


def count_metrics(y_true, y_pred, k):
    """Per-class precision/recall/F1 by explicit counting; 0 for 0/0."""
    out = []
    for c in range(k):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == c and p == c)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != c and p == c)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == c and p != c)
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        f = 2 * p * r / (p + r) if p + r else 0.0
        out.append((p, r, f, tp + fn))
    acc = sum(1 for t, p in zip(y_true, y_pred) if t == p) / len(y_true)
    return acc, out
