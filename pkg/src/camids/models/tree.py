"""CART decision trees with (weighted) Gini impurity."""

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_array, check_is_fitted, check_X_y, encode_labels
from ..errors import EmptyTrainingSet

# impurity differences below this are treated as ties
IMPURITY_EPS = 1e-12


def gini(counts):
    """Gini impurity ``1 - sum(p_c^2)`` of a vector of (weighted) class counts."""
    counts = np.asarray(counts, dtype=float)
    total = counts.sum()
    if total <= 0:
        return 0.0
    p = counts / total
    return float(1.0 - np.dot(p, p))


def _midpoint(a, b):
    t = (a + b) / 2.0
    # rounding can land on b, which would send b's rows left
    return a if t == b else t


def best_split(X, codes, weight, n_classes, features):
    """Best (feature, threshold, weighted child impurity) over ``features``.

    Candidates are midpoints between consecutive distinct values. Ties go to
    the lowest feature index, then the lowest threshold. Returns None when no
    candidate exists.
    """
    total = np.bincount(codes, weights=weight, minlength=n_classes)
    n_total = total.sum()
    best = None
    rows = np.arange(codes.shape[0])
    for f in sorted(features):
        x = X[:, f]
        order = np.argsort(x, kind="stable")
        xs = x[order]
        valid = xs[:-1] < xs[1:]
        if not valid.any():
            continue
        onehot = np.zeros((codes.shape[0], n_classes))
        onehot[rows, codes[order]] = weight[order]
        left = np.cumsum(onehot, axis=0)[:-1][valid]
        right = total - left
        n_left = left.sum(axis=1)
        n_right = n_total - n_left
        imp = (
            n_left - (left * left).sum(axis=1) / n_left
            + n_right - (right * right).sum(axis=1) / n_right
        ) / n_total
        i = int(np.flatnonzero(imp <= imp.min() + IMPURITY_EPS)[0])
        if best is None or imp[i] < best[2] - IMPURITY_EPS:
            pos = np.flatnonzero(valid)[i]
            best = (f, _midpoint(xs[pos], xs[pos + 1]), float(imp[i]))
    return best


class Tree:
    """Array-backed binary tree.

    Internal nodes route ``x[feature] <= threshold`` to ``left``; leaves have
    ``feature == -1`` and hold per-class (weighted) counts in ``value``.
    """

    def __init__(self, feature, threshold, left, right, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.value = np.asarray(value, dtype=float).reshape(len(self.feature), -1)

    @property
    def node_count(self):
        return len(self.feature)

    @property
    def n_leaves(self):
        return int((self.feature < 0).sum())

    @property
    def depth(self):
        depth = np.zeros(self.node_count, dtype=np.int64)
        for node in range(self.node_count):
            if self.feature[node] >= 0:
                depth[self.left[node]] = depth[self.right[node]] = depth[node] + 1
        return int(depth.max())

    @property
    def root_split(self):
        if self.feature[0] < 0:
            return None
        return int(self.feature[0]), float(self.threshold[0])

    def apply(self, X):
        """Leaf index reached by every row of ``X``."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] >= 0)
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] >= 0]
        return node

    def predict_codes(self, X):
        # argmax returns the first maximum, i.e. the lowest class code
        return np.argmax(self.value[self.apply(X)], axis=1)

    def to_dict(self):
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["feature"], d["threshold"], d["left"], d["right"], d["value"])


def train_tree(
    X,
    codes,
    n_classes=None,
    sample_weight=None,
    max_depth=None,
    min_samples_split=2,
    feature_subsample=None,
    rng=None,
):
    """Grow a CART tree on integer class codes ``0..n_classes-1``.

    ``feature_subsample`` candidate features are drawn without replacement at
    every node from ``rng``; all features are candidates when it is None.
    Rows with zero weight are ignored.
    """
    X = np.asarray(X, dtype=float)
    codes = np.asarray(codes, dtype=np.int64)
    if X.shape[0] == 0:
        raise EmptyTrainingSet("cannot grow a tree on zero rows")
    if n_classes is None:
        n_classes = int(codes.max()) + 1
    weight = np.ones(X.shape[0]) if sample_weight is None else np.asarray(sample_weight, dtype=float)
    keep = weight > 0
    if not keep.all():
        X, codes, weight = X[keep], codes[keep], weight[keep]
        if X.shape[0] == 0:
            raise EmptyTrainingSet("all sample weights are zero")
    n_features = X.shape[1]
    if feature_subsample is not None:
        feature_subsample = max(1, min(int(feature_subsample), n_features))
        if rng is None:
            rng = np.random.default_rng()

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(counts):
        feature.append(-1)
        threshold.append(0.0)
        left.append(-1)
        right.append(-1)
        value.append(counts)
        return len(feature) - 1

    root_rows = np.arange(X.shape[0])
    root = new_node(np.bincount(codes, weights=weight, minlength=n_classes))
    stack = [(root, root_rows, 0)]
    while stack:
        node, rows, depth = stack.pop()
        counts = value[node]
        if (
            np.count_nonzero(counts) <= 1
            or (max_depth is not None and depth >= max_depth)
            or rows.size < min_samples_split
        ):
            continue
        if feature_subsample is None or feature_subsample >= n_features:
            candidates = range(n_features)
        else:
            candidates = rng.choice(n_features, size=feature_subsample, replace=False)
        Xn = X[rows]
        split = best_split(Xn, codes[rows], weight[rows], n_classes, candidates)
        if split is None:
            continue
        f, thr, imp = split
        if imp >= gini(counts) - IMPURITY_EPS:
            continue
        mask = Xn[:, f] <= thr
        lrows, rrows = rows[mask], rows[~mask]
        feature[node] = f
        threshold[node] = thr
        left[node] = new_node(np.bincount(codes[lrows], weights=weight[lrows], minlength=n_classes))
        right[node] = new_node(np.bincount(codes[rrows], weights=weight[rrows], minlength=n_classes))
        # left subtree is expanded first
        stack.append((right[node], rrows, depth + 1))
        stack.append((left[node], lrows, depth + 1))
    return Tree(feature, threshold, left, right, value)


class DecisionTreeClassifier(ClassifierMixin, BaseEstimator):
    def __init__(self, max_depth=None, min_samples_split=2, max_features=None, random_state=None):
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.random_state = random_state

    def fit(self, X, y, sample_weight=None):
        X, y = check_X_y(X, y)
        self.classes_, codes = encode_labels(y)
        self.n_features_in_ = X.shape[1]
        rng = np.random.default_rng(self.random_state)
        self.tree_ = train_tree(
            X,
            codes,
            n_classes=len(self.classes_),
            sample_weight=sample_weight,
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            feature_subsample=self.max_features,
            rng=rng,
        )
        return self

    def predict(self, X):
        check_is_fitted(self, "tree_")
        X = check_array(X, n_features=self.n_features_in_)
        codes = self.tree_.predict_codes(X)
        return self.classes_[codes]

    def predict_proba(self, X):
        check_is_fitted(self, "tree_")
        X = check_array(X, n_features=self.n_features_in_)
        v = self.tree_.value[self.tree_.apply(X)]
        return v / v.sum(axis=1, keepdims=True)
