"""Bagged CART forest with per-node random feature subsets."""

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_array, check_is_fitted, check_X_y, encode_labels
from .tree import Tree, train_tree


def resolve_max_features(max_features, n_features):
    if max_features is None:
        return n_features
    if max_features == "sqrt":
        return max(1, int(math.floor(math.sqrt(n_features))))
    if max_features == "log2":
        return max(1, int(math.floor(math.log2(n_features))))
    if isinstance(max_features, float):
        return max(1, int(max_features * n_features))
    return int(max_features)


def fit_one_tree(X, codes, n_classes, n_candidates, seed, max_depth=None, min_samples_split=2):
    """Grow one bootstrap tree from its own seed, independent of its siblings."""
    rng = np.random.default_rng(seed)
    n = X.shape[0]
    counts = np.bincount(rng.integers(0, n, size=n), minlength=n)
    return train_tree(
        X,
        codes,
        n_classes=n_classes,
        sample_weight=counts,
        max_depth=max_depth,
        min_samples_split=min_samples_split,
        feature_subsample=n_candidates,
        rng=rng,
    )


def majority_vote(codes_per_tree, n_classes):
    """Column-wise majority over a (n_trees, n_rows) code matrix; ties to the lowest code."""
    votes = np.zeros((codes_per_tree.shape[1], n_classes), dtype=np.int64)
    rows = np.arange(codes_per_tree.shape[1])
    for codes in codes_per_tree:
        np.add.at(votes, (rows, codes), 1)
    return np.argmax(votes, axis=1), votes


class RandomForestClassifier(ClassifierMixin, BaseEstimator):
    """Majority-vote forest; tree ``i`` is seeded with ``random_state + i``."""

    def __init__(
        self,
        n_estimators=60,
        max_features="sqrt",
        random_state=101,
        max_depth=None,
        min_samples_split=2,
        n_jobs=None,
    ):
        self.n_estimators = n_estimators
        self.max_features = max_features
        self.random_state = random_state
        self.max_depth = max_depth
        self.min_samples_split = min_samples_split
        self.n_jobs = n_jobs

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, codes = encode_labels(y)
        self.n_features_in_ = X.shape[1]
        k = len(self.classes_)
        n_candidates = resolve_max_features(self.max_features, X.shape[1])
        base = 0 if self.random_state is None else int(self.random_state)
        seeds = [base + i for i in range(self.n_estimators)]
        args = (X, codes, k, n_candidates)
        kw = dict(max_depth=self.max_depth, min_samples_split=self.min_samples_split)
        if self.n_jobs in (None, 1):
            self.trees_ = [fit_one_tree(*args, s, **kw) for s in seeds]
        else:
            from joblib import Parallel, delayed

            self.trees_ = Parallel(n_jobs=self.n_jobs)(
                delayed(fit_one_tree)(*args, s, **kw) for s in seeds
            )
        return self

    def _votes(self, X):
        check_is_fitted(self, "trees_")
        X = check_array(X, n_features=self.n_features_in_)
        per_tree = np.array([t.predict_codes(X) for t in self.trees_]).reshape(len(self.trees_), -1)
        return majority_vote(per_tree, len(self.classes_))

    def predict(self, X):
        codes = self._votes(X)[0]
        return self.classes_[codes]

    def predict_proba(self, X):
        votes = self._votes(X)[1]
        return votes / max(len(self.trees_), 1)

    def _payload(self):
        return {"trees": [t.to_dict() for t in self.trees_]}

    def _load_payload(self, payload):
        self.trees_ = [Tree.from_dict(d) for d in payload["trees"]]
