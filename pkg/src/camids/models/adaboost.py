"""Multi-class AdaBoost (SAMME) over depth-1 Gini stumps."""

import math

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_array, check_is_fitted, check_X_y, encode_labels
from ..errors import DegenerateBoost
from .tree import Tree, train_tree

# weight given to a stump that classifies the training set perfectly
PERFECT_ALPHA = 10.0


def samme_alpha(err, n_classes):
    return math.log((1.0 - err) / err) + math.log(n_classes - 1)


class AdaBoostClassifier(ClassifierMixin, BaseEstimator):
    def __init__(self, n_estimators=50):
        self.n_estimators = n_estimators

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, codes = encode_labels(y)
        self.n_features_in_ = X.shape[1]
        k = len(self.classes_)
        if k < 2:
            raise DegenerateBoost("boosting needs at least two classes")
        n = X.shape[0]
        w = np.full(n, 1.0 / n)
        self.stumps_, self.alphas_, self.errors_ = [], [], []
        for _ in range(self.n_estimators):
            stump = train_tree(X, codes, n_classes=k, sample_weight=w, max_depth=1)
            miss = stump.predict_codes(X) != codes
            err = float(w[miss].sum() / w.sum())
            if err >= 1.0 - 1.0 / k:
                break
            if err <= 0.0:
                self.stumps_.append(stump)
                self.alphas_.append(PERFECT_ALPHA)
                self.errors_.append(0.0)
                break
            alpha = samme_alpha(err, k)
            self.stumps_.append(stump)
            self.alphas_.append(alpha)
            self.errors_.append(err)
            w = w * np.exp(alpha * miss)
            w /= w.sum()
        if not self.stumps_:
            del self.stumps_, self.alphas_, self.errors_
            raise DegenerateBoost(
                f"first stump has weighted error >= {1.0 - 1.0 / k:.3f}; nothing to boost"
            )
        return self

    def decision_function(self, X):
        check_is_fitted(self, "stumps_")
        X = check_array(X, n_features=self.n_features_in_)
        scores = np.zeros((X.shape[0], len(self.classes_)))
        rows = np.arange(X.shape[0])
        for stump, alpha in zip(self.stumps_, self.alphas_):
            scores[rows, stump.predict_codes(X)] += alpha
        return scores

    def predict(self, X):
        codes = np.argmax(self.decision_function(X), axis=1)
        return self.classes_[codes]

    def _payload(self):
        return {
            "stumps": [s.to_dict() for s in self.stumps_],
            "alphas": list(self.alphas_),
            "errors": list(self.errors_),
        }

    def _load_payload(self, payload):
        self.stumps_ = [Tree.from_dict(d) for d in payload["stumps"]]
        self.alphas_ = [float(a) for a in payload["alphas"]]
        self.errors_ = [float(e) for e in payload["errors"]]
