"""One-vs-rest perceptron with an embedded standardiser."""

import numba
import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_array, check_is_fitted, check_X_y, encode_labels
from ..dataset import StandardScaler


@numba.njit(cache=True)
def _epoch(Xs, targets, order, W, b, active):
    """One pass over ``order``; updates only the classes still flagged active.

    Returns the number of updates per class.
    """
    n_classes, n_features = W.shape
    updates = np.zeros(n_classes, dtype=np.int64)
    for i in order:
        for k in range(n_classes):
            if not active[k]:
                continue
            t = targets[i, k]
            s = b[k]
            for j in range(n_features):
                s += W[k, j] * Xs[i, j]
            if t * s <= 0.0:
                for j in range(n_features):
                    W[k, j] += t * Xs[i, j]
                b[k] += t
                updates[k] += 1
    return updates


class Perceptron(ClassifierMixin, BaseEstimator):
    """Rows are visited in a freshly shuffled order every epoch (one shared
    seeded stream for all classes). Each one-vs-rest unit freezes after an
    epoch without mistakes. Inputs are always standardised with the scaler
    fitted during :meth:`fit`, so callers pass raw features."""

    def __init__(self, max_iter=1000, random_state=42):
        self.max_iter = max_iter
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, codes = encode_labels(y)
        self.n_features_in_ = X.shape[1]
        k = len(self.classes_)
        if k < 2:
            raise ValueError("perceptron needs at least two classes")
        self.scaler_ = StandardScaler().fit(X)
        Xs = np.ascontiguousarray(self.scaler_.transform(X))
        targets = -np.ones((X.shape[0], k))
        targets[np.arange(X.shape[0]), codes] = 1.0
        W = np.zeros((k, X.shape[1]))
        b = np.zeros(k)
        active = np.ones(k, dtype=np.bool_)
        rng = np.random.default_rng(self.random_state)
        self.n_iter_ = 0
        for _ in range(self.max_iter):
            order = rng.permutation(X.shape[0])
            updates = _epoch(Xs, targets, order, W, b, active)
            self.n_iter_ += 1
            active &= updates > 0
            if not active.any():
                break
        self.coef_, self.intercept_ = W, b
        self.converged_ = ~active
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, n_features=self.n_features_in_)
        return self.scaler_.transform(X) @ self.coef_.T + self.intercept_

    def predict(self, X):
        codes = np.argmax(self.decision_function(X), axis=1)
        return self.classes_[codes]

    def _payload(self):
        return {
            "coef": self.coef_.tolist(),
            "intercept": self.intercept_.tolist(),
            "scaler_mean": self.scaler_.mean_.tolist(),
            "scaler_var": self.scaler_.var_.tolist(),
        }

    def _load_payload(self, payload):
        self.coef_ = np.asarray(payload["coef"], dtype=float)
        self.intercept_ = np.asarray(payload["intercept"], dtype=float)
        scaler = StandardScaler()
        scaler.mean_ = np.asarray(payload["scaler_mean"], dtype=float)
        scaler.var_ = np.asarray(payload["scaler_var"], dtype=float)
        std = np.sqrt(scaler.var_)
        scaler.scale_ = np.where(std > 0, std, 1.0)
        scaler.n_features_in_ = scaler.mean_.shape[0]
        self.scaler_ = scaler
