"""Gaussian naive Bayes."""

import numpy as np
from scipy.special import logsumexp
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_array, check_is_fitted, check_X_y, encode_labels


class GaussianNB(ClassifierMixin, BaseEstimator):
    """Per-class independent Gaussians; every variance is inflated by
    ``var_smoothing * max(feature variance)`` so constant features stay finite."""

    def __init__(self, var_smoothing=1e-9):
        self.var_smoothing = var_smoothing

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, codes = encode_labels(y)
        self.n_features_in_ = X.shape[1]
        k = len(self.classes_)
        self.epsilon_ = float(self.var_smoothing * np.var(X, axis=0).max())
        if self.epsilon_ <= 0:
            # every feature constant: any positive floor keeps densities finite
            self.epsilon_ = float(self.var_smoothing)
        self.theta_ = np.zeros((k, X.shape[1]))
        self.var_ = np.zeros((k, X.shape[1]))
        counts = np.bincount(codes, minlength=k)
        for c in range(k):
            Xc = X[codes == c]
            self.theta_[c] = Xc.mean(axis=0)
            self.var_[c] = Xc.var(axis=0) + self.epsilon_
        self.class_prior_ = counts / counts.sum()
        return self

    def joint_log_likelihood(self, X):
        """``log P(c) + sum_j log N(x_j; mean_cj, var_cj)`` for every row and class."""
        check_is_fitted(self, "theta_")
        X = check_array(X, n_features=self.n_features_in_)
        out = np.empty((X.shape[0], len(self.classes_)))
        for c in range(len(self.classes_)):
            var = self.var_[c]
            norm = -0.5 * np.sum(np.log(2.0 * np.pi * var))
            quad = -0.5 * np.sum((X - self.theta_[c]) ** 2 / var, axis=1)
            out[:, c] = np.log(self.class_prior_[c]) + norm + quad
        return out

    def predict(self, X):
        codes = np.argmax(self.joint_log_likelihood(X), axis=1)
        return self.classes_[codes]

    def predict_log_proba(self, X):
        jll = self.joint_log_likelihood(X)
        return jll - logsumexp(jll, axis=1, keepdims=True)

    def predict_proba(self, X):
        return np.exp(self.predict_log_proba(X))

    def _payload(self):
        return {
            "epsilon": self.epsilon_,
            "prior": self.class_prior_.tolist(),
            "mean": self.theta_.tolist(),
            "var": self.var_.tolist(),
        }

    def _load_payload(self, payload):
        self.epsilon_ = float(payload["epsilon"])
        self.class_prior_ = np.asarray(payload["prior"], dtype=float)
        self.theta_ = np.asarray(payload["mean"], dtype=float)
        self.var_ = np.asarray(payload["var"], dtype=float)
