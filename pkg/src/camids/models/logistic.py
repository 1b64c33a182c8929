"""Multinomial logistic regression trained by full-batch gradient descent."""

import numpy as np
from scipy.special import logsumexp
from sklearn.base import BaseEstimator, ClassifierMixin

from .._validation import check_array, check_is_fitted, check_X_y, encode_labels
from ..errors import NumericError

MAX_HALVINGS = 20


def softmax(Z):
    Z = Z - Z.max(axis=1, keepdims=True)
    E = np.exp(Z)
    return E / E.sum(axis=1, keepdims=True)


def loss_and_grad(W, b, X, Y, l2):
    """Mean softmax cross-entropy plus ``l2/2 * ||W||^2`` and its gradient.

    ``Y`` is the one-hot target matrix (n x K); ``W`` is K x d.
    """
    n = X.shape[0]
    Z = X @ W.T + b
    lse = logsumexp(Z, axis=1)
    loss = float(np.sum(lse - np.sum(Z * Y, axis=1)) / n + 0.5 * l2 * np.sum(W * W))
    G = (np.exp(Z - lse[:, None]) - Y) / n
    return loss, G.T @ X + l2 * W, G.sum(axis=0)


class LogisticRegression(ClassifierMixin, BaseEstimator):
    """Gradient descent from zero weights. A step that raises the loss is
    retried with the learning rate halved (at most 20 times); training ends
    when the loss improves by less than ``tol`` or after ``max_iter`` steps.

    ``random_state`` is kept for parity with the configured hyperparameters;
    the optimiser itself is deterministic.
    """

    def __init__(self, l2_lambda=1e-4, learning_rate=0.1, max_iter=1000, tol=1e-6, random_state=42):
        self.l2_lambda = l2_lambda
        self.learning_rate = learning_rate
        self.max_iter = max_iter
        self.tol = tol
        self.random_state = random_state

    def fit(self, X, y):
        X, y = check_X_y(X, y)
        self.classes_, codes = encode_labels(y)
        self.n_features_in_ = X.shape[1]
        k = len(self.classes_)
        if k < 2:
            raise ValueError("logistic regression needs at least two classes")
        Y = np.zeros((X.shape[0], k))
        Y[np.arange(X.shape[0]), codes] = 1.0
        W = np.zeros((k, X.shape[1]))
        b = np.zeros(k)
        lr = float(self.learning_rate)
        loss, gW, gb = loss_and_grad(W, b, X, Y, self.l2_lambda)
        self.loss_curve_ = [loss]
        self.n_iter_ = 0
        for _ in range(self.max_iter):
            for _halving in range(MAX_HALVINGS + 1):
                W_new, b_new = W - lr * gW, b - lr * gb
                new_loss, new_gW, new_gb = loss_and_grad(W_new, b_new, X, Y, self.l2_lambda)
                if np.isfinite(new_loss) and new_loss <= loss:
                    break
                lr /= 2.0
            else:
                break
            W, b, gW, gb = W_new, b_new, new_gW, new_gb
            decrease = loss - new_loss
            loss = new_loss
            self.loss_curve_.append(loss)
            self.n_iter_ += 1
            if decrease < self.tol:
                break
        if not np.isfinite(W).all():
            raise NumericError("weights diverged")
        self.coef_, self.intercept_ = W, b
        self.learning_rate_ = lr
        return self

    def decision_function(self, X):
        check_is_fitted(self, "coef_")
        X = check_array(X, n_features=self.n_features_in_)
        return X @ self.coef_.T + self.intercept_

    def predict_proba(self, X):
        return softmax(self.decision_function(X))

    def predict(self, X):
        codes = np.argmax(self.decision_function(X), axis=1)
        return self.classes_[codes]

    def _payload(self):
        return {"coef": self.coef_.tolist(), "intercept": self.intercept_.tolist()}

    def _load_payload(self, payload):
        self.coef_ = np.asarray(payload["coef"], dtype=float)
        self.intercept_ = np.asarray(payload["intercept"], dtype=float)
