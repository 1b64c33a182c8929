"""Input validation helpers for the estimators."""

import numpy as np

from .errors import EmptyTrainingSet, NotFittedError, NumericError


def check_array(X, n_features=None, allow_empty=True):
    """Coerce ``X`` to a finite 2-D float array."""
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1) if n_features == 1 else X.reshape(1, -1)
    if X.ndim != 2:
        raise ValueError(f"expected a 2-D array, got shape {X.shape}")
    if not allow_empty and X.shape[0] == 0:
        raise EmptyTrainingSet("no rows to train on")
    if n_features is not None and X.shape[1] != n_features:
        raise ValueError(f"expected {n_features} features, got {X.shape[1]}")
    if not np.isfinite(X).all():
        raise NumericError("input contains NaN or infinite values")
    return X


def check_X_y(X, y):
    X = check_array(X, allow_empty=False)
    y = np.asarray(y)
    if y.ndim != 1:
        y = y.reshape(-1)
    if y.shape[0] != X.shape[0]:
        raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
    return X, y


def check_is_fitted(estimator, attribute):
    if not hasattr(estimator, attribute):
        raise NotFittedError(f"{type(estimator).__name__} is not fitted yet; call fit first")


def encode_labels(y):
    """Return (classes, codes) where codes index into the sorted classes."""
    classes, codes = np.unique(y, return_inverse=True)
    return classes, codes.astype(np.int64)
