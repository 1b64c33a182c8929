"""Labeled dataset preparation: CSV load with zero-fill, non-numeric column
removal, concatenation, stratified splitting and z-score scaling."""

import csv
import enum
import logging
import math
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Optional, Sequence, TextIO, Tuple

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .errors import FormatError, NotFittedError, SchemaError, SplitError, UnlabeledData
from .features import FEATURE_COLUMNS, LABEL_COLUMN, TEXT_COLUMNS
from ._validation import check_array, check_is_fitted

log = logging.getLogger(__name__)


class Label(enum.IntEnum):
    normal = 0
    tcp_flood = 1
    udp_flood = 2
    brute_force = 3

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            try:
                return cls[value.strip()]
            except KeyError:
                raise ValueError(
                    f"unknown label {value!r}; expected one of {', '.join(cls.names())}"
                ) from None
        return cls(int(value))

    @classmethod
    def names(cls):
        return [m.name for m in cls]


LABEL_MAP = {int(m): m.name for m in Label}


@dataclass(frozen=True)
class LabeledDataset:
    columns: Tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    # columns whose cells were text on load; zero-filled in X until dropped
    text_columns: FrozenSet[str] = field(default_factory=frozenset)

    def __post_init__(self):
        object.__setattr__(self, "columns", tuple(self.columns))
        X = np.asarray(self.X, dtype=float).reshape(-1, len(self.columns))
        y = np.asarray(self.y, dtype=np.int64).reshape(-1)
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]}")
        X.setflags(write=False)
        y.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "text_columns", frozenset(self.text_columns))

    def __len__(self):
        return self.X.shape[0]

    @property
    def n_rows(self):
        return self.X.shape[0]

    def take(self, idx) -> "LabeledDataset":
        idx = np.asarray(idx, dtype=np.int64)
        return LabeledDataset(self.columns, self.X[idx], self.y[idx], self.text_columns)

    def select(self, columns: Sequence[str]) -> "LabeledDataset":
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise SchemaError(f"dataset lacks column {missing[0]!r}")
        pos = [self.columns.index(c) for c in columns]
        return LabeledDataset(
            tuple(columns), self.X[:, pos], self.y, self.text_columns & set(columns)
        )

    def without(self, columns: Iterable[str]) -> "LabeledDataset":
        drop = set(columns)
        return self.select([c for c in self.columns if c not in drop])


def _parse_float(cell):
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(source: TextIO, label_override: Optional[Label] = None) -> LabeledDataset:
    """Load a feature CSV.

    Empty or unparsable numeric cells become 0.0. A column is treated as text
    when it is one of the schema's text columns, or when it has non-empty
    cells and none of them parse as numbers.
    """
    reader = csv.reader(source)
    header = next(reader, None)
    if not header or all(not h.strip() for h in header):
        raise FormatError("CSV has no header row")
    header = [h.strip() for h in header]
    label_pos = header.index(LABEL_COLUMN) if LABEL_COLUMN in header else None
    if label_pos is not None and label_override is not None:
        log.warning("CSV has a %r column; ignoring label override %s", LABEL_COLUMN, label_override)
    if label_pos is None and label_override is not None:
        label_override = Label.parse(label_override)
    columns = [h for i, h in enumerate(header) if i != label_pos]
    n_cols = len(columns)

    cells: List[List[str]] = []
    labels = []
    for lineno, row in enumerate(reader, start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise FormatError(f"line {lineno}: expected {len(header)} cells, got {len(row)}")
        if label_pos is not None:
            text = row[label_pos].strip()
            if not text:
                raise UnlabeledData(f"line {lineno}: empty label")
            try:
                labels.append(int(Label.parse(text)))
            except ValueError as exc:
                raise FormatError(f"line {lineno}: {exc}") from None
            row = row[:label_pos] + row[label_pos + 1:]
        elif label_override is not None:
            labels.append(int(label_override))
        else:
            raise UnlabeledData("CSV has no label column and no label override was given")
        cells.append(row)

    X = np.zeros((len(cells), n_cols))
    text_cols = set(c for c in columns if c in TEXT_COLUMNS)
    for j, name in enumerate(columns):
        if name in text_cols:
            continue
        parsed = [_parse_float(r[j]) if r[j] != "" else 0.0 for r in cells]
        nonempty = [p for r, p in zip(cells, parsed) if r[j] != ""]
        if nonempty and all(p is None for p in nonempty):
            text_cols.add(name)
            continue
        X[:, j] = [0.0 if p is None else p for p in parsed]
    return LabeledDataset(tuple(columns), X, np.asarray(labels, dtype=np.int64), frozenset(text_cols))


def load_csv_path(path, label_override=None) -> LabeledDataset:
    with open(path, newline="") as fh:
        return load_csv(fh, label_override)


def rows_to_matrix(rows, columns: Sequence[str]) -> np.ndarray:
    """Numeric matrix of the named columns from in-memory feature rows, with the
    same zero-fill as :func:`load_csv`."""
    pos = [FEATURE_COLUMNS.index(c) for c in columns]
    X = np.zeros((len(rows), len(pos)))
    for i, row in enumerate(rows):
        for j, p in enumerate(pos):
            v = row[p]
            if v is not None:
                X[i, j] = v
    return X


def drop_non_numeric(ds: LabeledDataset) -> LabeledDataset:
    """Remove schema text columns and any column detected as text on load."""
    drop = TEXT_COLUMNS | ds.text_columns
    return ds.without(c for c in ds.columns if c in drop)


def concat(parts: Sequence[LabeledDataset]) -> LabeledDataset:
    if not parts:
        raise ValueError("nothing to concatenate")
    first = parts[0]
    for part in parts[1:]:
        if part.columns != first.columns:
            for a, b in zip(first.columns, part.columns):
                if a != b:
                    raise SchemaError(f"column mismatch: {a!r} vs {b!r}")
            raise SchemaError(
                f"column count mismatch: {len(first.columns)} vs {len(part.columns)}"
            )
    if len(parts) == 1:
        return first
    return LabeledDataset(
        first.columns,
        np.vstack([p.X for p in parts]),
        np.concatenate([p.y for p in parts]),
        frozenset().union(*(p.text_columns for p in parts)),
    )


@dataclass(frozen=True)
class SplitConfig:
    train_fraction: float = 0.7
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")


def _train_count(fraction, n):
    # guard against 0.7 * 70 == 48.99999999999999
    return int(math.floor(fraction * n + 1e-9))


def split_indices(y, cfg: SplitConfig = SplitConfig()) -> Tuple[np.ndarray, np.ndarray]:
    """Return (train_idx, test_idx) for labels ``y``."""
    y = np.asarray(y)
    n = y.shape[0]
    if n < 2:
        raise SplitError(f"need at least 2 rows to split, got {n}")
    perm = np.random.default_rng(cfg.seed).permutation(n)
    if not cfg.stratified:
        k = _train_count(cfg.train_fraction, n)
        return np.sort(perm[:k]), np.sort(perm[k:])
    train, test = [], []
    ys = y[perm]
    for label in np.unique(y):
        members = perm[ys == label]
        k = _train_count(cfg.train_fraction, members.size)
        train.append(members[:k])
        test.append(members[k:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def split(ds: LabeledDataset, cfg: SplitConfig = SplitConfig()) -> Tuple[LabeledDataset, LabeledDataset]:
    train_idx, test_idx = split_indices(ds.y, cfg)
    return ds.take(train_idx), ds.take(test_idx)


class StandardScaler(TransformerMixin, BaseEstimator):
    """Z-score scaler using the population standard deviation.

    Columns with zero spread are centred but not rescaled.
    """

    def fit(self, X, y=None):
        X = check_array(X)
        self.mean_ = X.mean(axis=0)
        self.var_ = X.var(axis=0)
        std = np.sqrt(self.var_)
        self.scale_ = np.where(std > 0, std, 1.0)
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        check_is_fitted(self, "scale_")
        X = check_array(X, n_features=self.n_features_in_)
        return (X - self.mean_) / self.scale_


def fit_scaler(train) -> StandardScaler:
    X = train.X if isinstance(train, LabeledDataset) else train
    return StandardScaler().fit(X)


def apply_scaler(scaler: StandardScaler, ds):
    if isinstance(ds, LabeledDataset):
        return LabeledDataset(ds.columns, scaler.transform(ds.X), ds.y, ds.text_columns)
    return scaler.transform(ds)


__all__ = [
    "Label",
    "LABEL_MAP",
    "LabeledDataset",
    "SplitConfig",
    "StandardScaler",
    "NotFittedError",
    "load_csv",
    "load_csv_path",
    "drop_non_numeric",
    "rows_to_matrix",
    "concat",
    "split",
    "split_indices",
    "fit_scaler",
    "apply_scaler",
]
