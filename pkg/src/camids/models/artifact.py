"""Versioned, portable JSON documents for trained models.

A document carries ``format_version``, ``kind``, ``columns``, ``label_map``,
``params`` and ``payload``. Floats are written with Python's shortest
round-trip repr, so a reloaded model predicts bit-identically.
"""

import json
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np

from ..errors import FormatError, SchemaError, VersionError
from .adaboost import AdaBoostClassifier
from .forest import RandomForestClassifier
from .logistic import LogisticRegression
from .naive_bayes import GaussianNB
from .perceptron import Perceptron

FORMAT_VERSION = 1

KINDS = {
    "random_forest": RandomForestClassifier,
    "adaboost": AdaBoostClassifier,
    "logreg": LogisticRegression,
    "gnb": GaussianNB,
    "perceptron": Perceptron,
}
_KIND_OF = {cls: kind for kind, cls in KINDS.items()}


def make_estimator(kind, **params):
    try:
        cls = KINDS[kind]
    except KeyError:
        raise FormatError(f"unknown model kind {kind!r}") from None
    return cls(**params)


@dataclass
class ModelArtifact:
    estimator: object
    columns: Tuple[str, ...]
    label_map: Dict[int, str]
    # extra, non-estimator metadata (e.g. columns excluded before training)
    meta: Dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = tuple(self.columns)

    @property
    def kind(self):
        return _KIND_OF[type(self.estimator)]

    def check_columns(self, columns: Sequence[str]):
        columns = tuple(columns)
        if columns != self.columns:
            for i, (a, b) in enumerate(zip(self.columns, columns)):
                if a != b:
                    raise SchemaError(f"column {i}: model expects {a!r}, data has {b!r}")
            raise SchemaError(
                f"model expects {len(self.columns)} columns, data has {len(columns)}"
            )

    def predict(self, X, columns: Sequence[str]):
        self.check_columns(columns)
        return self.estimator.predict(X)

    def to_dict(self):
        est = self.estimator
        return {
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "columns": list(self.columns),
            "label_map": {str(k): v for k, v in sorted(self.label_map.items())},
            "params": {**est.get_params(), **({"meta": self.meta} if self.meta else {})},
            "payload": {
                "classes": [int(c) for c in est.classes_],
                "n_features": int(est.n_features_in_),
                **est._payload(),
            },
        }

    @classmethod
    def from_dict(cls, doc):
        if not isinstance(doc, dict):
            raise FormatError("model document must be a JSON object")
        version = doc.get("format_version")
        if version != FORMAT_VERSION:
            raise VersionError(f"unsupported format_version {version!r}")
        for key in ("kind", "columns", "label_map", "params", "payload"):
            if key not in doc:
                raise FormatError(f"model document lacks {key!r}")
        params = dict(doc["params"])
        meta = params.pop("meta", {})
        est = make_estimator(doc["kind"], **params)
        payload = doc["payload"]
        if not isinstance(payload, dict) or "classes" not in payload or "n_features" not in payload:
            raise FormatError("model payload lacks classes/n_features")
        try:
            est.classes_ = np.asarray(payload["classes"], dtype=np.int64)
            est.n_features_in_ = int(payload["n_features"])
            est._load_payload(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"malformed {doc['kind']} payload: {exc}") from None
        if len(doc["columns"]) != est.n_features_in_:
            raise FormatError("column list does not match payload feature count")
        label_map = {int(k): v for k, v in doc["label_map"].items()}
        return cls(est, tuple(doc["columns"]), label_map, meta)

    def dumps(self):
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def loads(cls, text):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise FormatError(f"model document is not valid JSON: {exc}") from None
        return cls.from_dict(doc)


def save_model(artifact: ModelArtifact, sink):
    sink.write(artifact.dumps())


def load_model(source) -> ModelArtifact:
    return ModelArtifact.loads(source.read())


def save_model_path(artifact, path):
    with open(path, "w", encoding="utf-8") as fh:
        save_model(artifact, fh)


def load_model_path(path) -> ModelArtifact:
    with open(path, encoding="utf-8") as fh:
        return load_model(fh)
