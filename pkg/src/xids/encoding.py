"""Feature schema and encoder: one-hot categoricals, min-max scaled numerics."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

from .nslkdd import CATEGORICAL_FEATURES, FEATURE_NAMES, NUMERIC_FEATURES, FlowRecord

SCHEMA_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FeatureSchema:
    """Frozen encoded-column layout learned from training records.

    Column order is numeric features in canonical NSL-KDD order, then one
    one-hot group per categorical feature (groups in canonical feature order,
    values alphabetical within each group, columns named ``<feature>_<value>``).
    """

    columns: tuple[str, ...]
    numeric_columns: tuple[str, ...]
    vocabularies: dict[str, tuple[str, ...]]
    mins: np.ndarray
    maxs: np.ndarray
    fingerprint: str = field(init=False)

    def __post_init__(self):
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("encoded column names must be unique")
        if np.any(self.mins > self.maxs):
            raise ValueError("per-column min must not exceed max")
        object.__setattr__(self, "fingerprint", self._compute_fingerprint())

    def _compute_fingerprint(self) -> str:
        payload = {
            "version": SCHEMA_FORMAT_VERSION,
            "columns": list(self.columns),
            "numeric_columns": list(self.numeric_columns),
            "vocabularies": {k: list(v) for k, v in sorted(self.vocabularies.items())},
            "mins": [repr(float(v)) for v in self.mins],
            "maxs": [repr(float(v)) for v in self.maxs],
        }
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    @property
    def width(self) -> int:
        return len(self.columns)

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise KeyError(f"unknown encoded column {name!r}") from None

    def group_slices(self) -> dict[str, list[int]]:
        """Column indices per original feature: singletons for numerics, the
        one-hot block for each categorical feature."""
        groups: dict[str, list[int]] = {f: [] for f in FEATURE_NAMES}
        for i, col in enumerate(self.columns):
            if col in self.numeric_columns:
                groups[col].append(i)
            else:
                feature = next(f for f in CATEGORICAL_FEATURES if col.startswith(f + "_"))
                groups[feature].append(i)
        return groups

    def to_json(self) -> str:
        doc = {
            "format_version": SCHEMA_FORMAT_VERSION,
            "fingerprint": self.fingerprint,
            "columns": list(self.columns),
            "numeric_columns": list(self.numeric_columns),
            "vocabularies": {k: list(v) for k, v in self.vocabularies.items()},
            "mins": [float(v) for v in self.mins],
            "maxs": [float(v) for v in self.maxs],
        }
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "FeatureSchema":
        doc = json.loads(text)
        if doc.get("format_version") != SCHEMA_FORMAT_VERSION:
            raise ValueError(f"unsupported schema format_version {doc.get('format_version')!r}")
        schema = cls(
            columns=tuple(doc["columns"]),
            numeric_columns=tuple(doc["numeric_columns"]),
            vocabularies={k: tuple(v) for k, v in doc["vocabularies"].items()},
            mins=np.asarray(doc["mins"], dtype=float),
            maxs=np.asarray(doc["maxs"], dtype=float),
        )
        if schema.fingerprint != doc["fingerprint"]:
            raise ValueError("schema fingerprint mismatch on load")
        return schema

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "FeatureSchema":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


@dataclass
class EncodedDataset:
    """Dense encoded matrix plus labels retained for evaluation."""

    X: np.ndarray
    y: np.ndarray
    attack_labels: list[str]
    unknown_category: np.ndarray  # bool per row: some categorical token was out of vocabulary
    schema_fingerprint: str

    def __len__(self) -> int:
        return self.X.shape[0]


def fit_schema(records: list[FlowRecord]) -> FeatureSchema:
    """Learn vocabularies and numeric min/max from training records."""
    if not records:
        raise ValueError("cannot fit a schema on an empty record list")
    vocabularies = {
        f: tuple(sorted({str(r.features[f]) for r in records})) for f in CATEGORICAL_FEATURES
    }
    mins = np.array(
        [min(r.numeric(f) for r in records) for f in NUMERIC_FEATURES], dtype=float
    )
    maxs = np.array(
        [max(r.numeric(f) for r in records) for f in NUMERIC_FEATURES], dtype=float
    )
    columns = list(NUMERIC_FEATURES)
    for feature in CATEGORICAL_FEATURES:
        columns.extend(f"{feature}_{value}" for value in vocabularies[feature])
    return FeatureSchema(
        columns=tuple(columns),
        numeric_columns=tuple(NUMERIC_FEATURES),
        vocabularies=vocabularies,
        mins=mins,
        maxs=maxs,
    )


def encode_record(record: FlowRecord, schema: FeatureSchema) -> tuple[np.ndarray, bool]:
    """Encode one record against a fitted schema.

    Numeric: (x - min) / (max - min) clamped to [0,1]; constant columns map
    to 0. Unknown categorical tokens leave their one-hot group all zero and
    set the returned flag.
    """
    vec = np.zeros(schema.width, dtype=float)
    span = schema.maxs - schema.mins
    for j, name in enumerate(schema.numeric_columns):
        if span[j] == 0.0:
            vec[j] = 0.0
        else:
            vec[j] = np.clip((record.numeric(name) - schema.mins[j]) / span[j], 0.0, 1.0)
    unknown = False
    offset = len(schema.numeric_columns)
    for feature in CATEGORICAL_FEATURES:
        vocab = schema.vocabularies[feature]
        token = str(record.features[feature])
        try:
            vec[offset + vocab.index(token)] = 1.0
        except ValueError:
            unknown = True
        offset += len(vocab)
    return vec, unknown


def binary_label(attack_label: str) -> int:
    return 0 if attack_label == "normal" else 1


class KddEncoder(BaseEstimator, TransformerMixin):
    """sklearn-style transformer from FlowRecords to an EncodedDataset.

    fit() learns the schema from training records; transform() encodes any
    record list against the frozen schema. The fitted schema is exposed as
    ``schema_`` and is immutable, so a fitted encoder is safe to share.
    """

    def fit(self, records: list[FlowRecord], y=None) -> "KddEncoder":
        self.schema_ = fit_schema(records)
        return self

    def transform(self, records: list[FlowRecord]) -> EncodedDataset:
        schema = self.schema
        n = len(records)
        X = np.zeros((n, schema.width), dtype=float)
        unknown = np.zeros(n, dtype=bool)
        labels = []
        for i, record in enumerate(records):
            X[i], unknown[i] = encode_record(record, schema)
            labels.append(record.attack_label)
        y = np.array([binary_label(l) for l in labels], dtype=int)
        return EncodedDataset(
            X=X,
            y=y,
            attack_labels=labels,
            unknown_category=unknown,
            schema_fingerprint=schema.fingerprint,
        )

    @property
    def schema(self) -> FeatureSchema:
        if not hasattr(self, "schema_"):
            raise NotFittedError("KddEncoder is not fitted; call fit() first")
        return self.schema_
