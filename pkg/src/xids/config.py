"""Run configuration: every seed explicit, content-hashed into artifacts."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path


@dataclass(frozen=True)
class RunConfig:
    """Parameters for a full train/score/explain run.

    The content hash covers every semantic field (everything except
    out_dir), so artifacts produced under the same hash are reproducible
    byte for byte.
    """

    train_path: str
    test_path: str | None = None
    # stratified subsample of the training file; None = use all rows
    subsample_size: int | None = None
    subsample_normal: int | None = None  # explicit per-class counts, optional
    subsample_attack: int | None = None
    subsample_seed: int = 7
    # isolation forest
    n_trees: int = 100
    subsample_psi: int = 256
    forest_seed: int = 11
    # attribution
    background_size: int = 100
    background_seed: int = 13
    n_coalitions: int | None = None  # None = 2*M + 2048
    shap_seed: int = 17
    granularity: str = "collapsed"  # "collapsed" | "raw"
    # labeling
    label_k: int = 3
    rank_by: str = "positive"
    # surrogates
    lime_perturbations: int = 500
    lime_k: int = 5
    pn_step: float = 0.01
    pn_max_changed: int = 5
    pn_max_steps: int = 400
    out_dir: str = "artifacts"

    def __post_init__(self):
        if self.granularity not in ("collapsed", "raw"):
            raise ValueError(f"granularity must be 'collapsed' or 'raw', got {self.granularity!r}")
        if self.rank_by not in ("positive", "abs"):
            raise ValueError(f"rank_by must be 'positive' or 'abs', got {self.rank_by!r}")
        if (self.subsample_normal is None) != (self.subsample_attack is None):
            raise ValueError("subsample_normal and subsample_attack must be set together")

    def content_hash(self) -> str:
        doc = asdict(self)
        doc.pop("out_dir")
        blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    def to_json(self) -> str:
        doc = asdict(self)
        doc["config_hash"] = self.content_hash()
        return json.dumps(doc, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunConfig":
        doc = json.loads(text)
        doc.pop("config_hash", None)
        known = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in doc.items() if k in known})

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        return cls.from_json(Path(path).read_text(encoding="utf-8"))


DATA_DIR_ENV = "XIDS_DATA_DIR"


def resolve_data_path(path: str | Path) -> Path:
    """Resolve a dataset path, falling back to $XIDS_DATA_DIR for relative
    names that do not exist from the working directory."""
    p = Path(path)
    if p.exists() or p.is_absolute():
        return p
    data_dir = os.environ.get(DATA_DIR_ENV)
    if data_dir:
        candidate = Path(data_dir) / p
        if candidate.exists():
            return candidate
    return p
