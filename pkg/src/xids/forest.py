"""Isolation forest anomaly detector with a calibrated binary threshold.

Trees recursively split node samples at a uniform random value strictly
inside the observed (min, max) of a randomly chosen column, until points
isolate or the height limit ceil(log2(subsample size)) is hit. The anomaly
score is 2 ** (-E[h(x)] / c(psi)) where h is the leaf depth plus the
average-path-length correction c(leaf size).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.exceptions import NotFittedError

from .metrics import ClassificationReport, classification_report

EULER_GAMMA = 0.5772156649

MODEL_FORMAT_VERSION = 1


def average_path_length(n: int | float) -> float:
    """c(n): expected unsuccessful-search path length in a binary search tree
    over n points, with H(i) = ln(i) + Euler-Mascheroni. c(n <= 1) = 0."""
    if n <= 1:
        return 0.0
    h = math.log(n - 1) + EULER_GAMMA
    return 2.0 * h - 2.0 * (n - 1) / n


@dataclass
class IsolationTree:
    """Flat-array binary tree. Node 0 is the root; leaves have feature -1.

    ``size`` holds the count of training points that reached each node, so
    leaf sizes feed the c(size) path correction.
    """

    feature: np.ndarray  # int, -1 at leaves
    threshold: np.ndarray  # float, split value at internal nodes
    left: np.ndarray  # int child indices, -1 at leaves
    right: np.ndarray
    size: np.ndarray  # int, training points in node
    node_depth: np.ndarray  # int, depth of each node (root = 0)

    @property
    def n_nodes(self) -> int:
        return len(self.feature)

    def leaf_for(self, x: np.ndarray) -> int:
        node = 0
        while self.feature[node] >= 0:
            node = self.left[node] if x[self.feature[node]] < self.threshold[node] else self.right[node]
        return int(node)

    def path_lengths(self, X: np.ndarray) -> np.ndarray:
        """Vectorised h(x) for every row: leaf depth + c(leaf size)."""
        n = X.shape[0]
        node = np.zeros(n, dtype=np.int64)
        internal = self.feature[node] >= 0
        while internal.any():
            idx = node[internal]
            feat = self.feature[idx]
            go_left = X[internal, feat] < self.threshold[idx]
            node[internal] = np.where(go_left, self.left[idx], self.right[idx])
            internal = self.feature[node] >= 0
        correction = np.array([average_path_length(s) for s in range(int(self.size.max()) + 1)])
        return self.node_depth[node] + correction[self.size[node]]


def path_length(tree: IsolationTree, x: np.ndarray) -> float:
    """h(x) for a single vector: depth of the leaf reached plus c(leaf size)."""
    leaf = tree.leaf_for(np.asarray(x, dtype=float))
    return float(tree.node_depth[leaf] + average_path_length(int(tree.size[leaf])))


class _TreeBuilder:
    def __init__(self, rng: np.random.Generator, height_limit: int):
        self.rng = rng
        self.height_limit = height_limit
        self.feature: list[int] = []
        self.threshold: list[float] = []
        self.left: list[int] = []
        self.right: list[int] = []
        self.size: list[int] = []
        self.depth: list[int] = []

    def _add_node(self, depth: int, size: int) -> int:
        self.feature.append(-1)
        self.threshold.append(0.0)
        self.left.append(-1)
        self.right.append(-1)
        self.size.append(size)
        self.depth.append(depth)
        return len(self.feature) - 1

    def build(self, X: np.ndarray) -> IsolationTree:
        self._grow(X, depth=0)
        return IsolationTree(
            feature=np.array(self.feature, dtype=np.int64),
            threshold=np.array(self.threshold, dtype=float),
            left=np.array(self.left, dtype=np.int64),
            right=np.array(self.right, dtype=np.int64),
            size=np.array(self.size, dtype=np.int64),
            node_depth=np.array(self.depth, dtype=np.int64),
        )

    def _grow(self, X: np.ndarray, depth: int) -> int:
        node = self._add_node(depth, X.shape[0])
        if X.shape[0] <= 1 or depth >= self.height_limit:
            return node
        lo = X.min(axis=0)
        hi = X.max(axis=0)
        splittable = np.flatnonzero(hi > lo)
        if splittable.size == 0:  # all rows identical: cannot split
            return node
        col = int(self.rng.choice(splittable))
        p = self._draw_split(lo[col], hi[col])
        if p is None:
            return node
        go_left = X[:, col] < p
        self.feature[node] = col
        self.threshold[node] = p
        self.left[node] = self._grow(X[go_left], depth + 1)
        self.right[node] = self._grow(X[~go_left], depth + 1)
        return node

    def _draw_split(self, lo: float, hi: float) -> float | None:
        # uniform in (lo, hi); redraw the measure-zero lo hit, give up if the
        # interval is too narrow to hold an interior float
        for _ in range(8):
            p = float(self.rng.uniform(lo, hi))
            if lo < p < hi:
                return p
        return None


class IsolationForestDetector(BaseEstimator):
    """Isolation forest with a macro-F1-calibrated decision threshold.

    Parameters
    ----------
    n_trees : ensemble size T.
    subsample_size : per-tree sample size psi, drawn without replacement.
    seed : master seed; per-tree generators are spawned from it so builds
        are reproducible regardless of build order.

    After ``fit``, ``score_samples`` returns anomaly scores in (0, 1) with
    higher meaning more anomalous. ``calibrate_threshold`` (or passing y to
    fit) sets ``threshold_``; ``predict`` then returns 1 for attack iff
    score >= threshold_.
    """

    def __init__(self, n_trees: int = 100, subsample_size: int = 256, seed: int = 0):
        self.n_trees = n_trees
        self.subsample_size = subsample_size
        self.seed = seed

    def fit(self, X, y=None, schema_fingerprint: str = "") -> "IsolationForestDetector":
        X = np.asarray(X, dtype=float)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ValueError("fit requires a non-empty 2-D matrix")
        if self.subsample_size < 2:
            raise ValueError("subsample_size must be at least 2")
        if self.subsample_size > X.shape[0]:
            raise ValueError(
                f"subsample_size {self.subsample_size} exceeds {X.shape[0]} rows"
            )
        psi = self.subsample_size
        height_limit = math.ceil(math.log2(psi))
        seed_seq = np.random.SeedSequence(self.seed)
        self.trees_ = []
        for child in seed_seq.spawn(self.n_trees):
            rng = np.random.default_rng(child)
            sample = rng.choice(X.shape[0], size=psi, replace=False)
            self.trees_.append(_TreeBuilder(rng, height_limit).build(X[sample]))
        self.psi_ = psi
        self.c_norm_ = average_path_length(psi)
        self.n_features_in_ = X.shape[1]
        self.schema_fingerprint_ = schema_fingerprint
        self.threshold_ = None
        if y is not None:
            self.calibrate_threshold(X, y)
        return self

    def _check_fitted(self):
        if not hasattr(self, "trees_"):
            raise NotFittedError("IsolationForestDetector is not fitted; call fit() first")

    def _packed(self):
        """All trees concatenated into flat arrays so a batch descends every
        tree in one vectorised loop. Rebuilt per call: packing is cheap and
        trees_ may be replaced wholesale (e.g. on load)."""
        offsets = np.cumsum([0] + [t.n_nodes for t in self.trees_])[:-1]
        feature = np.concatenate([t.feature for t in self.trees_])
        threshold = np.concatenate([t.threshold for t in self.trees_])
        size = np.concatenate([t.size for t in self.trees_])
        depth = np.concatenate([t.node_depth for t in self.trees_])
        left = np.concatenate([
            np.where(t.left >= 0, t.left + off, -1)
            for t, off in zip(self.trees_, offsets)
        ])
        right = np.concatenate([
            np.where(t.right >= 0, t.right + off, -1)
            for t, off in zip(self.trees_, offsets)
        ])
        correction = np.array([average_path_length(s) for s in range(int(size.max()) + 1)])
        return offsets, feature, threshold, left, right, size, depth, correction

    def expected_path_length(self, X) -> np.ndarray:
        """E[h(x)] averaged over trees. Per-row contributions are summed in
        sorted order so the result is bit-identical under any tree order."""
        self._check_fitted()
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"expected {self.n_features_in_} columns, got {X.shape[1]}")
        packed = self._packed()
        n = X.shape[0]
        # bound the (trees x rows) working set so big batches stay in cache
        chunk = max(256, 262144 // max(1, len(self.trees_)))
        out = np.empty(n, dtype=float)
        for start in range(0, n, chunk):
            out[start:start + chunk] = self._descend(X[start:start + chunk], packed)
        return out

    def _descend(self, X: np.ndarray, packed) -> np.ndarray:
        offsets, feature, threshold, left, right, size, depth, correction = packed
        n = X.shape[0]
        node = np.tile(offsets[:, None], (1, n))  # (T, n) current node per tree/row
        rows = np.broadcast_to(np.arange(n), node.shape)
        internal = feature[node] >= 0
        while internal.any():
            idx = node[internal]
            go_left = X[rows[internal], feature[idx]] < threshold[idx]
            node[internal] = np.where(go_left, left[idx], right[idx])
            internal = feature[node] >= 0
        lengths = np.ascontiguousarray((depth[node] + correction[size[node]]).T)
        lengths.sort(axis=1)
        return lengths.sum(axis=1) / len(self.trees_)

    def score_samples(self, X) -> np.ndarray:
        """Anomaly scores s(x) = 2 ** (-E[h(x)] / c(psi)), in (0, 1)."""
        return np.power(2.0, -self.expected_path_length(X) / self.c_norm_)

    def score_one(self, x) -> float:
        return float(self.score_samples(np.atleast_2d(x))[0])

    def calibrate_threshold(self, X, y) -> float:
        """Pick the score threshold maximising macro-F1 over all distinct
        observed scores; ties go to the lower threshold."""
        scores = self.score_samples(X)
        self.threshold_ = calibrate_threshold(scores, y)
        return self.threshold_

    def predict(self, X) -> np.ndarray:
        """Binary classes: 1 (attack) iff score >= threshold_."""
        self._check_fitted()
        if self.threshold_ is None:
            raise NotFittedError("no decision threshold; calibrate_threshold() first")
        return (self.score_samples(X) >= self.threshold_).astype(int)

    def report(self, X, y) -> ClassificationReport:
        return classification_report(y, self.predict(X))

    # persistence -----------------------------------------------------------

    def to_dict(self) -> dict:
        self._check_fitted()
        return {
            "format_version": MODEL_FORMAT_VERSION,
            "n_trees": self.n_trees,
            "subsample_size": self.psi_,
            "seed": self.seed,
            "threshold": self.threshold_,
            "c_norm": self.c_norm_,
            "n_features": self.n_features_in_,
            "schema_fingerprint": self.schema_fingerprint_,
            "trees": [
                {
                    "feature": t.feature.tolist(),
                    "threshold": t.threshold.tolist(),
                    "left": t.left.tolist(),
                    "right": t.right.tolist(),
                    "size": t.size.tolist(),
                    "depth": t.node_depth.tolist(),
                }
                for t in self.trees_
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def fingerprint(self) -> str:
        return hashlib.sha256(self.to_json().encode("utf-8")).hexdigest()

    @classmethod
    def from_dict(cls, doc: dict, schema_fingerprint: str | None = None) -> "IsolationForestDetector":
        if doc.get("format_version") != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model format_version {doc.get('format_version')!r}")
        if schema_fingerprint is not None and doc["schema_fingerprint"] != schema_fingerprint:
            raise ValueError(
                "schema fingerprint mismatch: model was trained against "
                f"{doc['schema_fingerprint'][:12]}.., got {schema_fingerprint[:12]}.."
            )
        model = cls(
            n_trees=doc["n_trees"],
            subsample_size=doc["subsample_size"],
            seed=doc["seed"],
        )
        model.trees_ = [
            IsolationTree(
                feature=np.array(t["feature"], dtype=np.int64),
                threshold=np.array(t["threshold"], dtype=float),
                left=np.array(t["left"], dtype=np.int64),
                right=np.array(t["right"], dtype=np.int64),
                size=np.array(t["size"], dtype=np.int64),
                node_depth=np.array(t["depth"], dtype=np.int64),
            )
            for t in doc["trees"]
        ]
        model.psi_ = doc["subsample_size"]
        model.c_norm_ = doc["c_norm"]
        model.n_features_in_ = doc["n_features"]
        model.schema_fingerprint_ = doc["schema_fingerprint"]
        model.threshold_ = doc["threshold"]
        return model

    def save(self, path: str | Path) -> None:
        Path(path).write_text(self.to_json(), encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path, schema_fingerprint: str | None = None) -> "IsolationForestDetector":
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return cls.from_dict(doc, schema_fingerprint=schema_fingerprint)


def calibrate_threshold(scores, y) -> float:
    """Threshold over anomaly scores maximising macro-F1 (predict 1 iff
    score >= theta), swept over every distinct observed score. Ties break to
    the lower threshold. Raises on single-class labels or constant scores."""
    scores = np.asarray(scores, dtype=float)
    y = np.asarray(y, dtype=int)
    if scores.shape != y.shape or scores.ndim != 1:
        raise ValueError("scores and labels must be 1-D arrays of equal length")
    n_pos = int(np.sum(y == 1))
    n_neg = int(np.sum(y == 0))
    if n_pos == 0 or n_neg == 0:
        raise ValueError("calibration requires both classes present")
    candidates = np.unique(scores)  # ascending
    if candidates.size < 2:
        raise ValueError("all scores identical; cannot separate classes")
    # suffix counts of positives/negatives with score >= each candidate
    order = np.searchsorted(candidates, scores)
    pos_at = np.bincount(order[y == 1], minlength=candidates.size)
    neg_at = np.bincount(order[y == 0], minlength=candidates.size)
    tp = np.cumsum(pos_at[::-1])[::-1].astype(float)  # predicted 1, truly 1
    fp = np.cumsum(neg_at[::-1])[::-1].astype(float)  # predicted 1, truly 0
    fn = n_pos - tp
    tn = n_neg - fp
    with np.errstate(divide="ignore", invalid="ignore"):
        f1_attack = np.nan_to_num(2 * tp / (2 * tp + fp + fn))
        f1_normal = np.nan_to_num(2 * tn / (2 * tn + fn + fp))
    macro = (f1_attack + f1_normal) / 2.0
    best = int(np.argmax(macro))  # first max = lowest threshold
    return float(candidates[best])
