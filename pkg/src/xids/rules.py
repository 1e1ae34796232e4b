"""DNF rule sets over encoded columns: evaluation, text/JSON forms, and a
greedy set-cover learner.

A rule set predicts attack (1) when ANY clause holds; a clause holds when all
of its literals hold. Literals compare a scaled numeric column against a
threshold (``<=`` / ``>``) or test a one-hot column (``is`` / ``not``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.exceptions import NotFittedError

OPERATORS = ("<=", ">", "is", "not")


class UnknownColumnError(KeyError):
    def __init__(self, column: str):
        super().__init__(f"rule references unknown column {column!r}")
        self.column = column


@dataclass(frozen=True)
class Literal:
    column: str
    op: str
    threshold: float | None = None

    def __post_init__(self):
        if self.op not in OPERATORS:
            raise ValueError(f"unknown operator {self.op!r}")
        if self.op in ("<=", ">") and self.threshold is None:
            raise ValueError(f"operator {self.op!r} requires a threshold")

    def holds(self, values: np.ndarray) -> np.ndarray:
        if self.op == "<=":
            return values <= self.threshold
        if self.op == ">":
            return values > self.threshold
        if self.op == "is":
            return values > 0.5
        return values <= 0.5  # "not"

    def __str__(self) -> str:
        if self.op == "<=":
            return f"{self.column} <= {self.threshold:.2f}"
        if self.op == ">":
            return f"{self.column} > {self.threshold:.2f}"
        if self.op == "is":
            return self.column
        return f"{self.column} not"


@dataclass(frozen=True)
class Clause:
    literals: tuple[Literal, ...]

    def __post_init__(self):
        if not self.literals:
            raise ValueError("a clause needs at least one literal")

    def __str__(self) -> str:
        return " AND ".join(str(l) for l in self.literals)


@dataclass(frozen=True)
class RuleSet:
    clauses: tuple[Clause, ...]

    def __str__(self) -> str:
        return self.to_text()

    def to_text(self) -> str:
        """One clause per line, human-readable."""
        return "\n".join(str(c) for c in self.clauses)

    @classmethod
    def from_text(cls, text: str) -> "RuleSet":
        clauses = []
        for line in text.splitlines():
            line = line.strip().lstrip("-").strip()
            if not line:
                continue
            literals = tuple(_parse_literal(part) for part in line.split(" AND "))
            clauses.append(Clause(literals))
        if not clauses:
            raise ValueError("no clauses found in text")
        return cls(tuple(clauses))

    def to_json(self) -> str:
        return json.dumps(
            {
                "clauses": [
                    [
                        {"column": l.column, "op": l.op, "threshold": l.threshold}
                        for l in c.literals
                    ]
                    for c in self.clauses
                ]
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "RuleSet":
        doc = json.loads(text)
        return cls(
            tuple(
                Clause(tuple(Literal(l["column"], l["op"], l["threshold"]) for l in clause))
                for clause in doc["clauses"]
            )
        )

    def columns(self) -> set[str]:
        return {l.column for c in self.clauses for l in c.literals}


def _parse_literal(text: str) -> Literal:
    text = text.strip()
    if " <= " in text:
        column, value = text.split(" <= ")
        return Literal(column.strip(), "<=", float(value))
    if " > " in text:
        column, value = text.split(" > ")
        return Literal(column.strip(), ">", float(value))
    if text.endswith(" not"):
        return Literal(text[: -len(" not")].strip(), "not")
    return Literal(text, "is")


def builtin_nslkdd_rules() -> RuleSet:
    """Bundled five-clause DNF rule list for NSL-KDD attacks, over scaled columns."""
    return RuleSet(
        clauses=(
            Clause((Literal("wrong_fragment", ">", 0.0),)),
            Clause((
                Literal("src_bytes", "<=", 0.0),
                Literal("dst_host_diff_srv_rate", ">", 0.01),
            )),
            Clause((
                Literal("dst_host_count", "<=", 0.04),
                Literal("protocol_type_icmp", "is"),
            )),
            Clause((
                Literal("num_compromised", ">", 0.0),
                Literal("dst_host_same_srv_rate", ">", 0.98),
            )),
            Clause((
                Literal("srv_count", ">", 0.0),
                Literal("protocol_type_icmp", "is"),
                Literal("service_urp_i", "not"),
            )),
        )
    )


def predict_ruleset(rules: RuleSet, X: np.ndarray, columns: Sequence[str]) -> np.ndarray:
    """1 where any clause holds. Raises UnknownColumnError for literals whose
    column is not in the encoded layout."""
    index = {c: i for i, c in enumerate(columns)}
    X = np.atleast_2d(np.asarray(X, dtype=float))
    out = np.zeros(X.shape[0], dtype=bool)
    for clause in rules.clauses:
        mask = np.ones(X.shape[0], dtype=bool)
        for literal in clause.literals:
            if literal.column not in index:
                raise UnknownColumnError(literal.column)
            mask &= literal.holds(X[:, index[literal.column]])
        out |= mask
    return out.astype(int)


@dataclass(frozen=True)
class RuleEvaluation:
    accuracy: float
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def confusion(self) -> dict[str, int]:
        return {"tp": self.tp, "fp": self.fp, "tn": self.tn, "fn": self.fn}

    def to_dict(self) -> dict:
        return {"accuracy": self.accuracy, **self.confusion}


def eval_ruleset(rules: RuleSet, X: np.ndarray, y, columns: Sequence[str]) -> RuleEvaluation:
    y = np.asarray(y, dtype=int)
    pred = predict_ruleset(rules, X, columns)
    return RuleEvaluation(
        accuracy=float(np.mean(pred == y)),
        tp=int(np.sum((pred == 1) & (y == 1))),
        fp=int(np.sum((pred == 1) & (y == 0))),
        tn=int(np.sum((pred == 0) & (y == 0))),
        fn=int(np.sum((pred == 0) & (y == 1))),
    )


class GreedyDnfLearner(BaseEstimator, ClassifierMixin):
    """Greedy set-cover DNF learner.

    Clauses are grown one literal at a time from per-column quantile
    thresholds, scoring candidates by precision-weighted coverage of the
    still-uncovered positives. A clause is accepted only while it newly
    covers more positives than negatives, which makes training accuracy
    non-decreasing in max_clauses. Fully deterministic: ties break to the
    lower column index, then the lower threshold, then ``<=`` before ``>``.
    """

    def __init__(self, max_clauses: int = 5, max_literals: int = 3,
                 n_quantiles: int = 9, min_coverage_gain: float = 0.01,
                 min_precision: float = 0.6):
        self.max_clauses = max_clauses
        self.max_literals = max_literals
        self.n_quantiles = n_quantiles
        self.min_coverage_gain = min_coverage_gain
        self.min_precision = min_precision

    def fit(self, X, y, feature_names: Sequence[str] | None = None) -> "GreedyDnfLearner":
        X = np.atleast_2d(np.asarray(X, dtype=float))
        y = np.asarray(y, dtype=int)
        if len(np.unique(y)) < 2:
            raise ValueError("learning rules requires both classes present")
        if feature_names is None:
            feature_names = [f"x{i}" for i in range(X.shape[1])]
        self.feature_names_ = list(feature_names)
        candidates = self._candidate_literals(X, y)
        n_pos = int(np.sum(y == 1))
        covered = np.zeros(X.shape[0], dtype=bool)
        clauses: list[Clause] = []
        while len(clauses) < self.max_clauses:
            clause_idx, clause_mask = self._grow_clause(X, y, covered, candidates)
            if clause_idx is None:
                break
            newly = clause_mask & ~covered
            new_tp = int(np.sum(newly & (y == 1)))
            new_fp = int(np.sum(newly & (y == 0)))
            if (
                new_tp < max(1.0, self.min_coverage_gain * n_pos)
                or new_tp / (new_tp + new_fp) < self.min_precision
            ):
                break
            clauses.append(Clause(tuple(
                Literal(self.feature_names_[col], op, t) for col, op, t in clause_idx
            )))
            covered |= clause_mask
        self.ruleset_ = RuleSet(tuple(clauses))  # empty = predict all normal
        return self

    def _candidate_literals(self, X: np.ndarray, y: np.ndarray) -> list[tuple[int, str, float]]:
        """Quantiles of each column (overall and per class), snapped to the
        midpoint of the surrounding data gap so separable boundaries are hit
        exactly."""
        out: set[tuple[int, str, float]] = set()
        qs = np.linspace(0.0, 1.0, self.n_quantiles + 2)
        for col in range(X.shape[1]):
            values = X[:, col]
            distinct = np.unique(values)
            if distinct.size < 2:
                continue
            raw = np.unique(np.concatenate([
                np.quantile(values, qs),
                np.quantile(values[y == 1], qs),
                np.quantile(values[y == 0], qs),
            ]))
            for t in raw:
                left = distinct[distinct <= t]
                right = distinct[distinct > t]
                if left.size == 0 or right.size == 0:
                    continue
                snapped = float((left.max() + right.min()) / 2.0)
                out.add((col, "<=", snapped))
                out.add((col, ">", snapped))
        return sorted(out, key=lambda c: (c[0], c[2], c[1]))

    def _grow_clause(self, X, y, covered, candidates):
        mask = np.ones(X.shape[0], dtype=bool)
        chosen: list[tuple[int, str, float]] = []
        best_score = 0.0
        while len(chosen) < self.max_literals:
            best = None
            for col, op, t in candidates:
                if any(c[0] == col for c in chosen):
                    continue
                lit_mask = X[:, col] <= t if op == "<=" else X[:, col] > t
                m = mask & lit_mask
                tp = int(np.sum(m & (y == 1) & ~covered))
                if tp == 0:
                    continue
                fp = int(np.sum(m & (y == 0) & ~covered))
                score = (tp / (tp + fp)) * tp
                if best is None or score > best[0] + 1e-12:
                    best = (score, col, op, t, m)
            if best is None or best[0] <= best_score + 1e-12:
                break
            best_score, col, op, t, mask = best
            chosen.append((col, op, t))
        if not chosen:
            return None, None
        return chosen, mask

    def predict(self, X) -> np.ndarray:
        if not hasattr(self, "ruleset_"):
            raise NotFittedError("GreedyDnfLearner is not fitted; call fit() first")
        return predict_ruleset(self.ruleset_, X, self.feature_names_)

    def score(self, X, y) -> float:
        return float(np.mean(self.predict(X) == np.asarray(y, dtype=int)))
