"""Local linear surrogates and kernel-weighted similar-instance prototypes."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

Scorer = Callable[[np.ndarray], np.ndarray]


def default_kernel_width(n_columns: int) -> float:
    return math.sqrt(n_columns) * 0.75


@dataclass(frozen=True)
class LocalSurrogate:
    """Sparse weighted-least-squares fit around one instance."""

    intercept: float
    weights: dict[str, float]  # at most k nonzero entries
    kernel_width: float
    n_perturb: int
    r2: float
    seed: int

    def predict(self, X: np.ndarray, columns: Sequence[str]) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.full(X.shape[0], self.intercept)
        index = {c: i for i, c in enumerate(columns)}
        for col, w in self.weights.items():
            out += w * X[:, index[col]]
        return out


def _perturb(
    x: np.ndarray,
    n: int,
    rng: np.random.Generator,
    numeric_idx: np.ndarray,
    onehot_groups: Sequence[Sequence[int]],
    train_X: np.ndarray | None,
    noise_halfwidth: float,
) -> np.ndarray:
    Z = np.tile(x, (n, 1))
    if numeric_idx.size:
        noise = rng.uniform(-noise_halfwidth, noise_halfwidth, size=(n, numeric_idx.size))
        Z[:, numeric_idx] = np.clip(Z[:, numeric_idx] + noise, 0.0, 1.0)
    for cols in onehot_groups:
        cols = np.asarray(cols, dtype=int)
        if train_X is not None and len(cols):
            # category marginals from training data; leftover mass = no known category
            p = train_X[:, cols].mean(axis=0)
            p_none = max(0.0, 1.0 - p.sum())
            probs = np.append(p, p_none)
            probs = probs / probs.sum()
            draws = rng.choice(len(cols) + 1, size=n, p=probs)
            Z[:, cols] = 0.0
            for j in range(len(cols)):
                Z[draws == j, cols[j]] = 1.0
    return Z


def lime_explain(
    scorer: Scorer,
    x: np.ndarray,
    columns: Sequence[str],
    n_perturb: int = 500,
    kernel_width: float | None = None,
    k: int = 5,
    seed: int = 0,
    numeric_idx: Sequence[int] | None = None,
    onehot_groups: Sequence[Sequence[int]] = (),
    train_X: np.ndarray | None = None,
    noise_halfwidth: float = 0.25,
) -> LocalSurrogate:
    """Fit a k-sparse local linear surrogate around x.

    Perturbations add seeded uniform noise to numeric columns (clamped to
    [0,1]) and resample one-hot groups from training marginals. Each
    perturbation is weighted by exp(-d^2 / sigma^2) in scaled space; columns
    enter by forward selection on weighted residual error.
    """
    x = np.asarray(x, dtype=float)
    if n_perturb < 10 * k:
        raise ValueError(f"n_perturb must be at least 10*k = {10 * k}")
    if kernel_width is None:
        kernel_width = default_kernel_width(len(columns))
    if numeric_idx is None:
        grouped = {i for cols in onehot_groups for i in cols}
        numeric_idx = np.array([i for i in range(x.size) if i not in grouped], dtype=int)
    else:
        numeric_idx = np.asarray(numeric_idx, dtype=int)

    rng = np.random.default_rng(seed)
    Z = _perturb(x, n_perturb, rng, numeric_idx, onehot_groups, train_X, noise_halfwidth)
    if np.all(Z == Z[0]):
        raise ValueError("all perturbations identical; nothing to fit")
    target = np.asarray(scorer(Z), dtype=float)
    d2 = np.sum((Z - x) ** 2, axis=1)
    w = np.exp(-d2 / kernel_width**2)
    sw = np.sqrt(w)

    selected: list[int] = []
    candidates = [i for i in range(Z.shape[1]) if Z[:, i].std() > 0]
    for _ in range(min(k, len(candidates))):
        best = None
        for i in candidates:
            if i in selected:
                continue
            sse = _weighted_sse(Z[:, selected + [i]], target, sw)
            if best is None or sse < best[0] - 1e-12:
                best = (sse, i)
        if best is None:
            break
        selected.append(best[1])
    beta, fitted = _weighted_fit(Z[:, selected], target, sw)
    ybar = np.average(target, weights=w)
    ss_res = float(np.sum(w * (target - fitted) ** 2))
    ss_tot = float(np.sum(w * (target - ybar) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return LocalSurrogate(
        intercept=float(beta[0]),
        weights={columns[i]: float(b) for i, b in zip(selected, beta[1:])},
        kernel_width=kernel_width,
        n_perturb=n_perturb,
        r2=r2,
        seed=seed,
    )


def _design(Xsub: np.ndarray, sw: np.ndarray) -> np.ndarray:
    return np.column_stack([np.ones(Xsub.shape[0]), Xsub]) * sw[:, None]


def _weighted_fit(Xsub: np.ndarray, y: np.ndarray, sw: np.ndarray):
    A = _design(Xsub, sw)
    beta, *_ = np.linalg.lstsq(A, y * sw, rcond=None)
    fitted = np.column_stack([np.ones(Xsub.shape[0]), Xsub]) @ beta
    return beta, fitted

def _weighted_sse(Xsub: np.ndarray, y: np.ndarray, sw: np.ndarray) -> float:
    _, fitted = _weighted_fit(Xsub, y, sw)
    return float(np.sum((sw * (y - fitted)) ** 2))


@dataclass(frozen=True)
class Prototype:
    index: int
    weight: float
    vector: np.ndarray
    closeness: np.ndarray  # per-column similarity in [0,1]
    label: str | None = None


@dataclass(frozen=True)
class PrototypeSet:
    prototypes: tuple[Prototype, ...]
    kernel_width: float

    def __post_init__(self):
        weights = [p.weight for p in self.prototypes]
        if any(b > a for a, b in zip(weights, weights[1:])):
            raise ValueError("prototypes must be sorted by non-increasing weight")

    def __len__(self) -> int:
        return len(self.prototypes)


def similar_instances(
    x: np.ndarray,
    train_X: np.ndarray,
    n: int = 5,
    kernel_width: float | None = None,
    labels: Sequence[str] | None = None,
) -> PrototypeSet:
    """Top-n training rows by kernel weight exp(-d^2 / sigma^2).

    Each prototype carries a per-column closeness view, 1 - |x_i - p_i|,
    which is 1.0 where the prototype matches the instance exactly.
    """
    x = np.asarray(x, dtype=float)
    train_X = np.atleast_2d(np.asarray(train_X, dtype=float))
    if train_X.shape[0] == 0:
        raise ValueError("train set must be non-empty")
    if kernel_width is None:
        kernel_width = default_kernel_width(x.size)
    d2 = np.sum((train_X - x) ** 2, axis=1)
    weights = np.exp(-d2 / kernel_width**2)
    take = min(n, train_X.shape[0])
    # stable order: weight descending, then original index ascending
    order = np.lexsort((np.arange(train_X.shape[0]), -weights))[:take]
    prototypes = tuple(
        Prototype(
            index=int(i),
            weight=float(weights[i]),
            vector=train_X[i],
            closeness=1.0 - np.abs(train_X[i] - x),
            label=labels[i] if labels is not None else None,
        )
        for i in order
    )
    return PrototypeSet(prototypes=prototypes, kernel_width=kernel_width)
