"""Contrastive explanations by black-box greedy search on the anomaly score.

A pertinent negative is a minimal feature change that flips the classifier's
decision; a pertinent positive is a minimal feature subset whose presence
alone preserves it. Both drive the continuous score (class = score >=
threshold), so greedy coordinate moves have a gradient-like signal to follow.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

Scorer = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class ContrastiveResult:
    kind: str  # "pertinent-negative" | "pertinent-positive"
    found: bool
    original_class: int
    contrast_class: int | None
    x_contrast: np.ndarray | None
    delta: dict[str, float] = field(default_factory=dict)  # PN: changed columns
    kept_features: tuple[str, ...] = ()  # PP: minimal surviving subset
    verified_minimal: bool = False
    steps_used: int = 0

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "found": self.found,
            "original_class": self.original_class,
            "contrast_class": self.contrast_class,
            "delta": self.delta,
            "kept_features": list(self.kept_features),
            "verified_minimal": self.verified_minimal,
        }


def _classify(score_fn: Scorer, X: np.ndarray, threshold: float) -> np.ndarray:
    return (np.asarray(score_fn(np.atleast_2d(X)), dtype=float) >= threshold).astype(int)


def pertinent_negative(
    score_fn: Scorer,
    threshold: float,
    x: np.ndarray,
    columns: Sequence[str],
    mutable_idx: Sequence[int] | None = None,
    step: float = 0.01,
    max_changed_features: int = 5,
    max_steps: int = 400,
) -> ContrastiveResult:
    """Greedy coordinate search for a class-flipping delta within [0,1].

    Each step applies the single +-step move that most shifts the score
    toward the opposite class, restricted to already-touched features once
    max_changed_features distinct ones have moved. On a flip, changed
    features are pruned to 1-minimality: any whose full reversal keeps the
    flip is reverted, repeated until stable.
    """
    x = np.asarray(x, dtype=float).copy()
    n = x.size
    mutable = np.arange(n) if mutable_idx is None else np.asarray(mutable_idx, dtype=int)
    original_class = int(_classify(score_fn, x, threshold)[0])
    want_higher = original_class == 0  # pushing a normal toward attack raises score
    current = x.copy()
    changed: set[int] = set()

    step_no = 0
    for step_no in range(max_steps):
        if int(_classify(score_fn, current, threshold)[0]) != original_class:
            break
        active = mutable if len(changed) < max_changed_features else np.array(sorted(changed))
        candidates = []
        moves = []
        for i in active:
            for direction in (+1.0, -1.0):
                v = current[i] + direction * step
                if not (0.0 <= v <= 1.0 + 1e-12):
                    continue
                z = current.copy()
                z[i] = min(v, 1.0)
                candidates.append(z)
                moves.append((i, z[i]))
        if not candidates:
            break
        scores = np.asarray(score_fn(np.vstack(candidates)), dtype=float)
        best = int(np.argmax(scores)) if want_higher else int(np.argmin(scores))
        i, v = moves[best]
        current[i] = v
        changed.add(i)
    else:
        step_no = max_steps

    flipped = int(_classify(score_fn, current, threshold)[0]) != original_class
    if not flipped:
        return ContrastiveResult(
            kind="pertinent-negative", found=False, original_class=original_class,
            contrast_class=None, x_contrast=None, steps_used=max_steps,
        )

    # 1-minimality prune: revert any changed feature whose reversal keeps the flip
    stable = False
    while not stable:
        stable = True
        for i in sorted(changed):
            trial = current.copy()
            trial[i] = x[i]
            if int(_classify(score_fn, trial, threshold)[0]) != original_class:
                current = trial
                changed.discard(i)
                stable = False
    verified = all(
        int(_classify(score_fn, _reverted(current, x, i), threshold)[0]) == original_class
        for i in changed
    )
    delta = {columns[i]: float(current[i] - x[i]) for i in sorted(changed)}
    return ContrastiveResult(
        kind="pertinent-negative",
        found=True,
        original_class=original_class,
        contrast_class=1 - original_class,
        x_contrast=current,
        delta=delta,
        verified_minimal=verified,
        steps_used=step_no + 1,
    )


def _reverted(current: np.ndarray, x: np.ndarray, i: int) -> np.ndarray:
    out = current.copy()
    out[i] = x[i]
    return out


def pertinent_positive(
    score_fn: Scorer,
    threshold: float,
    x: np.ndarray,
    columns: Sequence[str],
    background_mean: np.ndarray,
    maskable_idx: Sequence[int] | None = None,
) -> ContrastiveResult:
    """Greedy backward elimination to the minimal class-preserving subset.

    Starting from all features present, repeatedly mask (replace by the
    background mean) the feature whose removal least harms the original
    class's score, while the class survives. At exit no single masking
    preserves the class, so the survivors are 1-minimal by construction.
    """
    x = np.asarray(x, dtype=float)
    background_mean = np.asarray(background_mean, dtype=float)
    n = x.size
    maskable = set(range(n) if maskable_idx is None else (int(i) for i in maskable_idx))
    original_class = int(_classify(score_fn, x, threshold)[0])
    prefer_higher = original_class == 1  # keep the score on the original side

    current = x.copy()
    present = set(maskable)
    while present:
        order = sorted(present)
        trials = []
        for i in order:
            z = current.copy()
            z[i] = background_mean[i]
            trials.append(z)
        scores = np.asarray(score_fn(np.vstack(trials)), dtype=float)
        classes = (scores >= threshold).astype(int)
        viable = [j for j in range(len(order)) if classes[j] == original_class]
        if not viable:
            break
        best = max(viable, key=lambda j: scores[j]) if prefer_higher else min(
            viable, key=lambda j: scores[j]
        )
        i = order[best]
        current[i] = background_mean[i]
        present.discard(i)

    kept = tuple(columns[i] for i in sorted(present))
    # by construction masking any survivor flips; double-check and record
    verified = True
    for i in sorted(present):
        z = current.copy()
        z[i] = background_mean[i]
        if int(_classify(score_fn, z, threshold)[0]) == original_class:
            verified = False
            break
    return ContrastiveResult(
        kind="pertinent-positive",
        found=True,
        original_class=original_class,
        contrast_class=original_class,
        x_contrast=current,
        kept_features=kept,
        verified_minimal=verified,
    )
