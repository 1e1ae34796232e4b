"""Shapley feature attributions for any scoring function.

Exact values come from full coalition enumeration (guarded to <= 20 players).
Larger games use the kernel-weighted least-squares estimator with paired
coalition sampling; equality constraints pin the empty coalition to the
background mean and the full coalition to the model output, so the
attribution always satisfies local accuracy by construction.

Players are either raw encoded columns or whole one-hot groups (one player
per original feature), selected via PlayerGrouping.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .encoding import FeatureSchema

Scorer = Callable[[np.ndarray], np.ndarray]

EXACT_PLAYER_LIMIT = 20
DEFAULT_EXTRA_COALITIONS = 2048
_EVAL_CHUNK_ROWS = 131072


class DimensionError(ValueError):
    """Raised when exact enumeration is requested beyond the player limit."""


@dataclass(frozen=True)
class PlayerGrouping:
    """Maps attribution players onto encoded matrix columns."""

    names: tuple[str, ...]
    column_groups: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.names) != len(self.column_groups):
            raise ValueError("names and column_groups must align")

    @property
    def n_players(self) -> int:
        return len(self.names)

    @classmethod
    def raw(cls, columns: Sequence[str]) -> "PlayerGrouping":
        return cls(names=tuple(columns), column_groups=tuple((i,) for i in range(len(columns))))

    @classmethod
    def collapsed(cls, schema: FeatureSchema) -> "PlayerGrouping":
        """One player per original feature; a categorical player owns its
        whole one-hot block, so its attribution is the block's joint credit."""
        groups = schema.group_slices()
        return cls(
            names=tuple(groups.keys()),
            column_groups=tuple(tuple(idx) for idx in groups.values()),
        )

    def subset(self, names: Sequence[str]) -> "PlayerGrouping":
        index = {n: i for i, n in enumerate(self.names)}
        missing = [n for n in names if n not in index]
        if missing:
            raise KeyError(f"unknown players: {missing}")
        return PlayerGrouping(
            names=tuple(names),
            column_groups=tuple(self.column_groups[index[n]] for n in names),
        )


@dataclass(frozen=True)
class Background:
    """Reference rows substituted for absent features."""

    X: np.ndarray
    schema_fingerprint: str = ""

    def __post_init__(self):
        X = np.atleast_2d(np.asarray(self.X, dtype=float))
        if X.shape[0] == 0:
            raise ValueError("background set must be non-empty")
        object.__setattr__(self, "X", X)

    @property
    def size(self) -> int:
        return self.X.shape[0]


def select_background(X: np.ndarray, y: np.ndarray, size: int, seed: int,
                      schema_fingerprint: str = "") -> Background:
    """Seeded sample of rows labeled normal (class 0); attributions against it
    answer what makes an instance differ from normal traffic."""
    normal_idx = np.flatnonzero(np.asarray(y) == 0)
    if normal_idx.size == 0:
        raise ValueError("no normal rows available for the background set")
    rng = np.random.default_rng(seed)
    take = min(size, normal_idx.size)
    chosen = np.sort(rng.choice(normal_idx, size=take, replace=False))
    return Background(X=np.asarray(X, dtype=float)[chosen], schema_fingerprint=schema_fingerprint)


@dataclass(frozen=True)
class Attribution:
    """Per-player Shapley values for one prediction.

    Local accuracy (base_value + sum(values) == prediction) is validated at
    construction: 1e-9 relative in exact mode, 1e-6 in sampled mode.
    """

    columns: tuple[str, ...]
    values: np.ndarray
    base_value: float
    prediction: float
    mode: str  # "exact" | "sampled"
    n_coalitions: int
    seed: int | None = None
    granularity: str = "raw"
    inputs: np.ndarray | None = None  # per-player scalar of the explained row
    fallback_used: bool = field(default=False, compare=False)

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if len(self.columns) != values.size:
            raise ValueError("columns and values must align")
        if self.mode not in ("exact", "sampled"):
            raise ValueError(f"mode must be 'exact' or 'sampled', got {self.mode!r}")
        tol = 1e-9 if self.mode == "exact" else 1e-6
        gap = abs(self.base_value + float(values.sum()) - self.prediction)
        if gap > tol * max(1.0, abs(self.prediction)):
            raise ValueError(
                f"local accuracy violated: |phi0 + sum(phi) - f(x)| = {gap:.3e} (mode={self.mode})"
            )

    def as_dict(self) -> dict[str, float]:
        return {c: float(v) for c, v in zip(self.columns, self.values)}

    def to_json(self) -> str:
        return json.dumps(
            {
                "phi": self.as_dict(),
                "base_value": self.base_value,
                "prediction": self.prediction,
                "mode": self.mode,
                "n_coalitions": self.n_coalitions,
                "seed": self.seed,
                "granularity": self.granularity,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "Attribution":
        doc = json.loads(text)
        return cls(
            columns=tuple(doc["phi"].keys()),
            values=np.array(list(doc["phi"].values()), dtype=float),
            base_value=doc["base_value"],
            prediction=doc["prediction"],
            mode=doc["mode"],
            n_coalitions=doc["n_coalitions"],
            seed=doc["seed"],
            granularity=doc.get("granularity", "raw"),
        )


def _coalition_matrix(x: np.ndarray, masks: np.ndarray, background: Background,
                      grouping: PlayerGrouping) -> np.ndarray:
    """Rows for every (coalition, background row) pair: players absent from
    the coalition take their columns from the background row, everything
    else (present players and any column outside the game) stays at x."""
    b = background.X
    n_masks, n_bg = masks.shape[0], b.shape[0]
    x = np.asarray(x, dtype=float)
    Z = np.tile(x, (n_masks * n_bg, 1))
    for player, cols in enumerate(grouping.column_groups):
        cols = list(cols)
        absent = np.flatnonzero(~masks[:, player])
        if absent.size == 0:
            continue
        rows = (absent[:, None] * n_bg + np.arange(n_bg)[None, :]).ravel()
        Z[np.ix_(rows, cols)] = np.tile(b[:, cols], (absent.size, 1))
    return Z


def _eval_masks(scorer: Scorer, x: np.ndarray, masks: np.ndarray,
                background: Background, grouping: PlayerGrouping) -> np.ndarray:
    """v(S) for each mask row: mean scorer output over background substitutions."""
    n_bg = background.size
    rows_per_mask = max(1, _EVAL_CHUNK_ROWS // n_bg)
    out = np.empty(masks.shape[0], dtype=float)
    for start in range(0, masks.shape[0], rows_per_mask):
        chunk = masks[start:start + rows_per_mask]
        Z = _coalition_matrix(x, chunk, background, grouping)
        scores = np.asarray(scorer(Z), dtype=float).reshape(chunk.shape[0], n_bg)
        out[start:start + rows_per_mask] = scores.mean(axis=1)
    return out


def masked_eval(scorer: Scorer, x: np.ndarray, coalition, background: Background,
                grouping: PlayerGrouping | None = None) -> float:
    """Mean over background rows b of scorer(z), z_i = x_i if i in coalition else b_i."""
    x = np.asarray(x, dtype=float)
    if grouping is None:
        grouping = PlayerGrouping.raw([str(i) for i in range(x.size)])
    mask = np.zeros((1, grouping.n_players), dtype=bool)
    for i in coalition:
        mask[0, int(i)] = True
    return float(_eval_masks(scorer, x, mask, background, grouping)[0])


def _all_masks(m: int) -> np.ndarray:
    ints = np.arange(2 ** m, dtype=np.int64)
    return (ints[:, None] >> np.arange(m)[None, :]) & 1 > 0


def exact_shapley(scorer: Scorer, x: np.ndarray, background: Background,
                  grouping: PlayerGrouping | None = None) -> Attribution:
    """Shapley values by full coalition enumeration (players <= 20)."""
    x = np.asarray(x, dtype=float)
    if grouping is None:
        grouping = PlayerGrouping.raw([str(i) for i in range(x.size)])
    m = grouping.n_players
    if m > EXACT_PLAYER_LIMIT:
        raise DimensionError(f"{m} players exceeds exact enumeration limit {EXACT_PLAYER_LIMIT}")
    masks = _all_masks(m)
    v = _eval_masks(scorer, x, masks, background, grouping)
    sizes = masks.sum(axis=1)
    fact = [math.factorial(i) for i in range(m + 1)]
    weight_by_size = np.array(
        [fact[s] * fact[m - s - 1] / fact[m] for s in range(m)], dtype=float
    )
    ints = np.arange(2 ** m, dtype=np.int64)
    phi = np.zeros(m, dtype=float)
    for i in range(m):
        without_i = (ints >> i) & 1 == 0
        s_ints = ints[without_i]
        phi[i] = np.sum(weight_by_size[sizes[without_i]] * (v[s_ints | (1 << i)] - v[s_ints]))
    base = float(v[0])
    # coalition weights telescope, so base + sum(phi) equals v(full) = f(x)
    fx = float(np.asarray(scorer(np.atleast_2d(x)), dtype=float)[0])
    return Attribution(
        columns=grouping.names,
        values=phi,
        base_value=base,
        prediction=fx,
        mode="exact",
        n_coalitions=int(2 ** m),
        seed=None,
        inputs=_player_inputs(x, grouping),
    )


def player_inputs(x: np.ndarray, grouping: PlayerGrouping) -> np.ndarray:
    """Per-player scalar view of x: the column value for singleton players,
    the block sum for one-hot groups."""
    x = np.asarray(x, dtype=float)
    return np.array([float(np.sum(x[list(cols)])) if len(cols) > 1 else float(x[cols[0]])
                     for cols in grouping.column_groups])


_player_inputs = player_inputs


def kernel_weight(m: int, s: int) -> float:
    """SHAP kernel pi(s) = (M-1) / (C(M,s) * s * (M-s)) for 0 < s < M."""
    if s <= 0 or s >= m:
        raise ValueError(f"kernel weight undefined for s={s} with M={m}; "
                         "trivial coalitions are constraint-handled")
    return (m - 1) / (math.comb(m, s) * s * (m - s))


def _sample_masks(m: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """Paired coalition sample: sizes drawn with probability proportional to
    total kernel mass per size, each drawn subset paired with its complement."""
    sizes = np.arange(1, m)
    size_mass = (m - 1) / (sizes * (m - sizes))
    size_p = size_mass / size_mass.sum()
    masks = np.zeros((n, m), dtype=bool)
    row = 0
    while row < n:
        s = int(rng.choice(sizes, p=size_p))
        members = rng.choice(m, size=s, replace=False)
        masks[row, members] = True
        row += 1
        if row < n:
            masks[row] = ~masks[row - 1]
            row += 1
    return masks


def kernel_shap(scorer: Scorer, x: np.ndarray, background: Background,
                n_coalitions: int | None = None, seed: int = 0,
                grouping: PlayerGrouping | None = None) -> Attribution:
    """Kernel-weighted least-squares Shapley estimate.

    Budgets >= 2^M - 2 switch to full enumeration, which reproduces
    exact_shapley. The empty and full coalitions are never regressed; they
    enter as equality constraints, guaranteeing local accuracy.
    """
    x = np.asarray(x, dtype=float)
    if grouping is None:
        grouping = PlayerGrouping.raw([str(i) for i in range(x.size)])
    m = grouping.n_players
    if m < 1:
        raise ValueError("need at least one player")
    if n_coalitions is None:
        n_coalitions = 2 * m + DEFAULT_EXTRA_COALITIONS
    # v(empty): every player drawn from the background, non-players stay at x
    base = float(_eval_masks(
        scorer, x, np.zeros((1, m), dtype=bool), background, grouping,
    )[0])
    fx = float(np.asarray(scorer(np.atleast_2d(x)), dtype=float)[0])
    if m == 1:
        return Attribution(
            columns=grouping.names, values=np.array([fx - base]), base_value=base,
            prediction=fx, mode="exact", n_coalitions=0, seed=seed,
            inputs=_player_inputs(x, grouping),
        )
    full_budget = 2 ** m - 2 if m <= 62 else np.inf
    if n_coalitions >= full_budget:
        masks = _all_masks(m)
        masks = masks[(masks.sum(axis=1) > 0) & (masks.sum(axis=1) < m)]
        weights = np.array([kernel_weight(m, int(s)) for s in masks.sum(axis=1)])
        mode = "exact"
    elif n_coalitions < m + 2:
        raise ValueError(f"n_coalitions must be at least M+2 = {m + 2}")
    else:
        masks = None
        weights = None
        mode = "sampled"

    rng = np.random.default_rng(seed)
    for attempt in range(3):
        if mode == "sampled":
            masks = _sample_masks(m, n_coalitions, rng)
            weights = np.ones(masks.shape[0], dtype=float)
        v = _eval_masks(scorer, x, masks, background, grouping)
        # eliminate the last player to enforce sum(phi) = f(x) - phi0
        z = masks.astype(float)
        y_adj = v - base - z[:, -1] * (fx - base)
        A = z[:, :-1] - z[:, -1:]
        sw = np.sqrt(weights)
        Aw = A * sw[:, None]
        yw = y_adj * sw
        if np.linalg.matrix_rank(Aw) < m - 1:
            if mode == "sampled":
                continue  # resample with fresh draws
            raise ValueError("singular coalition design in full enumeration")
        head, *_ = np.linalg.lstsq(Aw, yw, rcond=None)
        phi = np.append(head, (fx - base) - head.sum())
        return Attribution(
            columns=grouping.names,
            values=phi,
            base_value=base,
            prediction=fx,
            mode=mode,
            n_coalitions=int(masks.shape[0]),
            seed=seed,
            inputs=_player_inputs(x, grouping),
        )
    raise ValueError("coalition design stayed singular after bounded retries")


@dataclass(frozen=True)
class GlobalSummary:
    """Dataset-level attribution summary: mean |phi| per column, importance
    order (descending, lexicographic tie-break), and value/phi pairs."""

    mean_abs: dict[str, float]
    ordering: tuple[str, ...]
    points: dict[str, list[tuple[float, float]]]

    def to_dict(self) -> dict:
        def clean(v: float):
            return v if math.isfinite(v) else None

        return {
            "mean_abs": {c: self.mean_abs[c] for c in self.ordering},
            "ordering": list(self.ordering),
            "points": {c: [[clean(v), p] for v, p in pts] for c, pts in self.points.items()},
        }


def summarize(attributions: Sequence[Attribution]) -> GlobalSummary:
    if not attributions:
        raise ValueError("cannot summarize an empty attribution list")
    columns = attributions[0].columns
    for a in attributions:
        if a.columns != columns:
            raise ValueError("attributions must share one column set")
    phis = np.stack([a.values for a in attributions])
    mean_abs = np.abs(phis).mean(axis=0)
    ordering = sorted(range(len(columns)), key=lambda i: (-mean_abs[i], columns[i]))
    points: dict[str, list[tuple[float, float]]] = {c: [] for c in columns}
    for a in attributions:
        inputs = a.inputs if a.inputs is not None else np.full(len(columns), np.nan)
        for i, c in enumerate(columns):
            points[c].append((float(inputs[i]), float(a.values[i])))
    return GlobalSummary(
        mean_abs={c: float(mean_abs[i]) for i, c in enumerate(columns)},
        ordering=tuple(columns[i] for i in ordering),
        points=points,
    )
