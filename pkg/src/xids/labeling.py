"""Zero-shot attack labels from attributions, plus the analyst label registry.

An auto-label is the canonical name built from the k features that push a
prediction hardest toward the attack class: component names sorted
lexicographically and joined with hyphens, so the same feature combination
always yields the same string no matter the attribution's column order.
"""

from __future__ import annotations

import json
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .journal import JsonlJournal
from .shapley import Attribution


@dataclass(frozen=True)
class AutoLabel:
    """Canonical zero-shot label: k components, alphabetized, hyphen-joined."""

    label: str
    components: tuple[str, ...]
    contributions: dict[str, float]
    k: int
    fallback_used: bool = False  # fewer than k attack-pushing features existed

    def __post_init__(self):
        if len(self.components) != self.k:
            raise ValueError(f"expected {self.k} components, got {len(self.components)}")
        if list(self.components) != sorted(self.components):
            raise ValueError("components must be sorted lexicographically")
        if len(set(self.components)) != len(self.components):
            raise ValueError("components must be unique")
        if self.label != "-".join(self.components):
            raise ValueError("label must be the hyphen-join of its components")

    def __str__(self) -> str:
        return self.label


def auto_label(attr: Attribution, k: int = 3, rank_by: str = "positive") -> AutoLabel:
    """Build the canonical label from an attribution's top-k features.

    rank_by="positive" selects the largest attack-pushing (positive) values,
    falling back to |phi| (flagged) when fewer than k are positive;
    rank_by="abs" ranks by magnitude outright. Ties break lexicographically.
    """
    if rank_by not in ("positive", "abs"):
        raise ValueError(f"rank_by must be 'positive' or 'abs', got {rank_by!r}")
    if len(attr.columns) < k:
        raise ValueError(f"attribution has {len(attr.columns)} columns, need at least {k}")
    values = np.asarray(attr.values, dtype=float)
    names = list(attr.columns)
    fallback = False
    if rank_by == "positive":
        positive = [(names[i], values[i]) for i in range(len(names)) if values[i] > 0]
        if len(positive) >= k:
            ranked = sorted(positive, key=lambda nv: (-nv[1], nv[0]))
        else:
            fallback = True
            ranked = sorted(zip(names, values), key=lambda nv: (-abs(nv[1]), nv[0]))
    else:
        ranked = sorted(zip(names, values), key=lambda nv: (-abs(nv[1]), nv[0]))
    top = ranked[:k]
    components = tuple(sorted(name for name, _ in top))
    return AutoLabel(
        label="-".join(components),
        components=components,
        contributions={name: float(v) for name, v in top},
        k=k,
        fallback_used=fallback,
    )


@dataclass(frozen=True)
class RegistryEntry:
    auto_label: str
    analyst_label: str
    analyst: str
    note: str
    timestamp: float


@dataclass(frozen=True)
class Resolution:
    kind: str  # "known" | "novel"
    analyst_label: str | None = None

    @property
    def is_known(self) -> bool:
        return self.kind == "known"


class LabelRegistry:
    """Many-to-one map from canonical auto-labels to analyst attack names.

    Backed by an append-only journal when a path is given: every register()
    appends one upsert event, and the current state is a fold over the
    journal, so a crash loses at most the torn final write. Latest write
    wins per auto-label; full history is retained.
    """

    def __init__(self, journal_path: str | Path | None = None):
        self._journal = JsonlJournal(journal_path) if journal_path else None
        self._entries: dict[str, RegistryEntry] = {}
        self._history: dict[str, list[RegistryEntry]] = {}
        if self._journal:
            for event in self._journal.replay():
                self._apply(RegistryEntry(
                    auto_label=event["auto_label"],
                    analyst_label=event["analyst_label"],
                    analyst=event.get("analyst", ""),
                    note=event.get("note", ""),
                    timestamp=event.get("timestamp", 0.0),
                ))

    def _apply(self, entry: RegistryEntry) -> None:
        self._entries[entry.auto_label] = entry
        self._history.setdefault(entry.auto_label, []).append(entry)

    def register(self, auto_label: str | AutoLabel, analyst_label: str,
                 analyst: str = "", note: str = "",
                 timestamp: float | None = None) -> RegistryEntry:
        key = str(auto_label)
        if not key:
            raise ValueError("auto-label key must be non-empty")
        if not analyst_label:
            raise ValueError("analyst label must be non-empty")
        entry = RegistryEntry(
            auto_label=key,
            analyst_label=analyst_label,
            analyst=analyst,
            note=note,
            timestamp=time.time() if timestamp is None else timestamp,
        )
        if self._journal:
            self._journal.append({
                "auto_label": entry.auto_label,
                "analyst_label": entry.analyst_label,
                "analyst": entry.analyst,
                "note": entry.note,
                "timestamp": entry.timestamp,
            })
        self._apply(entry)
        return entry

    def resolve(self, auto_label: str | AutoLabel) -> Resolution:
        """Exact-match lookup; misses surface as novel (the zero-shot case)."""
        entry = self._entries.get(str(auto_label))
        if entry is None:
            return Resolution(kind="novel")
        return Resolution(kind="known", analyst_label=entry.analyst_label)

    def history(self, auto_label: str | AutoLabel) -> list[RegistryEntry]:
        return list(self._history.get(str(auto_label), []))

    def entries(self) -> dict[str, RegistryEntry]:
        return dict(self._entries)

    def __len__(self) -> int:
        return len(self._entries)

    def to_dict(self) -> dict:
        return {
            key: {
                "analyst_label": e.analyst_label,
                "analyst": e.analyst,
                "note": e.note,
                "timestamp": e.timestamp,
            }
            for key, e in sorted(self._entries.items())
        }


@dataclass(frozen=True)
class AttackTypePurity:
    attack: str
    modal_label: str
    purity: float
    distinct_labels: int
    instances: int

    def __post_init__(self):
        if not (0.0 < self.purity <= 1.0):
            raise ValueError(f"purity must lie in (0,1], got {self.purity}")


@dataclass(frozen=True)
class PurityReport:
    per_attack: dict[str, AttackTypePurity]
    mapping: dict[str, dict[str, int]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            attack: {
                "modal_label": p.modal_label,
                "purity": p.purity,
                "distinct_labels": p.distinct_labels,
                "instances": p.instances,
                "labels": self.mapping.get(attack, {}),
            }
            for attack, p in sorted(self.per_attack.items())
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def purity_report(pairs: list[tuple[str, str | AutoLabel]]) -> PurityReport:
    """Per ground-truth attack type: how consistently the auto-labeler names it."""
    if not pairs:
        raise ValueError("purity report requires at least one (attack, label) pair")
    by_attack: dict[str, Counter] = {}
    for attack, label in pairs:
        by_attack.setdefault(attack, Counter())[str(label)] += 1
    per_attack = {}
    mapping = {}
    for attack, counts in by_attack.items():
        # highest count wins; ties go to the lexicographically smaller label
        modal_label, modal_count = min(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        total = sum(counts.values())
        per_attack[attack] = AttackTypePurity(
            attack=attack,
            modal_label=modal_label,
            purity=modal_count / total,
            distinct_labels=len(counts),
            instances=total,
        )
        mapping[attack] = dict(sorted(counts.items()))
    return PurityReport(per_attack=per_attack, mapping=mapping)
