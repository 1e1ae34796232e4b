"""Journaled alert store for the analyst review loop."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .journal import JsonlJournal

REVIEW_ACTIONS = ("confirm", "rename")


class ReviewConflict(RuntimeError):
    """Raised when reviewing an alert that is no longer pending."""


@dataclass
class AlertRecord:
    """One scored-and-explained flow awaiting (or past) analyst review.

    Review status moves only pending -> confirmed or pending -> renamed;
    resolution reflects registry state at creation time.
    """

    alert_id: str
    source_ref: str
    score: float
    label_class: int
    attribution: dict[str, float]
    base_value: float
    auto_label: str
    resolution_kind: str  # "known" | "novel"
    resolution_label: str | None
    status: str = "pending"  # "pending" | "confirmed" | "renamed"
    created_at: float = 0.0
    reviewed_at: float | None = None
    analyst: str = ""
    note: str = ""
    analyst_label: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, doc: dict) -> "AlertRecord":
        return cls(**doc)


class AlertStore:
    """Append-only alert journal; in-memory state is a fold over events."""

    def __init__(self, journal_path: str | Path | None = None):
        self._journal = JsonlJournal(journal_path) if journal_path else None
        self._alerts: dict[str, AlertRecord] = {}
        self._order: list[str] = []
        if self._journal:
            for event in self._journal.replay():
                self._apply(event)

    def _apply(self, event: dict) -> None:
        if event["event"] == "created":
            alert = AlertRecord.from_dict(event["alert"])
            self._alerts[alert.alert_id] = alert
            self._order.append(alert.alert_id)
        elif event["event"] == "reviewed":
            alert = self._alerts[event["alert_id"]]
            alert.status = event["status"]
            alert.reviewed_at = event["reviewed_at"]
            alert.analyst = event.get("analyst", "")
            alert.note = event.get("note", "")
            alert.analyst_label = event.get("analyst_label")

    def create(self, source_ref: str, score: float, label_class: int,
               attribution: dict[str, float], base_value: float,
               auto_label: str, resolution_kind: str,
               resolution_label: str | None, created_at: float | None = None) -> AlertRecord:
        alert = AlertRecord(
            alert_id=f"al-{len(self._order) + 1:06d}",
            source_ref=source_ref,
            score=score,
            label_class=label_class,
            attribution=attribution,
            base_value=base_value,
            auto_label=auto_label,
            resolution_kind=resolution_kind,
            resolution_label=resolution_label,
            created_at=time.time() if created_at is None else created_at,
        )
        if self._journal:
            self._journal.append({"event": "created", "alert": alert.to_dict()})
        self._apply({"event": "created", "alert": alert.to_dict()})
        return self._alerts[alert.alert_id]

    def review(self, alert_id: str, action: str, analyst_label: str | None = None,
               analyst: str = "", note: str = "",
               reviewed_at: float | None = None) -> AlertRecord:
        if action not in REVIEW_ACTIONS:
            raise ValueError(f"action must be one of {REVIEW_ACTIONS}, got {action!r}")
        alert = self.get(alert_id)
        if alert.status != "pending":
            raise ReviewConflict(f"alert {alert_id} already {alert.status}")
        if action == "rename" and not analyst_label:
            raise ValueError("rename requires a non-empty analyst label")
        event = {
            "event": "reviewed",
            "alert_id": alert_id,
            "status": "confirmed" if action == "confirm" else "renamed",
            "reviewed_at": time.time() if reviewed_at is None else reviewed_at,
            "analyst": analyst,
            "note": note,
            "analyst_label": analyst_label if action == "rename" else None,
        }
        if self._journal:
            self._journal.append(event)
        self._apply(event)
        return self._alerts[alert_id]

    def get(self, alert_id: str) -> AlertRecord:
        if alert_id not in self._alerts:
            raise KeyError(f"no alert {alert_id!r}")
        return self._alerts[alert_id]

    def list(self, status: str | None = None) -> list[AlertRecord]:
        alerts = [self._alerts[aid] for aid in self._order]
        if status is not None:
            alerts = [a for a in alerts if a.status == status]
        return alerts

    def __len__(self) -> int:
        return len(self._order)
