"""Append-only JSON-lines journal; current state is a fold over the events."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Iterator


class JsonlJournal:
    """One JSON document per line, appended atomically and flushed to disk.

    Replay tolerates a truncated final line (the partial write a crash can
    leave behind) by skipping it; any earlier malformed line raises, since
    that means corruption rather than interrupted shutdown.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)

    def append(self, event: dict) -> None:
        line = json.dumps(event, sort_keys=True, separators=(",", ":"))
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    def replay(self) -> Iterator[dict]:
        if not self.path.exists():
            return
        with self.path.open("r", encoding="utf-8") as fh:
            lines = fh.readlines()
        for i, line in enumerate(lines):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError:
                if i == len(lines) - 1:
                    return  # torn final write; recover up to the last full event
                raise
