"""NSL-KDD flow record ingestion: parsing, attack-family lookup, subsampling."""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, TextIO

import numpy as np

# Canonical NSL-KDD column order. Files carry these 41 features followed by
# the attack label and an optional difficulty score.
FEATURE_NAMES = (
    "duration",
    "protocol_type",
    "service",
    "flag",
    "src_bytes",
    "dst_bytes",
    "land",
    "wrong_fragment",
    "urgent",
    "hot",
    "num_failed_logins",
    "logged_in",
    "num_compromised",
    "root_shell",
    "su_attempted",
    "num_root",
    "num_file_creations",
    "num_shells",
    "num_access_files",
    "num_outbound_cmds",
    "is_host_login",
    "is_guest_login",
    "count",
    "srv_count",
    "serror_rate",
    "srv_serror_rate",
    "rerror_rate",
    "srv_rerror_rate",
    "same_srv_rate",
    "diff_srv_rate",
    "srv_diff_host_rate",
    "dst_host_count",
    "dst_host_srv_count",
    "dst_host_same_srv_rate",
    "dst_host_diff_srv_rate",
    "dst_host_same_src_port_rate",
    "dst_host_srv_diff_host_rate",
    "dst_host_serror_rate",
    "dst_host_srv_serror_rate",
    "dst_host_rerror_rate",
    "dst_host_srv_rerror_rate",
)

CATEGORICAL_FEATURES = ("protocol_type", "service", "flag")

NUMERIC_FEATURES = tuple(f for f in FEATURE_NAMES if f not in CATEGORICAL_FEATURES)

_CATEGORICAL_IDX = {f: FEATURE_NAMES.index(f) for f in CATEGORICAL_FEATURES}
_NUMERIC_IDX = [FEATURE_NAMES.index(f) for f in NUMERIC_FEATURES]

RATE_FEATURES = frozenset(f for f in NUMERIC_FEATURES if f.endswith("_rate"))

# Attack sub-categories grouped into the four NSL-KDD families.
ATTACK_FAMILIES: dict[str, str] = {
    "normal": "normal",
    # denial of service
    "back": "dos",
    "land": "dos",
    "neptune": "dos",
    "pod": "dos",
    "smurf": "dos",
    "teardrop": "dos",
    "apache2": "dos",
    "mailbomb": "dos",
    "processtable": "dos",
    "udpstorm": "dos",
    "worm": "dos",
    # probing / information gathering
    "ipsweep": "probe",
    "mscan": "probe",
    "nmap": "probe",
    "portsweep": "probe",
    "saint": "probe",
    "satan": "probe",
    # remote to local
    "ftp_write": "r2l",
    "guess_passwd": "r2l",
    "httptunnel": "r2l",
    "imap": "r2l",
    "multihop": "r2l",
    "named": "r2l",
    "phf": "r2l",
    "sendmail": "r2l",
    "snmpgetattack": "r2l",
    "snmpguess": "r2l",
    "spy": "r2l",
    "warezclient": "r2l",
    "warezmaster": "r2l",
    "xlock": "r2l",
    "xsnoop": "r2l",
    # user to root
    "buffer_overflow": "u2r",
    "loadmodule": "u2r",
    "perl": "u2r",
    "ps": "u2r",
    "rootkit": "u2r",
    "sqlattack": "u2r",
    "xterm": "u2r",
}


class ParseError(ValueError):
    """Raised for a malformed input line; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class FlowRecord:
    """One NSL-KDD connection record: 41 named features plus its attack label.

    ``features`` maps every name in FEATURE_NAMES to a float (numeric fields)
    or a string token (protocol_type, service, flag). The difficulty score is
    parsed when present but ignored downstream.
    """

    features: dict[str, float | str]
    attack_label: str
    difficulty: int | None = None

    def __post_init__(self):
        if not self.attack_label:
            raise ValueError("attack_label must be non-empty")

    @property
    def is_attack(self) -> bool:
        return self.attack_label != "normal"

    @property
    def family(self) -> str:
        return attack_family(self.attack_label)

    def numeric(self, name: str) -> float:
        return float(self.features[name])  # type: ignore[arg-type]


def attack_family(attack_label: str) -> str:
    """Map an NSL-KDD attack sub-category to {normal, dos, probe, u2r, r2l, unknown}."""
    return ATTACK_FAMILIES.get(attack_label, "unknown")


def parse_line(line: str, line_no: int = 1) -> FlowRecord:
    """Parse one comma-separated NSL-KDD line (41 features, label, optional difficulty)."""
    fields = [f.strip() for f in line.strip().split(",")]
    if len(fields) not in (42, 43):
        raise ParseError(line_no, f"expected 42 or 43 fields, got {len(fields)}")
    features: dict[str, float | str] = {}
    for i, name in enumerate(FEATURE_NAMES):
        raw = fields[i]
        if name in CATEGORICAL_FEATURES:
            if not raw:
                raise ParseError(line_no, f"empty categorical field {name!r}")
            features[name] = raw
        else:
            try:
                value = float(raw)
            except ValueError:
                raise ParseError(line_no, f"non-numeric value {raw!r} for {name!r}") from None
            if value < 0:
                raise ParseError(line_no, f"negative value {value} for {name!r}")
            if name in RATE_FEATURES and value > 1.0:
                raise ParseError(line_no, f"rate {name!r} out of [0,1]: {value}")
            features[name] = value
    label = fields[41]
    if not label:
        raise ParseError(line_no, "empty attack label")
    difficulty = None
    if len(fields) == 43:
        try:
            difficulty = int(fields[42])
        except ValueError:
            raise ParseError(line_no, f"non-integer difficulty {fields[42]!r}") from None
    return FlowRecord(features=features, attack_label=label, difficulty=difficulty)


def normalize_features(raw: dict) -> dict[str, float | str]:
    """Coerce a loose mapping (e.g. request JSON) into validated FlowRecord
    features, applying the same range rules as the file parser."""
    features: dict[str, float | str] = {}
    for name in FEATURE_NAMES:
        value = raw.get(name, 0)
        if name in CATEGORICAL_FEATURES:
            if not value or not isinstance(value, str):
                raise ValueError(f"categorical field {name!r} must be a non-empty string")
            features[name] = value
        else:
            try:
                v = float(value)
            except (TypeError, ValueError):
                raise ValueError(f"non-numeric value {value!r} for {name!r}") from None
            if v < 0:
                raise ValueError(f"negative value {v} for {name!r}")
            if name in RATE_FEATURES and v > 1.0:
                raise ValueError(f"rate {name!r} out of [0,1]: {v}")
            features[name] = v
    return features


def parse_records(
    stream: TextIO | Iterable[str],
    on_error: str = "raise",
) -> list[FlowRecord]:
    """Parse NSL-KDD records from a text stream, one record per line.

    ``on_error="raise"`` aborts on the first malformed line with a ParseError
    naming the line number; ``"collect"`` skips malformed lines and attaches
    them to the returned list as the ``errors`` attribute.
    """
    if on_error not in ("raise", "collect"):
        raise ValueError(f"on_error must be 'raise' or 'collect', got {on_error!r}")
    records: list[FlowRecord] = []
    errors: list[ParseError] = []
    for line_no, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            records.append(parse_line(line, line_no))
        except ParseError as exc:
            if on_error == "raise":
                raise
            errors.append(exc)
    out = _RecordList(records)
    out.errors = errors
    return out


class _RecordList(list):
    """list of FlowRecord with an ``errors`` attribute from lenient parsing."""

    errors: list[ParseError]


def parse_text(text: str, on_error: str = "raise") -> list[FlowRecord]:
    return parse_records(io.StringIO(text), on_error=on_error)


def load_file(path: str | Path, on_error: str = "raise") -> list[FlowRecord]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as fh:
        return parse_records(fh, on_error=on_error)


def stratified_subsample(
    records: list[FlowRecord],
    size: int,
    seed: int,
    class_counts: dict[str, int] | None = None,
) -> list[FlowRecord]:
    """Draw a seeded subsample stratified over the binary normal/attack split.

    Without ``class_counts`` the split is proportional to the input (largest
    remainders resolved toward normal). Explicit counts, e.g.
    ``{"normal": 6776, "attack": 5822}``, reproduce a known evaluation subset
    exactly. Original record order is preserved.
    """
    if size <= 0:
        raise ValueError("size must be positive")
    if size > len(records):
        raise ValueError(f"size {size} exceeds available records {len(records)}")
    normal_idx = [i for i, r in enumerate(records) if not r.is_attack]
    attack_idx = [i for i, r in enumerate(records) if r.is_attack]
    if class_counts is None:
        n_normal = round(size * len(normal_idx) / len(records))
        n_attack = size - n_normal
    else:
        n_normal = class_counts.get("normal", 0)
        n_attack = class_counts.get("attack", 0)
        if n_normal + n_attack != size:
            raise ValueError("class_counts must sum to size")
    if n_normal > len(normal_idx) or n_attack > len(attack_idx):
        raise ValueError(
            f"cannot draw {n_normal} normal / {n_attack} attack from "
            f"{len(normal_idx)} / {len(attack_idx)} available"
        )
    rng = np.random.default_rng(seed)
    chosen = np.concatenate([
        rng.choice(normal_idx, size=n_normal, replace=False) if n_normal else np.empty(0, dtype=int),
        rng.choice(attack_idx, size=n_attack, replace=False) if n_attack else np.empty(0, dtype=int),
    ])
    chosen.sort()
    return [records[i] for i in chosen]


def iter_labels(records: Iterable[FlowRecord]) -> Iterator[str]:
    for r in records:
        yield r.attack_label
