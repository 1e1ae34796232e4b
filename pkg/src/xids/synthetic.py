"""Seeded generator of NSL-KDD-format flow records for demos and tests.

The real KDDTrain+/KDDTest+ files are not redistributable with this package,
so this module fabricates records with the same 43-field layout and
per-attack-type signatures that echo the well-known traffic patterns: SYN
floods with saturated serror rates, port sweeps with REJ flags and diverse
services, password guessing with hot indicators and failed logins, and so
on. Distributions are deliberately simple; this is scaffolding for the
pipeline, not a substitute for the benchmark.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .nslkdd import FEATURE_NAMES

_NORMAL_SERVICES = ["http", "smtp", "ftp_data", "domain_u", "telnet", "pop_3", "urp_i"]

DEFAULT_MIX = (
    ("normal", 0.53),
    ("neptune", 0.20),
    ("portsweep", 0.06),
    ("ipsweep", 0.04),
    ("smurf", 0.05),
    ("satan", 0.03),
    ("back", 0.02),
    ("guess_passwd", 0.04),
    ("warezmaster", 0.03),
)


def _base_row(rng: np.random.Generator) -> dict:
    row = {name: 0 for name in FEATURE_NAMES}
    row.update(
        protocol_type="tcp",
        service=str(rng.choice(_NORMAL_SERVICES)),
        flag="SF",
    )
    return row


def _normal(rng: np.random.Generator) -> dict:
    row = _base_row(rng)
    row.update(
        duration=int(rng.exponential(15)),
        src_bytes=int(rng.lognormal(5.5, 1.0)),
        dst_bytes=int(rng.lognormal(7.0, 1.2)),
        logged_in=int(rng.random() < 0.8),
        count=int(rng.integers(1, 20)),
        srv_count=int(rng.integers(1, 20)),
        same_srv_rate=round(rng.uniform(0.8, 1.0), 2),
        dst_host_count=int(rng.integers(1, 256)),
        dst_host_srv_count=int(rng.integers(1, 256)),
        dst_host_same_srv_rate=round(rng.uniform(0.7, 1.0), 2),
        dst_host_same_src_port_rate=round(rng.uniform(0.0, 0.2), 2),
    )
    return row


def _neptune(rng) -> dict:  # SYN flood: half-open connections, serror saturated
    row = _base_row(rng)
    row.update(
        service=str(rng.choice(["private", "http", "telnet"])),
        flag="S0",
        src_bytes=0,
        dst_bytes=0,
        count=int(rng.integers(100, 511)),
        srv_count=int(rng.integers(1, 20)),
        serror_rate=1.0,
        srv_serror_rate=1.0,
        same_srv_rate=round(rng.uniform(0.0, 0.1), 2),
        diff_srv_rate=round(rng.uniform(0.05, 0.1), 2),
        dst_host_count=255,
        dst_host_srv_count=int(rng.integers(1, 30)),
        dst_host_same_srv_rate=round(rng.uniform(0.0, 0.1), 2),
        dst_host_serror_rate=1.0,
        dst_host_srv_serror_rate=1.0,
    )
    return row


def _portsweep(rng) -> dict:  # scan across ports: rejected probes, tiny payloads
    row = _base_row(rng)
    row.update(
        service=str(rng.choice(["private", "other", "finger", "uucp"])),
        flag=str(rng.choice(["REJ", "RSTR", "SH"])),
        src_bytes=int(rng.integers(0, 10)),
        dst_bytes=0,
        count=int(rng.integers(1, 5)),
        srv_count=int(rng.integers(1, 5)),
        rerror_rate=round(rng.uniform(0.7, 1.0), 2),
        srv_rerror_rate=round(rng.uniform(0.7, 1.0), 2),
        diff_srv_rate=round(rng.uniform(0.7, 1.0), 2),
        same_srv_rate=round(rng.uniform(0.0, 0.15), 2),
        dst_host_count=255,
        dst_host_srv_count=int(rng.integers(1, 10)),
        dst_host_same_srv_rate=round(rng.uniform(0.0, 0.06), 2),
        dst_host_diff_srv_rate=round(rng.uniform(0.6, 1.0), 2),
        dst_host_same_src_port_rate=round(rng.uniform(0.6, 1.0), 2),
        dst_host_rerror_rate=round(rng.uniform(0.7, 1.0), 2),
    )
    return row


def _ipsweep(rng) -> dict:  # ping sweep over hosts
    row = _base_row(rng)
    row.update(
        protocol_type="icmp",
        service="eco_i",
        src_bytes=int(rng.integers(8, 21)),
        dst_bytes=0,
        count=int(rng.integers(1, 6)),
        srv_count=int(rng.integers(1, 30)),
        same_srv_rate=1.0,
        dst_host_count=int(rng.integers(1, 60)),
        dst_host_srv_count=int(rng.integers(100, 256)),
        dst_host_same_srv_rate=1.0,
        dst_host_same_src_port_rate=1.0,
    )
    return row


def _smurf(rng) -> dict:  # ICMP echo-reply flood
    row = _base_row(rng)
    row.update(
        protocol_type="icmp",
        service="ecr_i",
        src_bytes=1032,
        dst_bytes=0,
        count=int(rng.integers(200, 511)),
        srv_count=int(rng.integers(200, 511)),
        same_srv_rate=1.0,
        dst_host_count=255,
        dst_host_srv_count=255,
        dst_host_same_srv_rate=1.0,
        dst_host_same_src_port_rate=round(rng.uniform(0.5, 1.0), 2),
    )
    return row


def _satan(rng) -> dict:  # vulnerability scan, mixed noisy probes
    row = _base_row(rng)
    row.update(
        service=str(rng.choice(["private", "http", "sunrpc", "other"])),
        flag=str(rng.choice(["REJ", "SF", "RSTO"])),
        src_bytes=int(rng.integers(0, 40)),
        dst_bytes=int(rng.integers(0, 40)),
        count=int(rng.integers(50, 300)),
        srv_count=int(rng.integers(1, 20)),
        rerror_rate=round(rng.uniform(0.3, 0.9), 2),
        diff_srv_rate=round(rng.uniform(0.5, 1.0), 2),
        same_srv_rate=round(rng.uniform(0.05, 0.3), 2),
        dst_host_count=255,
        dst_host_diff_srv_rate=round(rng.uniform(0.4, 1.0), 2),
        dst_host_rerror_rate=round(rng.uniform(0.3, 0.9), 2),
    )
    return row


def _back(rng) -> dict:  # http DoS with oversized requests
    row = _base_row(rng)
    row.update(
        service="http",
        src_bytes=int(rng.integers(50_000, 60_000)),
        dst_bytes=int(rng.integers(7_000, 9_000)),
        logged_in=1,
        hot=int(rng.integers(0, 3)),
        count=int(rng.integers(1, 10)),
        srv_count=int(rng.integers(1, 10)),
        same_srv_rate=1.0,
        dst_host_count=255,
        dst_host_srv_count=255,
        dst_host_same_srv_rate=1.0,
    )
    return row


def _guess_passwd(rng) -> dict:  # brute-force logins: hot indicators, failures
    row = _base_row(rng)
    row.update(
        service=str(rng.choice(["ftp", "telnet", "pop_3"])),
        flag=str(rng.choice(["SF", "RSTO"])),
        duration=int(rng.integers(1, 6)),
        src_bytes=int(rng.integers(100, 150)),
        dst_bytes=int(rng.integers(180, 500)),
        hot=int(rng.integers(1, 3)),
        num_failed_logins=int(rng.integers(1, 6)),
        logged_in=0,
        count=int(rng.integers(1, 4)),
        srv_count=int(rng.integers(1, 4)),
        dst_host_count=int(rng.integers(200, 256)),
        dst_host_srv_count=int(rng.integers(1, 20)),
        dst_host_same_srv_rate=round(rng.uniform(0.0, 0.1), 2),
        dst_host_serror_rate=round(rng.uniform(0.2, 0.5), 2),
        dst_host_rerror_rate=round(rng.uniform(0.5, 1.0), 2),
    )
    return row


def _warezmaster(rng) -> dict:  # warez upload over anonymous ftp
    row = _base_row(rng)
    row.update(
        service=str(rng.choice(["ftp", "ftp_data"])),
        duration=int(rng.integers(100, 400)),
        src_bytes=int(rng.lognormal(10.0, 1.0)),
        dst_bytes=int(rng.integers(0, 400)),
        hot=int(rng.integers(8, 30)),
        logged_in=1,
        is_guest_login=1,
        count=int(rng.integers(1, 4)),
        srv_count=int(rng.integers(1, 4)),
        dst_host_count=int(rng.integers(1, 30)),
        dst_host_srv_count=int(rng.integers(1, 30)),
        dst_host_same_srv_rate=round(rng.uniform(0.4, 0.9), 2),
        dst_host_rerror_rate=round(rng.uniform(0.2, 0.6), 2),
    )
    return row


_GENERATORS = {
    "normal": _normal,
    "neptune": _neptune,
    "portsweep": _portsweep,
    "ipsweep": _ipsweep,
    "smurf": _smurf,
    "satan": _satan,
    "back": _back,
    "guess_passwd": _guess_passwd,
    "warezmaster": _warezmaster,
}


def generate_lines(n: int, seed: int, mix=DEFAULT_MIX) -> list[str]:
    """n records in KDDTrain+ file layout (41 features, label, difficulty)."""
    rng = np.random.default_rng(seed)
    labels = [label for label, _ in mix]
    probs = np.array([p for _, p in mix], dtype=float)
    probs = probs / probs.sum()
    out = []
    for _ in range(n):
        label = labels[int(rng.choice(len(labels), p=probs))]
        row = _GENERATORS[label](rng)
        fields = [_format_field(row[name]) for name in FEATURE_NAMES]
        fields.append(label)
        fields.append("20")
        out.append(",".join(fields))
    return out


def _format_field(value) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(int(value))


def write_dataset(
    out_dir: str | Path,
    n_train: int = 4000,
    n_test: int = 1000,
    seed: int = 0,
) -> tuple[Path, Path]:
    """Write synthetic train/test files named like the benchmark layout."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    train = out_dir / "KDDTrain+.txt"
    test = out_dir / "KDDTest+.txt"
    train.write_text("\n".join(generate_lines(n_train, seed)) + "\n", encoding="utf-8")
    test.write_text("\n".join(generate_lines(n_test, seed + 1)) + "\n", encoding="utf-8")
    return train, test
