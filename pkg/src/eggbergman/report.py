"""Verification records and their JSON-lines / CSV serialization.

Rows are written with sorted keys and ``repr``-exact floats, so two runs
with the same configuration produce byte-identical files once the
``timestamp`` field is removed.
"""
from __future__ import annotations

import csv
import datetime as _dt
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

__all__ = ["VerificationReport", "write_jsonl", "write_csv", "strip_timestamps"]

CSV_COLUMNS = ("suite", "check", "estimate", "tolerance", "pass")


def _plain(x):
    """Convert numpy scalars, arrays and complex numbers into JSON values."""
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if isinstance(x, np.ndarray):
        return _plain(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer, int)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        return [_plain(float(x.real)), _plain(float(x.imag))]
    if isinstance(x, (np.floating, float)):
        x = float(x)
        # json has no inf/nan literals that every reader accepts
        return x if math.isfinite(x) else repr(x)
    return x


@dataclass
class VerificationReport:
    suite: str
    check: str
    anchor: str
    estimate: object
    tolerance: object
    passed: bool
    params: dict = field(default_factory=dict)
    std_error: float | None = None
    sup_point: object = None
    sample_budget: int | None = None
    detail: dict = field(default_factory=dict)
    timestamp: str = field(default_factory=lambda: _dt.datetime.now(_dt.timezone.utc).isoformat())

    def to_dict(self) -> dict:
        out = _plain(asdict(self))
        out["pass"] = out.pop("passed")
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def write_jsonl(reports, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in reports:
            fh.write(r.to_json() + "\n")


def _cell(x) -> str:
    return x if isinstance(x, str) else json.dumps(x)


def write_csv(reports, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(CSV_COLUMNS)
        for r in reports:
            row = r.to_dict()
            wr.writerow([row["suite"], row["check"], _cell(row["estimate"]),
                         _cell(row["tolerance"]), "true" if row["pass"] else "false"])


def strip_timestamps(text: str) -> str:
    """JSON-lines text with every ``timestamp`` field removed (for comparisons)."""
    lines = []
    for line in text.splitlines():
        obj = json.loads(line)
        obj.pop("timestamp", None)
        lines.append(json.dumps(obj, sort_keys=True))
    return "\n".join(lines)
