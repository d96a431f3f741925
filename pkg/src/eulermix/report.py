"""Audit verdicts, experiment reports and their CSV/JSON serialisation."""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

SCHEMA_VERSION = 1


@dataclass
class Verdict:
    """Outcome of checking one inequality over many instances."""

    name: str
    checked: int = 0
    violations: int = 0
    worst_ratio: float = 0.0
    example: str = ""

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, lhs: float, rhs: float, where: str = "", slack: float = 0.0) -> bool:
        """Count one instance of ``lhs <= rhs + slack``; remember the worst ratio."""
        self.checked += 1
        ratio = lhs / rhs if rhs > 0 else (math.inf if lhs > 0 else 0.0)
        ok = lhs <= rhs + slack + 1e-9 * max(1.0, abs(rhs))
        if not ok:
            self.violations += 1
            if self.violations == 1:
                self.example = where
        if ratio > self.worst_ratio:
            self.worst_ratio = ratio
            if not self.violations:
                self.example = where
        return ok

    def merge(self, other: Verdict) -> None:
        self.checked += other.checked
        if other.violations and not self.violations:
            self.example = other.example
        self.violations += other.violations
        self.worst_ratio = max(self.worst_ratio, other.worst_ratio)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (
            f"{status} {self.name}: {self.checked} checked, {self.violations} violations,"
            f" worst ratio {self.worst_ratio:.4g}" + (f" ({self.example})" if self.example else "")
        )


@dataclass
class ExperimentReport:
    config: dict[str, Any]
    columns: list[str]
    rows: list[dict[str, Any]] = field(default_factory=list)
    verdicts: list[Verdict] = field(default_factory=list)
    wall_clock: float = 0.0

    @property
    def violations(self) -> list[Verdict]:
        return [v for v in self.verdicts if not v.passed]

    def add_row(self, **values: Any) -> None:
        missing = set(values) - set(self.columns)
        if missing:
            raise KeyError(f"unknown columns {sorted(missing)}")
        self.rows.append(values)


def _cell(x: Any) -> Any:
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x))
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, float):
        return repr(float(x)) if math.isfinite(x) else str(float(x))
    if x is None:
        return ""
    return x


def to_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.columns)
    for row in report.rows:
        w.writerow([_cell(row.get(col)) for col in report.columns])
    return buf.getvalue()


def _jsonable(x: Any) -> Any:
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, np.ndarray):
        x = x.tolist()
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def to_json(report: ExperimentReport, include_timing: bool = False) -> str:
    doc = {
        "schema_version": SCHEMA_VERSION,
        "config": report.config,
        "columns": report.columns,
        "rows": report.rows,
        "verdicts": [asdict(v) | {"passed": v.passed} for v in report.verdicts],
    }
    if include_timing:
        doc["wall_clock"] = report.wall_clock
    return json.dumps(_jsonable(doc), indent=2, sort_keys=False) + "\n"


def emit(report: ExperimentReport, fmt: str = "csv") -> str:
    if fmt == "csv":
        return to_csv(report)
    if fmt == "json":
        return to_json(report)
    raise ValueError(f"unknown format {fmt!r}")
