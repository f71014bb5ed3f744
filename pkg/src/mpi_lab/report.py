"""Structured check reports with deterministic serialization.

A report is an ordered list of (check id, pass flag, residual) entries
plus free-form properties (dimensions, flags) and explicit skip
records.  The canonical JSON form excludes wall times so that identical
inputs and seed produce byte-identical reports; timings are available
in the text rendering and behind an explicit flag.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class CheckEntry:
    check_id: str
    passed: bool
    residual: float
    wall_time_ms: float = 0.0


@dataclass
class CheckReport:
    fixture_id: str
    tolerance: float
    version: str
    entries: list[CheckEntry] = field(default_factory=list)
    skips: list[dict[str, str]] = field(default_factory=list)
    properties: dict = field(default_factory=dict)

    def add(self, check_id: str, residual: float, tol: float | None = None,
            passed: bool | None = None, wall_time_ms: float = 0.0) -> CheckEntry:
        if any(e.check_id == check_id for e in self.entries):
            raise ValueError(f"duplicate check id {check_id!r}")
        residual = float(residual)
        if not (residual >= 0.0 and residual < float("inf")):
            raise ValueError(f"residual for {check_id} is not a finite nonnegative real")
        if passed is None:
            passed = residual < (self.tolerance if tol is None else tol)
        entry = CheckEntry(check_id, bool(passed), residual, wall_time_ms)
        self.entries.append(entry)
        return entry

    def skip(self, level: str, reason: str) -> None:
        self.skips.append({"level": level, "reason": reason})

    @property
    def overall_pass(self) -> bool:
        return all(e.passed for e in self.entries)

    def failed_checks(self) -> list[str]:
        return [e.check_id for e in self.entries if not e.passed]

    def to_dict(self, include_timings: bool = False) -> dict:
        entries = []
        for e in self.entries:
            d = {"id": e.check_id, "pass": e.passed, "residual": e.residual}
            if include_timings:
                d["wall_time_ms"] = e.wall_time_ms
            entries.append(d)
        return {
            "fixture": self.fixture_id,
            "tolerance": self.tolerance,
            "version": self.version,
            "checks": entries,
            "skips": self.skips,
            "properties": self.properties,
            "overall": "pass" if self.overall_pass else "fail",
        }

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(
            self.to_dict(include_timings), sort_keys=True, separators=(",", ":")
        )

    def to_text(self) -> str:
        lines = [f"fixture: {self.fixture_id}   tolerance: {self.tolerance:g}"]
        for e in self.entries:
            mark = "PASS" if e.passed else "FAIL"
            lines.append(
                f"  [{mark}] {e.check_id:<42s} residual={e.residual:.3e}"
                f"  ({e.wall_time_ms:.1f} ms)"
            )
        for s in self.skips:
            lines.append(f"  [SKIP] {s['level']}: {s['reason']}")
        lines.append(f"overall: {'pass' if self.overall_pass else 'fail'}")
        return "\n".join(lines)


def reports_to_json(reports: list[CheckReport], include_timings: bool = False) -> str:
    body = {
        "reports": [r.to_dict(include_timings) for r in reports],
        "summary": {
            "total": len(reports),
            "passed": sum(1 for r in reports if r.overall_pass),
        },
    }
    return json.dumps(body, sort_keys=True, separators=(",", ":"))
