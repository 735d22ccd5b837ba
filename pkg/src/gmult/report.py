"""Check records, verification reports and their JSON / markdown renderings."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

import numpy as np

KINDS = ("identity", "inequality", "observation")


@dataclass
class CheckRecord:
    id: str
    suite: str
    trial: int
    ref: str
    instance_digest: str
    lhs: float
    rhs: float
    tolerance: float
    kind: str
    passed: bool
    skipped_reason: str | None = None
    note: str | None = None

    @property
    def skipped(self) -> bool:
        return self.skipped_reason is not None

    @property
    def slack(self) -> float | None:
        """Distance to failure; negative means the check failed."""
        if self.skipped or self.kind == "observation":
            return None
        if self.kind == "identity":
            return self.tolerance - abs(self.lhs - self.rhs)
        return self.rhs + self.tolerance - self.lhs

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "suite": self.suite,
            "trial": self.trial,
            "ref": self.ref,
            "instanceDigest": self.instance_digest,
            "lhs": _num(self.lhs),
            "rhs": _num(self.rhs),
            "tolerance": _num(self.tolerance),
            "kind": self.kind,
            "pass": self.passed,
            "skippedReason": self.skipped_reason,
            "note": self.note,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "CheckRecord":
        return cls(obj["id"], obj["suite"], int(obj["trial"]), obj["ref"], obj["instanceDigest"],
                   _unnum(obj["lhs"]), _unnum(obj["rhs"]), _unnum(obj["tolerance"]), obj["kind"],
                   bool(obj["pass"]), obj.get("skippedReason"), obj.get("note"))


def _num(v: float):
    v = float(v)
    if np.isfinite(v):
        return v
    return "inf" if v > 0 else ("-inf" if v < 0 else "nan")


def _unnum(v) -> float:
    return float(v)


def evaluate(kind: str, lhs: float, rhs: float, tol: float) -> bool:
    if kind == "identity":
        return bool(abs(lhs - rhs) <= tol)
    if kind == "inequality":
        return bool(lhs <= rhs + tol)
    return True


def digest(*items) -> str:
    """sha256 over inputs printed with 12 significant digits."""
    h = hashlib.sha256()
    for item in items:
        arr = np.asarray(item)
        if np.iscomplexobj(arr):
            flat = np.stack([arr.real.ravel(), arr.imag.ravel()], axis=1).ravel()
        else:
            flat = arr.astype(np.float64).ravel()
        h.update(str(arr.shape).encode())
        h.update(",".join(f"{v + 0.0:.11e}" for v in flat).encode())
        h.update(b";")
    return h.hexdigest()[:16]


@dataclass
class Recorder:
    """Accumulates records for one suite run."""

    suite: str
    rtol: float = 1e-9
    records: list = field(default_factory=list)
    trial: int = 0
    instance: str = ""

    def start(self, trial: int, *inputs):
        self.trial = trial
        self.instance = digest(*inputs) if inputs else ""

    def _add(self, cid, ref, lhs, rhs, tol, kind, skipped=None, note=None):
        lhs, rhs = float(np.real(lhs)), float(np.real(rhs))
        passed = True if skipped else evaluate(kind, lhs, rhs, tol)
        rec = CheckRecord(cid, self.suite, self.trial, ref, self.instance, lhs, rhs, float(tol), kind,
                          passed, skipped, note)
        self.records.append(rec)
        return rec

    def tol(self, scale: float = 0.0, rtol: float | None = None) -> float:
        r = self.rtol if rtol is None else rtol
        return max(r * (1.0 + abs(float(scale))), 1e-12)

    def identity(self, cid, ref, lhs, rhs, scale=None, rtol=None):
        """Scalar identity; complex values are compared through their difference."""
        if np.iscomplexobj(lhs) or np.iscomplexobj(rhs):
            diff = abs(complex(lhs) - complex(rhs))
            sc = max(abs(complex(lhs)), abs(complex(rhs))) if scale is None else scale
            return self._add(cid, ref, diff, 0.0, self.tol(sc, rtol), "identity")
        sc = max(abs(float(lhs)), abs(float(rhs))) if scale is None else scale
        return self._add(cid, ref, lhs, rhs, self.tol(sc, rtol), "identity")

    def matrix_identity(self, cid, ref, lhs, rhs, scale=None, rtol=None):
        lhs, rhs = np.asarray(lhs), np.asarray(rhs)
        if scale is None:
            scale = max(np.linalg.norm(lhs, 2) if lhs.size else 0.0, np.linalg.norm(rhs, 2) if rhs.size else 0.0)
        resid = float(np.linalg.norm(lhs - rhs, 2)) if lhs.size else 0.0
        return self._add(cid, ref, resid, 0.0, self.tol(scale, rtol), "identity")

    def inequality(self, cid, ref, lhs, rhs, scale=None, rtol=None):
        sc = max(abs(float(lhs)), abs(float(rhs))) if scale is None else scale
        return self._add(cid, ref, lhs, rhs, self.tol(sc, rtol), "inequality")

    def flag(self, cid, ref, ok: bool, note: str | None = None):
        """Boolean assertion, recorded as the identity 0 == 0 when it holds."""
        return self._add(cid, ref, 0.0 if ok else 1.0, 0.0, 0.0, "identity", note=note)

    def observe(self, cid, ref, lhs, rhs, note: str | None = None):
        return self._add(cid, ref, lhs, rhs, 0.0, "observation", note=note)

    def skip(self, cid, ref, reason: str):
        return self._add(cid, ref, 0.0, 0.0, 0.0, "identity", skipped=reason)

    def fail(self, cid, ref, reason: str):
        return self._add(cid, ref, 1.0, 0.0, 0.0, "identity", note=reason)


@dataclass
class VerificationReport:
    scenario: dict
    records: list
    wall_time_seconds: float = 0.0

    @property
    def summary(self) -> dict:
        skipped = sum(1 for r in self.records if r.skipped)
        failed = sum(1 for r in self.records if not r.passed)
        return {
            "total": len(self.records),
            "passed": len(self.records) - failed - skipped,
            "failed": failed,
            "skipped": skipped,
        }

    @property
    def ok(self) -> bool:
        return self.summary["failed"] == 0

    def failures(self) -> list:
        return [r for r in self.records if not r.passed]

    def to_json(self, include_wall_time: bool = True) -> dict:
        out = {
            "scenario": self.scenario,
            "records": [r.to_json() for r in self.records],
            "summary": self.summary,
        }
        if include_wall_time:
            out["wallTimeSeconds"] = self.wall_time_seconds
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "VerificationReport":
        recs = [CheckRecord.from_json(r) for r in obj.get("records", [])]
        rep = cls(obj.get("scenario", {}), recs, float(obj.get("wallTimeSeconds", 0.0)))
        if "summary" in obj and obj["summary"] != rep.summary:
            raise ValueError("report summary does not match its records")
        return rep

    def __eq__(self, other):
        if not isinstance(other, VerificationReport):
            return NotImplemented
        return self.to_json(False) == other.to_json(False)


def emit_report(report: VerificationReport, fmt: str = "json", include_wall_time: bool = True) -> str:
    if fmt == "json":
        return json.dumps(report.to_json(include_wall_time), sort_keys=True, indent=1) + "\n"
    if fmt == "markdown":
        return _markdown(report, include_wall_time)
    raise ValueError(f"unknown format {fmt!r}")


def _markdown(report: VerificationReport, include_wall_time: bool) -> str:
    s = report.summary
    lines = ["# Verification report", ""]
    lines.append(f"- total: {s['total']}, passed: {s['passed']}, failed: {s['failed']}, skipped: {s['skipped']}")
    if include_wall_time:
        lines.append(f"- wall time: {report.wall_time_seconds:.2f} s")
    lines += ["", "| result | checks | passed | failed | skipped | worst slack |", "|---|---|---|---|---|---|"]
    groups: dict[str, list] = {}
    for r in report.records:
        groups.setdefault(r.ref, []).append(r)
    for ref in sorted(groups):
        rs = groups[ref]
        slacks = [r.slack for r in rs if r.slack is not None]
        worst = f"{min(slacks):.3e}" if slacks else "-"
        nskip = sum(r.skipped for r in rs)
        nfail = sum(not r.passed for r in rs)
        lines.append(f"| {_cell(ref)} | {len(rs)} | {len(rs) - nskip - nfail} | {nfail} | {nskip} | {worst} |")
    fails = report.failures()
    if fails:
        lines += ["", "## Failures", ""]
        for r in fails:
            extra = f"; {r.note}" if r.note else ""
            lines.append(f"- `{r.suite}/{r.id}` trial {r.trial}: {_cell(r.ref)} "
                         f"(lhs {r.lhs:.6e}, rhs {r.rhs:.6e}, tol {r.tolerance:.1e}{extra})")
    return "\n".join(lines) + "\n"


def _cell(text: str) -> str:
    return text.replace("|", "\\|")


def merge(records) -> list:
    """Canonical order: suite, then trial, then insertion order."""
    indexed = list(enumerate(records))
    indexed.sort(key=lambda p: (p[1].suite, p[1].trial, p[0]))
    return [r for _, r in indexed]
