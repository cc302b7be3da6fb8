"""Machine-readable verification reports.

A report is a flat list of named checks.  Serialisation is deterministic:
keys are sorted, floats go through a fixed ``repr`` (shortest round-trip,
stable across runs and platforms for the same binary values), rationals are
rendered as ``"p/q"`` strings, and no wall-clock data enters the payload, so
identical runs produce byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any

TOOL_VERSION = "0.1.0"


class CheckStatus(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    WITNESS = "witness"          # a positive finite-scale witness was found
    NOT_FOUND = "not-found"      # searched and did not find (not a refutation)
    WARNING = "warning"

    def __str__(self) -> str:  # keep json clean
        return self.value


def rational_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def _encode(obj: Any) -> Any:
    """Recursively convert values to deterministic JSON-safe structures."""
    if isinstance(obj, Fraction):
        return rational_str(obj)
    if isinstance(obj, CheckStatus):
        return obj.value
    if isinstance(obj, float):
        return float(repr(obj)) if obj == obj else "nan"
    if isinstance(obj, dict):
        return {str(k): _encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_encode(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return _encode(obj.to_dict())
    if isinstance(obj, (str, int, bool)) or obj is None:
        return obj
    return str(obj)


@dataclass
class Check:
    """One verified claim.

    ``claim`` states the mathematical property being checked, so a report is
    auditable without the surrounding code; ``witnesses`` carries the data
    (positions, iterates, bounds) that let a reader re-verify the verdict.
    """

    name: str
    claim: str
    status: CheckStatus
    witnesses: dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        """Whether the check counts against the report.

        Only ``FAIL`` does.  ``NOT_FOUND`` is an informative outcome of a
        bounded search (the absence of a finite-scale witness is not a
        refutation), so callers that *require* a witness must say so by
        recording the check with ``ok=False`` instead of ``not_found``.
        """
        return self.status is not CheckStatus.FAIL

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "claim": self.claim,
            "status": self.status.value,
            "witnesses": self.witnesses,
        }


@dataclass
class VerificationReport:
    title: str
    construction: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def add(self, name: str, claim: str, ok: bool, *, witness: bool = False,
            not_found: bool = False, **witnesses: Any) -> Check:
        if ok:
            status = CheckStatus.WITNESS if witness else CheckStatus.PASS
        else:
            status = CheckStatus.NOT_FOUND if not_found else CheckStatus.FAIL
        chk = Check(name=name, claim=claim, status=status, witnesses=witnesses)
        self.checks.append(chk)
        return chk

    def warn(self, message: str) -> None:
        self.warnings.append(message)

    def extend(self, other: "VerificationReport") -> None:
        self.checks.extend(other.checks)
        self.warnings.extend(other.warnings)

    @property
    def ok(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failed(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def to_dict(self) -> dict[str, Any]:
        return {
            "tool_version": TOOL_VERSION,
            "title": self.title,
            "ok": self.ok,
            "construction": _encode(self.construction),
            "checks": [c.to_dict() for c in self.checks],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(_encode(self.to_dict()), sort_keys=True, indent=2,
                          ensure_ascii=True) + "\n"

    def summary_lines(self) -> list[str]:
        lines = [f"== {self.title} =="]
        for c in self.checks:
            lines.append(f"  [{c.status.value}] {c.name}: {c.claim}")
        for w in self.warnings:
            lines.append(f"  [warn] {w}")
        n_bad = len(self.failed)
        lines.append(f"  {len(self.checks)} checks, {n_bad} failed")
        return lines
