"""Structured, machine-readable audit reports.

Reports are plain frozen dataclasses whose ``to_dict`` output contains only
JSON-serializable values, assembled in a canonical order so that identical
inputs produce byte-identical serializations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one audited property: name, verdict, optional witness."""

    name: str
    passed: bool
    witness: Mapping[str, Any] | None = None
    details: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {"name": self.name, "passed": self.passed}
        if self.witness is not None:
            out["witness"] = dict(self.witness)
        if self.details:
            out["details"] = dict(self.details)
        return out


@dataclass(frozen=True)
class AuditReport:
    """A subject plus its check results, sorted by check name."""

    subject: str
    checks: tuple[CheckResult, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.checks, key=lambda c: c.name))
        object.__setattr__(self, "checks", ordered)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str) -> CheckResult:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "subject": self.subject,
            "passed": self.passed,
            "checks": [c.to_dict() for c in self.checks],
        }
