"""Slack-quantified check results shared by all verification suites."""

from __future__ import annotations

import math
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CheckResult:
    """One verified (in)equality: lhs vs rhs with signed slack and tolerance.

    ``slack`` is oriented so the check passes when slack >= -tol; an
    infinite tolerance marks a result that is reported but not judged.
    """

    name: str
    lhs: float
    rhs: float
    slack: float
    tol: float
    passed: bool
    seed: int = 0
    details: dict = field(default_factory=dict)

    def __post_init__(self):
        if math.isfinite(self.tol):
            expected = self.slack >= -self.tol
            if self.passed != expected:
                raise ValueError("pass flag inconsistent with slack >= -tol")

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "tol": self.tol,
            "pass": self.passed,
            "seed": self.seed,
            "details": dict(self.details),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "CheckResult":
        return cls(
            name=d["name"],
            lhs=float(d["lhs"]),
            rhs=float(d["rhs"]),
            slack=float(d["slack"]),
            tol=float(d["tol"]),
            passed=bool(d["pass"]),
            seed=int(d.get("seed", 0)),
            details=dict(d.get("details", {})),
        )


def rel_scale(lhs: float, rhs: float) -> float:
    """Scale for relative tolerances: max(|lhs|, |rhs|, 1) avoids near-zero division."""
    return max(abs(lhs), abs(rhs), 1.0)


def make_result(name, lhs, rhs, slack, tol, seed=0, **details) -> CheckResult:
    return CheckResult(
        name=name,
        lhs=float(lhs),
        rhs=float(rhs),
        slack=float(slack),
        tol=float(tol),
        passed=bool(slack >= -tol),
        seed=int(seed),
        details={k: v for k, v in details.items() if v is not None},
    )
