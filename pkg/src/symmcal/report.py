"""Verification reports: config echo, check lists, summaries, JSON/CSV."""

from __future__ import annotations

import csv
import json
import time
from dataclasses import asdict, dataclass, field

from .checks import CheckResult

TOOL_VERSION = "0.1.0"

KNOWN_SUITES = ("rearrangement", "geometry", "pde", "manifold", "all")


@dataclass
class SuiteConfig:
    suite: str
    dim: int = 2
    size: int = 64
    trials: int = 200
    seed: int = 7
    tol_scale: float = 1.0
    threads: int = 1
    out: str | None = None
    fmt: str = "json"

    def __post_init__(self):
        if self.suite not in KNOWN_SUITES:
            raise ValueError(f"unknown suite {self.suite!r}; known: {KNOWN_SUITES}")
        if self.trials < 1:
            raise ValueError("trial count must be >= 1")
        if self.tol_scale <= 0:
            raise ValueError("tol-scale must be positive")

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("out")
        d.pop("fmt")
        return d


@dataclass
class VerificationReport:
    config: dict
    checks: list[CheckResult] = field(default_factory=list)
    wall_time: float = 0.0
    tool_version: str = TOOL_VERSION

    def __post_init__(self):
        self.checks = sorted(self.checks, key=lambda c: c.name)

    @property
    def n_pass(self) -> int:
        return sum(1 for c in self.checks if c.passed)

    @property
    def n_fail(self) -> int:
        return sum(1 for c in self.checks if not c.passed)

    def all_passed(self) -> bool:
        return self.n_fail == 0

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "config": dict(self.config),
            "summary": {"total": len(self.checks), "pass": self.n_pass, "fail": self.n_fail},
            "checks": [c.to_dict() for c in self.checks],
            "wall_time": self.wall_time,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VerificationReport":
        rep = cls(
            config=dict(d["config"]),
            checks=[CheckResult.from_dict(c) for c in d["checks"]],
            wall_time=float(d.get("wall_time", 0.0)),
            tool_version=d.get("tool_version", TOOL_VERSION),
        )
        s = d.get("summary")
        if s and (s["pass"] != rep.n_pass or s["fail"] != rep.n_fail or s["total"] != len(rep.checks)):
            raise ValueError("summary counts inconsistent with check list")
        return rep

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "VerificationReport":
        return cls.from_dict(json.loads(text))

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_json())

    @classmethod
    def load(cls, path) -> "VerificationReport":
        with open(path, encoding="utf-8") as fh:
            return cls.from_json(fh.read())


CSV_COLUMNS = ("name", "lhs", "rhs", "slack", "tol", "pass")


def emit_csv(report: VerificationReport, path):
    """One row per check, header first; values repr-stable for diffing."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for c in report.checks:
            w.writerow([c.name, repr(c.lhs), repr(c.rhs), repr(c.slack), repr(c.tol), int(c.passed)])


def read_csv_tallies(path) -> dict:
    """Parse an emitted CSV back into pass/fail tallies (round-trip check)."""
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    n_pass = sum(1 for r in rows if r["pass"] == "1")
    return {"total": len(rows), "pass": n_pass, "fail": len(rows) - n_pass}


class Timer:
    def __enter__(self):
        self.t0 = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.t0
        return False
