"""Check records and the line-oriented proof report."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field

OK = "OK"
FAIL = "FAIL"
SKIPPED = "SKIPPED-CAP"


@dataclass
class Check:
    name: str
    status: str
    n: int | None = None
    i: int | None = None
    detail: str = ""

    def line(self) -> str:
        parts = ["CHECK", self.name]
        if self.n is not None:
            parts.append(f"n={self.n}")
        if self.i is not None:
            parts.append(f"i={self.i}")
        parts.append(self.status)
        return " ".join(parts)


@dataclass
class ProofReport:
    checks: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def add(self, name, ok, n=None, i=None, detail="") -> Check:
        if isinstance(ok, str):
            status = ok
        else:
            status = OK if ok else FAIL
        c = Check(name, status, n, i, detail)
        self.checks.append(c)
        return c

    def skip(self, name, n=None, i=None, detail="") -> Check:
        return self.add(name, SKIPPED, n, i, detail)

    def extend(self, other: "ProofReport"):
        self.checks.extend(other.checks)
        self.diagnostics.update(other.diagnostics)

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    @property
    def skipped(self) -> list:
        return [c for c in self.checks if c.status == SKIPPED]

    @property
    def verdict(self) -> str:
        if self.failed:
            return "failed"
        if self.skipped:
            return "incomplete"
        return "proved"

    @property
    def exit_code(self) -> int:
        return {"proved": 0, "failed": 1, "incomplete": 3}[self.verdict]

    def lines(self) -> list:
        return [c.line() for c in self.checks]

    def text(self) -> str:
        return "\n".join(self.lines())

    def summary(self) -> dict:
        return {
            "verdict": self.verdict,
            "checks": len(self.checks),
            "ok": sum(c.status == OK for c in self.checks),
            "failed": [asdict(c) for c in self.failed],
            "skipped": [asdict(c) for c in self.skipped],
            "diagnostics": self.diagnostics,
        }

    def json(self) -> str:
        return json.dumps(self.summary(), indent=2, default=str)
