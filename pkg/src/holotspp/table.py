"""Integer regions and exact-valued sequence tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path


@dataclass(frozen=True)
class Region:
    """Box ``lo <= p <= hi`` (inclusive), optionally cut to ``p[a] < p[b]``.

    With ``below=(a, b)`` the region is the trapezoid used for identities
    that only hold strictly below a diagonal.
    """

    lo: tuple
    hi: tuple
    below: tuple | None = None

    def __post_init__(self):
        object.__setattr__(self, "lo", tuple(self.lo))
        object.__setattr__(self, "hi", tuple(self.hi))
        if len(self.lo) != len(self.hi):
            raise ValueError("region corners differ in dimension")

    @classmethod
    def box(cls, hi, lo=None):
        hi = tuple(hi)
        return cls(tuple(lo) if lo is not None else (0,) * len(hi), hi)

    @property
    def dim(self) -> int:
        return len(self.lo)

    def __contains__(self, p) -> bool:
        if len(p) != self.dim:
            return False
        if any(x < a or x > b for x, a, b in zip(p, self.lo, self.hi)):
            return False
        if self.below is not None:
            a, b = self.below
            return p[a] < p[b]
        return True

    def points(self):
        ranges = [range(a, b + 1) for a, b in zip(self.lo, self.hi)]
        for p in itertools.product(*ranges):
            if p in self:
                yield p

    def __len__(self):
        return sum(1 for _ in self.points())


@dataclass
class SequenceTable:
    """Exact values of a sequence on a finite set of integer points."""

    variables: tuple
    values: dict = field(default_factory=dict)
    region: Region | None = None

    def __post_init__(self):
        self.variables = tuple(self.variables)
        if self.region is not None:
            bad = [p for p in self.values if p not in self.region]
            if bad:
                raise ValueError(f"points outside the table region: {bad[:3]}")

    @classmethod
    def from_function(cls, variables, func, region: Region) -> "SequenceTable":
        values = {p: Fraction(func(*p)) for p in region.points()}
        return cls(tuple(variables), values, region)

    @property
    def arity(self) -> int:
        return len(self.variables)

    def __getitem__(self, p):
        return self.values[tuple(p)]

    def __contains__(self, p) -> bool:
        return tuple(p) in self.values

    def __len__(self):
        return len(self.values)

    def points(self):
        return sorted(self.values)

    def get(self, p, default=None):
        return self.values.get(tuple(p), default)

    # text format: one record per line, coordinates then p/q value -------------
    def dumps(self) -> str:
        lines = [f"# table vars={','.join(self.variables)}"]
        for p in self.points():
            v = self.values[p]
            lines.append(" ".join(str(x) for x in p) + f" {v}")
        return "\n".join(lines) + "\n"

    def write(self, path) -> None:
        Path(path).write_text(self.dumps())

    @classmethod
    def loads(cls, text: str, variables=None) -> "SequenceTable":
        values = {}
        for lineno, raw in enumerate(text.splitlines(), 1):
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                for tok in line[1:].split():
                    if tok.startswith("vars=") and variables is None:
                        variables = tuple(tok[5:].split(","))
                continue
            fields = line.split()
            try:
                point = tuple(int(x) for x in fields[:-1])
                value = Fraction(fields[-1])
            except ValueError as exc:
                raise ValueError(f"line {lineno}: bad table record {raw!r}") from exc
            values[point] = value
        if not values:
            return cls(tuple(variables or ()), {})
        arity = len(next(iter(values)))
        if any(len(p) != arity for p in values):
            raise ValueError("table records have inconsistent arity")
        if variables is None:
            variables = {1: ("n",), 2: ("j", "n"), 3: ("i", "j", "n")}.get(arity)
            if variables is None:
                raise ValueError("cannot infer table variables; add a '# table vars=' header")
        return cls(tuple(variables), values)

    @classmethod
    def read(cls, path, variables=None) -> "SequenceTable":
        return cls.loads(Path(path).read_text(), variables)
