"""Guessing linear recurrences with polynomial coefficients from data."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from math import lcm

from .arith import ZZ_CTX, RatFun, default_primes, var_index
from .caps import ResourceCaps, as_caps
from .linalg import ReconstructionFailed, integer_rows, nullspace_fraction, nullspace_multimodular, rref_mod
from .ore import OreAlgebra, OreOperator, SingularEvaluation
from .table import SequenceTable


class InsufficientData(ValueError):
    pass


class GuessFalsified(ArithmeticError):
    """A guessed operator fails on data it was not fitted to."""


@dataclass
class GuessProblem:
    """Ansatz ``sum_{b in structure_set} c_b(x) S^b`` with deg c_b <= coeff_degree."""

    table: SequenceTable
    structure_set: tuple
    coeff_degree: int
    margin: float = 1.25
    holdout: float = 0.25

    def __post_init__(self):
        self.structure_set = tuple(sorted(tuple(b) for b in self.structure_set))
        d = self.table.arity
        if any(len(b) != d for b in self.structure_set):
            raise ValueError("structure monomials must match the table arity")

    @property
    def algebra(self) -> OreAlgebra:
        return OreAlgebra(self.table.variables)

    def exponents(self) -> list:
        d = self.table.arity
        return [e for e in itertools.product(range(self.coeff_degree + 1), repeat=d) if sum(e) <= self.coeff_degree]

    def unknowns(self) -> list:
        return [(b, e) for b in self.structure_set for e in self.exponents()]

    def usable_points(self) -> list:
        pts = []
        for p in self.table.points():
            if all(tuple(x + s for x, s in zip(p, b)) in self.table for b in self.structure_set):
                pts.append(p)
        return pts

    def split(self):
        """Training and held-out points (the largest points are held out)."""
        pts = sorted(self.usable_points(), key=lambda p: (sum(p), p))
        nhold = int(len(pts) * self.holdout)
        cut = len(pts) - nhold
        return pts[:cut], pts[cut:]

    def row(self, p) -> list:
        out = []
        for b, e in self.unknowns():
            v = self.table[tuple(x + s for x, s in zip(p, b))]
            mono = 1
            for x, k in zip(p, e):
                mono *= x**k
            out.append(v * mono)
        return out


def _assemble(gp: GuessProblem, vec) -> OreOperator:
    alg = gp.algebra
    vars_ = gp.table.variables
    den = lcm(*(Fraction(x).denominator for x in vec)) if vec else 1
    coeffs: dict = {}
    for (b, e), x in zip(gp.unknowns(), vec):
        x = Fraction(x) * den
        if not x:
            continue
        exp = [0] * 5
        for v, k in zip(vars_, e):
            exp[var_index(v)] = k
        coeffs.setdefault(b, {})[tuple(exp)] = int(x)
    terms = {b: RatFun(ZZ_CTX.from_dict(d)) for b, d in coeffs.items()}
    return OreOperator(alg, terms).primitive_form()


def guess_recurrences(
    gp: GuessProblem,
    method: str = "modular",
    primes=None,
    caps: ResourceCaps | None = None,
) -> list:
    """Operators annihilating the table, one per nullspace basis vector.

    ``method="modular"`` first row-reduces modulo one prime to pick a
    maximal independent set of rows, then recovers the kernel of that
    smaller system by several primes, CRT and rational reconstruction.
    ``method="exact"`` eliminates over Q directly.  Every operator is
    checked on all points of the table including the held-out ones.
    """
    caps = as_caps(caps)
    unknowns = gp.unknowns()
    train, held = gp.split()
    need = gp.margin * len(unknowns)
    if len(train) < need:
        raise InsufficientData(
            f"{len(train)} training rows for {len(unknowns)} unknowns; need at least {need:g}"
        )
    rows = []
    for p in train:
        r = gp.row(p)
        if any(r):
            rows.append(r)
        caps.check("guessing")
    if len(rows) < need:
        raise InsufficientData(
            f"{len(rows)} informative training rows for {len(unknowns)} unknowns; need at least {need:g}"
        )
    if method == "modular":
        primes = list(primes or default_primes())
        imat = integer_rows(rows)
        _, _, ids = rref_mod(imat, primes[0], caps)
        reduced = [imat[k] for k in sorted(ids)]
        if not reduced:
            reduced = [[0] * len(unknowns)]
        try:
            kernel = nullspace_multimodular(reduced, primes[1:] or primes, caps)
        except ReconstructionFailed as exc:
            raise InsufficientData(f"kernel did not reconstruct: {exc}") from None
        imat_check = imat
        kernel = [v for v in kernel if all(sum(a * x for a, x in zip(r, v) if a) == 0 for r in imat_check)]
    elif method == "exact":
        kernel = nullspace_fraction(rows, caps)
    else:
        raise ValueError(f"unknown method {method!r}")
    ops = [_assemble(gp, v) for v in kernel]
    for op in ops:
        for p in held:
            if op.apply(gp.table, p) != 0:
                raise GuessFalsified(f"guessed operator {op} fails at held-out point {p}")
    return ops


def verify_guess(ops, table: SequenceTable) -> bool:
    """True iff each operator vanishes at every table point where it can be applied."""
    for op in ops:
        for p in table.points():
            try:
                if op.apply(table, p) != 0:
                    return False
            except (KeyError, SingularEvaluation):
                continue
    return True


def structure_box(arity: int, order: int) -> tuple:
    """All shift monomials with total degree at most ``order``."""
    return tuple(e for e in itertools.product(range(order + 1), repeat=arity) if sum(e) <= order)


def pascal_structures(variables=("j", "n")) -> list:
    """Ansatz supports that capture first-order recurrences in each direction."""
    d = len(variables)
    out = []
    for k in range(d):
        unit = tuple(1 if t == k else 0 for t in range(d))
        out.append(((0,) * d, unit))
    return out
