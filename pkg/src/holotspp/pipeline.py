"""End-to-end holonomic proof of a determinant evaluation.

The determinant ``det(a(i, j))_{1<=i,j<=n}`` equals ``prod r(k)`` once the
normalized cofactors ``B(n, j)`` satisfy

* ``B(n, n) = 1``,
* ``sum_j B(n, j) a(i, j) = 0`` for ``1 <= i < n``,
* ``sum_j B(n, j) a(n, j) = r(n)``.

``B`` is only known through its values; the pipeline guesses annihilating
operators, closes them under the operations appearing in the identities and
certifies each identity by an ideal reduction plus finitely many values.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .annihilator import (
    DFiniteDescription,
    InfiniteSingularSet,
    NotDFinite,
    analyze_leading_coefficient,
    annihilates,
    closure_apply_operator,
    closure_diagonal,
    closure_rename,
    closure_sum,
    extend_basis,
    prove_equal,
    twist_basis,
)
from .caps import CapExceeded, ResourceCaps
from .groebner import GroebnerBasis, left_groebner_basis, staircase
from .guess import GuessFalsified, GuessProblem, InsufficientData, guess_recurrences, structure_box, verify_guess
from .ore import DEGREVLEX, OreAlgebra, parse_operator, parse_ratfun
from .report import ProofReport
from .table import Region, SequenceTable
from .telescope import find_telescoper
from . import tspp

log = logging.getLogger(__name__)


@dataclass
class DeterminantProblem:
    """Everything the pipeline needs to know about one determinant.

    ``aprime`` is the entry with the Kronecker corrections removed,
    ``a(i, j) = aprime(i, j) + c0 [i = j] + c1 [i = j + 1]``; it must be
    hypergeometric with shift quotients ``certificates`` written in the
    variables ``n`` (row) and ``j`` (column).
    """

    name: str
    entry: object
    aprime: object
    certificates: dict
    corrections: tuple
    ratio: object
    ratio_operator: str
    guess_schedule: list
    reference_lc: str | None = None
    max_unknowns: int = 400

    def row_certificates(self, row: str) -> dict:
        """Certificates with the row variable renamed to ``row``."""
        out = {}
        for v, text in self.certificates.items():
            t = text.replace("n", row)
            out[row if v == "n" else v] = parse_ratfun(t)
        return out


def _pascal_schedule():
    return [
        ([((0, 0), (1, 0)), ((0, 0), (0, 1))], 1),
        ([((0, 0), (1, 0)), ((0, 0), (0, 1))], 2),
    ]


def _box_schedule(orders=(1, 2, 3), degrees=range(1, 12)):
    return [([structure_box(2, r)], d) for r in orders for d in degrees]


PASCAL = DeterminantProblem(
    name="pascal",
    entry=lambda i, j: tspp.binomial(i + j - 2, i - 1),
    aprime=lambda i, j: tspp.binomial(i + j - 2, i - 1),
    certificates={"n": "(n+j-1)/n", "j": "(n+j-1)/j"},
    corrections=(0, 0),
    ratio=lambda n: Fraction(1),
    ratio_operator="Sn - 1",
    guess_schedule=_pascal_schedule(),
)

TSPP = DeterminantProblem(
    name="tspp",
    entry=tspp.okada_entry,
    aprime=tspp.a_prime,
    certificates={
        "n": "(2*n+j+1)*(n+j-1)/((2*n+j-1)*(n+1))",
        "j": "(2*n+j)*(n+j-1)/((2*n+j-1)*j)",
    },
    corrections=(2, -1),
    ratio=tspp.nice_ratio,
    ratio_operator="16*(2*n+1)^2*(2*n+3)^2*Sn^2 - 9*(3*n+1)^2*(3*n+5)^2",
    guess_schedule=_box_schedule(),
    reference_lc="(n-3)^2*(n-2)*(n-1)^2*(2*n-3)^2*(2*n-1)*(j+n-1)*(j+n)",
    max_unknowns=200,
)

PROBLEMS = {"pascal": PASCAL, "tspp": TSPP}


@dataclass
class PipelineState:
    problem: DeterminantProblem
    n_max: int
    table: SequenceTable | None = None
    operators: list = field(default_factory=list)
    basis: GroebnerBasis | None = None
    description: DFiniteDescription | None = None
    diagonal: DFiniteDescription | None = None
    telescopers: dict = field(default_factory=dict)


class _Skip(Exception):
    """A stage could not run; the message says why."""


def _stage(report: ProofReport, name: str, n: int, caps: ResourceCaps, fn, *, needs=()):
    """Run one stage, converting caps and missing prerequisites into SKIPPED-CAP."""
    t0 = time.monotonic()
    if any(x is None for x in needs):
        report.skip(name, n=n, detail="prerequisite stage did not complete")
        report.diagnostics[name] = "prerequisite stage did not complete"
        return
    try:
        caps.check(name)
        ok, detail = fn()
    except (CapExceeded, _Skip, InsufficientData) as exc:
        report.skip(name, n=n, detail=str(exc))
        report.diagnostics[name] = f"not completed at this scale: {exc}"
        log.info("%s skipped: %s", name, exc)
        return
    report.add(name, ok, n=n, detail=detail)
    report.diagnostics[name] = f"{detail} ({time.monotonic() - t0:.2f}s)"
    log.info("%s %s: %s", name, "OK" if ok else "FAIL", detail)


def run_pipeline(problem: DeterminantProblem, n_max: int, caps: ResourceCaps | None = None, primes=None) -> ProofReport:
    """Run all stages and return a report with one check per stage."""
    caps = caps or ResourceCaps()
    caps.restart()
    st = PipelineState(problem, n_max)
    report = ProofReport()
    N = n_max

    # 1. values of B on a box, extended by zero
    def stage_table():
        vals = {}
        for n in range(0, N + 1):
            for j in range(0, N + 2):
                vals[(j, n)] = tspp.b_value(n, j, problem.entry)
            caps.check("table")
        st.table = SequenceTable(("j", "n"), vals, Region((0, 0), (N + 1, N)))
        ok = all(st.table[(n, n)] == 1 for n in range(1, N + 1))
        return ok, f"{len(vals)} values of B"

    _stage(report, "pipeline.table", N, caps, stage_table)

    # 2. guess annihilating operators
    def stage_guess():
        found = []
        tried = []
        for structures, degree in problem.guess_schedule:
            for s in structures:
                gp = GuessProblem(st.table, s, degree)
                if len(gp.unknowns()) > problem.max_unknowns:
                    tried.append(f"{len(s)}x deg {degree}: {len(gp.unknowns())} unknowns over limit")
                    continue
                try:
                    ops = guess_recurrences(gp, "modular", primes, caps)
                except InsufficientData as exc:
                    tried.append(str(exc))
                    continue
                except GuessFalsified as exc:
                    return False, str(exc)
                found.extend(ops)
            if found:
                G = left_groebner_basis(found, DEGREVLEX, caps)
                if staircase(G).finite:
                    st.operators = found
                    st.basis = G
                    return True, f"{len(found)} operators, degree {degree}"
        raise _Skip("no operators with a finite staircase within the data: " + "; ".join(tried[-3:]))

    _stage(report, "pipeline.guess", N, caps, stage_guess, needs=(st.table,))

    # 3. Gröbner basis and consistency with all data
    def stage_groebner():
        G = st.basis
        ok = staircase(G).finite and verify_guess(G.elements, st.table)
        return ok, f"basis of {len(G)} elements, holonomic rank {staircase(G).dimension}"

    _stage(report, "pipeline.groebner", N, caps, stage_groebner, needs=(st.basis,))

    # 4. singular points
    def stage_singular():
        if st.basis is not None:
            D = DFiniteDescription.from_values(st.basis, st.table, (0, 0), name="B")
            st.description = D
            pts = sorted(D.exceptional_points)
            region = Region((0, 0), (N + 1, N))
            ok = all(D.value(p) == st.table[p] for p in region.points())
            return ok, f"exceptional points {pts}; description reproduces the table"
        if problem.reference_lc:
            lc = parse_ratfun(problem.reference_lc)
            z = analyze_leading_coefficient(lc, ("j", "n"))
            return True, f"reference leading coefficient: lines {z.lines}, points {list(z.points)}, clear from {z.clear_from}"
        raise _Skip("no basis and no reference leading coefficient")

    _stage(report, "pipeline.singularities", N, caps, stage_singular)

    # 5. B(n, n) = 1
    def stage_diagonal():
        D = st.description
        diag = closure_diagonal(D, 0, name="B(n,n)", origin=(1,))
        st.diagonal = diag
        one = DFiniteDescription.from_values(
            GroebnerBasis([parse_operator("Sn - 1", OreAlgebra(("n",)))]), lambda p: 1, (1,)
        )
        proof = prove_equal(diag, one)
        return proof.proved, f"{proof.direction}; compared at {proof.compared}"

    _stage(report, "pipeline.diagonal", N, caps, stage_diagonal, needs=(st.description,))

    # 6. the sum on the diagonal
    def stage_diagonal_sum():
        D = st.description
        c0, c1 = problem.corrections
        certs = {v: parse_ratfun(t) for v, t in problem.certificates.items()}
        Gs = twist_basis(D.basis, certs)
        cert = find_telescoper(Gs, "j", caps=caps)
        if cert is None:
            raise _Skip("no telescoper within the shape schedule")
        st.telescopers["diagonal"] = cert

        def F(p):
            (n,) = p
            return sum((st.table[(j, n)] * problem.aprime(n, j) for j in range(1, n + 1)), Fraction(0))

        P = cert.P
        order = max(m[0] for m in P.terms)
        if not annihilates([P], F, Region((1,), (N - order,))):
            return False, f"telescoper {P} does not annihilate the sum"
        DF = DFiniteDescription.from_values(left_groebner_basis([P]), F, (1,), name="F")
        lhs = DF
        for c, off in ((c0, 0), (c1, -1)):
            if c:
                Dd = closure_diagonal(D, off, origin=(1,))
                lhs = closure_sum(lhs, _scaled(Dd, c), caps)
        rhs = DFiniteDescription.from_values(
            left_groebner_basis([parse_operator(problem.ratio_operator, OreAlgebra(("n",)))]),
            lambda p: problem.ratio(p[0]),
            (1,),
        )
        proof = prove_equal(lhs, rhs)
        return proof.proved, f"telescoper {P}; {proof.direction}; compared at {proof.compared}"

    _stage(report, "pipeline.diagonal_sum", N, caps, stage_diagonal_sum, needs=(st.description,))

    # 7. the sums off the diagonal
    def stage_rows():
        D = st.description
        c0, c1 = problem.corrections
        alg3 = OreAlgebra(("i", "j", "n"))
        G3 = extend_basis(D.basis, alg3, caps)
        Gs = twist_basis(G3, problem.row_certificates("i"))
        ps = []
        for label, fn in (("S_i", lambda I: [(k, 0) for k in range(I + 1)]), ("S_n", lambda I: [(0, k) for k in range(I + 1)])):
            cert = find_telescoper(Gs, "j", caps=caps, P_support_fn=fn)
            if cert is None:
                raise _Skip(f"no {label}-pure telescoper within the shape schedule")
            st.telescopers[label] = cert
            ps.append(cert.P)

        def L(p):
            i, n = p
            return sum((st.table[(j, n)] * problem.aprime(i, j) for j in range(1, n + 1)), Fraction(0))

        J = left_groebner_basis(ps, DEGREVLEX, caps)
        if not staircase(J).finite:
            return False, "telescopers do not generate a holonomic ideal"
        if not annihilates(J.elements, L, Region((1, 1), (N, N - 3))):
            return False, "telescopers do not annihilate the sums"
        DL = DFiniteDescription.from_values(J, L, (1, 1), name="L")
        alg_in = OreAlgebra(("i", "n"))
        shifted = closure_rename(D, {"j": "i"}, {"i": -1}, name="B(n,i-1)")
        op = alg_in.coefficient(-c1) - alg_in.coefficient(c0) * alg_in.shift("i")
        if op.is_zero():
            DR = DFiniteDescription(GroebnerBasis([alg_in.one()]), {}, (), (1, 1), name="0")
        else:
            DR = closure_apply_operator(shifted, op, caps)
        proof = prove_equal(DL, DR, trapezoid=(0, 1))
        detail = f"telescopers {ps[0]} and {ps[1]}; {proof.direction}; {len(proof.compared)} values compared"
        if proof.mismatches:
            detail += f"; mismatches {proof.mismatches[:3]}"
        return proof.proved, detail

    _stage(report, "pipeline.row_orthogonality", N, caps, stage_rows, needs=(st.description,))
    report.diagnostics["problem"] = problem.name
    report.diagnostics["elapsed"] = f"{caps.elapsed():.2f}s"
    return report


def run_binomial_sum_pipeline(n_max: int = 12, caps: ResourceCaps | None = None, primes=None) -> ProofReport:
    """Toy run of the same stages on ``sum_j binom(n, j) = 2^n``."""
    caps = caps or ResourceCaps()
    caps.restart()
    report = ProofReport()
    N = n_max
    state = {}

    def stage_table():
        vals = {(j, n): Fraction(comb(n, j) if j <= n else 0) for n in range(N + 1) for j in range(N + 2)}
        state["table"] = SequenceTable(("j", "n"), vals, Region((0, 0), (N + 1, N)))
        return True, f"{len(vals)} values"

    def stage_guess():
        ops = []
        for s in ([(0, 0), (1, 0)], [(0, 0), (0, 1)]):
            ops += guess_recurrences(GuessProblem(state["table"], s, 1), "modular", primes, caps)
        G = left_groebner_basis(ops, DEGREVLEX, caps)
        if not staircase(G).finite:
            raise _Skip("guessed operators do not describe a holonomic sequence")
        state["basis"] = G
        return verify_guess(G.elements, state["table"]), f"{len(ops)} operators"

    def stage_description():
        D = DFiniteDescription.from_values(state["basis"], state["table"], (0, 0), name="binom")
        state["D"] = D
        return all(D.value(p) == state["table"][p] for p in state["table"].points()), "description reproduces the table"

    def stage_sum():
        cert = find_telescoper(state["D"].basis, "j", caps=caps)
        if cert is None:
            raise _Skip("no telescoper within the shape schedule")

        def F(p):
            return sum((state["table"][(j, p[0])] for j in range(p[0] + 1)), Fraction(0))

        DF = DFiniteDescription.from_values(left_groebner_basis([cert.P]), F, (0,), name="sum")
        alg = OreAlgebra(("n",))
        rhs = DFiniteDescription.from_values(GroebnerBasis([parse_operator("Sn - 2", alg)]), lambda p: 2 ** p[0], (0,))
        proof = prove_equal(DF, rhs)
        return proof.proved, f"telescoper {cert.P}; {proof.direction}"

    _stage(report, "binomial.table", N, caps, stage_table)
    _stage(report, "binomial.guess", N, caps, stage_guess, needs=(state.get("table"),))
    _stage(report, "binomial.description", N, caps, stage_description, needs=(state.get("basis"),))
    _stage(report, "binomial.sum", N, caps, stage_sum, needs=(state.get("D"),))
    report.diagnostics["problem"] = "binomial"
    return report


def _scaled(D: DFiniteDescription, c) -> DFiniteDescription:
    c = Fraction(c)
    vals = {p: c * v for p, v in D.initial_values.items()}
    return DFiniteDescription(D.basis, vals, D.exceptional_points, D.origin, D.name, D.exceptional_complete)


__all__ = [
    "DeterminantProblem",
    "PASCAL",
    "PROBLEMS",
    "TSPP",
    "InfiniteSingularSet",
    "NotDFinite",
    "run_binomial_sum_pipeline",
    "run_pipeline",
]
