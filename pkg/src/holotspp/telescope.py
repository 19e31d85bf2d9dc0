"""Creative telescoping: ``P + (S_j - 1) Q`` in the annihilator of a summand.

Two methods are provided: a polynomial ansatz in the summation variable
solved by linear algebra over the rational functions in the remaining
variables, and elimination of the summation variable by a Gröbner basis
computation in the algebra where it is kept polynomial.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .arith import QQ, ZZ_CTX, RatFun, default_primes, field as ratfield, lcm_polys, primitive_polynomials, var_index
from .caps import CapExceeded, ResourceCaps, as_caps
from .groebner import (
    GroebnerBasis,
    Insertion,
    UnluckyPoint,
    left_groebner_basis,
    normal_form,
    normal_form_monomial,
    normal_form_vector,
)
from .linalg import nullspace_from_rref, nullspace_interpolated, nullspace_ratfun, rref, rref_mod
from .ore import OreAlgebra, OreOperator, TermOrder, change_algebra, to_polynomial_algebra


@dataclass(frozen=True)
class AnsatzShape:
    """Support of a telescoping ansatz.

    ``P_support`` lists monomials of the principal part over
    ``principal`` variables; ``Q_support`` lists monomials of the delta
    part over all variables of the summand; each delta monomial carries a
    polynomial in the summation variable of degree at most ``K``.
    """

    I: int
    K: int
    Q_support: tuple
    P_support: tuple | None = None

    @classmethod
    def triangle(cls, I: int, K: int, T: int, nvars: int = 2, P_support=None) -> "AnsatzShape":
        q = tuple(e for e in itertools.product(range(T + 1), repeat=nvars) if sum(e) <= T)
        return cls(I, K, q, tuple(P_support) if P_support is not None else None)

    @classmethod
    def parse(cls, text: str, nvars: int = 2) -> "AnsatzShape":
        """Parse ``I=1,K=1,T=0``."""
        opts = {}
        for part in text.split(","):
            k, _, v = part.partition("=")
            opts[k.strip().upper()] = int(v)
        for k in ("I", "K", "T"):
            if k not in opts:
                raise ValueError(f"shape needs {k}=...")
        return cls.triangle(opts["I"], opts["K"], opts["T"], nvars)

    def principal_monomials(self, nprincipal: int) -> tuple:
        if self.P_support is not None:
            return tuple(self.P_support)
        return tuple(tuple(k if t == nprincipal - 1 else 0 for t in range(nprincipal)) for k in range(self.I + 1))

    def __str__(self):
        q = " ".join("".join(map(str, m)) for m in self.Q_support)
        return f"I={self.I} K={self.K} Q={q}"


@dataclass
class TelescoperCertificate:
    P: OreOperator
    Q: OreOperator
    summation: str = "j"
    shape: AnsatzShape | None = None

    def relation(self, algebra: OreAlgebra) -> OreOperator:
        P = change_algebra(self.P, algebra)
        Sj = algebra.shift(self.summation)
        return P + (Sj - algebra.one()) * self.Q

    def dumps(self) -> str:
        head = f"# telescoper summation={self.summation}"
        if self.shape is not None:
            head += f" {self.shape}"
        return f"{head}\n{self.P}\n{self.Q}\n"


class TelescopingFailed(ArithmeticError):
    pass


# ---------------------------------------------------------------------------
# the ansatz


@dataclass
class _System:
    unknowns: list  # ("c", mono) or ("d", k, mono)
    columns: list  # per unknown: {std monomial: RatFun}
    principal_vars: tuple
    summation: str


def _principal_variables(G: GroebnerBasis, summation: str) -> tuple:
    return tuple(v for v in G.algebra.variables if v != summation)


def _embed(alg: OreAlgebra, principal: tuple, mono) -> tuple:
    e = [0] * alg.width
    for v, x in zip(principal, mono):
        e[alg.variables.index(v)] = x
    return tuple(e)


def build_system(G: GroebnerBasis, shape: AnsatzShape, summation: str = "j", unknowns=None) -> _System:
    """Normal forms of every ansatz term, one monomial at a time.

    Each monomial's normal form is computed once (and cached on ``G``);
    the delta terms ``(S_j - 1) j^k S^q = (j+1)^k S^{q+e_j} - j^k S^q``
    reuse them via left-linearity.
    """
    alg = G.algebra
    principal = _principal_variables(G, summation)
    jdx = alg.variables.index(summation)
    ej = alg.unit(jdx)
    jv = QQ.var(summation)
    if unknowns is None:
        unknowns = []
        for q in shape.Q_support:
            for k in range(shape.K + 1):
                unknowns.append(("d", k, tuple(q)))
        for s in shape.principal_monomials(len(principal)):
            unknowns.append(("c", tuple(s)))
    cols = []
    for u in unknowns:
        if u[0] == "c":
            cols.append(dict(normal_form_monomial(_embed(alg, principal, u[1]), G)))
        else:
            _, k, q = u
            up = normal_form_monomial(tuple(a + b for a, b in zip(q, ej)), G)
            here = normal_form_monomial(tuple(q), G)
            f1, f0 = (jv + 1) ** k, jv**k
            col: dict = {}
            for s, c in up.items():
                col[s] = f1 * c
            for s, c in here.items():
                x = col.get(s, QQ.zero) - f0 * c
                if x:
                    col[s] = x
                else:
                    col.pop(s, None)
            cols.append(col)
    return _System(list(unknowns), cols, principal, summation)


def _coefficient_rows(columns, summation: str, h=None):
    """Clear denominators per standard monomial and split by powers of j."""
    jdx = var_index(summation)
    stds = sorted({s for col in columns for s in col})
    rows = []
    for s in stds:
        entries = [col.get(s) for col in columns]
        if h is not None:
            entries = [h(e) if e is not None else None for e in entries]
        nz = [e for e in entries if e]
        if not nz:
            continue
        den = nz[0].den
        for e in nz[1:]:
            den = den * e.den / den.gcd(e.den)
        split: dict = {}
        for col, e in enumerate(entries):
            if not e:
                continue
            num = e.num * (den / e.den)
            for exp, c in num.to_dict().items():
                t = exp[jdx]
                rest = list(exp)
                rest[jdx] = 0
                split.setdefault(t, {}).setdefault(col, {})[tuple(rest)] = c
        ctx = den.context()
        for t in sorted(split):
            row = [None] * len(columns)
            for col, d in split[t].items():
                row[col] = RatFun(ctx.from_dict(d))
            rows.append(row)
    return rows


def _is_univariate_in(rows, var):
    k = var_index(var)
    for r in rows:
        for e in r:
            if e is None:
                continue
            for p in (e.num, e.den):
                if any(d for t, d in enumerate(p.degrees()) if t != k):
                    return False
    return True


def _solve(rows, ncols, method: str, caps):
    mat = [[e if e is not None else QQ.zero for e in r] for r in rows]
    if not mat:
        return [[QQ.one if t == c else QQ.zero for t in range(ncols)] for c in range(ncols)]
    used = set()
    for r in mat:
        for e in r:
            if e:
                used |= e.variables()
    if method in ("auto", "interpolate") and len(used) == 1:
        (var,) = used
        ker = nullspace_interpolated(mat, var, caps=caps)
        if ker is not None:
            return ker
    if method == "interpolate" and len(used) > 1:
        raise ValueError("interpolation route needs a single parameter")
    return nullspace_ratfun(mat, caps)


def _certificate_from_vector(G, system: _System, vec, shape) -> TelescoperCertificate | None:
    alg = G.algebra
    principal = system.principal_vars
    p_alg = OreAlgebra(principal)
    p_terms, q_terms = {}, {}
    jv = QQ.var(system.summation)
    for u, x in zip(system.unknowns, vec):
        if not x:
            continue
        if u[0] == "c":
            p_terms[u[1]] = x
        else:
            _, k, q = u
            q_terms[q] = q_terms.get(q, QQ.zero) + x * jv**k
    if not any(p_terms.values()):
        return None
    monos = list(p_terms)
    prim = primitive_polynomials([p_terms[m] for m in monos])
    # positive leading coefficient for the highest principal monomial
    lead = max(range(len(monos)), key=lambda t: (sum(monos[t]), monos[t]))
    sign = -1 if prim[lead].leading_coefficient() < 0 else 1
    scale = RatFun(prim[0]) / p_terms[monos[0]] * sign
    P = OreOperator(p_alg, {m: RatFun(p) * sign for m, p in zip(monos, prim)})
    Q = OreOperator(alg, {q: c * scale for q, c in q_terms.items()})
    Q = normal_form(Q, G)
    return TelescoperCertificate(P, Q, system.summation, shape)


def _p_order(cert: TelescoperCertificate):
    return max(sum(m) for m in cert.P.terms), sum(len(c.num) + len(c.den) for c in cert.P.terms.values())


def telescope_ansatz(
    G,
    shape: AnsatzShape,
    summation: str = "j",
    method: str = "auto",
    caps: ResourceCaps | None = None,
    unknowns=None,
    cached: bool = True,
) -> TelescoperCertificate | None:
    """Solve the ansatz; None if no solution has a nonzero principal part.

    ``G`` is a Gröbner basis or a description.  Kernel vectors whose
    principal part vanishes are discarded; among the rest the one with
    the lowest principal order is returned.  ``cached=False`` uses a
    fresh normal-form cache.
    """
    G = getattr(G, "basis", G)
    caps = as_caps(caps)
    if not cached:
        G = GroebnerBasis(G.elements, G.order, G.algebra)
    system = build_system(G, shape, summation, unknowns)
    caps.check("telescoping ansatz")
    rows = _coefficient_rows(system.columns, summation)
    kernel = _solve(rows, len(system.unknowns), method, caps)
    certs = []
    for vec in kernel:
        cert = _certificate_from_vector(G, system, vec, shape)
        if cert is not None:
            certs.append(cert)
    if not certs:
        return None
    cert = min(certs, key=_p_order)
    if not verify_telescoper(cert, G):
        raise TelescopingFailed("ansatz solution does not reduce to zero")
    return cert


def verify_telescoper(cert: TelescoperCertificate, G) -> bool:
    """True iff ``P + (S_j - 1) Q`` reduces to zero."""
    G = getattr(G, "basis", G)
    return normal_form(cert.relation(G.algebra), G).is_zero()


# ---------------------------------------------------------------------------
# modular support probing


@dataclass
class ProbeResult:
    unknowns: list
    pattern: tuple  # indices of nonzero unknowns of the full list
    point: dict
    prime: int


def modular_support_probe(
    G,
    shape: AnsatzShape,
    n0: int | dict = 97,
    prime: int | None = None,
    summation: str = "j",
    caps: ResourceCaps | None = None,
) -> ProbeResult | None:
    """Solve the ansatz in a homomorphic image and drop vanishing unknowns.

    All variables except the summation variable are evaluated (``n0`` may
    be a dict), coefficients are reduced modulo ``prime``.  The principal
    order is increased until a solution with nonzero principal part
    appears; its zero pattern gives the pruned unknown list.
    """
    G = getattr(G, "basis", G)
    caps = as_caps(caps)
    prime = prime or default_primes()[0]
    principal = _principal_variables(G, summation)
    point = n0 if isinstance(n0, dict) else {v: n0 + 7 * t for t, v in enumerate(reversed(principal))}
    h = Insertion(point, prime)
    full = build_system(G, shape, summation)
    nd = sum(1 for u in full.unknowns if u[0] == "d")
    c_idx = [t for t, u in enumerate(full.unknowns) if u[0] == "c"]
    order_of = {t: sum(full.unknowns[t][1]) for t in c_idx}
    rows_all = _coefficient_rows(full.columns, summation, h)
    for top in sorted(set(order_of.values())):
        keep = list(range(nd)) + [t for t in c_idx if order_of[t] <= top]
        mat = []
        for r in rows_all:
            row = []
            for t in keep:
                e = r[t]
                row.append(int(e.num.coeffs()[0]) if e else 0)
            mat.append(row)
        ncols = len(keep)
        if mat:
            red, piv, _ = rref_mod(mat, prime, caps)
            kernel = nullspace_from_rref(red, piv, ncols, zero=0, one=1, neg=lambda x: (-x) % prime)
        else:
            kernel = [[1 if t == c else 0 for t in range(ncols)] for c in range(ncols)]
        good = [v for v in kernel if any(v[t] for t, k in enumerate(keep) if k in order_of)]
        if good:
            vec = min(good, key=lambda v: sum(1 for x in v if x))
            pattern = tuple(k for t, k in enumerate(keep) if vec[t])
            return ProbeResult([full.unknowns[k] for k in pattern], pattern, point, prime)
    return None


def _check_constant_rows(rows):
    for r in rows:
        for e in r:
            if e and not e.is_constant():
                raise UnluckyPoint("modular rows still depend on a variable")


def telescope_probe_then_solve(
    G,
    shape: AnsatzShape,
    summation: str = "j",
    points=(97, 131, 173),
    primes=None,
    caps=None,
    method="auto",
) -> TelescoperCertificate | None:
    """Probe the support modularly, then solve exactly on the pruned set.

    If the pruned system has no admissible solution the probe is deemed
    unlucky and repeated at the next point/prime.
    """
    G = getattr(G, "basis", G)
    primes = list(primes or default_primes())
    for t, n0 in enumerate(points):
        try:
            probe = modular_support_probe(G, shape, n0, primes[t % len(primes)], summation, caps)
        except UnluckyPoint:
            continue
        if probe is None:
            return None
        cert = telescope_ansatz(G, shape, summation, method, caps, unknowns=probe.unknowns)
        if cert is not None:
            return cert
    return None


# ---------------------------------------------------------------------------
# shape search


def input_degree(G: GroebnerBasis, var: str) -> int:
    return max((c.degree(var) for g in G.elements for c in g.terms.values()), default=0)


def shape_schedule(G: GroebnerBasis, summation="j", max_I: int = 4, start: AnsatzShape | None = None, P_support_fn=None):
    """Deterministic sequence of shapes: I = 1, 2, ...; K from a degree
    heuristic up to K0 + I + 1; delta support the triangle of degree I."""
    nv = G.algebra.nshift
    K0 = max(0, input_degree(G, summation) - 1)
    seen = set()
    if start is not None:
        seen.add(start)
        yield start
    for I in range(1, max_I + 1):
        for K in range(K0, K0 + I + 2):
            s = AnsatzShape.triangle(I, K, I, nv, P_support_fn(I) if P_support_fn else None)
            if s not in seen:
                seen.add(s)
                yield s


def find_telescoper(G, summation="j", max_I: int = 4, start=None, caps=None, method="auto", P_support_fn=None):
    G = getattr(G, "basis", G)
    caps = as_caps(caps)
    for shape in shape_schedule(G, summation, max_I, start, P_support_fn):
        caps.check("shape search")
        cert = telescope_ansatz(G, shape, summation, method, caps)
        if cert is not None:
            return cert
    return None


# ---------------------------------------------------------------------------
# elimination


@dataclass
class EliminationResult:
    certificate: TelescoperCertificate | None
    degenerate: list = field(default_factory=list)
    max_degree: int = 0
    diagnostics: str = ""


def _split_principal(A: OreOperator, summation: str, principal: tuple):
    """Write a j-free operator as ``P + (S_j - 1) Q``."""
    alg = A.algebra
    jdx = alg.variables.index(summation)
    p_alg = OreAlgebra(principal)
    p_terms, q_terms = {}, {}
    for m, c in A.terms.items():
        rest = tuple(x for t, x in enumerate(m) if t != jdx)
        p_terms[rest] = p_terms.get(rest, QQ.zero) + c
        for l in range(m[jdx]):
            mono = tuple(l if t == jdx else x for t, x in enumerate(m))
            q_terms[mono] = q_terms.get(mono, QQ.zero) + c
    P = OreOperator(p_alg, p_terms)
    Q = OreOperator(alg, q_terms)
    return P, Q


def telescope_eliminate(G, summation: str = "j", caps: ResourceCaps | None = None) -> EliminationResult:
    """Eliminate the summation variable with a block order.

    The summation variable is moved into the monomials and a Gröbner basis
    is computed with that variable in the first block; elements free of it
    give telescoping relations.  Returns a result without certificate if a
    cap is hit.
    """
    G = getattr(G, "basis", G)
    caps = as_caps(caps)
    alg = G.algebra
    palg = OreAlgebra(alg.variables, (summation,))
    gens = [to_polynomial_algebra(g, palg) for g in G.elements]
    order = TermOrder("block", (summation,))
    maxdeg = max((m[-1] for g in gens for m in g.terms), default=0)
    try:
        E = left_groebner_basis(gens, order, caps)
    except CapExceeded as exc:
        return EliminationResult(None, [], maxdeg, f"{exc}; j-degree of input {maxdeg}")
    maxdeg = max((m[-1] for g in E.elements for m in g.terms), default=0)
    principal = _principal_variables(G, summation)
    found, degenerate = [], []
    for e in E.elements:
        if any(m[-1] for m in e.terms):
            continue
        A = OreOperator(alg, {m[: alg.nshift]: c for m, c in e.terms.items()})
        P, Q = _split_principal(A, summation, principal)
        cert = TelescoperCertificate(P, normal_form(Q, G), summation)
        (found if not P.is_zero() else degenerate).append(cert)
    if not found:
        return EliminationResult(None, degenerate, maxdeg, "no element with nonzero principal part")
    best = min(found, key=_p_order)
    Pp = best.P.primitive_form()
    m = next(iter(Pp.terms))
    c = Pp.terms[m] / best.P.terms[m]  # free of the summation variable, so it commutes with S_j
    Qp = OreOperator(best.Q.algebra, {k: c * q for k, q in best.Q.terms.items()})
    best = TelescoperCertificate(Pp, Qp, summation)
    return EliminationResult(best, degenerate, maxdeg, "")


# ---------------------------------------------------------------------------
# the sum


@dataclass
class BoundaryResidue:
    """Inhomogeneous part for sums over ``a <= j <= b``:
    ``P • F = (Q • f)(a) - (Q • f)(b + 1)``."""

    P: OreOperator
    Q: OreOperator
    summation: str

    def evaluate(self, values, point: dict, lower: int, upper: int):
        alg = self.Q.algebra
        vars_ = alg.variables

        def at(jv):
            pt = tuple(jv if v == self.summation else point[v] for v in vars_)
            return self.Q.apply(values, pt)

        return at(lower) - at(upper + 1)


def sum_recurrence(cert: TelescoperCertificate, natural_boundaries: bool = True, want_residue: bool = False):
    """Recurrence for the definite sum over the summation variable."""
    if natural_boundaries and not want_residue:
        return cert.P
    if cert.Q is None:
        raise ValueError("boundary residue needs the delta part")
    return cert.P, BoundaryResidue(cert.P, cert.Q, cert.summation)


def reduces_univariately(A: OreOperator, B: OreOperator) -> bool:
    """``A`` is a left multiple of ``B`` in the algebra of A (over Q(vars))."""
    return normal_form(A, GroebnerBasis([B], algebra=B.algebra)).is_zero()


def mutually_equivalent(A: OreOperator, B: OreOperator) -> bool:
    return reduces_univariately(A, B) and reduces_univariately(B, A)
