"""Finite descriptions of multivariate sequences and their closure properties.

A description is a reduced Gröbner basis with a finite staircase together
with the values needed to unroll the recurrences: the points under the
stairs (shifted by the origin of the domain) and the exceptional points
where no recurrence applies.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce

from .arith import QQ, VARIABLES, ZZ_CTX, RatFun, integer_roots, poly_gcd, primitive_polynomials, var_index
from .caps import ResourceCaps, as_caps
from .groebner import (
    GroebnerBasis,
    left_groebner_basis,
    normal_form,
    normal_form_monomial,
    normal_form_vector,
    staircase,
)
from .ore import (
    DEGREVLEX,
    OreAlgebra,
    OreOperator,
    SingularEvaluation,
    TermOrder,
    divides,
    mono_add,
    read_operators,
)
from .table import Region, SequenceTable


class NotDFinite(ValueError):
    """The staircase of a basis is infinite."""


class InfiniteSingularSet(ArithmeticError):
    """Leading coefficients vanish simultaneously on a whole curve."""


# ---------------------------------------------------------------------------
# polynomial helpers on algebra coordinates


def _global_point(variables, point) -> list:
    vals = [0] * len(VARIABLES)
    for v, x in zip(variables, point):
        vals[var_index(v)] = x
    return vals


def eval_poly(p, variables, point) -> int:
    return int(p(*_global_point(variables, point)))


def _shift_poly(p, variables, offsets):
    if not any(offsets):
        return p
    gens = list(ZZ_CTX.gens())
    for v, o in zip(variables, offsets):
        if o:
            gens[var_index(v)] = gens[var_index(v)] + o
    return p.compose(*gens)


def _subs(p, values: dict):
    return p.subs({var_index(k): v for k, v in values.items()}) if values else p


def _positive_after_shift(f, variables, shift) -> bool:
    """True if f(shift + t) has coefficients of one sign and a nonzero
    constant term, which certifies that f has no zeros in shift + N^d."""
    g = _shift_poly(f, variables, shift)
    if int(g(*([0] * len(VARIABLES)))) == 0:
        return False
    coeffs = [int(c) for c in g.coeffs()]
    return all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs)


# ---------------------------------------------------------------------------
# descriptions


class DFiniteDescription:
    """Gröbner basis plus initial values on ``origin + N^d``.

    ``initial_values`` must cover ``origin + s`` for every standard monomial
    ``s`` and every exceptional point.  :meth:`value` unrolls the
    recurrences (in primitive polynomial form) with an explicit stack.
    """

    def __init__(
        self,
        basis: GroebnerBasis,
        initial_values: dict,
        exceptional_points=(),
        origin=None,
        name: str = "",
        exceptional_complete: bool = True,
    ):
        if basis.algebra.polynomial:
            raise ValueError("descriptions need a rational algebra")
        self.basis = basis
        self.stairs = staircase(basis)
        if not self.stairs.finite:
            raise NotDFinite(f"staircase of {basis} is infinite")
        d = basis.algebra.nshift
        self.origin = tuple(origin) if origin is not None else (0,) * d
        self.exceptional_points = frozenset(tuple(p) for p in exceptional_points)
        self.exceptional_complete = exceptional_complete
        self.initial_values = {tuple(p): Fraction(v) for p, v in initial_values.items()}
        missing = [p for p in self.required_points() if p not in self.initial_values]
        if missing:
            raise ValueError(f"initial values missing at {sorted(missing)[:5]}")
        self.name = name
        self._memo = dict(self.initial_values)
        self._rules = []
        for g in basis.elements:
            monos = list(g.terms)
            polys = primitive_polynomials([g.terms[m] for m in monos])
            lm = g.lm(basis.order)
            terms = [(m, p) for m, p in zip(monos, polys) if m != lm]
            self._rules.append((lm, polys[monos.index(lm)], terms))

    # structure ---------------------------------------------------------------
    @property
    def algebra(self) -> OreAlgebra:
        return self.basis.algebra

    @property
    def variables(self) -> tuple:
        return self.algebra.variables

    @property
    def dimension(self) -> int:
        return self.stairs.dimension

    def standard_points(self) -> list:
        return [tuple(o + s for o, s in zip(self.origin, m)) for m in self.stairs.under_the_stairs]

    def required_points(self) -> list:
        pts = self.standard_points()
        pts += sorted(p for p in self.exceptional_points if p not in set(pts))
        return pts

    def __repr__(self):
        label = f" {self.name}" if self.name else ""
        return f"<DFiniteDescription{label} vars={','.join(self.variables)} dim={self.dimension}>"

    # unrolling ---------------------------------------------------------------
    def rule_at(self, q):
        """First basis element applicable to compute the value at ``q``.

        Returns ``(lead value, [(point, coefficient value), ...])`` or None.
        """
        rel = tuple(x - o for x, o in zip(q, self.origin))
        if any(x < 0 for x in rel):
            return None
        for lm, lead, terms in self._rules:
            if not divides(lm, rel):
                continue
            base = tuple(x - a for x, a in zip(q, lm))
            lv = eval_poly(lead, self.variables, base)
            if lv == 0:
                continue
            deps = []
            for m, p in terms:
                c = eval_poly(p, self.variables, base)
                if c:
                    deps.append((tuple(b + e for b, e in zip(base, m)), c))
            return lv, deps
        return None

    def value(self, q) -> Fraction:
        q = tuple(q)
        memo = self._memo
        if q in memo:
            return memo[q]
        if any(x < o for x, o in zip(q, self.origin)):
            raise KeyError(f"point {q} lies outside the domain {self.origin} + N^{len(q)}")
        stack = [q]
        while stack:
            p = stack[-1]
            if p in memo:
                stack.pop()
                continue
            rule = self.rule_at(p)
            if rule is None:
                raise SingularEvaluation(f"no recurrence applies at {p} and no initial value is stored")
            lead, deps = rule
            missing = [pt for pt, _ in deps if pt not in memo]
            if missing:
                stack.extend(missing)
                continue
            memo[p] = -sum((Fraction(c) * memo[pt] for pt, c in deps), Fraction(0)) / lead
            stack.pop()
        return memo[q]

    def __call__(self, *q):
        return self.value(q)

    def table(self, region: Region) -> SequenceTable:
        return SequenceTable(self.variables, {p: self.value(p) for p in region.points()}, region)

    # construction ------------------------------------------------------------
    @classmethod
    def from_values(
        cls,
        basis: GroebnerBasis,
        values,
        origin=None,
        name: str = "",
        scan: Region | None = None,
        exceptional=None,
    ) -> "DFiniteDescription":
        """Build a description taking initial values from ``values``.

        ``values`` is a callable on points or a mapping.  Exceptional
        points are found analytically when possible, otherwise by scanning
        ``scan`` (default: a box of side 30 from the origin).
        """
        getter = values if callable(values) else (lambda p: values[tuple(p)])
        stairs = staircase(basis)
        if not stairs.finite:
            raise NotDFinite(f"staircase of {basis} is infinite")
        d = basis.algebra.nshift
        origin = tuple(origin) if origin is not None else (0,) * d
        complete = True
        if exceptional is None:
            probe = cls(basis, {tuple(o + s for o, s in zip(origin, m)): 0 for m in stairs.under_the_stairs}, (), origin)
            try:
                if scan is not None:
                    raise InfiniteSingularSet("explicit scan region requested")
                exceptional = exceptional_points(probe)
            except InfiniteSingularSet:
                box = scan or Region(origin, tuple(o + 30 for o in origin))
                exceptional = scan_exceptional(probe, box)
                complete = False
        init = {}
        for m in stairs.under_the_stairs:
            p = tuple(o + s for o, s in zip(origin, m))
            init[p] = Fraction(getter(p))
        for p in exceptional:
            init[tuple(p)] = Fraction(getter(tuple(p)))
        return cls(basis, init, exceptional, origin, name, complete)

    # serialization -----------------------------------------------------------
    def dumps(self) -> str:
        lines = [
            f"# description vars={','.join(self.variables)} order={self.basis.order} "
            f"origin={','.join(map(str, self.origin))}"
        ]
        lines += [str(g) for g in self.basis.elements]
        lines.append("# initial values")
        for p in self.required_points():
            flag = " exceptional" if p in self.exceptional_points else ""
            lines.append(f"# ({','.join(map(str, p))}): {self.initial_values[p]}{flag}")
        return "\n".join(lines) + "\n"

    @classmethod
    def loads(cls, text: str) -> "DFiniteDescription":
        header = text.splitlines()[0]
        opts = dict(tok.split("=", 1) for tok in header[1:].split() if "=" in tok)
        alg = OreAlgebra(tuple(opts["vars"].split(",")))
        order = TermOrder.parse(opts.get("order", "degrevlex"))
        origin = tuple(int(x) for x in opts.get("origin", "").split(",") if x)
        body = []
        init, exc = {}, set()
        in_values = False
        for line in text.splitlines()[1:]:
            s = line.strip()
            if s == "# initial values":
                in_values = True
                continue
            if in_values and s.startswith("# ("):
                pt, _, rest = s[3:].partition("):")
                p = tuple(int(x) for x in pt.split(","))
                fields = rest.split()
                init[p] = Fraction(fields[0])
                if "exceptional" in fields[1:]:
                    exc.add(p)
            elif not in_values:
                body.append(line)
        G = GroebnerBasis(read_operators("\n".join(body), alg), order, alg)
        return cls(G, init, exc, origin or None)


def description_from_operators(ops, values, order: TermOrder = DEGREVLEX, origin=None, name="", caps=None, scan=None):
    """Gröbner basis of ``ops`` turned into a description with given values."""
    G = left_groebner_basis(list(ops), order, caps)
    return DFiniteDescription.from_values(G, values, origin, name, scan=scan)


# ---------------------------------------------------------------------------
# exceptional points


def scan_exceptional(D: DFiniteDescription, region: Region) -> set:
    std = set(D.standard_points())
    return {p for p in region.points() if p not in std and D.rule_at(p) is None}


def _leading_polys(D: DFiniteDescription):
    """For each rule, ``(lm, L(q))`` with ``L(q) = lc(q - lm)``."""
    out = []
    for lm, lead, _ in D._rules:
        out.append((lm, _shift_poly(lead, D.variables, tuple(-a for a in lm))))
    return out


def _roots_at_least(p, lower: int):
    return {r for r in integer_roots(p) if r >= lower}


def exceptional_points(D: DFiniteDescription) -> set:
    """All exceptional points of ``D`` on its whole domain.

    Works in one and two variables; raises :class:`InfiniteSingularSet`
    if the leading coefficients share infinitely many zeros there (or the
    analysis cannot rule that out).
    """
    d = len(D.variables)
    if d == 1:
        return _exceptional_1d(D)
    if d == 2:
        return _exceptional_2d(D)
    raise InfiniteSingularSet("analytic exceptional-point search supports at most two variables")


def _exceptional_1d(D):
    (v,) = D.variables
    ((lm, L),) = _leading_polys(D)[:1]
    lower = D.origin[0] + lm[0]
    if L.is_constant():
        return set()
    return {(r,) for r in _roots_at_least(L, lower)}


def _exceptional_2d(D):
    x, y = D.variables
    ox, oy = D.origin
    polys = _leading_polys(D)
    A = tuple(max(lm[k] for lm, _ in polys) for k in range(2))
    out = set()
    std = set(D.standard_points())
    # corner: finite scan
    for tx in range(A[0]):
        for ty in range(A[1]):
            q = (ox + tx, oy + ty)
            if q not in std and D.rule_at(q) is None:
                out.add(q)
    # strips: one coordinate fixed below A, the other from A on
    for axis in (0, 1):
        other = 1 - axis
        fixed_var, free_var = D.variables[axis], D.variables[other]
        for t0 in range(A[axis]):
            usable = [L for lm, L in polys if lm[axis] <= t0]
            if not usable:
                raise InfiniteSingularSet(f"no recurrence covers the line {fixed_var}={t0 + D.origin[axis]}")
            restricted = [_subs(L, {fixed_var: D.origin[axis] + t0}) for L in usable]
            nonzero = [p for p in restricted if not p.is_zero()]
            if not nonzero:
                raise InfiniteSingularSet(f"all leading coefficients vanish on {fixed_var}={D.origin[axis] + t0}")
            if any(p.is_constant() for p in nonzero):
                continue
            lower = D.origin[other] + A[other]
            roots = reduce(lambda a, b: a & b, (_roots_at_least(p, lower) for p in nonzero))
            for r in roots:
                q = [0, 0]
                q[axis] = D.origin[axis] + t0
                q[other] = r
                out.add(tuple(q))
    # interior: every rule is positionally usable
    out |= _common_zeros(polys, D.variables, (ox + A[0], oy + A[1]))
    return out


def _common_zeros(polys, variables, lower) -> set:
    x, y = variables
    Ls = [L for _, L in polys]
    if any(L.is_constant() and not L.is_zero() for L in Ls):
        return set()
    g = reduce(poly_gcd, Ls)
    out = set()
    if not g.is_constant():
        _, factors = g.factor()
        for f, _ in factors:
            if _positive_after_shift(f, variables, lower):
                continue
            raise InfiniteSingularSet(f"common factor {f} of all leading coefficients may vanish on a curve")
        Ls = [L / g for L in Ls]
    # finitely many common zeros remain: locate them via a resultant
    for var, other in ((x, y), (y, x)):
        for a, b in itertools.combinations(Ls, 2):
            r = a.resultant(b, var)
            if r.is_zero():
                continue
            if r.is_constant():
                return out
            oth_lower = lower[variables.index(other)]
            for r0 in _roots_at_least(r, oth_lower):
                restricted = [_subs(L, {other: r0}) for L in Ls]
                nonzero = [p for p in restricted if not p.is_zero()]
                if not nonzero:
                    raise InfiniteSingularSet(f"all leading coefficients vanish on {other}={r0}")
                if any(p.is_constant() for p in nonzero):
                    continue
                v_lower = lower[variables.index(var)]
                for s in reduce(lambda u, w: u & w, (_roots_at_least(p, v_lower) for p in nonzero)):
                    pt = [0, 0]
                    pt[variables.index(var)] = s
                    pt[variables.index(other)] = r0
                    out.add(tuple(pt))
            return out
    raise InfiniteSingularSet("leading coefficients share pairwise factors; no resultant available")


def singular_points(D: DFiniteDescription, region: Region | None = None) -> set:
    """Points of the domain where no basis element can be applied.

    With a finite ``region`` the answer is restricted to it and found by
    direct evaluation; without one the whole domain is analysed.
    """
    if region is not None:
        return scan_exceptional(D, region)
    return exceptional_points(D)


@dataclass(frozen=True)
class LeadingCoefficientZeros:
    """Nonnegative integer zeros of a bivariate leading coefficient."""

    lines: dict  # variable -> sorted integer values where a factor vanishes
    points: tuple  # isolated points from genuinely bivariate factors
    clear_from: tuple  # no zeros in clear_from + N^2


def analyze_leading_coefficient(poly, variables=("j", "n"), search: int = 64) -> LeadingCoefficientZeros:
    """Read off the zero set of a factored leading coefficient in N^2.

    Univariate factors give lines, bivariate factors with all non-constant
    coefficients of one sign give finitely many points.  ``clear_from`` is
    the smallest diagonal shift ``(B, B)`` after which every factor has
    coefficients of one sign.
    """
    if isinstance(poly, RatFun):
        poly = poly.num
    _, factors = poly.factor()
    lines = {v: set() for v in variables}
    points = set()
    for f, _ in factors:
        used = [v for v in variables if f.degrees()[var_index(v)] > 0]
        if len(used) == 1:
            lines[used[0]] |= {r for r in integer_roots(f) if r >= 0}
        elif len(used) == 2:
            x, y = used
            for x0 in range(search + 1):
                g = _subs(f, {x: x0})
                if g.is_zero():
                    raise InfiniteSingularSet(f"factor {f} vanishes on {x}={x0}")
                if g.is_constant():
                    continue
                for r in integer_roots(g):
                    if r >= 0:
                        pt = {x: x0, y: r}
                        points.add(tuple(pt[v] for v in variables))
            if not _positive_after_shift(f, variables, (search, search)) and not _positive_after_shift(f, variables, (0, 0)):
                coeffs = [int(c) for c, m in zip(f.coeffs(), f.monoms()) if any(m)]
                if not (all(c > 0 for c in coeffs) or all(c < 0 for c in coeffs)):
                    raise InfiniteSingularSet(f"factor {f} may have infinitely many zeros")
    B = 0
    while not all(_positive_after_shift(f, variables, (B, B)) for f, _ in factors if not f.is_constant()):
        B += 1
        if B > 10 * search:
            raise InfiniteSingularSet("no clearing shift found")
    return LeadingCoefficientZeros(
        {v: tuple(sorted(s)) for v, s in lines.items()}, tuple(sorted(points)), (B, B)
    )


# ---------------------------------------------------------------------------
# FGLM-style closure engine


def fglm(out_alg: OreAlgebra, vec_of, order: TermOrder = DEGREVLEX, caps: ResourceCaps | None = None, max_dim: int = 400):
    """Gröbner basis of the relations among ``vec_of(mono)``.

    ``vec_of`` maps a monomial of ``out_alg`` to a coordinate dict in some
    finite-dimensional space; monomials are visited in increasing order
    and multiples of known leading monomials are skipped.
    """
    caps = as_caps(caps)
    key = order.key(out_alg)
    zero = out_alg.zero_monomial()
    queue = [(key(zero), zero)]
    seen = set()
    lms, gens, echelon, std = [], [], [], []
    while queue:
        caps.check("closure")
        _, m = heapq.heappop(queue)
        if m in seen:
            continue
        seen.add(m)
        if any(divides(l, m) for l in lms):
            continue
        v = {k: c for k, c in vec_of(m).items() if c}
        combo = {m: QQ.one}
        for piv, ev, ec in echelon:
            c = v.get(piv)
            if not c:
                continue
            for k, x in ev.items():
                nv = v.get(k, QQ.zero) - c * x
                if nv:
                    v[k] = nv
                else:
                    v.pop(k, None)
            for k, x in ec.items():
                nc = combo.get(k, QQ.zero) - c * x
                if nc:
                    combo[k] = nc
                else:
                    combo.pop(k, None)
        if not v:
            lms.append(m)
            gens.append(OreOperator(out_alg, combo))
            continue
        std.append(m)
        if len(std) > max_dim:
            raise NotDFinite(f"closure space exceeds {max_dim} dimensions")
        piv = min(v, key=lambda k: (len(v[k].num) + len(v[k].den), repr(k)))
        inv = v[piv].inverse()
        echelon.append((piv, {k: x * inv for k, x in v.items()}, {k: x * inv for k, x in combo.items()}))
        for k in range(out_alg.nshift):
            nxt = mono_add(m, out_alg.unit(k))
            if nxt not in seen:
                heapq.heappush(queue, (key(nxt), nxt))
    return GroebnerBasis(gens, order, out_alg)


def closure_sum(D1: DFiniteDescription, D2: DFiniteDescription, caps=None, name="") -> DFiniteDescription:
    """Description of ``f + g``."""
    if D1.algebra != D2.algebra:
        raise ValueError("summands live in different algebras")
    G1, G2 = D1.basis, D2.basis

    def vec(m):
        out = {(0,) + s: c for s, c in normal_form_monomial(m, G1).items()}
        out.update({(1,) + s: c for s, c in normal_form_monomial(m, G2).items()})
        return out

    G = fglm(D1.algebra, vec, G1.order, caps)
    origin = tuple(max(a, b) for a, b in zip(D1.origin, D2.origin))
    return DFiniteDescription.from_values(G, lambda p: D1.value(p) + D2.value(p), origin, name)


def closure_apply_operator(D: DFiniteDescription, L: OreOperator, caps=None, name="") -> DFiniteDescription:
    """Description of ``L • f``."""
    G = D.basis
    if L.algebra != G.algebra:
        raise ValueError("operator and description live in different algebras")

    def vec(m):
        return normal_form_vector(L.left_monomial_multiple(m), G)

    out = fglm(G.algebra, vec, G.order, caps)

    def values(p):
        return L.apply(D.value, p)

    origin = D.origin
    # L • f at p needs f at p + support; start where all coefficients are defined
    return DFiniteDescription.from_values(out, values, _first_defined_origin(L, origin), name)


def _first_defined_origin(L: OreOperator, origin):
    """Smallest diagonal shift of ``origin`` past every pole of L's coefficients."""
    dens = [c.den for c in L.terms.values() if not c.den.is_constant()]
    if not dens:
        return tuple(origin)
    factors = [f for d in dens for f, _ in d.factor()[1]]
    for t in range(256):
        pt = tuple(o + t for o in origin)
        if all(_positive_after_shift(f, L.algebra.variables, pt) for f in factors):
            return pt
    raise InfiniteSingularSet("operator coefficients have poles throughout the domain")


def closure_substitute(
    D: DFiniteDescription,
    images: dict,
    out_variables,
    caps=None,
    name="",
    origin=None,
) -> DFiniteDescription:
    """Description of ``g(y) = f(A y + b)`` for an affine integer map.

    ``images`` maps each old variable to ``(coefficients over out_variables,
    constant)``, e.g. ``{"j": ({"n": 1}, 0), "n": ({"n": 2}, 0)}`` for
    ``f(2n, n)``.  Coefficients must be nonnegative.
    """
    G = D.basis
    old = D.variables
    out_variables = tuple(out_variables)
    out_alg = OreAlgebra(out_variables)
    A = []
    for v in old:
        coeffs, const = images[v]
        if any(c < 0 for c in coeffs.values()):
            raise ValueError("substitution must not shift backwards")
        A.append(([coeffs.get(w, 0) for w in out_variables], const))
    comp = {}
    gens = ZZ_CTX.gens()
    for v, (row, const) in zip(old, A):
        expr = ZZ_CTX.constant(const)
        for w, a in zip(out_variables, row):
            if a:
                expr = expr + a * gens[var_index(w)]
        comp[v] = expr
    # variables of the old algebra that are not output variables must be
    # substituted; output variables that also occur in old keep their image
    def subst(c: RatFun) -> RatFun:
        try:
            return c.compose(comp)
        except ZeroDivisionError as exc:
            raise ValueError(f"substitution makes a coefficient singular: {exc}") from None

    def vec(m):
        big = tuple(sum(row[k] * m[k] for k in range(len(out_variables))) for row, _ in A)
        return {s: subst(c) for s, c in normal_form_monomial(big, G).items()}

    out = fglm(out_alg, vec, DEGREVLEX, caps)

    def image_point(y):
        return tuple(sum(a * x for a, x in zip(row, y)) + const for row, const in A)

    if origin is None:
        origin = []
        for k in range(len(out_variables)):
            lo = 0
            for (row, const), o in zip(A, D.origin):
                if row[k] and sum(1 for a in row if a) == 1:
                    need = -(-(o - const) // row[k])
                    lo = max(lo, need)
            origin.append(lo)
    return DFiniteDescription.from_values(out, lambda y: D.value(image_point(y)), origin, name)


def closure_diagonal(D: DFiniteDescription, offset: int = 0, name="", origin=None) -> DFiniteDescription:
    """``n -> f(n + offset, n)`` for a description in (x, n)."""
    x, y = D.variables
    if origin is None:
        origin = (max(D.origin[1], D.origin[0] - offset),)
    return closure_substitute(D, {x: ({y: 1}, offset), y: ({y: 1}, 0)}, (y,), name=name, origin=origin)


def hypergeometric_ratios(certificates: dict, algebra: OreAlgebra, mono) -> RatFun:
    """``h(q + mono) / h(q)`` from the shift quotients ``h(q + e_v) / h(q)``."""
    r = QQ.one
    offset = [0] * len(VARIABLES)
    for v, e in zip(algebra.variables, mono):
        cert = certificates.get(v, QQ.one)
        for _ in range(e):
            r = r * cert.shift(tuple(offset))
            offset[var_index(v)] += 1
    return r


def closure_product_hypergeometric(
    D: DFiniteDescription, certificates: dict, h_value, name="", origin=None
) -> DFiniteDescription:
    """Description of ``f * h`` for a hypergeometric ``h``.

    Every basis element ``sum c_b S^b`` becomes ``sum c_b / r_b S^b`` with
    ``r_b = h(q + b) / h(q)``; twisting keeps leading monomials, so the
    result is again a reduced Gröbner basis.
    """
    alg = D.algebra
    certs = {}
    for v, c in certificates.items():
        c = QQ(c)
        if not c:
            raise ValueError(f"certificate for {v} is identically zero")
        certs[v] = c
    twisted = []
    for g in D.basis.elements:
        twisted.append(OreOperator(alg, {m: c / hypergeometric_ratios(certs, alg, m) for m, c in g.terms.items()}))
    G = GroebnerBasis(twisted, D.basis.order, alg)
    return DFiniteDescription.from_values(G, lambda p: D.value(p) * Fraction(h_value(*p)), origin or D.origin, name)


def closure_rename(D: DFiniteDescription, rename: dict, offsets: dict | None = None, name="") -> DFiniteDescription:
    """``g = f`` with variables renamed and shifted: old = new + offset.

    ``closure_rename(D, {"j": "i"}, {"i": -1})`` gives ``g(i, n) = f(i - 1, n)``.
    """
    offsets = offsets or {}
    old = D.variables
    new = tuple(rename.get(v, v) for v in old)
    alg = OreAlgebra(new)
    gens = ZZ_CTX.gens()
    comp = {v: gens[var_index(w)] + offsets.get(w, 0) for v, w in zip(old, new)}
    ops = []
    for g in D.basis.elements:
        ops.append(OreOperator(alg, {m: c.compose(comp) for m, c in g.terms.items()}))
    G = GroebnerBasis(ops, D.basis.order, alg)
    origin = tuple(o - offsets.get(w, 0) for o, w in zip(D.origin, new))

    def values(p):
        return D.value(tuple(x + offsets.get(w, 0) for x, w in zip(p, new)))

    return DFiniteDescription.from_values(G, values, origin, name)


def extend_basis(G: GroebnerBasis, algebra: OreAlgebra, caps=None) -> GroebnerBasis:
    """Basis in a larger algebra for a sequence constant in the new variables."""
    from .ore import change_algebra

    ops = [change_algebra(g, algebra) for g in G.elements]
    for v in algebra.variables:
        if v not in G.algebra.variables:
            ops.append(algebra.shift(v) - algebra.one())
    return left_groebner_basis(ops, G.order, caps)


def twist_basis(G: GroebnerBasis, certificates: dict) -> GroebnerBasis:
    """Basis of the product with a hypergeometric term (ideal level only)."""
    alg = G.algebra
    certs = {v: QQ(c) for v, c in certificates.items()}
    ops = [
        OreOperator(alg, {m: c / hypergeometric_ratios(certs, alg, m) for m, c in g.terms.items()})
        for g in G.elements
    ]
    return GroebnerBasis(ops, G.order, alg)


# ---------------------------------------------------------------------------
# annihilation checks and identity proofs


def annihilates(ops, values, region: Region) -> bool:
    """Every operator applied at every evaluable point of ``region`` gives 0.

    Points where a coefficient has a pole or where the needed shifted values
    are unavailable are skipped.
    """
    getter = values if callable(values) else (lambda p: values[tuple(p)])
    for op in ops:
        for p in region.points():
            try:
                if op.apply(getter, p) != 0:
                    return False
            except (SingularEvaluation, KeyError):
                continue
    return True


@dataclass
class EqualityProof:
    """Outcome of comparing two descriptions."""

    reduction_ok: bool
    direction: str
    residues: list = field(default_factory=list)
    singular: set = field(default_factory=set)
    compared: list = field(default_factory=list)
    mismatches: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    @property
    def proved(self) -> bool:
        return self.reduction_ok and not self.mismatches and bool(self.compared)

    @property
    def verdict(self) -> str:
        return "proved" if self.proved else "not proved"


def prove_equal(
    DL: DFiniteDescription,
    DR: DFiniteDescription,
    region: Region | None = None,
    trapezoid: tuple | None = None,
) -> EqualityProof:
    """Decide ``L = R`` on the common domain.

    (a) The basis of one side must reduce to zero modulo the other; that
    side's ideal then annihilates both sequences.  (b) Its exceptional
    points are collected.  (c) Values are compared on the standard points
    and exceptional points, or, for identities valid only on
    ``{x_a < x_b}`` (``trapezoid=(a, b)``), on the trapezoid up to
    ``N0 = max staircase extent + max singular coordinate + 1``.
    """
    if DL.variables != DR.variables:
        raise ValueError("descriptions have different variables")
    resL = [normal_form(g, DR.basis) for g in DL.basis.elements]
    if all(r.is_zero() for r in resL):
        J, direction, residues = DL, "left reduces modulo right", []
    else:
        resR = [normal_form(g, DL.basis) for g in DR.basis.elements]
        if all(r.is_zero() for r in resR):
            J, direction, residues = DR, "right reduces modulo left", []
        else:
            return EqualityProof(False, "neither", [r for r in resL if not r.is_zero()])
    proof = EqualityProof(True, direction, residues)
    if region is not None:
        sing = singular_points(J, region)
    elif J.exceptional_complete:
        sing = set(J.exceptional_points)
    else:
        sing = set(J.exceptional_points)
        proof.notes.append("exceptional points only known on a scanned box")
    proof.singular = sing
    origin = tuple(max(a, b) for a, b in zip(DL.origin, DR.origin))
    if trapezoid is None:
        pts = sorted(set(J.standard_points()) | sing)
        pts = [p for p in pts if all(x >= o for x, o in zip(p, origin))]
    else:
        extent = max(J.stairs.extent()) if J.dimension else 0
        sing_max = max((max(p) for p in sing), default=0)
        N0 = extent + sing_max + 1
        a, b = trapezoid
        # N0 counts from the corner of the domain
        hi = tuple(max(origin) + N0 for _ in origin)
        pts = list(Region(origin, hi, below=(a, b)).points())
    for p in pts:
        try:
            lv, rv = DL.value(p), DR.value(p)
        except (SingularEvaluation, KeyError) as exc:
            proof.mismatches.append((p, f"undetermined: {exc}"))
            continue
        proof.compared.append(p)
        if lv != rv:
            proof.mismatches.append((p, lv, rv))
    return proof


def univariate_description(op: OreOperator, values, origin=None, name="") -> DFiniteDescription:
    G = GroebnerBasis([op], DEGREVLEX, op.algebra)
    return DFiniteDescription.from_values(G, values, origin, name)
