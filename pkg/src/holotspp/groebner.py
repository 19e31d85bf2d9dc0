"""Left Gröbner bases, exact and modular normal forms, staircases."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass

from .arith import QQ, RatFun, field, var_index
from .caps import ResourceCaps, as_caps
from .ore import (
    DEGREVLEX,
    OreAlgebra,
    OreOperator,
    TermOrder,
    divides,
    mono_lcm,
    mono_sub,
    read_operators,
    term_product,
)


class UnluckyPoint(ArithmeticError):
    """An evaluation homomorphism hit a vanishing denominator."""


# ---------------------------------------------------------------------------
# bases


class GroebnerBasis:
    """Reduced, monic left Gröbner basis (immutable)."""

    def __init__(self, elements, order: TermOrder = DEGREVLEX, algebra: OreAlgebra | None = None):
        elements = list(elements)
        if algebra is None:
            if not elements:
                raise ValueError("empty basis needs an explicit algebra")
            algebra = elements[0].algebra
        self.algebra = algebra
        self.order = order
        self.key = order.key(algebra)
        self.elements = tuple(sorted((g.monic(order) for g in elements), key=lambda g: self.key(g.lm(order))))
        self.lms = tuple(g.lm(order) for g in self.elements)
        self._nf_cache: dict = {}

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    def __eq__(self, other):
        if not isinstance(other, GroebnerBasis):
            return NotImplemented
        return self.order == other.order and set(self.elements) == set(other.elements)

    def __hash__(self):
        return hash((self.order, frozenset(self.elements)))

    def __repr__(self):
        return f"GroebnerBasis([{', '.join(map(str, self.elements))}], {self.order})"

    def reducer(self, mono):
        """Index of a basis element whose lm divides ``mono`` (or None)."""
        for k, lm in enumerate(self.lms):
            if divides(lm, mono):
                return k
        return None

    def is_standard(self, mono) -> bool:
        return self.reducer(mono) is None

    # serialization ---------------------------------------------------------
    def dumps(self) -> str:
        head = f"# order={self.order} algebra={self.algebra}\n"
        return head + "".join(f"{g}\n" for g in self.elements)

    @classmethod
    def loads(cls, text: str, algebra: OreAlgebra | None = None) -> "GroebnerBasis":
        order = DEGREVLEX
        for line in text.splitlines():
            line = line.strip()
            if not line.startswith("#"):
                continue
            for tok in line[1:].split():
                if tok.startswith("order="):
                    order = TermOrder.parse(tok[6:])
                elif tok.startswith("algebra=") and algebra is None:
                    shifts, _, poly = tok[8:].partition(";")
                    algebra = OreAlgebra(tuple(shifts.split(",")), tuple(p for p in poly.split(",") if p))
        ops = read_operators(text, algebra)
        if algebra is None and ops:
            algebra = ops[0].algebra
        return cls(ops, order, algebra)


# ---------------------------------------------------------------------------
# normal forms


def _left_multiple(alg: OreAlgebra, mono, g: OreOperator) -> dict:
    """Terms of ``mono * g`` (monomial times operator)."""
    if not any(mono):
        return dict(g.terms)
    out: dict = {}
    one = QQ.one
    for m2, c2 in g.terms.items():
        for m, c in term_product(alg, mono, one, m2, c2):
            s = out.get(m)
            out[m] = c if s is None else s + c
    return {m: c for m, c in out.items() if c}


def normal_form(p: OreOperator, G: GroebnerBasis) -> OreOperator:
    """Full left reduction of ``p`` modulo ``G``.

    Each step takes the largest reducible monomial ``m`` of ``p``, forms
    ``g = (m / lm(g_k)) * g_k`` inside the algebra and subtracts
    ``coeff / lc(g) * g``.
    """
    if p.algebra != G.algebra:
        raise ValueError("operator and basis live in different algebras")
    alg, order, key = G.algebra, G.order, G.key
    terms = dict(p.terms)
    done: dict = {}
    # max-heap of monomials still to inspect
    heap = [(_neg(key(m)), m) for m in terms]
    heapq.heapify(heap)
    while heap:
        _, m = heapq.heappop(heap)
        c = terms.pop(m, None)
        if c is None or not c:
            continue
        k = G.reducer(m)
        if k is None:
            done[m] = c
            continue
        g = G.elements[k]
        mult = _left_multiple(alg, mono_sub(m, G.lms[k]), g)
        factor = c / mult[m]
        for u, cu in mult.items():
            if u == m:
                continue
            old = terms.get(u)
            if old is None:
                terms[u] = -factor * cu
                heapq.heappush(heap, (_neg(key(u)), u))
            else:
                terms[u] = old - factor * cu
    return OreOperator(alg, done)


def _neg(k):
    # heapq is a min-heap; invert nested key tuples
    if isinstance(k, tuple):
        return tuple(_neg(x) for x in k)
    return -k


def normal_form_monomial(mono, G: GroebnerBasis) -> dict:
    """Normal form of a single monomial as ``{standard monomial: RatFun}``.

    Results are cached on the basis.  One reduction step is taken and the
    (cached) normal forms of the smaller monomials are combined, iterating
    with an explicit stack so deep staircases cannot overflow recursion.
    """
    cache = G._nf_cache
    mono = tuple(mono)
    if mono in cache:
        return cache[mono]
    stack = [mono]
    while stack:
        m = stack[-1]
        if m in cache:
            stack.pop()
            continue
        k = G.reducer(m)
        if k is None:
            cache[m] = {m: QQ.one}
            stack.pop()
            continue
        mult = _left_multiple(G.algebra, mono_sub(m, G.lms[k]), G.elements[k])
        missing = [u for u in mult if u != m and u not in cache]
        if missing:
            stack.extend(missing)
            continue
        lead = mult[m]
        out: dict = {}
        for u, cu in mult.items():
            if u == m:
                continue
            f = -cu / lead
            for s, cs in cache[u].items():
                old = out.get(s)
                out[s] = f * cs if old is None else old + f * cs
        cache[m] = {s: c for s, c in out.items() if c}
        stack.pop()
    return cache[mono]


def normal_form_vector(p: OreOperator, G: GroebnerBasis) -> dict:
    """Normal form via the per-monomial cache, as a coordinate dict."""
    out: dict = {}
    for m, c in p.terms.items():
        for s, cs in normal_form_monomial(m, G).items():
            old = out.get(s)
            out[s] = c * cs if old is None else old + c * cs
    return {s: c for s, c in out.items() if c}


def normal_form_cached(p: OreOperator, G: GroebnerBasis) -> OreOperator:
    return OreOperator(G.algebra, normal_form_vector(p, G))


def reduces_to_zero(p: OreOperator, G: GroebnerBasis) -> bool:
    return normal_form(p, G).is_zero()


# ---------------------------------------------------------------------------
# modular normal form


class Insertion:
    """Evaluation homomorphism ``h``: some variables to integers, optionally mod p."""

    def __init__(self, values: dict, prime: int | None = None):
        self.values = {k: int(v) for k, v in values.items()}
        for k in self.values:
            var_index(k)
        self.prime = prime
        self.field = field(prime)

    def __call__(self, c: RatFun) -> RatFun:
        try:
            out = c.subs(self.values)
            if self.prime is not None:
                out = out.to_modular(self.prime)
        except ZeroDivisionError as exc:
            raise UnluckyPoint(f"unlucky evaluation point {self.values}: {exc}") from None
        return out

    def apply(self, op: OreOperator) -> OreOperator:
        return OreOperator(op.algebra, {m: self(c) for m, c in op.terms.items()})


def modular_normal_form(
    p: OreOperator,
    G: GroebnerBasis,
    n0: int | dict,
    prime: int | None = None,
    variable: str = "n",
) -> OreOperator:
    """Normal form computed in the homomorphic image ``h``.

    Each reducer is first multiplied by its shift monomial in the full
    algebra and only then mapped by ``h``; mapping before multiplying would
    lose the commutation rule and give wrong results.
    """
    values = n0 if isinstance(n0, dict) else {variable: n0}
    h = Insertion(values, prime)
    alg, key = G.algebra, G.key
    terms = {m: h(c) for m, c in p.terms.items()}
    terms = {m: c for m, c in terms.items() if c}
    done: dict = {}
    heap = [(_neg(key(m)), m) for m in terms]
    heapq.heapify(heap)
    while heap:
        _, m = heapq.heappop(heap)
        c = terms.pop(m, None)
        if c is None or not c:
            continue
        k = G.reducer(m)
        if k is None:
            done[m] = c
            continue
        mult = _left_multiple(alg, mono_sub(m, G.lms[k]), G.elements[k])
        mult = {u: h(cu) for u, cu in mult.items()}
        lead = mult[m]
        if not lead:
            raise UnluckyPoint(f"leading coefficient vanishes at {values}")
        factor = c / lead
        for u, cu in mult.items():
            if u == m or not cu:
                continue
            old = terms.get(u)
            if old is None:
                terms[u] = -factor * cu
                heapq.heappush(heap, (_neg(key(u)), u))
            else:
                terms[u] = old - factor * cu
    return OreOperator(alg, done)


def modular_normal_form_retry(p, G, n0: int, prime=None, variable="n", attempts: int = 50):
    """Retry :func:`modular_normal_form` with n0, n0+1, ... on unlucky points."""
    for k in range(attempts):
        try:
            return n0 + k, modular_normal_form(p, G, n0 + k, prime, variable)
        except UnluckyPoint:
            continue
    raise UnluckyPoint(f"no lucky point in [{n0}, {n0 + attempts})")


# ---------------------------------------------------------------------------
# Buchberger


def s_polynomial(f: OreOperator, g: OreOperator, order: TermOrder) -> OreOperator:
    alg = f.algebra
    lf, lg = f.lm(order), g.lm(order)
    lcm = mono_lcm(lf, lg)
    a = OreOperator(alg, _left_multiple(alg, mono_sub(lcm, lf), f))
    b = OreOperator(alg, _left_multiple(alg, mono_sub(lcm, lg), g))
    return a.scale(a.terms[lcm].inverse()) - b.scale(b.terms[lcm].inverse())


def _reduce_against(p: OreOperator, basis: list, order: TermOrder) -> OreOperator:
    tmp = GroebnerBasis.__new__(GroebnerBasis)
    tmp.algebra = p.algebra
    tmp.order = order
    tmp.key = order.key(p.algebra)
    tmp.elements = tuple(basis)
    tmp.lms = tuple(g.lm(order) for g in basis)
    tmp._nf_cache = {}
    return normal_form(p, tmp)


def interreduce(ops, order: TermOrder) -> list:
    """Minimal, fully reduced, monic generating set of the same ideal."""
    ops = [g.monic(order) for g in ops if not g.is_zero()]
    key = order.key(ops[0].algebra) if ops else None
    changed = True
    while changed:
        changed = False
        ops.sort(key=lambda g: key(g.lm(order)))
        keep = []
        for g in ops:
            if any(divides(h.lm(order), g.lm(order)) for h in keep):
                r = _reduce_against(g, keep, order)
                if not r.is_zero():
                    keep.append(r.monic(order))
                changed = True
            else:
                keep.append(g)
        ops = keep
    out = []
    for k, g in enumerate(ops):
        others = ops[:k] + ops[k + 1 :]
        lead = g.lm(order)
        tail = OreOperator(g.algebra, {m: c for m, c in g.terms.items() if m != lead})
        out.append(tail_reduced(g, lead, tail, others, order))
    return out


def tail_reduced(g, lead, tail, others, order):
    r = _reduce_against(tail, others, order) if others else tail
    return (r + OreOperator(g.algebra, {lead: g.terms[lead]})).monic(order)


def left_groebner_basis(
    gens,
    order: TermOrder = DEGREVLEX,
    caps: ResourceCaps | None = None,
    algebra: OreAlgebra | None = None,
) -> GroebnerBasis:
    """Reduced left Gröbner basis by Buchberger's algorithm.

    Pairs are processed by the normal strategy (smallest lcm first).  The
    product criterion is not used: it is invalid for Ore algebras.
    """
    caps = as_caps(caps)
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        if algebra is None:
            raise ValueError("zero ideal needs an explicit algebra")
        return GroebnerBasis([], order, algebra)
    alg = gens[0].algebra
    if any(g.algebra != alg for g in gens):
        raise ValueError("generators live in different algebras")
    key = order.key(alg)
    caps.check("groebner basis")
    basis = interreduce(gens, order)
    pairs: list = []
    counter = itertools.count()

    def add_pairs(k):
        for i in range(k):
            lcm = mono_lcm(basis[i].lm(order), basis[k].lm(order))
            heapq.heappush(pairs, (key(lcm), next(counter), i, k))

    for k in range(len(basis)):
        add_pairs(k)
    alive = set(range(len(basis)))
    while pairs:
        caps.check("groebner basis")
        _, _, i, k = heapq.heappop(pairs)
        if i not in alive or k not in alive:
            continue
        s = s_polynomial(basis[i], basis[k], order)
        r = _reduce_against(s, [basis[t] for t in sorted(alive)], order)
        if r.is_zero():
            continue
        r = r.monic(order)
        basis.append(r)
        new = len(basis) - 1
        lm_new = r.lm(order)
        # elements whose lm is a multiple of the new lm become redundant
        # only after the basis is complete; keep them for pair generation
        alive.add(new)
        caps.check_size(len(alive), "groebner basis")
        if alg.polynomial:
            caps.check_degree(max(sum(m[alg.nshift :]) for m in r.terms), "groebner basis")
        for t in sorted(alive - {new}):
            lcm = mono_lcm(basis[t].lm(order), lm_new)
            heapq.heappush(pairs, (key(lcm), next(counter), t, new))
    result = interreduce([basis[t] for t in sorted(alive)], order)
    return GroebnerBasis(result, order, alg)


def is_groebner_basis(G: GroebnerBasis) -> bool:
    """Buchberger criterion: every S-polynomial reduces to zero."""
    for f, g in itertools.combinations(G.elements, 2):
        if not normal_form(s_polynomial(f, g, G.order), G).is_zero():
            return False
    return True


# ---------------------------------------------------------------------------
# staircases


@dataclass(frozen=True)
class Staircase:
    leading_monomials: tuple
    under_the_stairs: tuple | None  # None when infinite
    nshift: int

    @property
    def finite(self) -> bool:
        return self.under_the_stairs is not None

    @property
    def dimension(self) -> int | None:
        return None if self.under_the_stairs is None else len(self.under_the_stairs)

    def extent(self) -> tuple:
        """Per-variable maximum exponent among standard monomials."""
        if not self.finite:
            raise ValueError("infinite staircase")
        return tuple(max((m[k] for m in self.under_the_stairs), default=0) for k in range(self.nshift))


def staircase_of(lms, nshift: int, order: TermOrder | None = None, algebra: OreAlgebra | None = None) -> Staircase:
    """Standard monomials of a set of leading monomials (shift part only)."""
    lms = tuple(tuple(m) for m in lms)
    if any(not any(m) for m in lms):
        return Staircase(lms, (), nshift)
    bounds = []
    for k in range(nshift):
        pure = [m[k] for m in lms if all(x == 0 for t, x in enumerate(m) if t != k) and m[k] > 0]
        if not pure:
            return Staircase(lms, None, nshift)
        bounds.append(min(pure))
    if any(len(m) != nshift for m in lms):
        # polynomial variables present: they are never bounded
        return Staircase(lms, None, nshift)
    std = [
        e
        for e in itertools.product(*(range(b) for b in bounds))
        if not any(divides(m, e) for m in lms)
    ]
    if order is not None and algebra is not None:
        std.sort(key=order.key(algebra))
    else:
        std.sort(key=lambda e: (sum(e), tuple(reversed(e))))
    return Staircase(lms, tuple(std), nshift)


def staircase(G: GroebnerBasis) -> Staircase:
    if G.algebra.polynomial:
        return Staircase(G.lms, None, G.algebra.nshift)
    if not G.elements:
        return Staircase((), None, G.algebra.nshift)
    return staircase_of(G.lms, G.algebra.nshift, G.order, G.algebra)
