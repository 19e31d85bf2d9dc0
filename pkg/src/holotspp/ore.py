"""Shift Ore algebras: operators, term orders and the operator text grammar.

An operator is a finite sum ``c(v) * x^a * S^alpha`` with ``c`` a rational
function, ``S^alpha`` a power product of shifts and ``x^a`` an optional
power product of *polynomial* variables (used only by elimination, where
the summation variable has to live in the monomials).  Multiplication
honours ``S_v * v = (v + 1) * S_v``.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb

from .arith import NVARS, QQ, VARIABLES, ZZ_CTX, RatFun, format_poly, var_index


class SingularEvaluation(ArithmeticError):
    """A coefficient denominator vanished at an evaluation point."""


class OperatorSyntaxError(ValueError):
    def __init__(self, message, column=None, line=None):
        self.column = column
        self.line = line
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        super().__init__(f"{', '.join(where)}: {message}" if where else message)


# ---------------------------------------------------------------------------
# algebras and orders


@dataclass(frozen=True)
class OreAlgebra:
    """Shift algebra over Q(VARIABLES) with one shift per variable.

    ``polynomial`` lists variables that are kept in the monomials instead of
    the coefficients.  Monomials are exponent tuples: shift exponents in
    ``variables`` order, then exponents of the polynomial variables.
    """

    variables: tuple
    polynomial: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "polynomial", tuple(self.polynomial))
        for v in self.variables:
            var_index(v)
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate algebra variable")
        if not set(self.polynomial) <= set(self.variables):
            raise ValueError("polynomial variables must also carry a shift")

    @property
    def nshift(self) -> int:
        return len(self.variables)

    @property
    def width(self) -> int:
        return len(self.variables) + len(self.polynomial)

    @property
    def symbols(self) -> tuple:
        return tuple("S" + v for v in self.variables) + self.polynomial

    def zero_monomial(self) -> tuple:
        return (0,) * self.width

    def unit(self, k: int) -> tuple:
        e = [0] * self.width
        e[k] = 1
        return tuple(e)

    def shift_monomial(self, **exps) -> tuple:
        e = [0] * self.width
        for name, x in exps.items():
            e[self.variables.index(name)] = x
        return tuple(e)

    # element construction --------------------------------------------------
    def one(self) -> "OreOperator":
        return OreOperator(self, {self.zero_monomial(): QQ.one})

    def zero(self) -> "OreOperator":
        return OreOperator(self, {})

    def shift(self, name: str, power: int = 1) -> "OreOperator":
        return OreOperator(self, {self.shift_monomial(**{name: power}): QQ.one})

    def monomial(self, mono, coeff=1) -> "OreOperator":
        return OreOperator(self, {tuple(mono): QQ(coeff)})

    def coefficient(self, c) -> "OreOperator":
        return OreOperator(self, {self.zero_monomial(): QQ(c)})

    def __call__(self, x) -> "OreOperator":
        if isinstance(x, OreOperator):
            if x.algebra != self:
                raise ValueError("operator belongs to a different algebra")
            return x
        if isinstance(x, str):
            return parse_operator(x, self)
        return self.coefficient(x)

    def __str__(self):
        shifts = ",".join(self.variables)
        if self.polynomial:
            return f"{shifts};{','.join(self.polynomial)}"
        return shifts


@lru_cache(maxsize=None)
def _offsets(algebra: OreAlgebra, mono: tuple) -> tuple:
    """Shift amounts of ``mono`` as a tuple over the global VARIABLES."""
    off = [0] * NVARS
    for v, e in zip(algebra.variables, mono[: algebra.nshift]):
        if e:
            off[var_index(v)] = e
    return tuple(off)


@lru_cache(maxsize=None)
def _shifted_power(shifts: tuple, exps: tuple) -> tuple:
    """Expand prod (x_t + s_t)^{b_t} into ((e-vector, int coefficient), ...)."""
    factors = []
    for s, b in zip(shifts, exps):
        factors.append([(e, comb(b, e) * s ** (b - e)) for e in range(b + 1)])
    out = []
    for combo in itertools.product(*factors):
        c = 1
        for _, x in combo:
            c *= x
        if c:
            out.append((tuple(e for e, _ in combo), c))
    return tuple(out)


@dataclass(frozen=True)
class TermOrder:
    """Monomial order: ``degrevlex``, ``lex`` or ``block``.

    A block order compares the symbols in ``block`` (e.g. ``("j",)`` or
    ``("Sj",)``) first by degrevlex, then the rest by degrevlex.
    """

    kind: str = "degrevlex"
    block: tuple = ()

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"unknown term order {self.kind!r}")
        object.__setattr__(self, "block", tuple(self.block))
        if self.kind == "block" and not self.block:
            raise ValueError("block order needs a first block")

    def key(self, algebra: OreAlgebra):
        return _order_key(self, algebra)

    def __str__(self):
        if self.kind == "block":
            return f"block({','.join(self.block)})"
        return self.kind

    @classmethod
    def parse(cls, text: str) -> "TermOrder":
        text = text.strip()
        m = re.fullmatch(r"block\(([^)]*)\)", text)
        if m:
            return cls("block", tuple(s.strip() for s in m.group(1).split(",") if s.strip()))
        return cls(text)


DEGREVLEX = TermOrder("degrevlex")


def _degrevlex(exps):
    return (sum(exps),) + tuple(-e for e in reversed(exps))


@lru_cache(maxsize=None)
def _order_key(order: TermOrder, algebra: OreAlgebra):
    if order.kind == "degrevlex":
        return lru_cache(maxsize=None)(_degrevlex)
    if order.kind == "lex":
        return lambda m: m
    symbols = algebra.symbols
    unknown = set(order.block) - set(symbols)
    if unknown:
        raise ValueError(f"block symbols {sorted(unknown)} not in algebra {algebra}")
    first = [k for k, s in enumerate(symbols) if s in order.block]
    rest = [k for k, s in enumerate(symbols) if s not in order.block]

    @lru_cache(maxsize=None)
    def key(m):
        return (_degrevlex(tuple(m[k] for k in first)), _degrevlex(tuple(m[k] for k in rest)))

    return key


def divides(a: tuple, b: tuple) -> bool:
    return all(x <= y for x, y in zip(a, b))


def mono_sub(a: tuple, b: tuple) -> tuple:
    return tuple(x - y for x, y in zip(a, b))


def mono_add(a: tuple, b: tuple) -> tuple:
    return tuple(x + y for x, y in zip(a, b))


def mono_lcm(a: tuple, b: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(a, b))


# ---------------------------------------------------------------------------
# operators


class OreOperator:
    """Immutable sparse operator ``{monomial: RatFun}``."""

    __slots__ = ("algebra", "terms", "_hash")

    def __init__(self, algebra: OreAlgebra, terms: dict, *, clean: bool = False):
        self.algebra = algebra
        self.terms = terms if clean else {m: c for m, c in terms.items() if c}
        self._hash = None

    # basic protocol --------------------------------------------------------
    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, OreOperator):
            return NotImplemented
        return self.algebra == other.algebra and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.algebra, frozenset(self.terms.items())))
        return self._hash

    def support(self) -> list:
        return sorted(self.terms, key=DEGREVLEX.key(self.algebra), reverse=True)

    def coefficient(self, mono) -> RatFun:
        return self.terms.get(tuple(mono), QQ.zero)

    def _check(self, other):
        if not isinstance(other, OreOperator):
            return self.algebra.coefficient(other)
        if other.algebra != self.algebra:
            raise ValueError(f"algebra mismatch: {self.algebra} vs {other.algebra}")
        return other

    # ring operations -------------------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m)
            out[m] = c if s is None else s + c
        return OreOperator(self.algebra, out)

    __radd__ = __add__

    def __neg__(self):
        return OreOperator(self.algebra, {m: -c for m, c in self.terms.items()}, clean=True)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c) -> "OreOperator":
        """Left multiplication by a coefficient."""
        c = QQ(c) if not isinstance(c, RatFun) else c
        if not c:
            return OreOperator(self.algebra, {})
        return OreOperator(self.algebra, {m: c * x for m, x in self.terms.items()}, clean=True)

    def __mul__(self, other):
        if not isinstance(other, OreOperator):
            other = self.algebra.coefficient(other)
        other = self._check(other)
        alg = self.algebra
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                for m, c in term_product(alg, m1, c1, m2, c2):
                    s = out.get(m)
                    out[m] = c if s is None else s + c
        return OreOperator(alg, out)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, e: int):
        out = self.algebra.one()
        for _ in range(e):
            out = out * self
        return out

    def left_monomial_multiple(self, mono: tuple) -> "OreOperator":
        """``x^a S^alpha * self`` for the monomial ``mono``."""
        alg = self.algebra
        if not any(mono):
            return self
        one = QQ.one
        out: dict = {}
        for m2, c2 in self.terms.items():
            for m, c in term_product(alg, mono, one, m2, c2):
                s = out.get(m)
                out[m] = c if s is None else s + c
        return OreOperator(alg, out)

    # orders ----------------------------------------------------------------
    def lm(self, order: TermOrder = DEGREVLEX) -> tuple:
        if not self.terms:
            raise ValueError("zero operator has no leading monomial")
        return max(self.terms, key=order.key(self.algebra))

    def lc(self, order: TermOrder = DEGREVLEX) -> RatFun:
        return self.terms[self.lm(order)]

    def monic(self, order: TermOrder = DEGREVLEX) -> "OreOperator":
        c = self.lc(order)
        if c.is_one():
            return self
        return self.scale(c.inverse())

    def map_coefficients(self, fn, algebra: OreAlgebra | None = None) -> "OreOperator":
        alg = algebra or self.algebra
        return OreOperator(alg, {m: fn(c) for m, c in self.terms.items()})

    def primitive_form(self) -> "OreOperator":
        """Left multiple with coprime integer polynomial coefficients."""
        from .arith import primitive_polynomials

        monos = list(self.terms)
        polys = primitive_polynomials([self.terms[m] for m in monos])
        return OreOperator(self.algebra, {m: RatFun(p) for m, p in zip(monos, polys)})

    def variables_used(self) -> set:
        out = set()
        for c in self.terms.values():
            out |= c.variables()
        return out

    def shift_order(self, name: str) -> int:
        k = self.algebra.variables.index(name)
        return max((m[k] for m in self.terms), default=0)

    # evaluation ------------------------------------------------------------
    def apply(self, values, point) -> Fraction:
        """Evaluate ``(self • f)(point)``; ``values`` is a mapping or callable."""
        alg = self.algebra
        point = tuple(point)
        env = dict(zip(alg.variables, point))
        getter = values.__getitem__ if hasattr(values, "__getitem__") else values
        total = Fraction(0)
        for m, c in self.terms.items():
            shifted = tuple(p + e for p, e in zip(point, m[: alg.nshift]))
            try:
                cv = c(env)
            except ZeroDivisionError as exc:
                raise SingularEvaluation(f"coefficient {c} singular at {point}") from exc
            for name, e in zip(alg.polynomial, m[alg.nshift :]):
                cv *= env[name] ** e
            if cv:
                try:
                    fv = getter(shifted)
                except (KeyError, IndexError) as exc:
                    raise KeyError(f"point {shifted} outside the table") from exc
                total += cv * fv
        return total

    # text ------------------------------------------------------------------
    def __str__(self):
        return format_operator(self)

    def __repr__(self):
        return f"OreOperator({self})"


def term_product(alg: OreAlgebra, m1, c1: RatFun, m2, c2: RatFun):
    """Product of two terms ``c1 x^a S^alpha`` and ``c2 x^b S^beta``."""
    ns = alg.nshift
    alpha = m1[:ns]
    c2s = c2.shift(_offsets(alg, m1)) if any(alpha) else c2
    c = c1 * c2s
    if not c:
        return ()
    shift_part = tuple(x + y for x, y in zip(alpha, m2[:ns]))
    if not alg.polynomial:
        return ((shift_part, c),)
    a, b = m1[ns:], m2[ns:]
    s = tuple(alpha[alg.variables.index(v)] for v in alg.polynomial)
    if not any(b) or not any(s):
        return ((shift_part + tuple(x + y for x, y in zip(a, b)), c),)
    return tuple(
        (shift_part + tuple(x + y for x, y in zip(a, e)), c * k) for e, k in _shifted_power(s, b)
    )


def op_mul(a: OreOperator, b: OreOperator) -> OreOperator:
    return a * b


def op_apply(a: OreOperator, table, at) -> Fraction:
    """Apply ``a`` to a sequence table at one point."""
    return a.apply(table, at)


# ---------------------------------------------------------------------------
# printing


def _is_negative(c: RatFun) -> bool:
    return c.num.leading_coefficient() < 0


def _monomial_text(alg: OreAlgebra, m) -> str:
    parts = []
    for name, e in zip(alg.polynomial, m[alg.nshift :]):
        if e:
            parts.append(name if e == 1 else f"{name}^{e}")
    for name, e in zip(alg.variables, m[: alg.nshift]):
        if e:
            parts.append(f"S{name}" if e == 1 else f"S{name}^{e}")
    return "*".join(parts)


def _coeff_text(c: RatFun) -> str:
    if c.is_polynomial():
        if len(c.num) == 1:
            return format_poly(c.num)
        return f"({format_poly(c.num)})"
    return str(c)


def format_operator(op: OreOperator) -> str:
    if not op.terms:
        return "0"
    pieces = []
    for m in op.support():
        c = op.terms[m]
        neg = _is_negative(c)
        if neg:
            c = -c
        mtext = _monomial_text(op.algebra, m)
        if c.is_one():
            body = mtext or "1"
        else:
            body = _coeff_text(c) + ("*" + mtext if mtext else "")
        pieces.append((neg, body))
    neg, body = pieces[0]
    text = ("-" if neg else "") + body
    for neg, body in pieces[1:]:
        text += (" - " if neg else " + ") + body
    return text


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(.))")


def _tokenize(text: str):
    pos = 0
    toks = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.end() == pos:
            break
        col = m.start(m.lastindex) + 1 if m.lastindex else pos + 1
        if m.group(1) is not None:
            toks.append(("num", int(m.group(1)), col))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), col))
        elif m.group(3) is not None:
            ch = m.group(3)
            if ch not in "+-*/^()":
                raise OperatorSyntaxError(f"unexpected character {ch!r}", col)
            toks.append((ch, ch, col))
        pos = m.end()
    toks.append(("end", None, len(text) + 1))
    return toks


class _Parser:
    def __init__(self, text: str, algebra: OreAlgebra):
        self.toks = _tokenize(text)
        self.pos = 0
        self.alg = algebra

    def peek(self):
        return self.toks[self.pos]

    def take(self, kind=None):
        tok = self.toks[self.pos]
        if kind is not None and tok[0] != kind:
            what = "end of input" if tok[0] == "end" else repr(tok[1])
            raise OperatorSyntaxError(f"expected {kind!r}, found {what}", tok[2])
        self.pos += 1
        return tok

    def expr(self) -> OreOperator:
        sign = 1
        if self.peek()[0] in "+-" and self.peek()[0] != "end":
            sign = -1 if self.take()[0] == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            t = self.term()
            acc = acc + t if op == "+" else acc - t
        return acc

    def term(self) -> OreOperator:
        acc = self.power()
        while self.peek()[0] in ("*", "/"):
            op, _, col = self.take()
            rhs = self.power()
            if op == "*":
                acc = acc * rhs
            else:
                if set(rhs.terms) - {self.alg.zero_monomial()}:
                    raise OperatorSyntaxError("can only divide by a rational function", col)
                c = rhs.coefficient(self.alg.zero_monomial())
                if not c:
                    raise OperatorSyntaxError("division by zero", col)
                acc = acc * self.alg.coefficient(c.inverse())
        return acc

    def power(self) -> OreOperator:
        base = self.atom()
        if self.peek()[0] == "^":
            _, _, col = self.take()
            tok = self.peek()
            if tok[0] == "-":
                raise OperatorSyntaxError("negative powers are not supported", tok[2])
            if tok[0] == "(":
                self.take()
                if self.peek()[0] == "-":
                    raise OperatorSyntaxError("negative powers are not supported", self.peek()[2])
                e = self.take("num")[1]
                self.take(")")
            else:
                e = self.take("num")[1]
            base = base**e
        return base

    def atom(self) -> OreOperator:
        kind, val, col = self.peek()
        if kind == "num":
            self.take()
            return self.alg.coefficient(val)
        if kind == "name":
            self.take()
            if val in VARIABLES:
                return self.alg.coefficient(QQ.var(val))
            if val.startswith("S") and val[1:] in self.alg.variables:
                return self.alg.shift(val[1:])
            raise OperatorSyntaxError(f"unknown symbol {val!r} for algebra ({self.alg})", col)
        if kind == "(":
            self.take()
            inner = self.expr()
            self.take(")")
            return inner
        what = "end of input" if kind == "end" else repr(val)
        raise OperatorSyntaxError(f"unexpected {what}", col)


def infer_algebra(text: str) -> OreAlgebra:
    names = set()
    for kind, val, _ in _tokenize(text):
        if kind != "name":
            continue
        if val in VARIABLES:
            names.add(val)
        elif val.startswith("S") and val[1:] in VARIABLES:
            names.add(val[1:])
    if not names:
        names = {"n"}
    return OreAlgebra(tuple(v for v in VARIABLES if v in names))


def parse_operator(text: str, algebra: OreAlgebra | None = None) -> OreOperator:
    """Parse operator text such as ``(n+1)*Sn^2 - (4*n+2)*Sn``.

    Factors are multiplied left to right inside the algebra, so ``Sn*n``
    means ``(n+1)*Sn``.  Coefficient variables are always kept in the
    coefficients; :func:`to_polynomial_algebra` moves them into monomials.
    """
    if algebra is None:
        algebra = infer_algebra(text)
    rational = OreAlgebra(algebra.variables)
    p = _Parser(text, rational)
    if p.peek()[0] == "end":
        raise OperatorSyntaxError("empty operator", 1)
    op = p.expr()
    tok = p.peek()
    if tok[0] != "end":
        raise OperatorSyntaxError(f"unexpected {tok[1]!r}", tok[2])
    if algebra.polynomial:
        return to_polynomial_algebra(op, algebra)
    return op


def parse_ratfun(text: str) -> RatFun:
    op = parse_operator(text, OreAlgebra(("n",)))
    extra = set(op.terms) - {(0,)}
    if extra:
        raise OperatorSyntaxError("shift symbol in a rational function")
    return op.coefficient((0,))


# ---------------------------------------------------------------------------
# moving variables between coefficients and monomials


def to_polynomial_algebra(op: OreOperator, target: OreAlgebra) -> OreOperator:
    """Rewrite an operator of the rational algebra over ``target``.

    Coefficients are cleared of denominators in the polynomial variables by
    a left multiplication, then expanded in those variables.
    """
    from .arith import ZZ_CTX, lcm_polys

    if op.algebra.polynomial:
        raise ValueError("source must be a rational algebra")
    if op.algebra.variables != target.variables:
        raise ValueError("variable mismatch")
    pidx = [var_index(v) for v in target.polynomial]
    # denominators must be free of the polynomial variables
    dens = [c.den for c in op.terms.values()]
    den = lcm_polys(dens)
    bad = [d for d in dens if any(d.degrees()[k] for k in pidx)]
    if bad:
        mult = lcm_polys(bad)
        # keep only the part that involves the polynomial variables
        op = op.scale(RatFun(mult))
        den = lcm_polys([c.den for c in op.terms.values()])
    del den
    out: dict = {}
    for m, c in op.terms.items():
        split: dict = {}
        for exp, coeff in c.num.to_dict().items():
            pexp = tuple(int(exp[k]) for k in pidx)
            rest = list(exp)
            for k in pidx:
                rest[k] = 0
            split.setdefault(pexp, {})[tuple(rest)] = coeff
        for pexp, d in split.items():
            cc = RatFun(ZZ_CTX.from_dict(d), c.den)
            mono = tuple(m) + pexp
            s = out.get(mono)
            out[mono] = cc if s is None else s + cc
    return OreOperator(target, out)


def to_rational_algebra(op: OreOperator) -> OreOperator:
    """Inverse of :func:`to_polynomial_algebra`."""
    alg = op.algebra
    rational = OreAlgebra(alg.variables)
    out: dict = {}
    for m, c in op.terms.items():
        x = c
        for name, e in zip(alg.polynomial, m[alg.nshift :]):
            if e:
                x = x * QQ.var(name) ** e
        key = m[: alg.nshift]
        s = out.get(key)
        out[key] = x if s is None else s + x
    return OreOperator(rational, out)


def change_algebra(op: OreOperator, target: OreAlgebra, rename: dict | None = None) -> OreOperator:
    """Embed ``op`` into ``target``; ``rename`` maps old variable names to
    new ones in both the shifts and the coefficients."""
    rename = rename or {}
    src = op.algebra
    if src.polynomial or target.polynomial:
        raise ValueError("change_algebra works on rational algebras only")
    pos = []
    for v in src.variables:
        w = rename.get(v, v)
        if w not in target.variables:
            raise ValueError(f"variable {w} missing in target algebra")
        pos.append(target.variables.index(w))
    images = {v: ZZ_CTX.gens()[var_index(w)] for v, w in rename.items() if v != w}
    out = {}
    for m, c in op.terms.items():
        e = [0] * target.width
        for k, x in zip(pos, m):
            e[k] = x
        out[tuple(e)] = c.compose(images) if images else c
    return OreOperator(target, out, clean=True)


def read_operators(text: str, algebra: OreAlgebra | None = None) -> list:
    """Parse one operator per non-empty, non-comment line."""
    ops = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            ops.append(parse_operator(line, algebra))
        except OperatorSyntaxError as exc:
            col = exc.column
            if col is not None:
                col += len(raw) - len(raw.lstrip())
            msg = str(exc).split(": ", 1)[-1]
            raise OperatorSyntaxError(msg, col, lineno) from None
    return ops


def write_operators(ops) -> str:
    return "".join(f"{op}\n" for op in ops)
