"""Exact arithmetic substrate.

Integers and rationals come from Python itself (``int`` and
:class:`fractions.Fraction`).  Multivariate polynomials are python-flint
``fmpz_mpoly`` / ``nmod_mpoly`` objects over one fixed, session-wide
variable list; :class:`RatFun` puts a canonical fraction on top of them.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, reduce

import flint

#: Global variable order.  Every polynomial lives in this ring, so
#: conversions between operator algebras never need a change of ring.
VARIABLES = ("i", "j", "k", "m", "n")
NVARS = len(VARIABLES)

Rat = Fraction
MPoly = flint.fmpz_mpoly

ZZ_CTX = flint.fmpz_mpoly_ctx.get(VARIABLES, "lex")


def var_index(name: str) -> int:
    try:
        return VARIABLES.index(name)
    except ValueError:
        raise KeyError(f"unknown variable {name!r}; known: {', '.join(VARIABLES)}") from None


@lru_cache(maxsize=None)
def _nmod_ctx(p: int):
    return flint.nmod_mpoly_ctx.get(VARIABLES, modulus=p)


def poly_context(modulus: int | None = None):
    return ZZ_CTX if modulus is None else _nmod_ctx(modulus)


# ---------------------------------------------------------------------------
# integers, CRT, rational reconstruction


@dataclass(frozen=True)
class ModInt:
    """Residue class modulo an odd prime."""

    residue: int
    modulus: int

    def __post_init__(self):
        if not 0 <= self.residue < self.modulus:
            object.__setattr__(self, "residue", self.residue % self.modulus)

    def _coerce(self, other) -> int:
        if isinstance(other, ModInt):
            if other.modulus != self.modulus:
                raise ValueError("modulus mismatch")
            return other.residue
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.modulus)
        return int(other)

    def __add__(self, other):
        return ModInt((self.residue + self._coerce(other)) % self.modulus, self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return ModInt((self.residue - self._coerce(other)) % self.modulus, self.modulus)

    def __rsub__(self, other):
        return ModInt((self._coerce(other) - self.residue) % self.modulus, self.modulus)

    def __mul__(self, other):
        return ModInt(self.residue * self._coerce(other) % self.modulus, self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.residue % self.modulus, self.modulus)

    def inverse(self) -> "ModInt":
        return ModInt(pow(self.residue, -1, self.modulus), self.modulus)

    def __truediv__(self, other):
        return self * ModInt(self._coerce(other), self.modulus).inverse()

    def __eq__(self, other):
        if isinstance(other, ModInt):
            return (self.residue, self.modulus) == (other.residue, other.modulus)
        if isinstance(other, int):
            return self.residue == other % self.modulus
        return NotImplemented

    def __hash__(self):
        return hash((self.residue, self.modulus))

    def __int__(self):
        return self.residue

    def __bool__(self):
        return self.residue != 0


def crt_combine(residues):
    """Combine ``[(r1, m1), (r2, m2), ...]`` into ``(r, m1*m2*...)``.

    Raises ValueError if two moduli share a factor.
    """
    residues = list(residues)
    if not residues:
        raise ValueError("empty residue list")
    r, m = residues[0][0] % residues[0][1], residues[0][1]
    for ri, mi in residues[1:]:
        g, s, _ = _xgcd(m, mi)
        if g != 1:
            raise ValueError(f"moduli {m} and {mi} are not coprime")
        # r + m*t ≡ ri (mod mi)  =>  t ≡ (ri - r) * m^{-1}
        t = (ri - r) * s % mi
        r, m = r + m * t, m * mi
        r %= m
    return r, m


def _xgcd(a: int, b: int):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def reconstruction_bound(modulus: int) -> int:
    return math.isqrt((modulus - 1) // 2)


def rational_reconstruct(residue: int, modulus: int) -> Fraction | None:
    """Find a/b ≡ residue (mod modulus) with |a|, b <= floor(sqrt((m-1)/2)).

    Returns None when no such fraction exists (with this symmetric bound
    the answer is unique when it exists).
    """
    if modulus < 2 or not 0 <= residue < modulus:
        raise ValueError("need 0 <= residue < modulus and modulus >= 2")
    bound = reconstruction_bound(modulus)
    r0, r1 = modulus, residue
    s0, s1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        s0, s1 = s1, s0 - q * s1
    if s1 == 0 or abs(s1) > bound:
        return None
    a, b = (r1, s1) if s1 > 0 else (-r1, -s1)
    if math.gcd(a, b) != 1 or math.gcd(b, modulus) != 1:
        return None
    return Fraction(a, b)


def _is_prime(x: int) -> bool:
    return bool(flint.fmpz(x).is_prime())


@lru_cache(maxsize=None)
def default_primes(count: int = 16, bits: int = 63) -> tuple[int, ...]:
    """The ``count`` largest primes below ``2**bits``."""
    out = []
    x = (1 << bits) - 1
    while len(out) < count:
        if _is_prime(x):
            out.append(x)
        x -= 2
    return tuple(out)


# ---------------------------------------------------------------------------
# polynomials


def poly_gcd(a: MPoly, b: MPoly) -> MPoly:
    """gcd over Z[vars], normalised to a positive leading coefficient."""
    if a.is_zero():
        g = b
    elif b.is_zero():
        g = a
    else:
        g = a.gcd(b)
    if not g.is_zero() and g.leading_coefficient() < 0:
        g = -g
    return g


def poly_from_dict(terms: dict, modulus: int | None = None):
    """Build a polynomial from ``{exponent tuple over VARIABLES: int}``."""
    return poly_context(modulus).from_dict({e: c for e, c in terms.items() if c})


def univariate_coefficients(p: MPoly) -> tuple[int, list[int]]:
    """Return ``(variable index, dense coefficient list low→high)``."""
    used = [k for k, d in enumerate(p.degrees()) if d > 0]
    if len(used) > 1:
        raise ValueError(f"polynomial {p} is not univariate")
    k = used[0] if used else NVARS - 1
    deg = p.degrees()[k]
    coeffs = [0] * (deg + 1)
    for exp, c in p.to_dict().items():
        coeffs[exp[k]] += int(c)
    return k, coeffs


def integer_roots(p) -> set[int]:
    """Integer roots of a nonzero univariate polynomial, read off the
    linear factors of its factorization over the integers."""
    if isinstance(p, RatFun):
        if not p.is_polynomial():
            raise ValueError("integer_roots expects a polynomial")
        p = p.num
    if p.is_zero():
        raise ValueError("zero polynomial: every integer is a root")
    _, coeffs = univariate_coefficients(p)
    roots = set()
    for f, _ in flint.fmpz_poly(coeffs).factor()[1]:
        if f.degree() == 1:
            b, a = int(f[0]), int(f[1])
            if b % a == 0:
                roots.add(-b // a)
    return roots


def format_poly(p) -> str:
    """Compact canonical text of a polynomial, e.g. ``4*n+2``."""
    if p.is_zero():
        return "0"
    parts = []
    for exp, c in p.terms():
        c = int(c)
        factors = []
        for name, e in zip(VARIABLES, exp):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = f"{mag}*" + "*".join(factors)
        parts.append((sign, body))
    first_sign, first = parts[0]
    text = ("-" if first_sign == "-" else "") + first
    for sign, body in parts[1:]:
        text += sign + body
    return text


# ---------------------------------------------------------------------------
# rational functions


class RatFun:
    """Canonical fraction num/den of polynomials over Z (or GF(p)).

    Invariants: gcd(num, den) = 1, and den has positive leading coefficient
    (over Z) or is monic (over GF(p)); the lex order on VARIABLES decides
    which term leads.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num, den=None, *, reduced=False):
        ctx = num.context()
        if den is None:
            den = ctx.constant(1)
            reduced = True
        if den.is_zero():
            raise ZeroDivisionError("rational function with zero denominator")
        if not reduced:
            if num.is_zero():
                den = ctx.constant(1)
            elif not den.is_one():
                g = num.gcd(den)
                if not g.is_one():
                    num = num / g
                    den = den / g
        if isinstance(ctx, flint.fmpz_mpoly_ctx):
            if den.leading_coefficient() < 0:
                num, den = -num, -den
        else:
            lc = den.leading_coefficient()
            if int(lc) != 1:
                inv = lc ** -1
                num, den = num * inv, den * inv
        self.num = num
        self.den = den
        self._hash = None

    # construction helpers ---------------------------------------------------
    @property
    def modulus(self) -> int | None:
        ctx = self.num.context()
        return None if isinstance(ctx, flint.fmpz_mpoly_ctx) else ctx.modulus()

    def _lift(self, x) -> "RatFun":
        if isinstance(x, RatFun):
            return x
        return field(self.modulus)(x)

    # arithmetic ------------------------------------------------------------
    def __add__(self, other):
        other = self._lift(other)
        if self.den.is_one() and other.den.is_one():
            return RatFun(self.num + other.num, self.den, reduced=True)
        if self.den == other.den:
            return RatFun(self.num + other.num, self.den)
        return RatFun(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self):
        return RatFun(-self.num, self.den, reduced=True)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        if self.den.is_one() and other.den.is_one():
            return RatFun(self.num * other.num, self.den, reduced=True)
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        n1, d2 = (self.num, other.den) if g1.is_one() else (self.num / g1, other.den / g1)
        n2, d1 = (other.num, self.den) if g2.is_one() else (other.num / g2, self.den / g2)
        return RatFun(n1 * n2, d1 * d2, reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> "RatFun":
        if self.num.is_zero():
            raise ZeroDivisionError("inverse of zero rational function")
        return RatFun(self.den, self.num, reduced=True)

    def __truediv__(self, other):
        return self * self._lift(other).inverse()

    def __rtruediv__(self, other):
        return self._lift(other) * self.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return RatFun(self.num**e, self.den**e, reduced=True)

    def __eq__(self, other):
        if not isinstance(other, RatFun):
            try:
                other = self._lift(other)
            except TypeError:
                return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    def __bool__(self):
        return not self.num.is_zero()

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_one(self) -> bool:
        return self.num.is_one() and self.den.is_one()

    def is_polynomial(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    # substitution ----------------------------------------------------------
    def shift(self, offsets) -> "RatFun":
        """f(v + offsets); ``offsets`` is a tuple over VARIABLES."""
        if not any(offsets):
            return self
        ctx = self.num.context()
        gens = [g + o if o else g for g, o in zip(ctx.gens(), offsets)]
        num = self.num.compose(*gens) if not self.num.is_constant() else self.num
        den = self.den.compose(*gens) if not self.den.is_constant() else self.den
        # translation keeps the lex leading term, so the result is canonical
        return RatFun(num, den, reduced=True)

    def compose(self, images: dict) -> "RatFun":
        """Substitute polynomials for variables: ``{name: polynomial}``."""
        ctx = self.num.context()
        gens = list(ctx.gens())
        for name, img in images.items():
            if isinstance(img, int):
                img = ctx.constant(img)
            gens[var_index(name)] = img
        den = self.den.compose(*gens)
        if den.is_zero():
            raise ZeroDivisionError(f"denominator {self.den} vanishes under substitution")
        return RatFun(self.num.compose(*gens), den)

    def subs(self, values: dict) -> "RatFun":
        """Partial evaluation at integers, ``{name: int}``."""
        if not values:
            return self
        vals = {var_index(k): int(v) for k, v in values.items()}
        den = self.den.subs(vals)
        if den.is_zero():
            raise ZeroDivisionError(f"denominator {self.den} vanishes at {values}")
        return RatFun(self.num.subs(vals), den)

    def __call__(self, point):
        """Full evaluation; ``point`` is a dict ``{name: int}``.

        Over Z the result is a Fraction, over GF(p) an int residue.
        """
        vals = [0] * NVARS
        for k, v in point.items():
            vals[var_index(k)] = v
        d = self.den(*vals)
        if d == 0:
            raise ZeroDivisionError(f"denominator {self.den} vanishes at {point}")
        nv = self.num(*vals)
        if self.modulus is None:
            return Fraction(int(nv), int(d))
        return int(nv) * pow(int(d), -1, self.modulus) % self.modulus

    def to_modular(self, p: int) -> "RatFun":
        ctx = _nmod_ctx(p)
        num = ctx.from_dict({e: int(c) % p for e, c in self.num.to_dict().items() if int(c) % p})
        den = ctx.from_dict({e: int(c) % p for e, c in self.den.to_dict().items() if int(c) % p})
        if den.is_zero():
            raise ZeroDivisionError(f"denominator vanishes modulo {p}")
        return RatFun(num, den)

    # inspection ------------------------------------------------------------
    def degree(self, name: str) -> int:
        k = var_index(name)
        return max(self.num.degrees()[k], self.den.degrees()[k])

    def variables(self) -> set[str]:
        used = set()
        for p in (self.num, self.den):
            used.update(VARIABLES[k] for k, d in enumerate(p.degrees()) if d > 0)
        return used

    def constant_value(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not constant")
        return self({})

    def __str__(self):
        if self.den.is_one():
            return format_poly(self.num)
        num = format_poly(self.num)
        if len(self.num) > 1:
            num = f"({num})"
        den = format_poly(self.den)
        if not self.den.is_constant() and not re.fullmatch(r"[a-z](\^\d+)?", den):
            den = f"({den})"
        return f"{num}/{den}"

    def __repr__(self):
        return f"RatFun({self})"


class RationalFunctionField:
    """Factory for :class:`RatFun` over Q or GF(p)."""

    def __init__(self, modulus: int | None = None):
        self.modulus = modulus
        self.ctx = poly_context(modulus)
        self.zero = RatFun(self.ctx.constant(0))
        self.one = RatFun(self.ctx.constant(1))

    def __call__(self, x) -> RatFun:
        if isinstance(x, RatFun):
            if x.modulus == self.modulus:
                return x
            if x.modulus is None:
                return x.to_modular(self.modulus)
            raise TypeError("cannot lift a modular rational function")
        if isinstance(x, (bool, flint.fmpz)):
            x = int(x)
        if isinstance(x, int):
            return RatFun(self.ctx.constant(x % self.modulus if self.modulus else x))
        if isinstance(x, Fraction):
            if self.modulus:
                return RatFun(self.ctx.constant(x.numerator * pow(x.denominator, -1, self.modulus) % self.modulus))
            return RatFun(self.ctx.constant(x.numerator), self.ctx.constant(x.denominator))
        if isinstance(x, ModInt):
            return self(x.residue)
        if isinstance(x, (flint.fmpz_mpoly, flint.nmod_mpoly)):
            return RatFun(x)
        if isinstance(x, str):
            from .ore import parse_ratfun

            return self(parse_ratfun(x))
        raise TypeError(f"cannot convert {type(x).__name__} to a rational function")

    def var(self, name: str) -> RatFun:
        return RatFun(self.ctx.gens()[var_index(name)])

    def gens(self) -> dict[str, RatFun]:
        return {name: self.var(name) for name in VARIABLES}


@lru_cache(maxsize=None)
def field(modulus: int | None = None) -> RationalFunctionField:
    return RationalFunctionField(modulus)


QQ = field(None)


def lcm_polys(polys) -> MPoly:
    def lcm2(a, b):
        return a * b / a.gcd(b)

    return reduce(lcm2, polys, ZZ_CTX.constant(1))


def primitive_polynomials(coeffs: list[RatFun]) -> list[MPoly]:
    """Scale rational functions by one common factor so they become
    coprime integer polynomials (content removed, first nonzero of the
    scaled list keeps its sign)."""
    nonzero = [c for c in coeffs if c]
    if not nonzero:
        return [ZZ_CTX.constant(0) for _ in coeffs]
    den = lcm_polys([c.den for c in nonzero])
    nums = [(c.num * (den / c.den)) if c else ZZ_CTX.constant(0) for c in coeffs]
    g = reduce(lambda a, b: a.gcd(b), [p for p in nums if not p.is_zero()])
    if g.leading_coefficient() < 0:
        g = -g
    return [p / g if not p.is_zero() else p for p in nums]
