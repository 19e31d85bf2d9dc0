from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from holotspp.arith import (
    QQ,
    ModInt,
    RatFun,
    crt_combine,
    default_primes,
    field,
    integer_roots,
    poly_gcd,
    rational_reconstruct,
    reconstruction_bound,
)
from holotspp.ore import parse_ratfun

from conftest import polys, ratfuns

P = default_primes()[0]


def test_default_primes_are_large_distinct_primes():
    ps = default_primes()
    assert len(set(ps)) == len(ps) == 16
    assert all(p < 2**63 for p in ps)
    assert list(ps) == sorted(ps, reverse=True)
    assert ps[0] == 2**63 - 25


@given(st.integers(-(10**8), 10**8), st.integers(1, 10**8))
def test_rational_reconstruction_recovers_small_fractions(a, b):
    x = Fraction(a, b)
    r = x.numerator * pow(x.denominator, -1, P) % P
    assert rational_reconstruct(r, P) == x


def test_rational_reconstruction_examples():
    # 1/2 mod 7 = 4; bound floor(sqrt(3)) = 1 so 1/2 is out of reach
    assert reconstruction_bound(7) == 1
    assert rational_reconstruct(4, 7) is None
    assert rational_reconstruct(51, 101) == Fraction(1, 2)
    assert rational_reconstruct(0, 101) == 0


def test_rational_reconstruction_rejects_bad_input():
    with pytest.raises(ValueError):
        rational_reconstruct(5, 3)


@given(st.lists(st.integers(0, 10**6), min_size=1, max_size=4))
def test_crt_combine(xs):
    ps = default_primes()[: len(xs)]
    r, m = crt_combine(zip(xs, ps))
    assert all(r % p == x % p for x, p in zip(xs, ps))
    assert 0 <= r < m


def test_crt_rejects_common_factors():
    with pytest.raises(ValueError):
        crt_combine([(1, 6), (1, 4)])


@given(st.integers(), st.integers(), st.integers().filter(lambda x: x % 101))
def test_modint_field_ops(a, b, c):
    A, B, C = ModInt(a, 101), ModInt(b, 101), ModInt(c, 101)
    assert int(A + B) == (a + b) % 101
    assert int(A * B) == (a * b) % 101
    assert (A / C) * C == A


def test_integer_roots_of_repeated_factors():
    p = parse_ratfun("(n-3)^2*(n-2)*(n-1)^2*(2*n-3)^2*(2*n-1)").num
    assert integer_roots(p) == {1, 2, 3}
    assert integer_roots(parse_ratfun("n^2+1").num) == set()
    assert integer_roots(parse_ratfun("n*(n+4)").num) == {0, -4}


@given(polys(), polys())
def test_gcd_divides_and_is_normalized(a, b):
    g = poly_gcd(a, b)
    if a.is_zero() and b.is_zero():
        assert g.is_zero()
        return
    assert g.leading_coefficient() > 0
    assert (a % g).is_zero() if not a.is_zero() else True
    _, r = divmod(b, g) if not b.is_zero() else (None, b)
    assert r.is_zero()


def test_gcd_of_zero_is_normalized_other():
    b = parse_ratfun("-2*n-4").num
    assert poly_gcd(QQ.zero.num, b) == -b


@given(ratfuns(), ratfuns(), ratfuns())
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert (a - b) + b == a
    if b:
        assert (a / b) * b == a


@given(ratfuns())
def test_canonical_form(f):
    g = poly_gcd(f.num, f.den)
    assert g.is_one()
    assert f.den.leading_coefficient() > 0


@given(ratfuns())
def test_string_round_trip(f):
    assert parse_ratfun(str(f)) == f


@given(ratfuns(), st.integers(-3, 3), st.integers(-3, 3))
def test_shift_composes(f, a, b):
    def off(j, n):
        return (0, j, 0, 0, n)

    assert f.shift(off(a, b)).shift(off(-a, -b)) == f


def test_shift_and_evaluate():
    f = parse_ratfun("(n+1)/(j+2)")
    assert f.shift((0, 1, 0, 0, 2)) == parse_ratfun("(n+3)/(j+3)")
    assert f({"j": 1, "n": 5}) == Fraction(2)
    with pytest.raises(ZeroDivisionError):
        f({"j": -2, "n": 0})


@given(ratfuns())
def test_modular_image_is_a_homomorphism(f):
    p = 10007
    F = field(p)
    g = f * f + f
    try:
        assert g.to_modular(p) == F(f) * F(f) + F(f)
    except ZeroDivisionError:
        pass


def test_printing_is_readable():
    assert str(parse_ratfun("1/(n+2)")) == "1/(n+2)"
    assert str(parse_ratfun("(n+1)/n")) == "(n+1)/n"
    assert str(QQ(Fraction(3, 4))) == "3/4"
    assert isinstance(QQ("n"), RatFun)


def test_integer_roots_with_large_trailing_coefficient():
    p = parse_ratfun("(n-1000003)*(n+999983)*(n^2+7)").num
    assert integer_roots(p) == {1000003, -999983}


@given(st.lists(st.integers(-10**6, 10**6), min_size=1, max_size=4), st.integers(1, 5))
def test_integer_roots_of_products(roots, k):
    text = "*".join(f"(n - ({r}))" for r in roots) + f"*({k}*n^2 + 1)"
    assert integer_roots(parse_ratfun(text).num) == set(roots)
