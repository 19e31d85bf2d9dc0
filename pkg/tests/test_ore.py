from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from holotspp.ore import (
    DEGREVLEX,
    OperatorSyntaxError,
    OreAlgebra,
    SingularEvaluation,
    TermOrder,
    change_algebra,
    parse_operator,
    read_operators,
    to_polynomial_algebra,
    to_rational_algebra,
    write_operators,
)

from conftest import JN, N1, operators

ORDERS = [DEGREVLEX, TermOrder("lex"), TermOrder.parse("block(Sj)")]


def seq(p):
    j, n = p
    return Fraction(2**j * 3**n + j * n * n, 1 + j)


def test_commutation_rule():
    Sn = N1.shift("n")
    n = N1("n")
    assert Sn * n == N1("(n+1)*Sn")
    assert str(Sn * n) == "(n+1)*Sn"
    assert str(N1("Sn^2") * N1("n^2")) == "(n^2+4*n+4)*Sn^2"


@given(operators(), operators(), operators())
def test_multiplication_is_associative(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(operators(), operators(), operators())
def test_distributive(a, b, c):
    assert a * (b + c) == a * b + a * c
    assert (a + b) * c == a * c + b * c


@given(operators(), operators())
def test_action_is_compatible_with_product(a, b):
    pt = (3, 4)

    def bf(p):
        return b.apply(seq, p)

    assert (a * b).apply(seq, pt) == a.apply(bf, pt)


@given(operators(), operators(), st.sampled_from(ORDERS))
def test_leading_monomial_is_multiplicative(a, b, order):
    assert (a * b).lm(order) == tuple(x + y for x, y in zip(a.lm(order), b.lm(order)))


@given(operators())
def test_print_parse_round_trip(a):
    text = str(a)
    back = parse_operator(text, JN)
    assert back == a
    assert str(back) == text


def test_canonical_examples():
    op = parse_operator("(n+1)*Sn^2 - (4*n+2)*Sn")
    assert str(op) == "(n+1)*Sn^2 - (4*n+2)*Sn"
    assert str(parse_operator("Sn*n")) == "(n+1)*Sn"
    assert str(parse_operator("Sj*Sn - Sn*Sj + 1/(j+1)*Sj", JN)) == "1/(j+1)*Sj"


@pytest.mark.parametrize(
    "text, column",
    [("Sn^-1", 4), ("Sn +", None), ("Sn ** 2", None), ("2*Sx", None), ("(n+1", None)],
)
def test_syntax_errors(text, column):
    with pytest.raises(OperatorSyntaxError) as exc:
        parse_operator(text, N1)
    if column is not None:
        assert exc.value.column == column


def test_negative_power_message():
    with pytest.raises(OperatorSyntaxError, match="column 4: negative powers are not supported"):
        parse_operator("Sn^-1")


def test_operator_files():
    assert read_operators("") == []
    assert read_operators("# only a comment\n\n") == []
    text = "(n+1)*Sn^2 - (4*n+2)*Sn\nSn - 2\n"
    ops = read_operators(text, N1)
    assert write_operators(ops) == text
    with pytest.raises(OperatorSyntaxError) as exc:
        read_operators("Sn\n  Sn^-1\n", N1)
    assert exc.value.line == 2 and exc.value.column == 6


def test_apply_and_singular_evaluation():
    op = parse_operator("(j+1)*Sj + (j-n)", JN)

    def binom(p):
        from math import comb

        j, n = p
        return comb(n, j) if 0 <= j <= n else 0

    assert all(op.apply(binom, (j, n)) == 0 for j in range(6) for n in range(6))
    with pytest.raises(SingularEvaluation):
        parse_operator("1/(n-2)*Sn", N1).apply(lambda p: 1, (2,))
    with pytest.raises(KeyError):
        parse_operator("Sn", N1).apply({(0,): 1}, (0,))


def test_term_orders():
    a = JN.monomial((2, 0))
    b = JN.monomial((1, 1))
    c = JN.monomial((0, 3))
    op = a + b + c
    assert op.lm(DEGREVLEX) == (0, 3)
    assert op.lm(TermOrder("lex")) == (2, 0)
    assert op.lm(TermOrder.parse("block(Sn)")) == (0, 3)
    with pytest.raises(ValueError):
        op.lm(TermOrder.parse("block(j)"))
    assert TermOrder.parse("block(j)") == TermOrder("block", ("j",))


@given(operators())
def test_polynomial_algebra_round_trip(a):
    palg = OreAlgebra(("j", "n"), ("j",))
    try:
        p = to_polynomial_algebra(a, palg)
    except ValueError:
        return
    assert to_rational_algebra(p) == a


def test_polynomial_algebra_commutation():
    palg = OreAlgebra(("j", "n"), ("j",))
    Sj = palg.shift("j")
    j = palg.monomial((0, 0, 1))
    assert Sj * j == j * Sj + Sj
    assert to_rational_algebra(Sj * j) == JN("(j+1)*Sj")


def test_change_algebra_renames():
    op = JN("(j+1)*Sj - n")
    alg = OreAlgebra(("i", "n"))
    assert change_algebra(op, alg, {"j": "i"}) == alg("(i+1)*Si - n")
