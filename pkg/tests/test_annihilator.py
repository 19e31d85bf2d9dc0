from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holotspp import catalog
from holotspp.annihilator import (
    DFiniteDescription,
    NotDFinite,
    analyze_leading_coefficient,
    annihilates,
    closure_apply_operator,
    closure_diagonal,
    closure_product_hypergeometric,
    closure_rename,
    closure_substitute,
    closure_sum,
    description_from_operators,
    exceptional_points,
    prove_equal,
    univariate_description,
)
from holotspp.groebner import GroebnerBasis, left_groebner_basis, normal_form
from holotspp.ore import OreAlgebra, parse_operator, parse_ratfun
from holotspp.table import Region

from conftest import JN, N1, operators


def binom(n, j):
    return comb(n, j) if 0 <= j <= n else 0


def toy_b(p):
    j, n = p
    return Fraction((-1) ** (n + j) * binom(n - 1, j - 1)) if 1 <= j <= n else Fraction(0)


def toy_description():
    ops = [JN("j*Sj + (n-j)"), JN("(n-j+1)*Sn + n")]
    return description_from_operators(ops, toy_b, name="B")


def test_unrolling_reproduces_values():
    for name in catalog.SEQUENCES:
        D = catalog.description(name)
        f = catalog.value_function(name)
        region = Region((0,) * len(D.variables), (9,) * len(D.variables))
        assert all(D.value(p) == f(p) for p in region.points()), name


def test_toy_cofactor_exceptional_points():
    D = toy_description()
    assert D.exceptional_points == {(1, 0), (1, 1)}
    region = Region((0, 0), (10, 10))
    assert all(D.value(p) == toy_b(p) for p in region.points())


def test_univariate_exceptional_point():
    # (n-2) f(n+1) = (n+1) f(n) for f(n) = C(n, 3): the rule is blind at n = 3
    D = univariate_description(N1("(n-2)*Sn - (n+1)"), lambda p: comb(p[0], 3))
    assert (3,) in D.exceptional_points
    assert [D.value((n,)) for n in range(12)] == [comb(n, 3) for n in range(12)]


def test_reference_leading_coefficient():
    lc = parse_ratfun("(n-3)^2*(n-2)*(n-1)^2*(2*n-3)^2*(2*n-1)*(j+n-1)*(j+n)")
    z = analyze_leading_coefficient(lc, ("j", "n"))
    assert {(0, 0), (1, 0), (0, 1)} <= set(z.points)
    assert set(z.points) == {(0, 0), (1, 0), (0, 1)}
    assert z.lines["n"] == (1, 2, 3)
    assert z.clear_from == (4, 4)


def test_diagonal_gives_central_binomials():
    D = catalog.description("pascal")
    diag = closure_substitute(D, {"j": ({"n": 1}, 0), "n": ({"n": 2}, 0)}, ("n",))
    target = N1("(n+1)*Sn - (4*n+2)")
    for g in diag.basis.elements:
        assert normal_form(g, GroebnerBasis([target])).is_zero()
    assert [diag.value((n,)) for n in range(10)] == [comb(2 * n, n) for n in range(10)]


def test_plain_diagonal_of_binomial_is_one():
    diag = closure_diagonal(catalog.description("pascal"))
    assert [str(g) for g in diag.basis.elements] == ["Sn - 1"]


def test_sum_of_geometric_sequences():
    D = closure_sum(catalog.description("pow2"), catalog.description("pow3"))
    assert D.basis == left_groebner_basis([N1("Sn^2 - 5*Sn + 6")])
    assert [D.value((n,)) for n in range(8)] == [2**n + 3**n for n in range(8)]


@settings(max_examples=20)
@given(operators(max_shift=2, max_terms=2), st.sampled_from(["pascal", "binom2"]))
def test_apply_operator_preserves_annihilation(L, name):
    D = catalog.description(name)
    out = closure_apply_operator(D, L)
    f = catalog.value_function(name)
    region = Region((0, 0), (8, 8))

    def lf(p):
        return L.apply(f, p)

    assert annihilates(out.basis.elements, lf, region)


@given(operators(algebra=N1, max_shift=3, max_terms=3, max_deg=1))
def test_apply_operator_univariate(L):
    D = catalog.description("fib")
    out = closure_apply_operator(D, L)
    f = catalog.value_function("fib")
    assert annihilates(out.basis.elements, lambda p: L.apply(f, p), Region((0,), (20,)))


def test_apply_shift_keeps_fibonacci_basis():
    D = catalog.description("fib")
    out = closure_apply_operator(D, N1("Sn^2"))
    assert out.basis == D.basis
    assert out.value((0,)) == 1 and out.value((5,)) == 13


def test_product_with_hypergeometric_term():
    D = catalog.description("pascal")
    P = closure_product_hypergeometric(D, {"j": parse_ratfun("2")}, lambda j, n: 2**j)
    region = Region((0, 0), (9, 9))
    assert all(P.value(p) == binom(p[1], p[0]) * 2 ** p[0] for p in region.points())


def test_rename_and_offset():
    D = catalog.description("pascal")
    R = closure_rename(D, {"j": "i"}, {"i": -1})
    assert R.variables == ("i", "n")
    assert R.origin == (1, 0)
    assert all(R.value((i, n)) == binom(n, i - 1) for i in range(1, 8) for n in range(8))


def test_prove_equal_detects_equality_and_difference():
    a = closure_sum(catalog.description("pow2"), catalog.description("pow3"))
    b = DFiniteDescription.from_values(
        left_groebner_basis([N1("Sn^2 - 5*Sn + 6")]), lambda p: 2 ** p[0] + 3 ** p[0]
    )
    assert prove_equal(a, b).proved
    c = DFiniteDescription.from_values(left_groebner_basis([N1("Sn^2 - 5*Sn + 6")]), lambda p: 2 ** p[0] + 3 ** p[0] + (p[0] == 1))
    res = prove_equal(a, c)
    assert not res.proved and res.mismatches
    d = catalog.description("central")
    assert not prove_equal(a, d).reduction_ok


def test_infinite_staircase_is_rejected():
    G = left_groebner_basis([JN("Sj - 1")])
    with pytest.raises(NotDFinite):
        DFiniteDescription.from_values(G, lambda p: 1)


def test_missing_initial_values_are_rejected():
    G = left_groebner_basis([N1("Sn^2 - Sn - 1")])
    with pytest.raises(ValueError):
        DFiniteDescription(G, {(0,): 1})


def test_description_round_trip():
    D = toy_description()
    E = DFiniteDescription.loads(D.dumps())
    assert E.basis == D.basis
    assert E.exceptional_points == D.exceptional_points
    assert all(E.value(p) == D.value(p) for p in Region((0, 0), (6, 6)).points())


def test_exceptional_points_of_catalog_pascal():
    assert exceptional_points(catalog.description("pascal")) == set()
