import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from holotspp.caps import CapExceeded, ResourceCaps
from holotspp.catalog import operators as catalog_operators
from holotspp.groebner import (
    GroebnerBasis,
    Insertion,
    UnluckyPoint,
    is_groebner_basis,
    left_groebner_basis,
    modular_normal_form,
    modular_normal_form_retry,
    normal_form,
    normal_form_cached,
    staircase,
    staircase_of,
)
from holotspp.ore import DEGREVLEX, OreAlgebra, TermOrder, divides, parse_operator, to_polynomial_algebra

from conftest import JN, N1, operators

PRIME = 2**31 - 1


def _bases():
    out = {name: left_groebner_basis(catalog_operators(name)) for name in ("pascal", "binom2", "fib", "central")}
    out["pascal_lex"] = left_groebner_basis(catalog_operators("pascal"), TermOrder("lex"))
    out["pascal_block"] = left_groebner_basis(catalog_operators("pascal"), TermOrder.parse("block(Sj)"))
    palg = OreAlgebra(("j", "n"), ("j",))
    out["pascal_poly"] = left_groebner_basis(
        [to_polynomial_algebra(g, palg) for g in out["pascal"].elements], TermOrder.parse("block(j)")
    )
    return out


BASES = _bases()


@pytest.mark.parametrize("name", sorted(BASES))
def test_computed_bases_are_groebner(name):
    G = BASES[name]
    assert is_groebner_basis(G)
    for g in G.elements:
        assert g.lc(G.order).is_one()
        others = [h for h in G.elements if h is not g]
        # reduced: no term of g is divisible by another leading monomial
        assert not any(divides(h.lm(G.order), m) for h in others for m in g.terms)


@pytest.mark.parametrize("name", ["pascal", "binom2", "fib", "central"])
def test_generators_reduce_to_zero(name):
    G = BASES[name]
    for op in catalog_operators(name):
        assert normal_form(op, G).is_zero()


@given(operators(max_shift=3))
def test_normal_form_is_idempotent_and_in_the_ideal_class(p):
    G = BASES["pascal"]
    r = normal_form(p, G)
    assert normal_form(r, G) == r
    assert all(G.reducer(m) is None for m in r.terms)
    assert normal_form(p - r, G).is_zero()
    assert normal_form_cached(p, G) == r


@settings(max_examples=25)
@given(operators(max_shift=1, max_terms=2), operators(max_shift=1, max_terms=2))
def test_random_bases_satisfy_buchberger(a, b):
    try:
        G = left_groebner_basis([a, b], DEGREVLEX, ResourceCaps(seconds=5, max_basis_size=12))
    except CapExceeded:
        assume(False)
    assert is_groebner_basis(G)
    assert normal_form(a, G).is_zero() and normal_form(b, G).is_zero()


def test_small_examples():
    G = left_groebner_basis([parse_operator("Sn - (n+1)", N1)])
    r = normal_form(parse_operator("Sn^2", N1), G)
    assert r == N1("(n+1)*(n+2)")
    assert staircase(BASES["pascal"]).dimension == 1
    assert staircase(BASES["fib"]).dimension == 2


def test_staircase_from_leading_monomials():
    lms = [(4, 0), (3, 1), (2, 2), (1, 3), (0, 4)]
    st_ = staircase_of(lms, 2)
    assert st_.finite and st_.dimension == 10
    assert staircase_of([(1, 1)], 2).finite is False
    assert staircase_of([(0, 0)], 2).dimension == 0


def test_serialization_round_trip():
    G = BASES["binom2"]
    assert GroebnerBasis.loads(G.dumps()) == G


def test_caps_stop_buchberger():
    ops = catalog_operators("binom2")
    with pytest.raises(CapExceeded) as exc:
        left_groebner_basis(ops + [JN("Sj^2*Sn - 1")], DEGREVLEX, ResourceCaps(seconds=1e-9))
    assert exc.value.what == "time"


# ---------------------------------------------------------------------------
# modular normal forms


def _h(op, values, prime):
    h = Insertion(values, prime)
    return h.apply(op)


@settings(max_examples=100)
@given(
    operators(max_shift=3, max_terms=3),
    st.integers(0, 40),
    st.integers(0, 40),
    st.sampled_from(["pascal", "binom2"]),
)
def test_modular_normal_form_matches_image_of_exact(p, n0, j0, name):
    G = BASES[name]
    values = {"n": n0, "j": j0}
    exact = normal_form(p, G)
    try:
        expected = _h(exact, values, PRIME)
        got = modular_normal_form(p, G, values, PRIME)
    except UnluckyPoint:
        assume(False)
    assert got == expected


def test_insertion_only_in_n():
    G = BASES["pascal"]
    p = JN("Sn^2*Sj + j*Sj")
    exact = normal_form(p, G)
    n0, got = modular_normal_form_retry(p, G, 7, PRIME)
    assert got == Insertion({"n": n0}, PRIME).apply(exact)
    # coefficients keep j as a variable
    assert any(c.degree("j") > 0 for c in got.terms.values())


def test_evaluating_before_shifting_is_wrong():
    G = left_groebner_basis([parse_operator("Sn - (n+1)", N1)])
    p = parse_operator("Sn^2", N1)
    right = modular_normal_form(p, G, 5)
    assert right == N1(42)
    # map the basis first, then reduce: the shift no longer acts on n
    Gh = GroebnerBasis([Insertion({"n": 5}).apply(g) for g in G.elements], algebra=N1)
    wrong = normal_form(p, Gh)
    assert wrong == N1(36)
    assert wrong != right


def test_unlucky_point_is_reported():
    G = left_groebner_basis([parse_operator("(n-3)*Sn - 1", N1)])
    with pytest.raises(UnluckyPoint):
        modular_normal_form(parse_operator("Sn^2", N1), G, 2)
