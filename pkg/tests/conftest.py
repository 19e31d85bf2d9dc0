from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from holotspp.arith import QQ, ZZ_CTX, RatFun, var_index
from holotspp.ore import OreAlgebra, OreOperator

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

JN = OreAlgebra(("j", "n"))
N1 = OreAlgebra(("n",))


def _exp(variables, e):
    out = [0] * 5
    for v, k in zip(variables, e):
        out[var_index(v)] = k
    return tuple(out)


@st.composite
def polys(draw, variables=("j", "n"), max_deg=2, max_terms=3, nonzero=False):
    n = draw(st.integers(1 if nonzero else 0, max_terms))
    terms = {}
    for _ in range(n):
        e = tuple(draw(st.integers(0, max_deg)) for _ in variables)
        terms[_exp(variables, e)] = draw(st.integers(-6, 6).filter(bool))
    p = ZZ_CTX.from_dict(terms) if terms else ZZ_CTX.constant(0)
    if nonzero and p.is_zero():
        p = ZZ_CTX.constant(1)
    return p


@st.composite
def ratfuns(draw, variables=("j", "n"), max_deg=2):
    num = draw(polys(variables, max_deg))
    den = draw(polys(variables, 1, 2, nonzero=True))
    return RatFun(num, den)


@st.composite
def operators(draw, algebra=JN, max_shift=2, max_terms=3, max_deg=1):
    terms = {}
    for _ in range(draw(st.integers(1, max_terms))):
        m = tuple(draw(st.integers(0, max_shift)) for _ in algebra.variables)
        c = draw(polys(algebra.variables, max_deg, 2, nonzero=True))
        terms[m] = RatFun(c)
    return OreOperator(algebra, terms)


def q(x) -> RatFun:
    return QQ(x)


@pytest.fixture
def jn():
    return JN


@pytest.fixture
def n1():
    return N1


def frac_values(f, region):
    return {p: Fraction(f(*p)) for p in region.points()}
