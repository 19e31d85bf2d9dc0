from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from holotspp.groebner import GroebnerBasis, left_groebner_basis, normal_form
from holotspp.guess import (
    GuessFalsified,
    GuessProblem,
    InsufficientData,
    guess_recurrences,
    pascal_structures,
    structure_box,
    verify_guess,
)
from holotspp.table import Region, SequenceTable

from conftest import JN, N1


def binomial_table(size=13):
    region = Region((0, 0), (size - 1, size - 1))
    return SequenceTable.from_function(("j", "n"), lambda j, n: comb(n, j) if j <= n else 0, region)


def _same_ideal(ops, expected):
    G = left_groebner_basis(ops)
    H = left_groebner_basis(expected)
    return G == H


def test_pascal_operators_from_13x13_table():
    table = binomial_table(13)
    found = {}
    for method in ("modular", "exact"):
        ops = []
        for s in pascal_structures(("j", "n")):
            gp = GuessProblem(table, s, 1)
            train, held = gp.split()
            assert len(held) == int(len(gp.usable_points()) * 0.25)
            ops += guess_recurrences(gp, method)
        found[method] = ops
    assert [str(op) for op in found["modular"]] == [str(op) for op in found["exact"]]
    expected = [JN("(j+1)*Sj + (j-n)"), JN("(j-n-1)*Sn + (n+1)")]
    assert _same_ideal(found["modular"], expected)
    assert verify_guess(found["modular"], table)


def test_held_out_points_are_the_largest():
    gp = GuessProblem(binomial_table(6), pascal_structures()[0], 1)
    train, held = gp.split()
    assert max(sum(p) for p in train) <= min(sum(p) for p in held)


def test_univariate_guesses():
    t = SequenceTable.from_function(("n",), lambda n: 2**n, Region((0,), (20,)))
    assert [str(op) for op in guess_recurrences(GuessProblem(t, [(0,), (1,)], 0))] == ["Sn - 2"]
    fib = [0, 1]
    for _ in range(40):
        fib.append(fib[-1] + fib[-2])
    t = SequenceTable.from_function(("n",), lambda n: fib[n], Region((0,), (40,)))
    ops = guess_recurrences(GuessProblem(t, structure_box(1, 2), 0))
    assert [str(op) for op in ops] == ["Sn^2 - Sn - 1"]
    t = SequenceTable.from_function(("n",), lambda n: comb(2 * n, n), Region((0,), (30,)))
    ops = guess_recurrences(GuessProblem(t, structure_box(1, 1), 1))
    assert normal_form(N1("(n+1)*Sn - (4*n+2)"), GroebnerBasis(ops)).is_zero()


@settings(max_examples=15)
@given(st.integers(-5, 5).filter(bool), st.integers(-5, 5).filter(bool))
def test_hypergeometric_guess(a, b):
    # f(n) = a^n * (n + b)^2 style data: first order, degree 2
    t = SequenceTable.from_function(("n",), lambda n: Fraction(a) ** n * (n + b + 20) ** 2, Region((0,), (30,)))
    ops = guess_recurrences(GuessProblem(t, structure_box(1, 1), 2))
    assert len(ops) == 1
    assert verify_guess(ops, t)


def test_insufficient_data():
    t = binomial_table(4)
    with pytest.raises(InsufficientData):
        guess_recurrences(GuessProblem(t, structure_box(2, 2), 3))


def test_falsified_guess():
    def f(n):
        return 2**n if n < 24 else 2**n + 1

    t = SequenceTable.from_function(("n",), f, Region((0,), (30,)))
    with pytest.raises(GuessFalsified):
        guess_recurrences(GuessProblem(t, [(0,), (1,)], 0))


def test_no_recurrence_gives_empty_list():
    import random

    rng = random.Random(5)
    vals = [rng.randint(-1000, 1000) for _ in range(40)]
    t = SequenceTable.from_function(("n",), lambda n: vals[n], Region((0,), (39,)))
    assert guess_recurrences(GuessProblem(t, structure_box(1, 1), 1)) == []


def test_table_text_round_trip(tmp_path):
    t = binomial_table(5)
    path = tmp_path / "t.txt"
    t.write(path)
    back = SequenceTable.read(path)
    assert back.variables == ("j", "n")
    assert all(back[p] == t[p] for p in t.points())
    with pytest.raises(ValueError):
        SequenceTable.loads("1 2 x\n")
