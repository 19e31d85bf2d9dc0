"""Small named sequences with known annihilators, used by the CLI and tests."""

from __future__ import annotations

from fractions import Fraction
from math import comb

from .annihilator import DFiniteDescription, description_from_operators
from .ore import OreAlgebra, parse_operator


def _binom(n, j):
    return comb(n, j) if 0 <= j <= n else 0


def _fib(n):
    a, b = 0, 1
    for _ in range(n):
        a, b = b, a + b
    return a


# name: (variables, operators, value function)
SEQUENCES = {
    "pascal": (("j", "n"), ["(j+1)*Sj + (j-n)", "(j-n-1)*Sn + (n+1)"], lambda j, n: _binom(n, j)),
    "binom2": (("j", "n"), ["(j+1)^2*Sj - (j-n)^2", "(j-n-1)^2*Sn - (n+1)^2"], lambda j, n: _binom(n, j) ** 2),
    "pow2": (("n",), ["Sn - 2"], lambda n: 2**n),
    "pow3": (("n",), ["Sn - 3"], lambda n: 3**n),
    "fib": (("n",), ["Sn^2 - Sn - 1"], _fib),
    "central": (("n",), ["(n+1)*Sn - (4*n+2)"], lambda n: comb(2 * n, n)),
}


def value_function(name: str):
    """Values as a function of the point, in the order of the variables."""
    _, _, f = SEQUENCES[name]
    return lambda p: Fraction(f(*p))


def operators(name: str) -> list:
    variables, ops, _ = SEQUENCES[name]
    alg = OreAlgebra(variables)
    return [parse_operator(t, alg) for t in ops]


def description(name: str) -> DFiniteDescription:
    if name not in SEQUENCES:
        raise KeyError(f"unknown sequence {name!r}; known: {', '.join(sorted(SEQUENCES))}")
    return description_from_operators(operators(name), value_function(name), name=name)
