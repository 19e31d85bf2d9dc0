"""Totally symmetric plane partitions and the Okada determinant."""

from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache
from math import comb

from .linalg import bareiss_determinant, solve_fraction
from .report import ProofReport


def binomial(a: int, b: int) -> int:
    """Binomial coefficient for integer ``a`` (possibly negative), ``b >= 0``."""
    if b < 0:
        return 0
    if a >= 0:
        return comb(a, b) if b <= a else 0
    # C(a, b) = (-1)^b C(b - a - 1, b)
    return (-1) ** b * comb(b - a - 1, b)


# ---------------------------------------------------------------------------
# enumeration


def _fundamental_cells(n: int) -> list:
    cells = [(i, j, k) for i in range(1, n + 1) for j in range(i, n + 1) for k in range(j, n + 1)]
    cells.sort(key=lambda c: (sum(c), c))
    return cells


def _lower_covers(cell) -> list:
    out = set()
    for t in range(3):
        c = list(cell)
        c[t] -= 1
        if c[t] >= 1:
            out.add(tuple(sorted(c)))
    return sorted(out)


def count_tspp_bruteforce(n: int) -> int:
    """Number of TSPPs inside ``[0, n]^3``.

    A TSPP is determined by its cells with ``i <= j <= k``; these form an
    order ideal of that fundamental domain.  Ideals are counted by a
    depth-first search that decides cells in a linear extension, so a cell
    can only be added when all its lower covers are present.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    cells = _fundamental_cells(n)
    index = {c: t for t, c in enumerate(cells)}
    cover_idx = [[index[d] for d in _lower_covers(c)] for c in cells]
    chosen = [False] * len(cells)

    def go(pos):
        if pos == len(cells):
            return 1
        total = go(pos + 1)
        if all(chosen[d] for d in cover_idx[pos]):
            chosen[pos] = True
            total += go(pos + 1)
            chosen[pos] = False
        return total

    return go(0)


def plane_partitions(rows: int, cols: int, largest: int):
    """All plane partitions in a ``rows x cols`` box with entries <= largest."""
    cells = [(r, c) for r in range(rows) for c in range(cols)]
    grid = [[0] * cols for _ in range(rows)]

    def go(t):
        if t == len(cells):
            yield tuple(tuple(r) for r in grid)
            return
        r, c = cells[t]
        top = largest
        if r > 0:
            top = min(top, grid[r - 1][c])
        if c > 0:
            top = min(top, grid[r][c - 1])
        for v in range(top + 1):
            grid[r][c] = v
            yield from go(t + 1)
        grid[r][c] = 0

    yield from go(0)


def is_totally_symmetric(pp) -> bool:
    n = len(pp)
    cells = {(i, j, k) for i in range(n) for j in range(n) for k in range(pp[i][j])}
    return all(tuple(c[p] for p in perm) in cells for c in cells for perm in itertools.permutations(range(3)))


def count_tspp_naive(n: int) -> int:
    """Independent count: scan all plane partitions in the cube (small n)."""
    if n == 0:
        return 1
    return sum(1 for pp in plane_partitions(n, n, n) if is_totally_symmetric(pp))


# ---------------------------------------------------------------------------
# product formula


def nice(n: int) -> Fraction:
    """prod over 1 <= i <= j <= k <= n of (i+j+k-1)/(i+j+k-2)."""
    out = Fraction(1)
    for i in range(1, n + 1):
        for j in range(i, n + 1):
            for k in range(j, n + 1):
                out *= Fraction(i + j + k - 1, i + j + k - 2)
    return out


def rising(x, k: int) -> Fraction:
    """Pochhammer symbol (x)_k = x (x+1) ... (x+k-1)."""
    out = Fraction(1)
    x = Fraction(x)
    for t in range(k):
        out *= x + t
    return out


def nice_ratio(n: int) -> Fraction:
    if n < 1:
        raise ValueError("nice_ratio needs n >= 1")
    return (nice(n) / nice(n - 1)) ** 2


def nice_ratio_closed(n: int) -> Fraction:
    """Closed form with rising factorials of the squared product ratio."""
    if n < 1:
        raise ValueError("nice_ratio needs n >= 1")
    num = Fraction(4) ** (1 - n) * (3 * n - 1) ** 2 * rising(2 * n, n - 1) ** 2
    den = (3 * n - 2) ** 2 * rising(Fraction(n, 2), n - 1) ** 2
    return num / den


# ---------------------------------------------------------------------------
# the matrix


def okada_entry(i: int, j: int) -> int:
    return binomial(i + j - 2, i - 1) + binomial(i + j - 1, i) + 2 * (i == j) - (i == j + 1)


def a_prime(n: int, j: int) -> int:
    """Entry without the Kronecker corrections."""
    return binomial(n + j - 2, n - 1) + binomial(n + j - 1, n)


def a_prime_closed(n: int, j: int) -> Fraction:
    return Fraction(2 * n + j - 1, n + j - 1) * binomial(n + j - 1, j - 1)


def okada_matrix(n: int, entry=okada_entry) -> list:
    return [[entry(i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]


def okada_det(n: int, entry=okada_entry) -> Fraction:
    return bareiss_determinant(okada_matrix(n, entry))


def cofactor_B(n: int, j: int, entry=okada_entry) -> Fraction:
    """Signed (n, j) minor divided by the (n-1) determinant."""
    if not 1 <= j <= n:
        raise ValueError("need 1 <= j <= n")
    d = okada_det(n - 1, entry)
    if d == 0:
        raise ZeroDivisionError(f"determinant of size {n - 1} vanishes")
    m = okada_matrix(n, entry)
    minor = [row[: j - 1] + row[j:] for row in m[:-1]]
    return (-1) ** (n + j) * bareiss_determinant(minor) / d


@lru_cache(maxsize=None)
def _b_row(n: int, entry=okada_entry) -> tuple:
    """B(n, 1..n) from the linear system with B(n, n) = 1."""
    if n == 1:
        return (Fraction(1),)
    m = [[entry(i, j) for j in range(1, n)] for i in range(1, n)]
    rhs = [-entry(i, n) for i in range(1, n)]
    return tuple(solve_fraction(m, rhs)) + (Fraction(1),)


def b_value(n: int, j: int, entry=okada_entry) -> Fraction:
    """B(n, j), extended by zero outside ``1 <= j <= n``."""
    if n < 1 or j < 1 or j > n:
        return Fraction(0)
    return _b_row(n, entry)[j - 1]


def b_table(n_max: int, entry=okada_entry) -> dict:
    """``{(j, n): B(n, j)}`` on ``0 <= j <= n_max + 1``, ``0 <= n <= n_max``."""
    return {(j, n): b_value(n, j, entry) for n in range(n_max + 1) for j in range(n_max + 2)}


# ---------------------------------------------------------------------------
# identity checks


def verify_identities(n_max: int, diagonal_failure_max: int = 10, entry=okada_entry, aprime=a_prime,
                      ratio=nice_ratio, corrections=(2, -1)) -> ProofReport:
    """Exact checks of the cofactor identities for every n <= n_max."""
    c0, c1 = corrections
    report = ProofReport()
    for n in range(1, n_max + 1):
        B = [b_value(n, j, entry) for j in range(0, n + 1)]  # B[0] = 0
        report.add("B_nn_is_one", B[n] == 1, n=n)
        for i in range(1, n):
            s = sum(B[j] * entry(i, j) for j in range(1, n + 1))
            report.add("row_orthogonality", s == 0, n=n, i=i)
        if 2 <= n <= diagonal_failure_max:
            s = sum(B[j] * entry(n, j) for j in range(1, n + 1))
            report.add("orthogonality_fails_on_diagonal", s != 0, n=n, i=n)
        rhs = ratio(n)
        s = sum(B[j] * entry(n, j) for j in range(1, n + 1))
        report.add("diagonal_sum", s == rhs, n=n)
        s2 = sum(B[j] * aprime(n, j) for j in range(1, n + 1)) + c0 * B[n] + c1 * B[n - 1]
        report.add("diagonal_sum_without_deltas", s2 == rhs, n=n)
        for i in range(1, n):
            s = sum(B[j] * aprime(i, j) for j in range(1, n + 1))
            report.add("row_orthogonality_without_deltas", s == -c1 * B[i - 1] - c0 * B[i], n=n, i=i)
    return report
