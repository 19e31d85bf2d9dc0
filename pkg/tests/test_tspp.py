from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from holotspp import tspp
from holotspp.linalg import bareiss_determinant
from holotspp.ore import OreAlgebra, parse_operator
from holotspp.pipeline import PROBLEMS, run_binomial_sum_pipeline, run_pipeline
from holotspp.report import OK, SKIPPED

KNOWN_COUNTS = [1, 2, 5, 16, 66, 352, 2431]


def test_bruteforce_counts():
    assert [tspp.count_tspp_bruteforce(n) for n in range(6)] == KNOWN_COUNTS[:6]


@pytest.mark.parametrize("n", range(6))
def test_counts_match_product(n):
    assert tspp.count_tspp_bruteforce(n) == tspp.nice(n)


@pytest.mark.parametrize("n", range(4))
def test_naive_scan_agrees(n):
    assert tspp.count_tspp_naive(n) == tspp.count_tspp_bruteforce(n)


def test_negative_binomial():
    assert tspp.binomial(-1, 3) == -1
    assert tspp.binomial(-2, 2) == 3
    assert tspp.binomial(3, 5) == 0
    assert tspp.binomial(4, -1) == 0


def test_small_values():
    assert tspp.okada_entry(1, 1) == 4
    assert tspp.okada_entry(2, 1) == 1
    assert tspp.okada_det(2) == 25
    assert tspp.cofactor_B(2, 1) == Fraction(-3, 4)
    assert tspp.nice(2) == 5


def test_determinant_is_squared_count():
    for n in range(1, 31):
        assert tspp.okada_det(n) == tspp.nice(n) ** 2


def _laplace(m):
    if len(m) == 1:
        return Fraction(m[0][0])
    return sum((-1) ** c * m[0][c] * _laplace([r[:c] + r[c + 1:] for r in m[1:]]) for c in range(len(m)))


@pytest.mark.parametrize("n", range(1, 7))
def test_bareiss_against_laplace(n):
    m = tspp.okada_matrix(n)
    assert bareiss_determinant(m) == _laplace(m)


@given(st.integers(1, 50), st.integers(1, 50))
def test_aprime_closed_form(n, j):
    assert tspp.a_prime(n, j) == tspp.a_prime_closed(n, j)


@given(st.integers(1, 50), st.integers(1, 50))
def test_entry_is_aprime_plus_corrections(i, j):
    assert tspp.okada_entry(i, j) == tspp.a_prime(i, j) + 2 * (i == j) - (i == j + 1)


def test_ratio_closed_form():
    for n in range(1, 31):
        assert tspp.nice_ratio(n) == tspp.nice_ratio_closed(n)


def test_ratio_recurrence():
    op = parse_operator(PROBLEMS["tspp"].ratio_operator, OreAlgebra(("n",)))
    f = lambda p: tspp.nice_ratio(p[0])  # noqa: E731
    assert all(op.apply(f, (n,)) == 0 for n in range(1, 30))


def test_aprime_certificates():
    for n in range(1, 20):
        for j in range(1, 20):
            a = tspp.a_prime(n, j)
            assert tspp.a_prime(n + 1, j) == a * Fraction((2 * n + j + 1) * (n + j - 1), (2 * n + j - 1) * (n + 1))
            assert tspp.a_prime(n, j + 1) == a * Fraction((2 * n + j) * (n + j - 1), (2 * n + j - 1) * j)


def test_cofactors_agree_with_minors():
    for n in range(1, 8):
        for j in range(1, n + 1):
            assert tspp.b_value(n, j) == tspp.cofactor_B(n, j)


def test_identities_up_to_30():
    report = tspp.verify_identities(30)
    assert report.verdict == "proved"
    names = {c.name for c in report.checks}
    assert {"row_orthogonality", "diagonal_sum", "diagonal_sum_without_deltas",
            "row_orthogonality_without_deltas", "orthogonality_fails_on_diagonal"} <= names


def test_identities_detect_a_wrong_ratio():
    report = tspp.verify_identities(6, ratio=lambda n: tspp.nice_ratio(n) + 1)
    assert report.verdict == "failed"
    assert report.exit_code == 1


def test_pascal_pipeline_proves_everything():
    report = run_pipeline(PROBLEMS["pascal"], 12)
    assert report.verdict == "proved", report.text()
    assert all(c.status == OK for c in report.checks)
    assert report.exit_code == 0


def test_tspp_pipeline_reports_caps():
    report = run_pipeline(PROBLEMS["tspp"], 20)
    status = {c.name: c.status for c in report.checks}
    assert status["pipeline.table"] == OK
    assert status["pipeline.singularities"] == OK
    assert SKIPPED in status.values()
    assert report.exit_code == 3


def test_binomial_sum_pipeline():
    report = run_binomial_sum_pipeline(12)
    assert report.verdict == "proved", report.text()
