"""Acceptance battery: one test and one PASS/FAIL line per criterion."""

import time
from fractions import Fraction

import pytest

from smoothgaps import checks, exponents, numeric


def report(capsys, number, title, results, limit=None, started=None):
    elapsed = time.perf_counter() - started if started is not None else None
    ok = all(c.passed for c in results)
    if limit is not None and elapsed is not None:
        ok = ok and elapsed < limit
    detail = "; ".join(f"{c.name}={c.actual}" for c in results)
    timing = f" [{elapsed:.2f}s]" if elapsed is not None else ""
    with capsys.disabled():
        print(f"\ncriterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}{timing} :: {detail}")
    assert ok, [c.line() for c in results if not c.passed] or f"over {limit}s"


def test_criterion_01_bounds_table(capsys):
    t = time.perf_counter()
    check = checks.table1_check()
    report(capsys, 1, "bounds table lines and breakpoints", [check], 1.0, t)


def test_criterion_02_beta(capsys):
    got = [c for c in checks.calculus_checks(cor2_m_max=3) if c.name.startswith("beta_")]
    assert len(got) == 2
    report(capsys, 2, "beta exponents 605/1242 and 5/12", got)


def test_criterion_03_constants(capsys):
    got = [c for c in checks.constants_checks() if c.name in ("nu", "u_star", "mu0")]
    assert len(got) == 3
    report(capsys, 3, "nu, u*, mu0 to four decimals", got)


def test_criterion_04_cor2(capsys):
    t = time.perf_counter()
    got = [c for c in checks.calculus_checks() if c.name == "cor2"]
    env = exponents.default_envelope()
    assert numeric.cor2_f(Fraction(3, 5)) > env(Fraction(3, 5))
    report(capsys, 4, "f(a) above every b endpoint for m <= 10^4", got, 10.0, t)


def test_criterion_05_identities(capsys):
    got = [c for c in checks.calculus_checks(cor2_m_max=3) if c.name == "special_and_crossover"]
    report(capsys, 5, "special-value and crossover identities", got)


def test_criterion_06_sieve_oracle(capsys):
    t = time.perf_counter()
    report(capsys, 6, "segmented Psi vs trial division", [checks.sieve_oracle_check()], 30.0, t)


@pytest.mark.slow
def test_criterion_07_fl_window(capsys):
    report(capsys, 7, "sqrt(2x)-smooth number in (x - 3x^(1/4), x], x <= 10^6",
           [checks.fl_check(10**6)])


@pytest.mark.slow
def test_criterion_08_cor5_scan(capsys):
    report(capsys, 8, "A-count scan on [3, 10^6], failures only below 504",
           [checks.cor5_check(10**6)])


@pytest.mark.slow
def test_criterion_09_sets(capsys):
    got = [c for c in checks.sets_checks(scan_limit=3)
           if c.name in ("A_subset_practical", "practical_criterion", "lemma_ml")]
    assert len(got) == 3
    report(capsys, 9, "A within practical numbers, criterion, multiplicative closure", got)


def test_criterion_10_proof_identities(capsys):
    t = time.perf_counter()
    witness = [c for c in checks.sets_checks(subset_limit=1, scan_limit=3, practical_limit=1,
                                              ml_trials=1) if c.name == "theorem2_witnesses"]
    report(capsys, 10, "divisor double count and interval witnesses",
           [checks.s_sum_check(), *witness], 60.0, t)


@pytest.mark.slow
def test_criterion_11_calibrated_regressions(capsys):
    t = time.perf_counter()
    report(capsys, 11, "calibrated psi-sum and tau-moment ratios",
           checks.regression_checks(), 60.0, t)
