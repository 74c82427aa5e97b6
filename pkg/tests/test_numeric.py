from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from smoothgaps import numeric
from smoothgaps.numeric import cor2_f, minimize_nu, nu_objective, rational_arith

rationals = st.fractions(max_denominator=10**6).filter(lambda q: abs(q) < 10**6)


@pytest.mark.parametrize("a, b, op, want", [
    (Fraction(13, 84), Fraction(55, 84), "add", Fraction(17, 21)),
    (Fraction(1, 2), Fraction(0), "mul", Fraction(0)),
    (Fraction(517, 1648), Fraction(131, 416), "cmp", -1),
])
def test_rational_arith_examples(a, b, op, want):
    assert rational_arith(a, b, op) == want


def test_cmp_by_cross_multiplication():
    assert (517 * 416 < 131 * 1648) == (rational_arith(Fraction(517, 1648), Fraction(131, 416), "cmp") < 0)


def test_division_by_zero():
    with pytest.raises(ZeroDivisionError):
        rational_arith(Fraction(1), Fraction(0), "div")


@settings(max_examples=500)
@given(rationals, rationals, st.sampled_from(["add", "sub", "mul", "div"]))
def test_canonical_form(a, b, op):
    if op == "div" and b == 0:
        return
    r = rational_arith(a, b, op)
    assert r.denominator > 0
    from math import gcd
    assert gcd(abs(r.numerator), r.denominator) == 1


@given(rationals, rationals, rationals)
def test_cmp_total_order(a, b, c):
    ab = rational_arith(a, b, "cmp")
    assert ab == -rational_arith(b, a, "cmp")
    if ab <= 0 and rational_arith(b, c, "cmp") <= 0:
        assert rational_arith(a, c, "cmp") <= 0


@pytest.mark.parametrize("text, want", [
    ("0.4872", Fraction(609, 1250)), ("13/84", Fraction(13, 84)), ("7", Fraction(7)),
])
def test_to_rational_exact(text, want):
    assert numeric.to_rational(text) == want


def test_to_rational_refuses_float():
    with pytest.raises(TypeError):
        numeric.to_rational(0.5)


def test_nu_and_minimiser():
    nu, u_star = minimize_nu()
    assert numeric.truncate_decimals(nu, 4) == "2.9882"
    assert numeric.truncate_decimals(u_star, 4) == "2.1080"
    assert nu_objective(2) == 3
    assert nu_objective(u_star - 1e-3) > nu
    assert nu_objective(u_star + 1e-3) > nu
    assert abs(nu_objective(u_star) - nu) < 1e-12


def test_nu_is_global_min_on_random_points():
    import random
    nu, _ = minimize_nu()
    rng = random.Random(1)
    for _ in range(100):
        assert nu_objective(rng.uniform(1 + 1e-9, 50)) >= nu - 1e-8


def test_mu0_and_c():
    consts = numeric.AnalyticConstants.compute()
    assert numeric.truncate_decimals(consts.mu0, 4) == "9.5569"
    assert numeric.truncate_decimals(consts.c_const, 3) == "2.280"
    assert consts.mu0 == pytest.approx(2 * consts.nu + 2 + consts.c_const * 0.6931471805599453)
    assert numeric.mu0() == consts.mu0
    assert numeric.mu0_from(3.0, consts.c_const) == pytest.approx(9.5805, abs=1e-4)


def test_cor2_f_values():
    assert cor2_f(1) == 0
    # 1/2 - 1/16 - (108/25)(1/64)
    assert cor2_f(Fraction(1, 2)) == Fraction(1, 2) - Fraction(1, 16) - Fraction(108, 25) / 64
    assert cor2_f(Fraction(1, 2)) == Fraction(37, 100)


def test_cor2_f_concave_on_grid():
    grid = [Fraction(500 + i, 1000) for i in range(501)]
    values = [cor2_f(a) for a in grid]
    for i in range(1, len(values) - 1):
        assert values[i - 1] - 2 * values[i] + values[i + 1] <= 0


def test_cor2_f_domain():
    with pytest.raises(ValueError):
        cor2_f(Fraction(3, 2))
