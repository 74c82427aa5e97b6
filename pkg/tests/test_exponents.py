import random
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from smoothgaps import exponents as ex
from smoothgaps.exponents import (ExponentPair, InvalidPairError, a_process, apply_word,
                                  b_exponent, b_process, beta_exponent, best_bound,
                                  bourgain_pair, build_catalog, crossover_a, envelope,
                                  heath_brown_pair, special_b, trivial_pair, verify_cor2)

KAPPA = bourgain_pair()
A_KAPPA = a_process(KAPPA)


@pytest.fixture(scope="module")
def catalog():
    return build_catalog()


@pytest.fixture(scope="module")
def env(catalog):
    return envelope(catalog, ex.THETA_BOURGAIN_WATT)


def pair(k, l):
    return ExponentPair(F(k), F(l))


def test_a_process():
    assert (A_KAPPA.k, A_KAPPA.l) == (F(13, 194), F(76, 97))
    assert A_KAPPA.needs_eps and A_KAPPA.derivation == ("A", "BOURGAIN")
    t = a_process(trivial_pair())
    assert (t.k, t.l) == (0, 1)
    aa = a_process(A_KAPPA)
    assert (aa.k, aa.l) == (F(13, 414), F(359, 414))


def test_b_process():
    ba = b_process(A_KAPPA)
    assert (ba.k, ba.l) == (F(55, 194), F(55, 97))
    bb = b_process(b_process(KAPPA))
    assert (bb.k, bb.l) == (KAPPA.k, KAPPA.l)
    fixed = b_process(pair(0, F(1, 2)))
    assert (fixed.k, fixed.l) == (0, F(1, 2))


def test_invalid_pairs_rejected():
    with pytest.raises(InvalidPairError):
        pair(F(3, 5), F(4, 5))
    with pytest.raises(InvalidPairError):
        pair(F(1, 4), F(2, 5))


def test_bourgain_pair():
    assert (KAPPA.k, KAPPA.l, KAPPA.needs_eps) == (F(13, 84), F(55, 84), True)
    assert KAPPA.k < F(1, 2) < KAPPA.l
    line = ex.LinearBound.from_pair(KAPPA)
    assert (line.intercept, line.slope) == (F(55, 97), F(-42, 97))


@pytest.mark.parametrize("m, k, l", [(3, F(1, 10), F(23, 30)), (5, F(1, 56), F(127, 140))])
def test_heath_brown(m, k, l):
    p = heath_brown_pair(m)
    assert (p.k, p.l, p.needs_eps) == (k, l, True)


def test_heath_brown_k_decreasing():
    ks = [heath_brown_pair(m).k for m in range(3, 101)]
    assert all(a > b for a, b in zip(ks, ks[1:]))
    with pytest.raises(ValueError):
        heath_brown_pair(2)


def test_b_exponent_closed_forms():
    a = F(7, 11)
    assert b_exponent(a, trivial_pair()) == 1 - a
    assert b_exponent(a, pair(0, F(1, 2))) == (1 - a) / 2
    assert b_exponent(a, A_KAPPA) == (152 - 139 * a) / 207


@pytest.mark.parametrize("word, intercept, slope", [
    ("BA", F(110, 249), F(-55, 249)), ("", F(55, 97), F(-42, 97)),
    ("A", F(152, 207), F(-139, 207)), ("AA", F(359, 427), F(-346, 427)),
])
def test_table_rows_symbolic(word, intercept, slope):
    line = ex.LinearBound.from_pair(apply_word(word, KAPPA))
    assert (line.intercept, line.slope) == (intercept, slope)


def test_beta():
    assert beta_exponent(A_KAPPA) == F(605, 1242)
    assert beta_exponent(pair(0, F(1, 2))) == F(5, 12)


def test_beta_identity_on_catalog(catalog):
    rng = random.Random(3)
    for p in rng.sample(catalog, 20):
        assert beta_exponent(p) == F(1, 3) + F(2, 3) * b_exponent(F(3, 4), p)


def test_crossover():
    assert crossover_a(2) == F(3, 5)
    assert crossover_a(4) == F(67, 87)
    for m in range(3, 51):
        a = crossover_a(m)
        assert b_exponent(a, heath_brown_pair(m)) == b_exponent(a, heath_brown_pair(m + 1))


def test_special_b():
    closed = F(2 * (27 + 9 - 9 + 2), 9 * (27 - 9 + 4))
    assert closed == F(29, 99)
    assert special_b(3) == F(29, 99)
    assert b_exponent(F(2, 3), pair(F(1, 10), F(23, 30))) == F(29, 99)
    for m in range(3, 1001):
        special_b(m)


def test_catalog_contents(catalog):
    small = build_catalog(2, 30)
    keys = {(p.k, p.l) for p in small}
    for want in [(F(13, 84), F(55, 84)), (F(13, 194), F(76, 97)), (F(55, 194), F(55, 97)),
                 (F(13, 414), F(359, 414))]:
        assert want in keys
    assert sum(1 for p in small if (p.k, p.l) == (0, 1)) == 1
    assert len(keys) == len(small)
    assert (0, F(1, 2)) not in keys
    assert (0, F(1, 2)) in {(p.k, p.l) for p in build_catalog(2, 30, conjecture=True)}


def test_catalog_invariants_and_replay(catalog):
    for p in catalog:
        assert 0 <= p.k <= F(1, 2) <= p.l <= 1 and p.k <= p.l
        q = ex.replay(p.derivation)
        assert (q.k, q.l) == (p.k, p.l)
        assert ex.LinearBound.from_pair(p).slope <= 0
        bb = b_process(b_process(p))
        assert (bb.k, bb.l) == (p.k, p.l)
        a = a_process(p)
        ex.check_pair(a.k, a.l)


def test_best_bound(catalog):
    value, line = best_bound(F(11, 20), catalog)
    assert value == F(517, 1648) and line.label == "THETA"
    value, line = best_bound(F(13, 20), catalog)
    assert value == (55 - 42 * F(13, 20)) / 97 == F(277, 970)
    assert line.label == "BOURGAIN"
    value, line = best_bound(1, catalog)
    kmin = min(p.k for p in catalog)
    assert value == kmin / (kmin + 1)
    with pytest.raises(ValueError):
        best_bound(F(1, 2), [], None)


def test_best_bound_tie_break():
    # two copies of the same line: shorter derivation wins
    p1 = ExponentPair(F(13, 84), F(55, 84), True, ("BOURGAIN",))
    p2 = ExponentPair(F(13, 84), F(55, 84), True, ("B", "B", "BOURGAIN"))
    _, line = best_bound(F(3, 4), [p2, p1], None)
    assert line.label == "BOURGAIN"


def test_envelope_breakpoints(env):
    bps = env.breakpoints
    assert bps[:5] == (F(52547, 90640), F(3025, 5123), F(3359, 4789), F(9409, 12269), F(6143, 7713))
    for m in range(5, 63):
        assert crossover_a(m) in bps


def test_envelope_continuity(env):
    for left, right in zip(env.segments, env.segments[1:]):
        assert left.a_hi == right.a_lo
        assert left.line(left.a_hi) == right.line(right.a_lo)


def test_envelope_is_grid_minimum(env, catalog):
    lines = [ex.LinearBound.from_pair(p) for p in catalog]
    n = 10_000
    for i in range(0, n + 1, 7):
        a = F(1, 2) + F(i, 2 * n)
        v = env(a)
        brute = min([ex.THETA_BOURGAIN_WATT] + [ln(a) for ln in lines])
        assert v == brute


def test_envelope_concave(env):
    grid = [F(500 + i, 1000) for i in range(501)]
    vals = [env(a) for a in grid]
    for i in range(1, len(vals) - 1):
        assert vals[i - 1] - 2 * vals[i] + vals[i + 1] <= 0


def test_deeper_words_do_not_improve(env):
    deeper = envelope(build_catalog(6, ex.DEFAULT_MAX_HB))
    assert [(s.a_hi, s.line.label) for s in deeper.segments] == \
        [(s.a_hi, s.line.label) for s in env.segments]


def test_verify_cor2():
    report = verify_cor2(200)
    assert report.ok
    m3 = [r for r in report.margins if r[0] == 3 and r[1] == crossover_a(3)]
    assert m3 and m3[0][2] > 0
    assert all(margin > 0 for _, margin in report.low_a_margins)


def test_figure1_data(env):
    rows = ex.figure1_data(F(1, 50), env)
    assert rows[0][0] == F(1, 2) and rows[-1][0] == 1
    a, e, f, t, h = rows[0]
    assert (t, h) == (F(1, 2), F(1, 4))
    a, e, f, t, h = rows[-1]
    assert (f, t, h) == (0, 0, 0)
    kmin = min(p.k for p in build_catalog())
    assert e == kmin / (kmin + 1)
    assert all(row[1] <= row[3] for row in rows)


@given(st.fractions(min_value=F(1, 2), max_value=1, max_denominator=10**4))
def test_best_bound_matches_envelope(a):
    value, _ = best_bound(a, build_catalog())
    assert value == ex.default_envelope()(a)
