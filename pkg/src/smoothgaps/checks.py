"""Verification batteries shared by ``smoothgaps verify`` and the acceptance tests.

Each battery returns :class:`Check` rows.  Scale knobs default to the desk
scale (10^6 for the exhaustive scans).
"""

from __future__ import annotations

import json
import math
import random
import time
from dataclasses import asdict, dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Callable

import numpy as np

from . import dense, exponents, numeric, sieve
from .exponents import (THETA_BOURGAIN_WATT, LinearBound, a_process, b_exponent,
                        beta_exponent, bourgain_pair, conjectural_pair, crossover_a,
                        heath_brown_pair, special_b_closed_form)

SUITES = ("constants", "calculus", "sieve", "sets")
MARGIN = 10.0


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    anchor: str
    expected: str
    actual: str
    passed: bool
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.suite}/{self.name}: expected {self.expected}; got {self.actual}"

    def as_dict(self) -> dict:
        return asdict(self)


def _timed(fn: Callable[[], tuple[str, bool]]) -> tuple[str, bool, float]:
    start = time.perf_counter()
    actual, ok = fn()
    return actual, ok, time.perf_counter() - start


def decimal_prefix(value: Fraction, places: int) -> str:
    """Truncated decimal expansion of a non-negative rational."""
    scaled = math.floor(value * 10**places)
    whole, frac = divmod(scaled, 10**places)
    return f"{whole}.{frac:0{places}d}"


# --- constants ------------------------------------------------------------

def constants_checks() -> list[Check]:
    consts = numeric.AnalyticConstants.compute()
    out = []
    for name, value, want in (("nu", consts.nu, "2.9882"), ("u_star", consts.u_star, "2.1080"),
                              ("mu0", consts.mu0, "9.5569"), ("C", consts.c_const, "2.280")):
        got = numeric.truncate_decimals(value, len(want.split(".")[1]))
        out.append(Check("constants", name, "log-loss exponents of the smooth-count bounds",
                         want + "...", f"{value!r}", got == want))
    nu, u_star = consts.nu, consts.u_star
    local = min(numeric.nu_objective(u_star - 1e-3), numeric.nu_objective(u_star + 1e-3))
    out.append(Check("constants", "nu_local_min", "g(u*) is the minimum of (2^u-1)/(u-1)",
                     f"g(u* +- 1e-3) > {nu:.10f}", f"{local:.10f}", local > nu))
    swapped = numeric.mu0_from(3.0, consts.c_const)
    out.append(Check("constants", "mu0_nu3", "mu0 sensitivity with nu = 3", "9.5805",
                     f"{swapped:.6f}", numeric.truncate_decimals(swapped, 4) == "9.5805"))
    return out


# --- exponent calculus ----------------------------------------------------

TABLE1_LINES = (
    (Fraction(0), Fraction(517, 1648), "THETA"),
    (Fraction(-55, 249), Fraction(110, 249), "BA(BOURGAIN)"),
    (Fraction(-42, 97), Fraction(55, 97), "BOURGAIN"),
    (Fraction(-139, 207), Fraction(152, 207), "A(BOURGAIN)"),
    (Fraction(-346, 427), Fraction(359, 427), "AA(BOURGAIN)"),
)
TABLE1_PREFIXES = ("0.579", "0.590", "0.701", "0.766", "0.796")


def table1_check() -> Check:
    def run() -> tuple[str, bool]:
        env = exponents.default_envelope(THETA_BOURGAIN_WATT)
        segs = env.segments
        problems = []
        for seg, (slope, intercept, label) in zip(segs, TABLE1_LINES):
            if (seg.line.slope, seg.line.intercept, seg.line.label) != (slope, intercept, label):
                problems.append(f"{label}: got {seg.line.label} {seg.line.slope} {seg.line.intercept}")
        prefixes = tuple(decimal_prefix(seg.a_hi, 3) for seg in segs[:5])
        if prefixes != TABLE1_PREFIXES:
            problems.append(f"breakpoints {prefixes}")
        # HB(5), HB(6), ... handing over exactly at a_5, a_6, ...
        hb = segs[5:-1]
        for i, seg in enumerate(hb):
            m = 5 + i
            if seg.line.label != f"HB({m})":
                problems.append(f"segment {5 + i} is {seg.line.label}, want HB({m})")
                break
            if i + 1 < len(hb) and seg.a_hi != crossover_a(m):
                problems.append(f"HB({m}) ends at {seg.a_hi}, want a_{m}")
                break
        last = segs[-1].line.label
        if last != "TRIVIAL":
            problems.append(f"tail segment {last}")
        summary = (f"{len(segs)} segments, breakpoints {', '.join(map(str, env.breakpoints[:5]))}, "
                   f"HB(5)..HB({4 + len(hb)}), tail {last}")
        return ("; ".join(problems) or summary), not problems

    actual, ok, secs = _timed(run)
    ok = ok and secs < 1.0
    return Check("calculus", "table1", "table of admissible b by a",
                 "5 printed lines, breakpoints 0.579/0.590/0.701/0.766/0.796, then HB(m)",
                 actual, ok, secs)


def calculus_checks(cor2_m_max: int = 10**4) -> list[Check]:
    out = [table1_check()]
    kappa = bourgain_pair()
    a_pair = a_process(kappa)
    beta_a, beta_c = beta_exponent(a_pair), beta_exponent(conjectural_pair())
    out.append(Check("calculus", "beta_A_kappa", "interval exponent for A from A(kappa, lambda)",
                     "605/1242", str(beta_a), beta_a == Fraction(605, 1242)))
    out.append(Check("calculus", "beta_conjecture", "interval exponent under the conjecture",
                     "5/12", str(beta_c), beta_c == Fraction(5, 12)))

    def cor2() -> tuple[str, bool]:
        report = exponents.verify_cor2(cor2_m_max)
        env = exponents.default_envelope()
        at = Fraction(3, 5)
        gap = numeric.cor2_f(at) - env(at)
        ok = report.ok and gap > 0
        return (f"{len(report.margins)} endpoint margins, min {float(report.min_margin):.3e}, "
                f"f(3/5) - envelope(3/5) = {float(gap):.3e}"), ok

    actual, ok, secs = _timed(cor2)
    out.append(Check("calculus", "cor2", "f(a) = 1-a-a(1-a)^3-4.32a(1-a)^5 dominates b",
                     f"all margins > 0 for m <= {cor2_m_max}", actual, ok and secs < 10, secs))

    def identities() -> tuple[str, bool]:
        bad_special = [m for m in range(3, 1001)
                       if b_exponent(1 - Fraction(1, m), heath_brown_pair(m)) != special_b_closed_form(m)]
        bad_cross = [m for m in range(3, 51)
                     if b_exponent(crossover_a(m), heath_brown_pair(m))
                     != b_exponent(crossover_a(m), heath_brown_pair(m + 1))]
        return f"special mismatches {bad_special}, crossover mismatches {bad_cross}", \
            not bad_special and not bad_cross

    actual, ok, secs = _timed(identities)
    out.append(Check("calculus", "special_and_crossover", "b(1-1/m, k_m, l_m) closed form; a_m crossovers",
                     "exact for 3<=m<=1000 and 3<=m<=50", actual, ok and secs < 1.0, secs))

    line = LinearBound.from_pair(a_pair)
    out.append(Check("calculus", "a_kappa_line", "A(kappa, lambda) row", "(152-139a)/207",
                     f"{line.intercept} + ({line.slope})a",
                     (line.intercept, line.slope) == (Fraction(152, 207), Fraction(-139, 207))))
    return out


# --- sieve ----------------------------------------------------------------

def sieve_oracle_check(x_max: int = 10**5, seg: int = 4096) -> Check:
    def run() -> tuple[str, bool]:
        naive = np.array([0] + [sieve.largest_prime_factor(n) for n in range(1, x_max + 1)])
        fast = sieve.lpf_table(x_max, segment_size=seg)
        problems = []
        if not np.array_equal(naive, fast):
            problems.append(f"lpf differs at {np.flatnonzero(naive != fast)[:5].tolist()}")
        xs = np.arange(x_max + 1)
        for cap in (2, 10):
            a = sieve.psi_counts_upto(x_max, cap, fast)
            b = np.cumsum((naive <= cap) & (xs >= 1))
            if not np.array_equal(a, b):
                problems.append(f"Psi(x, {cap}) differs")
        full = sieve.psi_counts_upto(x_max, x_max, fast)
        if not np.array_equal(full, xs):
            problems.append("Psi(x, x) != x")
        # y = sqrt(x): cap isqrt(x) is constant on [t^2, (t+1)^2 - 1]
        for t in range(1, math.isqrt(x_max) + 1):
            lo, hi = t * t, min((t + 1) ** 2 - 1, x_max)
            a = sieve.psi_counts_upto(hi, t, fast)[lo:]
            b = np.cumsum((naive[: hi + 1] <= t) & (xs[: hi + 1] >= 1))[lo:]
            if not np.array_equal(a, b):
                problems.append(f"Psi(x, sqrt x) differs on [{lo}, {hi}]")
                break
        rng = random.Random(6)
        for x in rng.sample(range(1, x_max + 1), 50):
            for y in (2, 10, sieve.Sqrt(x), x):
                want = sum(1 for n in range(1, x + 1) if naive[n] <= math.floor(y))
                if sieve.psi_count(x, y, segment_size=seg).count != want:
                    problems.append(f"psi_count({x}, {y})")
        two = sieve.psi_counts_upto(1 << 16, 2)
        if any(int(two[x]) != x.bit_length() for x in range(1, (1 << 16) + 1)):
            problems.append("Psi(x, 2) != floor(log2 x) + 1")
        return "; ".join(problems) or f"exact on x <= {x_max}", not problems

    actual, ok, secs = _timed(run)
    return Check("sieve", "psi_oracle", "Psi(x, y) by segmented sieve vs trial division",
                 "identical counts", actual, ok and secs < 30, secs)


def fl_check(x_max: int = 10**6) -> Check:
    def run() -> tuple[str, bool]:
        report = sieve.fl_scan(1, x_max)
        return (f"{report.by_construction} by m^2-h^2, {report.by_sieve} by sieve, "
                f"failures {report.failures[:10]}"), not report.failures

    actual, ok, secs = _timed(run)
    return Check("sieve", "fl_explicit", "(x - 3x^(1/4), x] holds a sqrt(2x)-smooth number",
                 f"no failures on [1, {x_max}]", actual, ok, secs)


def s_sum_check(trials: int = 100, seed: int = 10) -> Check:
    def run() -> tuple[str, bool]:
        rng = random.Random(seed)
        mismatches = 0
        for _ in range(trials):
            x = rng.randrange(100, 20_000)
            y = sieve.Sqrt(2 * x) if rng.random() < 0.3 else rng.randrange(math.isqrt(2 * x) + 1, x + 1)
            z = rng.randrange(1, x + 1) if rng.random() < 0.5 else Fraction(rng.randrange(1, 4 * x), 4)
            r = sieve.s_sum(x, y, z)
            mismatches += not r.agree
        big = sieve.s_sum(10**4, sieve.Sqrt(2 * 10**4), 10**3)
        return (f"{mismatches} mismatches; x=10^4 S={big.direct} vs z/4=250"), \
            mismatches == 0 and big.meets_quarter

    actual, ok, secs = _timed(run)
    return Check("sieve", "s_sum", "double count of divisors d in [x/y, 2x/y]",
                 "direct == floor form", actual, ok, secs)


def calibration_path() -> Path:
    return Path(str(resources.files("smoothgaps") / "calibration.json"))


def load_calibration(path: Path | None = None) -> dict[str, float]:
    path = path or calibration_path()
    if not path.exists():
        return {}
    return json.loads(path.read_text())


PSI_GRID = ((10**6, 10), (10**6, 100), (10**6, 1000), (10**7, 100), (10**7, 1000),
            (10**8, 100), (10**8, 1000))
TAU_GRID = ((10**6, 10**4), (10**8, 10**5))
TAU_U = (1.0, 2.108)


def measure_regressions() -> dict[str, float]:
    pair = bourgain_pair()
    found = {}
    for x, n in PSI_GRID:
        found[f"psi_sum:{x}:{n}"] = sieve.psi_sum(x, n, pair).ratio
    for x, z in TAU_GRID:
        for u in TAU_U:
            found[f"tau_moment:{x}:{z}:{u}"] = sieve.tau_moment(x, z, u).ratio
    return found


def regression_checks(path: Path | None = None, record: bool = False) -> list[Check]:
    """Ratios against stored constants; unknown keys are recorded, not judged."""
    path = path or calibration_path()
    stored = load_calibration(path)
    found = measure_regressions()
    out = []
    new = {}
    for key, ratio in found.items():
        if key not in stored:
            new[key] = ratio
            out.append(Check("sieve", key, "calibrated ratio (first run)", "recorded",
                             f"{ratio:.6g}", True))
            continue
        limit = MARGIN * stored[key]
        out.append(Check("sieve", key, "calibrated ratio", f"<= {limit:.6g}", f"{ratio:.6g}",
                         ratio <= limit))
    if new and record:
        path.write_text(json.dumps({**stored, **new}, indent=2, sort_keys=True) + "\n")
    fixed = sieve.psi_sum(10**8, 1000)
    out.append(Check("sieve", "psi_sum_1e8", "|sum| <= 10 x^theta at x=1e8, N=1e3",
                     f"<= {10 * fixed.theta_bound:.4g}", f"{abs(float(fixed.value)):.6g}",
                     abs(float(fixed.value)) <= 10 * fixed.theta_bound))
    tau1 = sieve.tau_moment(10**6, 10**4, 1.0)
    out.append(Check("sieve", "tau_moment_u1", "sum tau / (z log x) at x=1e6, z=1e4",
                     "< 5", f"{tau1.ratio:.6g}", tau1.ratio < 5))
    return out


def sieve_checks(fl_limit: int = 10**6, calibration: Path | None = None) -> list[Check]:
    return [sieve_oracle_check(), fl_check(fl_limit), s_sum_check(),
            *regression_checks(calibration)]


# --- sets -----------------------------------------------------------------

def cor5_check(x_hi: int = 10**6) -> Check:
    def run() -> tuple[str, bool]:
        scan, _ = dense.scan_cor5(3, x_hi)
        fails = [r.x for r in scan.failures]
        ok = bool(fails) and max(fails) < dense.SCAN_CUTOFF
        return f"{len(fails)} failures, largest {scan.largest_failure}", ok

    actual, ok, secs = _timed(run)
    return Check("sets", "cor5_scan", "[x - x^0.4872, x] holds enough members of A for x >= 504",
                 f"failures exist and all < 504 on [3, {x_hi}]", actual, ok, secs)


def sets_checks(subset_limit: int = 10**6, scan_limit: int = 10**6,
                practical_limit: int = 10**4, ml_trials: int = 10**4) -> list[Check]:
    out = []

    def subset() -> tuple[str, bool]:
        r = dense.subset_check(subset_limit, strict=False)
        return (f"|A|={r.count_a}, |practical|={r.count_practical}, violations {r.violations[:5]}, "
                f"first practical outside A: {r.practical_not_a}"), r.ok

    actual, ok, secs = _timed(subset)
    out.append(Check("sets", "A_subset_practical", "A is contained in the practical numbers",
                     f"no violations up to {subset_limit}", actual, ok, secs))

    def criterion() -> tuple[str, bool]:
        bad = [n for n in range(1, practical_limit + 1)
               if dense.is_practical(n) != dense.practical_by_subset_sum(n)]
        return f"mismatches {bad[:5]}", not bad

    actual, ok, secs = _timed(criterion)
    out.append(Check("sets", "practical_criterion", "sigma criterion vs subset-sum definition",
                     f"equal for n <= {practical_limit}", actual, ok, secs))

    def lemma() -> tuple[str, bool]:
        r = dense.lemma_ml_check(ml_trials, strict=False)
        return f"{len(r.counterexamples)} counterexamples in {r.trials} trials", r.ok

    actual, ok, secs = _timed(lemma)
    out.append(Check("sets", "lemma_ml", "n in A and P(m) <= n imply mn in A",
                     "0 counterexamples", actual, ok, secs))
    out.append(cor5_check(scan_limit))

    def witnesses() -> tuple[str, bool]:
        try:
            r = dense.theorem2_witnesses(10**5, 10**3)
        except dense.VerificationError as exc:
            return str(exc), False
        return (f"{len(r.pairs)} pairs from n in {r.n_values}, {len(r.products)} distinct products"), \
            bool(r.pairs) and r.pigeonhole_ok

    actual, ok, secs = _timed(witnesses)
    out.append(Check("sets", "theorem2_witnesses", "products mn from n in A, m in I_n",
                     ">= 1 pair, all in [x-z, x] and in A", actual, ok, secs))
    return out


def run_suite(selection: str = "all", **scale) -> list[Check]:
    if selection not in SUITES + ("all",):
        raise ValueError(f"unknown suite {selection!r}")
    chosen = SUITES if selection == "all" else (selection,)
    out: list[Check] = []
    if "constants" in chosen:
        out += constants_checks()
    if "calculus" in chosen:
        out += calculus_checks()
    if "sieve" in chosen:
        out += sieve_checks(scale.get("fl_limit", 10**6), scale.get("calibration"))
    if "sets" in chosen:
        out += sets_checks(subset_limit=scale.get("subset_limit", 10**6),
                           scan_limit=scale.get("scan_limit", 10**6))
    return out
