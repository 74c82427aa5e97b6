"""The set A, practical numbers, and the short-interval scans built on them.

A contains 1 and every n = 2^a1 p2^a2 ... pk^ak (p1 = 2 < p2 < ...) in which
each prime is at most the product of the prime powers before it.  A is
contained in the practical numbers, which use the weaker test
p_i <= 1 + sigma(p1^a1 ... p_{i-1}^a_{i-1}).
"""

from __future__ import annotations

import math
import random
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Union

import numpy as np

from .numeric import RationalLike, to_rational
from .sieve import lpf_table, primes_upto, segments, sieve_window

COR5_EXPONENT = Fraction(609, 1250)  # 0.4872
COR5_LOG_POWER = 9.557
SCAN_CUTOFF = 504
CHECKPOINT_EVERY = 10**6


class VerificationError(AssertionError):
    """A proved statement failed on concrete numbers: an implementation bug."""


@dataclass(frozen=True)
class Factorization:
    factors: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"not a canonical factorization: {self.factors}")
            last = p

    @property
    def n(self) -> int:
        return math.prod(p**e for p, e in self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __mul__(self, other: "Factorization") -> "Factorization":
        merged = Counter(dict(self.factors))
        for p, e in other.factors:
            merged[p] += e
        return Factorization(tuple(sorted(merged.items())))


def factorize(n: int) -> Factorization:
    """Trial division by the primes up to isqrt(n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    factors = []
    for p in primes_upto(math.isqrt(n)).tolist():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            factors.append((p, e))
    if n > 1:
        factors.append((n, 1))
    return Factorization(tuple(factors))


IntOrFactors = Union[int, Factorization]


def _factors(n: IntOrFactors) -> Factorization:
    return n if isinstance(n, Factorization) else factorize(n)


def in_A(n: IntOrFactors) -> bool:
    prod = 1
    for p, e in _factors(n):
        if p > prod and not (prod == 1 and p == 2):
            return False
        prod *= p**e
    return True


def is_practical(n: IntOrFactors) -> bool:
    """Stewart-Sierpinski criterion: each p_i <= 1 + sigma of the part below it."""
    sigma = 1
    for p, e in _factors(n):
        if p > sigma + 1:
            return False
        sigma *= (p ** (e + 1) - 1) // (p - 1)
    return True


def omega_tau(n: IntOrFactors) -> tuple[int, int]:
    """(Omega(n), tau(n))."""
    f = _factors(n)
    return sum(e for _, e in f), math.prod(e + 1 for _, e in f)


def membership_table(n_max: int) -> tuple[np.ndarray, np.ndarray]:
    """Boolean arrays (in_A, practical) indexed 0..n_max; index 0 is False."""
    in_a = [np.zeros(1, dtype=bool)]
    practical = [np.zeros(1, dtype=bool)]
    for lo, hi in segments(1, n_max):
        seg = sieve_window(lo, hi, divisors=False, sets=True)
        in_a.append(seg.in_a)
        practical.append(seg.practical)
    return np.concatenate(in_a), np.concatenate(practical)


@dataclass
class LemmaMLReport:
    trials: int
    seed: int
    counterexamples: list[tuple[int, int]]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def lemma_ml_check(trials: int, *, limit: int = 10**6, seed: int = 0,
                   strict: bool = True) -> LemmaMLReport:
    """Sample n in A and m with P(m) <= n, both <= limit, and test mn in A."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    lpf = lpf_table(limit)
    in_a, _ = membership_table(limit)
    members = np.flatnonzero(in_a)
    order = np.argsort(lpf[1:], kind="stable") + 1  # m values sorted by P(m)
    sorted_lpf = lpf[order]
    rng = random.Random(seed)
    bad: list[tuple[int, int]] = []
    for _ in range(trials):
        n = int(members[rng.randrange(len(members))])
        eligible = int(np.searchsorted(sorted_lpf, n, side="right"))
        m = int(order[rng.randrange(eligible)])
        if not in_A(factorize(n) * factorize(m)):
            bad.append((n, m))
    report = LemmaMLReport(trials, seed, bad)
    if strict and bad:
        raise VerificationError(f"m*n not in A for (n, m) = {bad[:5]}")
    return report


@dataclass
class SubsetReport:
    limit: int
    count_a: int
    count_practical: int
    violations: list[int]
    practical_not_a: int | None

    @property
    def ok(self) -> bool:
        return not self.violations


def subset_check(limit: int, *, strict: bool = True) -> SubsetReport:
    """Exhaustively confirm that every member of A up to ``limit`` is practical."""
    if limit < 1:
        raise ValueError("limit must be >= 1")
    in_a, practical = membership_table(limit)
    violations = np.flatnonzero(in_a & ~practical).tolist()
    strict_witness = np.flatnonzero(practical & ~in_a)
    report = SubsetReport(limit, int(in_a.sum()), int(practical.sum()), violations,
                          int(strict_witness[0]) if len(strict_witness) else None)
    if strict and violations:
        raise VerificationError(f"members of A that are not practical: {violations[:10]}")
    return report


@dataclass(frozen=True)
class ScanReport:
    x: int
    interval_lo: float
    count_A: int
    threshold: float
    passed: bool
    left_limit: bool = False  # True: real x just below the integer x


def interval_width(x: int, exponent: Fraction) -> int:
    """floor(x**exponent), exact even when the float lands near an integer."""
    p, q = exponent.numerator, exponent.denominator
    guess = math.floor(x ** float(exponent))

    def fits(d: int) -> bool:
        return d**q <= x**p

    while guess > 0 and not fits(guess):
        guess -= 1
    while fits(guess + 1):
        guess += 1
    return guess


def _widths(xs: np.ndarray, exponent: Fraction) -> np.ndarray:
    approx = xs.astype(np.float64) ** float(exponent)
    widths = np.floor(approx).astype(np.int64)
    near = np.flatnonzero(np.abs(approx - np.rint(approx)) < 1e-6 * np.maximum(approx, 1))
    for i in near.tolist():
        widths[i] = interval_width(int(xs[i]), exponent)
    return widths


def cor5_threshold(x: np.ndarray | float, exponent: Fraction = COR5_EXPONENT,
                   log_power: float = COR5_LOG_POWER) -> np.ndarray | float:
    return x ** float(exponent) * np.log(x) ** (-log_power)


@dataclass
class Cor5Scan:
    x_lo: int
    x_hi: int
    exponent: Fraction
    log_power: float
    failures: list[ScanReport] = field(default_factory=list)
    left_failures: list[ScanReport] = field(default_factory=list)
    scanned: int = 0

    @property
    def largest_failure(self) -> int | None:
        return max((r.x for r in self.failures), default=None)

    def summary(self) -> dict:
        return {
            "range": [self.x_lo, self.x_hi],
            "exponent": str(self.exponent),
            "log_power": self.log_power,
            "failures": [r.x for r in self.failures],
            "largest_failure": self.largest_failure,
            "left_limit_failures": [r.x for r in self.left_failures],
        }


def scan_cor5(x_lo: int, x_hi: int, exponent: RationalLike = COR5_EXPONENT,
              log_power: float = COR5_LOG_POWER, *, block: int = CHECKPOINT_EVERY,
              on_block: Callable[[int], None] | None = None,
              keep_all: bool = False) -> tuple[Cor5Scan, list[ScanReport]]:
    """Count members of A in [x - x^e, x] for each integer x in [x_lo, x_hi].

    A scan row passes when the count reaches max(1, ceil(threshold)).  Real x
    strictly between x - 1 and x are covered by the left limit at x: the
    lower end only moves right, so the count there is the integer count
    minus [x in A], and the threshold is at most max(t(x - 1), t(x)).

    Returns the scan summary and, with ``keep_all``, every per-x row.
    """
    if not 3 <= x_lo <= x_hi:
        raise ValueError("need 3 <= x_lo <= x_hi")
    exponent = to_rational(exponent)
    scan = Cor5Scan(x_lo, x_hi, exponent, log_power)
    rows: list[ScanReport] = []
    for a, b in segments(x_lo, x_hi, block):
        widths = _widths(np.arange(a, b + 1, dtype=np.int64), exponent)
        base = max(1, a - int(widths.max()) - 1)
        seg = sieve_window(base, b, divisors=False, sets=True)
        prefix = np.concatenate(([0], np.cumsum(seg.in_a, dtype=np.int64)))
        xs = np.arange(a, b + 1, dtype=np.int64)
        lows = np.maximum(xs - widths, 1)
        counts = prefix[xs - base + 1] - prefix[lows - base]
        member = seg.in_a[xs - base]
        thresholds = cor5_threshold(xs.astype(np.float64), exponent, log_power)
        prev = cor5_threshold(np.maximum(xs - 1, 2).astype(np.float64), exponent, log_power)
        need = np.maximum(1, np.ceil(thresholds)).astype(np.int64)
        need_left = np.maximum(1, np.ceil(np.maximum(thresholds, prev))).astype(np.int64)
        ok = counts >= need
        left_counts = counts - member
        left_ok = left_counts >= need_left
        interval_lo = xs - xs.astype(np.float64) ** float(exponent)

        idx = range(len(xs)) if keep_all else np.flatnonzero(~ok | ~left_ok).tolist()
        for i in idx:
            row = ScanReport(int(xs[i]), float(interval_lo[i]), int(counts[i]),
                             float(thresholds[i]), bool(ok[i]))
            if keep_all:
                rows.append(row)
            if not ok[i]:
                scan.failures.append(row)
            if not left_ok[i] and xs[i] > x_lo:
                scan.left_failures.append(
                    ScanReport(int(xs[i]), float(interval_lo[i]), int(left_counts[i]),
                               float(max(thresholds[i], prev[i])), False, left_limit=True))
        scan.scanned += len(xs)
        if on_block is not None:
            on_block(b)
    return scan, rows


def icbrt(n: int) -> int:
    """floor(n ** (1/3)) for n >= 0."""
    r = round(n ** (1 / 3))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r


@dataclass
class Theorem2Report:
    x: int
    z: Fraction
    n_values: list[int]
    pairs: list[tuple[int, int, int]]
    multiplicity: Counter
    max_tau: int

    @property
    def products(self) -> list[int]:
        return sorted(self.multiplicity)

    @property
    def pigeonhole_ok(self) -> bool:
        """Distinct products >= pairs / max tau(mn)."""
        return len(self.multiplicity) * max(self.max_tau, 1) >= len(self.pairs)


def theorem2_witnesses(x: int, z: RationalLike) -> Theorem2Report:
    """Pairs (n, m) with n in A, 2x^(1/3) < n <= 3x^(1/3), m in I_n smooth.

    I_n = [(x - z)/n, x/n] and m must be (x/n)^(3/4)-smooth.  Every product
    is re-derived to lie in [x - z, x] and in A through the two cases on
    p = P(m) versus x^(1/3).
    """
    z = to_rational(z)
    if x < 1000 or not 0 < z <= Fraction(x, 2):
        raise ValueError("need x >= 1000 and 0 < z <= x/2")
    n_lo, n_hi = icbrt(8 * x) + 1, icbrt(27 * x)
    n_values = [n for n in range(n_lo, n_hi + 1) if in_A(n)]
    pairs: list[tuple[int, int, int]] = []
    mult: Counter = Counter()
    max_tau = 0
    for n in n_values:
        m_lo = math.ceil((x - z) / n)
        m_hi = x // n
        if m_lo > m_hi:
            continue
        seg = sieve_window(max(m_lo, 1), m_hi, divisors=False)
        for m, p in zip(seg.values.tolist(), seg.lpf.tolist()):
            if p**4 * n**3 > x**3:
                continue
            _check_witness(x, z, n, m, p)
            product = m * n
            pairs.append((n, m, product))
            mult[product] += 1
            max_tau = max(max_tau, omega_tau(product)[1])
    return Theorem2Report(x, z, n_values, pairs, mult, max_tau)


def _check_witness(x: int, z: Fraction, n: int, m: int, p: int) -> None:
    product = m * n
    if not x - z <= product <= x:
        raise VerificationError(f"{n}*{m} outside [x - z, x]")
    if p**3 <= x:
        if p > n:
            raise VerificationError(f"P({m}) = {p} exceeds n = {n}")
    else:
        r = m // p
        if r**3 >= x or not in_A(r * n) or p >= r * n:
            raise VerificationError(f"large-prime case fails for n={n}, m={m}")
    if not in_A(product):
        raise VerificationError(f"{n}*{m} = {product} is not in A")


def practical_by_subset_sum(n: int) -> bool:
    """Literal definition: every m <= n is a sum of distinct divisors of n."""
    if n < 1:
        raise ValueError("n must be >= 1")
    reachable = 1  # bit s set <=> s is a sum of distinct divisors seen so far
    for d in range(1, n + 1):
        if n % d == 0:
            reachable |= reachable << d
    mask = (1 << (n + 1)) - 1
    return reachable & mask == mask


def members_upto(limit: int) -> list[int]:
    in_a, _ = membership_table(limit)
    return np.flatnonzero(in_a).tolist()

