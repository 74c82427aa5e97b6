"""Segmented largest-prime-factor sieve and the smooth-number counts built on it.

Every integer in a window ``[lo, hi]`` is factored by dividing out the base
primes up to ``isqrt(hi)``; what is left is 1 or a single prime.  That gives
exact P(n), tau(n) and Omega(n) per element, and, when asked, membership in
the set A and in the practical numbers, because primes are visited in
increasing order and both tests only compare each prime with the part of n
built from smaller primes.

Smoothness against a real cutoff y uses the integer ``floor(y)``: n is
y-smooth iff P(n) <= floor(y).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Union

import numpy as np

from .exponents import THETA_BOURGAIN_WATT, ExponentPair

DEFAULT_SEGMENT = 1 << 20
MAX_BASE_PRIME = 10**8
WORKERS_ENV = "SMOOTHGAPS_WORKERS"


@dataclass(frozen=True)
class Sqrt:
    """The real number sqrt(n), kept exact for floor/ceil comparisons."""

    n: int

    def __post_init__(self) -> None:
        if self.n < 0:
            raise ValueError("negative radicand")

    def __float__(self) -> float:
        return math.sqrt(self.n)

    def __floor__(self) -> int:
        return math.isqrt(self.n)

    def __ceil__(self) -> int:
        r = math.isqrt(self.n)
        return r if r * r == self.n else r + 1

    def __str__(self) -> str:
        return f"sqrt({self.n})"


Real = Union[int, Fraction, float, Sqrt]


def floor_div_real(c: int, y: Real) -> int:
    """floor(c / y) for y > 0, exact for int, Fraction, float and Sqrt."""
    if isinstance(y, Sqrt):
        return math.isqrt(c * c // y.n) if c >= 0 else -ceil_div_real(-c, y)
    return math.floor(Fraction(c) / Fraction(y))


def ceil_div_real(c: int, y: Real) -> int:
    if isinstance(y, Sqrt):
        if c < 0:
            return -floor_div_real(-c, y)
        q = -(-c * c // y.n)
        r = math.isqrt(q)
        return r if r * r == q else r + 1
    return math.ceil(Fraction(c) / Fraction(y))


def smooth_cap(y: Real) -> int:
    if float(y) < 1:
        raise ValueError(f"smoothness bound y={y} must be >= 1")
    return math.floor(y)


def workers_from_env() -> int:
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@lru_cache(maxsize=8)
def primes_upto(n: int) -> np.ndarray:
    """All primes <= n as an int64 array (plain Eratosthenes)."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(n + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags).astype(np.int64)


@dataclass
class SieveSegment:
    """Per-integer tables for ``lo..hi``; index i holds data for ``lo + i``."""

    lo: int
    hi: int
    lpf: np.ndarray
    tau: np.ndarray | None = None
    omega: np.ndarray | None = None
    in_a: np.ndarray | None = None
    practical: np.ndarray | None = None

    @property
    def values(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1, dtype=np.int64)

    def __len__(self) -> int:
        return self.hi - self.lo + 1


def sieve_window(lo: int, hi: int, *, divisors: bool = True,
                 sets: bool = False) -> SieveSegment:
    """Factor every integer in ``[lo, hi]`` against the base primes <= isqrt(hi).

    ``divisors`` adds tau/Omega tables, ``sets`` adds membership flags for A
    and for the practical numbers.
    """
    if lo < 1 or hi < lo:
        raise ValueError(f"bad window [{lo}, {hi}]")
    root = math.isqrt(hi)
    if root > MAX_BASE_PRIME:
        raise ValueError(f"window top {hi} needs base primes beyond {MAX_BASE_PRIME}")
    size = hi - lo + 1
    rem = np.arange(lo, hi + 1, dtype=np.int64)
    lpf = np.ones(size, dtype=np.int64)
    tau = np.ones(size, dtype=np.int64) if divisors else None
    omega = np.zeros(size, dtype=np.int64) if divisors else None
    if sets:
        prod = np.ones(size, dtype=np.int64)  # prime-power part below the current prime
        sig = np.ones(size, dtype=np.int64)  # sigma of that part
        in_a = np.ones(size, dtype=bool)
        practical = np.ones(size, dtype=bool)

    for p in primes_upto(root).tolist():
        first = -(-lo // p) * p
        if first > hi:
            continue
        sl = slice(first - lo, None, p)
        count = (hi - first) // p + 1
        cnt = np.ones(count, dtype=np.int64)
        q0 = first // p
        step = p
        while step * p <= hi:
            off = (-q0) % step
            if off < count:
                cnt[off::step] += 1
            step *= p
        pw = np.power(p, cnt)
        rem[sl] //= pw
        lpf[sl] = p
        if divisors:
            tau[sl] *= cnt + 1
            omega[sl] += cnt
        if sets:
            if p != 2:
                in_a[sl] &= prod[sl] >= p
            practical[sl] &= sig[sl] + 1 >= p
            prod[sl] *= pw
            sig[sl] *= pw + (pw - 1) // (p - 1)

    big = rem > 1
    lpf[big] = rem[big]
    if divisors:
        tau[big] *= 2
        omega[big] += 1
    if sets:
        in_a[big] &= (prod[big] >= rem[big]) | (rem[big] == 2)
        practical[big] &= sig[big] + 1 >= rem[big]
        return SieveSegment(lo, hi, lpf, tau, omega, in_a, practical)
    return SieveSegment(lo, hi, lpf, tau, omega)


def segments(lo: int, hi: int, size: int = DEFAULT_SEGMENT) -> Iterator[tuple[int, int]]:
    if size < 1:
        raise ValueError("segment size must be positive")
    start = lo
    while start <= hi:
        end = min(hi, start + size - 1)
        yield start, end
        start = end + 1


def lpf_table(n: int, segment_size: int = DEFAULT_SEGMENT) -> np.ndarray:
    """Largest prime factor of 0..n (entry 0 is a 0 placeholder, entry 1 is 1)."""
    parts = [np.zeros(1, dtype=np.int64)]
    for lo, hi in segments(1, n, segment_size):
        parts.append(sieve_window(lo, hi, divisors=False).lpf)
    return np.concatenate(parts)


def largest_prime_factor(n: int) -> int:
    """P(n) by trial division; P(1) = 1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    largest = 1
    while n % 2 == 0:
        n //= 2
        largest = 2
    d = 3
    while d * d <= n:
        while n % d == 0:
            n //= d
            largest = d
        d += 2
    return n if n > 1 else largest


@dataclass(frozen=True)
class SmoothCount:
    x: int
    y: Real
    count: int


def _count_smooth(args: tuple[int, int, int]) -> int:
    lo, hi, cap = args
    return int(np.count_nonzero(sieve_window(lo, hi, divisors=False).lpf <= cap))


def _count_windows(lo: int, hi: int, cap: int, segment_size: int, workers: int) -> int:
    jobs = [(a, b, cap) for a, b in segments(lo, hi, segment_size)]
    if workers <= 1 or len(jobs) <= 1:
        return sum(map(_count_smooth, jobs))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(_count_smooth, jobs))


def psi_count(x: int, y: Real, *, segment_size: int = DEFAULT_SEGMENT,
              workers: int | None = None) -> SmoothCount:
    """Psi(x, y) = #{n <= x : P(n) <= y}."""
    if x < 1:
        raise ValueError("x must be >= 1")
    cap = smooth_cap(y)
    if cap >= x:
        return SmoothCount(x, y, x)
    if cap < 2:
        return SmoothCount(x, y, 1)
    workers = workers_from_env() if workers is None else workers
    return SmoothCount(x, y, _count_windows(1, x, cap, segment_size, workers))


def psi_counts_upto(x_max: int, cap: int, lpf: np.ndarray | None = None) -> np.ndarray:
    """Array whose entry x is Psi(x, cap) for 0 <= x <= x_max."""
    if lpf is None:
        lpf = lpf_table(x_max)
    smooth = lpf[: x_max + 1] <= cap
    smooth[0] = False
    return np.cumsum(smooth, dtype=np.int64)


def interval_smooth_count(x: int, z: Real, y: Real, *, segment_size: int = DEFAULT_SEGMENT,
                          workers: int | None = None) -> int:
    """Number of y-smooth n with x - z < n <= x."""
    if not 1 <= float(z) <= x:
        raise ValueError(f"need 1 <= z <= x, got z={z}, x={x}")
    lo = x - math.ceil(z) + 1
    cap = smooth_cap(y)
    if lo > x:
        return 0
    workers = workers_from_env() if workers is None else workers
    return _count_windows(max(lo, 1), x, cap, segment_size, workers)


def sawtooth(t: Real) -> Fraction | float:
    """psi(t) = {t} - 1/2; exact for rational input."""
    if isinstance(t, (int, Fraction)):
        t = Fraction(t)
        return t - math.floor(t) - Fraction(1, 2)
    t = float(t)
    return t - math.floor(t) - 0.5


@dataclass(frozen=True)
class PsiSumReport:
    x: int
    n: int
    value: Fraction
    theta_bound: float
    pair_bound: float | None
    pair: str | None

    @property
    def bound(self) -> float:
        if self.pair_bound is None:
            return self.theta_bound
        return min(self.theta_bound, self.pair_bound)

    @property
    def ratio(self) -> float:
        return abs(float(self.value)) / self.bound


def psi_sum(x: int, n: int, pair: ExponentPair | None = None,
            theta: Fraction = THETA_BOURGAIN_WATT) -> PsiSumReport:
    """Exact sum of psi(x/m) over n <= m <= 2n, with its bound ratio."""
    if n < 1 or n * n > x:
        raise ValueError(f"need 1 <= N <= sqrt(x), got N={n}, x={x}")
    terms = range(n, 2 * n + 1)
    lcm = math.lcm(*terms)
    frac_sum = Fraction(sum((x % m) * (lcm // m) for m in terms), lcm)
    value = frac_sum - Fraction(len(terms), 2)
    theta_bound = x ** float(theta)
    pair_bound = None
    if pair is not None:
        k, l = float(pair.k), float(pair.l)
        pair_bound = x ** (k / (k + 1)) * n ** ((l - k) / (k + 1))
    return PsiSumReport(x, n, value, theta_bound, pair_bound,
                        pair.label if pair is not None else None)


@dataclass(frozen=True)
class SSumReport:
    x: int
    y: Real
    z: Real
    d_lo: int
    d_hi: int
    direct: int
    floor_form: int

    @property
    def agree(self) -> bool:
        return self.direct == self.floor_form

    @property
    def meets_quarter(self) -> bool:
        """S >= z/4, the lower bound the divisor argument needs."""
        if isinstance(self.z, Sqrt):
            return (4 * self.direct) ** 2 >= self.z.n
        return 4 * self.direct >= Fraction(self.z)


def s_sum(x: int, y: Real, z: Real) -> SSumReport:
    """Count pairs (d, n), x/y <= d <= 2x/y, x - z < n <= x, d | n, two ways."""
    if isinstance(y, Sqrt):
        admissible = 2 * x <= y.n <= x * x
    else:
        admissible = 2 * x <= Fraction(y) ** 2 and Fraction(y) <= x
    if not admissible:
        raise ValueError(f"need sqrt(2x) <= y <= x, got y={y}, x={x}")
    if not 0 < float(z) <= x:
        raise ValueError(f"need 0 < z <= x, got z={z}")
    d_lo = ceil_div_real(x, y)
    d_hi = floor_div_real(2 * x, y)
    below = x - math.ceil(z)  # floor(x - z)

    direct = 0
    for d in range(d_lo, d_hi + 1):
        first = (below // d + 1) * d
        for _ in range(first, x + 1, d):
            direct += 1
    floor_form = sum(x // d - below // d for d in range(d_lo, d_hi + 1))
    return SSumReport(x, y, z, d_lo, d_hi, direct, floor_form)


@dataclass(frozen=True)
class TauMoment:
    x: int
    z: int
    u: float
    total: float
    ratio: float


def tau_moment(x: int, z: int, u: float) -> TauMoment:
    """Sum of tau(n)^u over x - z <= n <= x and its ratio to z (log x)^(2^u - 1)."""
    if not 2 <= z <= x:
        raise ValueError(f"need 2 <= z <= x, got z={z}, x={x}")
    total = 0.0
    for lo, hi in segments(max(1, x - z), x):
        tau = sieve_window(lo, hi).tau.astype(np.float64)
        total += float(np.sum(tau**u))
    scale = z * math.log(x) ** (2.0**u - 1.0)
    return TauMoment(x, z, u, total, total / scale)


def fl_window_gap_ok(x: int, gap: int) -> bool:
    """True iff x - gap lies in (x - 3 x^(1/4), x], i.e. gap^4 < 81 x."""
    return 0 <= gap and gap**4 < 81 * x


def fl_construction(x: int, lpf: np.ndarray | None = None) -> tuple[int, int]:
    """Smallest h with m^2 - h^2 in (x - 3x^(1/4), x] and P(m^2 - h^2) <= sqrt(2x).

    ``m = ceil(sqrt(x))``.  Raises LookupError when no h works.
    """
    if x < 1:
        raise ValueError("x must be >= 1")
    m = math.isqrt(x - 1) + 1
    cap = math.isqrt(2 * x)
    excess = m * m - x
    h = 0 if excess <= 0 else math.isqrt(excess - 1) + 1

    def big_factor(v: int) -> int:
        if lpf is not None and v < len(lpf):
            return int(lpf[v])
        return largest_prime_factor(v)

    while h < m:
        value = m * m - h * h
        if not fl_window_gap_ok(x, x - value):
            break
        if big_factor(m - h) <= cap and big_factor(m + h) <= cap:
            return value, h
        h += 1
    raise LookupError(f"no m^2 - h^2 witness for x={x}")


@dataclass
class FLReport:
    x_lo: int
    x_hi: int
    by_construction: int
    by_sieve: int
    failures: list[int]


def fl_scan(x_lo: int, x_hi: int) -> FLReport:
    """Check the 3x^(1/4) window for every integer x in [x_lo, x_hi].

    The m^2 - h^2 construction is tried first; if it finds nothing the window
    itself is searched with the sieve table.
    """
    if not 1 <= x_lo <= x_hi:
        raise ValueError("need 1 <= x_lo <= x_hi")
    small = lpf_table(2 * (math.isqrt(x_hi) + 1) + 1)
    table: np.ndarray | None = None
    built = fallback = 0
    failures: list[int] = []
    for x in range(x_lo, x_hi + 1):
        try:
            fl_construction(x, small)
            built += 1
            continue
        except LookupError:
            pass
        if table is None:
            table = lpf_table(x_hi)
        cap = math.isqrt(2 * x)
        n = x
        found = False
        while n >= 1 and fl_window_gap_ok(x, x - n):
            if table[n] <= cap:
                found = True
                break
            n -= 1
        if found:
            fallback += 1
        else:
            failures.append(x)
    return FLReport(x_lo, x_hi, built, fallback, failures)
