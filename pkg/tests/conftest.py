"""Independent brute-force oracles; none of them import the library."""

from __future__ import annotations

import pytest


def naive_factor(n: int) -> list[tuple[int, int]]:
    out = []
    d = 2
    while n > 1:
        e = 0
        while n % d == 0:
            n //= d
            e += 1
        if e:
            out.append((d, e))
        d += 1
        if d * d > n and n > 1:
            out.append((n, 1))
            break
    return out


def naive_lpf(n: int) -> int:
    f = naive_factor(n)
    return f[-1][0] if f else 1


def naive_in_A(n: int) -> bool:
    prod = 1
    for i, (p, e) in enumerate(naive_factor(n)):
        if i == 0 and p != 2:
            return False
        if i > 0 and p > prod:
            return False
        prod *= p**e
    return True


def naive_divisors(n: int) -> list[int]:
    return [d for d in range(1, n + 1) if n % d == 0]


def subset_sums_cover(n: int) -> bool:
    """Every 1..n is a sum of distinct divisors (set-based DP)."""
    sums = {0}
    for d in naive_divisors(n):
        sums |= {s + d for s in sums}
    return all(m in sums for m in range(1, n + 1))


@pytest.fixture(scope="session")
def lpf_small() -> list[int]:
    return [0] + [naive_lpf(n) for n in range(1, 20_001)]


def icbrt(n: int) -> int:
    r = int(round(n ** (1 / 3)))
    while r**3 > n:
        r -= 1
    while (r + 1) ** 3 <= n:
        r += 1
    return r

