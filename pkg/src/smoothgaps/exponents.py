"""Exponent-pair algebra and the admissible-b envelope.

An exponent pair carries its derivation as a tuple of tokens, outermost
process first and the seed last, so ``("B", "A", "BOURGAIN")`` is
``BA(kappa, lambda)``: apply A to the seed, then B.  Arithmetic treats every
``+eps`` as zero; ``needs_eps`` records whether the value is an infimum.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

from .numeric import RationalLike, cor2_f, to_rational

HALF = Fraction(1, 2)

THETA_BOURGAIN_WATT = Fraction(517, 1648)
THETA_HUXLEY = Fraction(131, 416)

DEFAULT_WORD_LEN = 3
DEFAULT_MAX_HB = 64

SEED_TOKENS = ("BOURGAIN", "TRIVIAL", "CONJECTURE")
_HB_TOKEN = re.compile(r"HB\((\d+)\)")


class InvalidPairError(ValueError):
    """Raised when (k, l) leaves the region 0 <= k <= 1/2 <= l <= 1, k <= l."""


@dataclass(frozen=True)
class ExponentPair:
    k: Fraction
    l: Fraction
    needs_eps: bool = False
    derivation: tuple[str, ...] = ("TRIVIAL",)

    def __post_init__(self) -> None:
        object.__setattr__(self, "k", Fraction(self.k))
        object.__setattr__(self, "l", Fraction(self.l))
        check_pair(self.k, self.l)

    @property
    def word(self) -> str:
        return "".join(self.derivation[:-1])

    @property
    def seed(self) -> str:
        return self.derivation[-1]

    @property
    def label(self) -> str:
        return f"{self.word}({self.seed})" if self.word else self.seed

    def tie_key(self) -> tuple[int, str]:
        return (len(self.word), self.label)

    def __str__(self) -> str:
        eps = "+eps" if self.needs_eps else ""
        return f"{self.label} = ({self.k}{eps}, {self.l}{eps})"


def check_pair(k: Fraction, l: Fraction) -> None:
    if not (0 <= k <= HALF <= l <= 1 and k <= l):
        raise InvalidPairError(f"({k}, {l}) is not in the exponent-pair region")


def a_process(p: ExponentPair) -> ExponentPair:
    """van der Corput A: (k, l) -> (k/(2k+2), (k+l+1)/(2k+2))."""
    den = 2 * p.k + 2
    return ExponentPair(p.k / den, (p.k + p.l + 1) / den, p.needs_eps,
                        ("A",) + p.derivation)


def b_process(p: ExponentPair) -> ExponentPair:
    """van der Corput B: (k, l) -> (l - 1/2, k + 1/2)."""
    k, l = p.l - HALF, p.k + HALF
    if k < 0:
        raise InvalidPairError(f"B-process needs l >= 1/2, got l={p.l}")
    return ExponentPair(k, l, p.needs_eps, ("B",) + p.derivation)


def bourgain_pair() -> ExponentPair:
    return ExponentPair(Fraction(13, 84), Fraction(55, 84), True, ("BOURGAIN",))


def trivial_pair() -> ExponentPair:
    return ExponentPair(Fraction(0), Fraction(1), False, ("TRIVIAL",))


def conjectural_pair() -> ExponentPair:
    """(eps, 1/2 + eps); only used behind an explicit switch."""
    return ExponentPair(Fraction(0), HALF, True, ("CONJECTURE",))


def heath_brown_pair(m: int) -> ExponentPair:
    if m < 3:
        raise ValueError(f"Heath-Brown pairs need m >= 3, got {m}")
    k = Fraction(2, (m - 1) ** 2 * (m + 2))
    l = 1 - Fraction(3 * m - 2, m * (m - 1) * (m + 2))
    return ExponentPair(k, l, True, (f"HB({m})",))


def seed_pair(token: str) -> ExponentPair:
    if token == "BOURGAIN":
        return bourgain_pair()
    if token == "TRIVIAL":
        return trivial_pair()
    if token == "CONJECTURE":
        return conjectural_pair()
    match = _HB_TOKEN.fullmatch(token)
    if match:
        return heath_brown_pair(int(match.group(1)))
    raise ValueError(f"unknown seed {token!r}")


def apply_word(word: str, seed: ExponentPair) -> ExponentPair:
    """Apply processes right to left, so ``"BA"`` means A first, then B."""
    bad = set(word) - {"A", "B"}
    if bad:
        raise ValueError(f"word may only contain A and B, got {''.join(sorted(bad))!r}")
    pair = seed
    for letter in reversed(word):
        pair = a_process(pair) if letter == "A" else b_process(pair)
    return pair


def replay(derivation: Sequence[str]) -> ExponentPair:
    """Rebuild a pair from its derivation tokens."""
    return apply_word("".join(derivation[:-1]), seed_pair(derivation[-1]))


def b_exponent(a: RationalLike, p: ExponentPair) -> Fraction:
    """b(a, k, l) = (l + a(k - l)) / (k + 1)."""
    a = to_rational(a)
    if not 0 <= a <= 1:
        raise ValueError(f"a={a} outside [0, 1]")
    return (p.l + a * (p.k - p.l)) / (p.k + 1)


def beta_exponent(p: ExponentPair) -> Fraction:
    """(5k + l + 2) / (6(k + 1)), the interval exponent for members of A."""
    return (5 * p.k + p.l + 2) / (6 * (p.k + 1))


def crossover_a(m: int) -> Fraction:
    """a_m = 1 - 1/m + (2 - 1/m)/(m^3 + m^2 + 2m - 1)."""
    if m < 2:
        raise ValueError(f"crossover needs m >= 2, got {m}")
    return 1 - Fraction(1, m) + (2 - Fraction(1, m)) / (m**3 + m**2 + 2 * m - 1)


def special_b_closed_form(m: int) -> Fraction:
    return Fraction((m - 1) * (m**3 + m**2 - 3 * m + 2), m**2 * (m**3 - 3 * m + 4))


def special_b(m: int) -> Fraction:
    """b(1 - 1/m, k_m, l_m), checked against its closed form."""
    value = b_exponent(1 - Fraction(1, m), heath_brown_pair(m))
    closed = special_b_closed_form(m)
    if value != closed:
        raise ArithmeticError(f"special b mismatch at m={m}: {value} != {closed}")
    return value


def build_catalog(max_word_len: int = DEFAULT_WORD_LEN, max_hb_m: int = DEFAULT_MAX_HB,
                  *, conjecture: bool = False) -> list[ExponentPair]:
    """Trivial pair, A/B words over the Bourgain pair, and HB(3..max_hb_m).

    Duplicates by (k, l) keep the entry with the smallest tie key.
    """
    if max_word_len < 0:
        raise ValueError("max_word_len must be >= 0")
    candidates = [trivial_pair()]
    if conjecture:
        candidates.append(conjectural_pair())
    seed = bourgain_pair()
    for n in range(max_word_len + 1):
        for letters in itertools.product("AB", repeat=n):
            try:
                candidates.append(apply_word("".join(letters), seed))
            except InvalidPairError:
                continue
    candidates.extend(heath_brown_pair(m) for m in range(3, max_hb_m + 1))

    best: dict[tuple[Fraction, Fraction], ExponentPair] = {}
    for pair in candidates:
        key = (pair.k, pair.l)
        if key not in best or pair.tie_key() < best[key].tie_key():
            best[key] = pair
    return sorted(best.values(), key=ExponentPair.tie_key)


THETA_SOURCE = "THETA"


@dataclass(frozen=True)
class LinearBound:
    """b(a) = intercept + slope * a, from a pair or the flat theta cap."""

    slope: Fraction
    intercept: Fraction
    source: ExponentPair | str

    def __call__(self, a: RationalLike) -> Fraction:
        return self.intercept + self.slope * to_rational(a)

    @property
    def label(self) -> str:
        return self.source if isinstance(self.source, str) else self.source.label

    @property
    def needs_eps(self) -> bool:
        return True if isinstance(self.source, str) else self.source.needs_eps

    def tie_key(self) -> tuple[int, str]:
        if isinstance(self.source, str):
            return (0, self.source)
        return self.source.tie_key()

    @classmethod
    def from_pair(cls, p: ExponentPair) -> "LinearBound":
        return cls(slope=(p.k - p.l) / (p.k + 1), intercept=p.l / (p.k + 1), source=p)

    @classmethod
    def theta(cls, theta: Fraction) -> "LinearBound":
        return cls(slope=Fraction(0), intercept=Fraction(theta), source=THETA_SOURCE)


def best_bound(a: RationalLike, catalog: Iterable[ExponentPair],
               theta: Fraction | None = THETA_BOURGAIN_WATT) -> tuple[Fraction, LinearBound]:
    """min(theta, min_p b(a, p)) with its achieving line."""
    a = to_rational(a)
    if not HALF <= a <= 1:
        raise ValueError(f"a={a} outside [1/2, 1]")
    lines = _lines(catalog, theta)
    if not lines:
        raise ValueError("empty catalog")
    line = min(lines, key=lambda ln: (ln(a), ln.tie_key()))
    return line(a), line


def _lines(catalog: Iterable[ExponentPair], theta: Fraction | None) -> list[LinearBound]:
    lines = [LinearBound.from_pair(p) for p in catalog]
    if theta is not None:
        lines.append(LinearBound.theta(theta))
    return lines


@dataclass(frozen=True)
class Segment:
    a_lo: Fraction
    a_hi: Fraction
    line: LinearBound


@dataclass(frozen=True)
class PiecewiseBound:
    """Lower envelope on [1/2, 1]; ``breakpoints`` are the interior hand-offs."""

    segments: tuple[Segment, ...]
    theta: Fraction | None
    breakpoints: tuple[Fraction, ...] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "breakpoints", tuple(s.a_hi for s in self.segments[:-1]))

    @property
    def pieces(self) -> tuple[LinearBound, ...]:
        return tuple(s.line for s in self.segments)

    def segment_at(self, a: RationalLike) -> Segment:
        a = to_rational(a)
        if not HALF <= a <= 1:
            raise ValueError(f"a={a} outside [1/2, 1]")
        for seg in self.segments:
            if a <= seg.a_hi:
                return seg
        return self.segments[-1]

    def __call__(self, a: RationalLike) -> Fraction:
        return self.segment_at(a).line(a)


def envelope(catalog: Iterable[ExponentPair],
             theta: Fraction | None = THETA_BOURGAIN_WATT,
             lo: Fraction = HALF, hi: Fraction = Fraction(1)) -> PiecewiseBound:
    """Exact lower envelope of theta and every catalog line over [lo, hi]."""
    by_coeffs: dict[tuple[Fraction, Fraction], LinearBound] = {}
    for line in _lines(catalog, theta):
        key = (line.slope, line.intercept)
        if key not in by_coeffs or line.tie_key() < by_coeffs[key].tie_key():
            by_coeffs[key] = line
    lines = list(by_coeffs.values())
    if not lines:
        raise ValueError("empty catalog")

    # Lowest at lo; among ties the steepest descent stays lowest to the right.
    current = min(lines, key=lambda ln: (ln(lo), ln.slope, ln.tie_key()))
    start = lo
    segments: list[Segment] = []
    while True:
        nxt: tuple[Fraction, Fraction, tuple[int, str]] | None = None
        chosen = None
        for line in lines:
            if line.slope >= current.slope:
                continue
            cross = (current.intercept - line.intercept) / (line.slope - current.slope)
            if cross <= start or cross >= hi:
                continue
            key = (cross, line.slope, line.tie_key())
            if nxt is None or key < nxt:
                nxt, chosen = key, line
        if chosen is None:
            segments.append(Segment(start, hi, current))
            break
        segments.append(Segment(start, nxt[0], current))
        start, current = nxt[0], chosen
    return PiecewiseBound(tuple(segments), theta)


def default_envelope(theta: Fraction | None = THETA_BOURGAIN_WATT, *,
                     conjecture: bool = False) -> PiecewiseBound:
    return envelope(build_catalog(conjecture=conjecture), theta)


@dataclass
class Cor2Report:
    """Signs of f(a) - b at the crossover endpoints, plus the low-a check."""

    m_max: int
    margins: list[tuple[int, Fraction, Fraction]]  # (m, a, f(a) - b(a, HB))
    low_a_margins: list[tuple[Fraction, Fraction]]  # envelope breakpoints in [1/2, 3/5]

    @property
    def failures(self) -> list[tuple[int, Fraction, Fraction]]:
        return [row for row in self.margins if row[2] <= 0]

    @property
    def low_a_failures(self) -> list[tuple[Fraction, Fraction]]:
        return [row for row in self.low_a_margins if row[1] <= 0]

    @property
    def ok(self) -> bool:
        return not self.failures and not self.low_a_failures

    @property
    def min_margin(self) -> Fraction:
        return min(row[2] for row in self.margins)


def verify_cor2(m_max: int, theta: Fraction | None = THETA_BOURGAIN_WATT,
                env: PiecewiseBound | None = None) -> Cor2Report:
    """Check b(a, HB(m)) < f(a) at both ends of [a_{m-1}, a_m] for 3 <= m <= m_max.

    f is concave and each b is linear, so the endpoint signs settle every
    interval.  Below a_2 = 3/5 the envelope is compared with f at its own
    breakpoints, which is again enough by concavity.
    """
    if m_max < 2:
        raise ValueError("m_max must be >= 2")
    margins: list[tuple[int, Fraction, Fraction]] = []
    a_prev = crossover_a(2)
    for m in range(3, max(m_max, 3) + 1):
        pair = heath_brown_pair(m)
        a_m = crossover_a(m)
        # the m = 3 left endpoint is the a_2 check of the endpoint scheme
        label = 2 if m == 3 else m
        margins.append((label, a_prev, cor2_f(a_prev) - b_exponent(a_prev, pair)))
        margins.append((m, a_m, cor2_f(a_m) - b_exponent(a_m, pair)))
        a_prev = a_m

    if env is None:
        env = default_envelope(theta)
    cut = crossover_a(2)
    points = [HALF, *(bp for bp in env.breakpoints if HALF < bp < cut), cut]
    low = [(a, cor2_f(a) - env(a)) for a in points]
    return Cor2Report(m_max, margins, low)


def figure1_data(grid_step: RationalLike, env: PiecewiseBound | None = None
                 ) -> list[tuple[Fraction, Fraction, Fraction, Fraction, Fraction]]:
    """Rows (a, envelope, f(a), 1 - a, (1 - a)/2) on a grid over [1/2, 1]."""
    step = to_rational(grid_step)
    if step <= 0:
        raise ValueError("grid_step must be positive")
    if env is None:
        env = default_envelope()
    rows = []
    a = HALF
    while a <= 1:
        rows.append((a, env(a), cor2_f(a), 1 - a, (1 - a) / 2))
        a += step
    if rows[-1][0] != 1:
        rows.append((Fraction(1), env(1), cor2_f(1), Fraction(0), Fraction(0)))
    return rows
