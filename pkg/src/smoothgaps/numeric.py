"""Exact rationals and the analytic constants of the smooth-number bounds.

All exact quantities (exponent pairs, bound slopes, breakpoints) are
``fractions.Fraction`` values.  The analytic constants involve Euler's
constant and logarithms, so they live in double precision and never feed
back into the exact code paths.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass
from decimal import ROUND_DOWN, Decimal
from fractions import Fraction
from functools import lru_cache
from typing import Union

import numpy as np
from scipy.optimize import minimize_scalar

Rational = Fraction
RationalLike = Union[Fraction, int, str]

# Coefficient 4.32 of the dominating polynomial f, kept exact.
COR2_COEFF = Fraction(108, 25)

NU_TOL = 1e-8


def to_rational(value: RationalLike) -> Fraction:
    """Parse ``p/q``, an integer or a decimal string exactly.

    Floats are refused: ``0.4872`` must arrive as the string ``"0.4872"``
    so that it becomes 609/1250 and not the nearest binary double.
    """
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass a string or Fraction")
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ValueError("empty rational")
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"not a rational: {value!r}") from exc
    return Fraction(value)


_OPS = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def rational_arith(a: Fraction, b: Fraction, op: str) -> Fraction | int:
    """Apply ``op`` in {add, sub, mul, div, cmp} to two rationals.

    ``cmp`` returns -1, 0 or 1.  Division by zero raises ZeroDivisionError.
    """
    if op == "cmp":
        return (a > b) - (a < b)
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    if op == "div" and b == 0:
        raise ZeroDivisionError(f"{a} / 0")
    return fn(Fraction(a), Fraction(b))


def nu_objective(u: float) -> float:
    """(2^u - 1)/(u - 1), the Hoelder exponent minimised over u > 1."""
    if u <= 1:
        raise ValueError("u must exceed 1")
    return (2.0**u - 1.0) / (u - 1.0)


@lru_cache(maxsize=None)
def minimize_nu() -> tuple[float, float]:
    """Return ``(nu, u_star)``, the minimum of :func:`nu_objective` and its argmin."""
    res = minimize_scalar(
        nu_objective, bracket=(1.5, 2.1, 3.0), method="brent", options={"xtol": 1e-12}
    )
    if not res.success:
        raise RuntimeError(f"nu minimisation failed: {res.message}")
    return float(res.fun), float(res.x)


@dataclass(frozen=True)
class AnalyticConstants:
    nu: float
    u_star: float
    euler_gamma: float
    c_const: float
    mu0: float

    @classmethod
    def compute(cls, nu: float | None = None) -> "AnalyticConstants":
        nu_min, u_star = minimize_nu()
        if nu is None:
            nu = nu_min
        gamma = float(np.euler_gamma)
        c = c_const(gamma)
        return cls(nu=nu, u_star=u_star, euler_gamma=gamma, c_const=c,
                   mu0=mu0_from(nu, c))


def c_const(gamma: float = float(np.euler_gamma)) -> float:
    """C = 1 / (1 - e^{-gamma})."""
    return 1.0 / (1.0 - math.exp(-gamma))


def mu0_from(nu: float, c: float) -> float:
    return 2.0 * nu + 2.0 + c * math.log(2.0)


def mu0() -> float:
    """2*nu + 2 + C*log 2, the log-power loss for members of the set A."""
    return AnalyticConstants.compute().mu0


def cor2_f(a: RationalLike) -> Fraction:
    """f(a) = 1 - a - a(1-a)^3 - 4.32 a(1-a)^5, exactly."""
    a = to_rational(a)
    if not 0 <= a <= 1:
        raise ValueError(f"a={a} outside [0, 1]")
    one_minus = 1 - a
    return one_minus - a * one_minus**3 - COR2_COEFF * a * one_minus**5


def truncate_decimals(value: float, places: int) -> str:
    """Truncate (not round) to ``places`` decimals, as in a printed ``2.9882...``."""
    quantum = Decimal(1).scaleb(-places)
    return str(Decimal(repr(value)).quantize(quantum, rounding=ROUND_DOWN))
