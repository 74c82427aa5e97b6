"""Exponent-pair bounds for smooth numbers in short intervals, with sieve checks."""

from .exponents import (ExponentPair, a_process, b_exponent, b_process, beta_exponent,
                        best_bound, bourgain_pair, build_catalog, crossover_a, envelope,
                        heath_brown_pair, special_b, verify_cor2)
from .numeric import AnalyticConstants, cor2_f, minimize_nu, mu0

__version__ = "0.1.0"

__all__ = [
    "AnalyticConstants", "ExponentPair", "a_process", "b_exponent", "b_process",
    "beta_exponent", "best_bound", "bourgain_pair", "build_catalog", "cor2_f",
    "crossover_a", "envelope", "heath_brown_pair", "minimize_nu", "mu0", "special_b",
    "verify_cor2",
]
