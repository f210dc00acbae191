"""Shared statistical helpers for Monte Carlo assertions."""

from __future__ import annotations

import math


def binomial_se(errors: int, bits: int) -> float:
    """Standard error of an estimated error probability."""
    p = errors / bits
    return math.sqrt(max(p * (1.0 - p), 1.0 / bits ** 2) / bits)


def within_sigmas(errors: int, bits: int, p_true: float, sigmas: float = 3.0) -> bool:
    """Is the measured rate within ``sigmas`` standard errors of p_true?

    The standard error is taken at the true probability, so the
    allowance does not collapse when zero errors are observed.
    """
    se = math.sqrt(p_true * (1.0 - p_true) / bits)
    return abs(errors / bits - p_true) <= sigmas * se


def significantly_below(
    errors_a: int, bits_a: int, errors_b: int, bits_b: int, sigmas: float = 3.0
) -> bool:
    """Is rate A below rate B by more than ``sigmas`` combined SEs?"""
    pa, pb = errors_a / bits_a, errors_b / bits_b
    se = math.sqrt(
        pa * (1.0 - pa) / bits_a + pb * (1.0 - pb) / bits_b
    )
    return pb - pa > sigmas * se


def equal_within_sigmas(
    errors_a: int, bits_a: int, errors_b: int, bits_b: int, sigmas: float = 3.0
) -> bool:
    """Are two measured rates indistinguishable at ``sigmas`` combined SEs?"""
    pa, pb = errors_a / bits_a, errors_b / bits_b
    se = math.sqrt(
        max(pa * (1.0 - pa) / bits_a + pb * (1.0 - pb) / bits_b, 1.0 / (bits_a * bits_b))
    )
    return abs(pb - pa) <= sigmas * se
