"""Shared result container for the evaluation routes."""

from __future__ import annotations

from dataclasses import dataclass

__all__ = ["EvalResult"]

METHODS = ("contour-i", "contour-ii", "contour-iii", "series", "sphere-mc")


@dataclass(frozen=True)
class EvalResult:
    """Value of an evaluation together with its diagnostics.

    err_estimate is an absolute error scale (quadrature doubling gap, series
    tail magnitude, or Monte Carlo standard error depending on the method);
    effort counts integrand evaluations, series terms, or samples.
    """

    value: complex
    err_estimate: float
    method: str
    effort: int

    def __post_init__(self):
        if self.err_estimate < 0:
            raise ValueError("err_estimate must be nonnegative")
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
