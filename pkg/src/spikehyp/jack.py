"""Brute-force series oracle.

Sums the rank-one hypergeometric series directly, with single-row Jack
polynomial values obtained from the coefficients of the generating function

    prod_j (1 - z y_j)^(-1/alpha) = sum_k c_k z^k,

computed by exact truncated power-series multiplication.  The k-th
single-row value is C_k = k! c_k / (1/alpha)_k.  This route is the reference
the contour evaluators are tested against; it is deliberately simple.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import (
    ConvergenceError,
    DomainError,
    ParameterVectors,
    SpikeArgument,
)
from .results import EvalResult

__all__ = ["Spectrum", "JackTable", "jack_single_row", "series_eval"]

_TINY = 1e-300


@dataclass(frozen=True)
class Spectrum:
    """Positive eigenvalues of the second matrix argument, repeats allowed."""

    y: tuple[float, ...]

    def __init__(self, y):
        vals = tuple(float(v) for v in np.atleast_1d(np.asarray(y, dtype=float)))
        if len(vals) == 0:
            raise DomainError("spectrum must contain at least one eigenvalue")
        if any(not v > 0 for v in vals):
            raise DomainError(f"spectrum must be strictly positive, got {vals}")
        object.__setattr__(self, "y", vals)

    @property
    def r(self) -> int:
        return len(self.y)

    @property
    def max(self) -> float:
        return max(self.y)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.y, dtype=float)


def as_spectrum(y) -> Spectrum:
    return y if isinstance(y, Spectrum) else Spectrum(y)


def _genfunc_coeffs(y: np.ndarray, alpha: float, K: int) -> np.ndarray:
    """Coefficients c_0..c_K of prod_j (1 - z y_j)^(-1/alpha)."""
    inva = 1.0 / alpha
    c = np.zeros(K + 1)
    c[0] = 1.0
    for yj in y:
        d = np.empty(K + 1)
        d[0] = 1.0
        for n in range(K):
            d[n + 1] = d[n] * ((inva + n) / (n + 1.0)) * yj
        c = np.convolve(c, d)[: K + 1]
    if not np.all(np.isfinite(c)):
        raise ConvergenceError("generating-function coefficients overflowed")
    return c


@dataclass(frozen=True)
class JackTable:
    """Single-row Jack polynomial values C_k(Y) for k = 0..K."""

    alpha: float
    values: tuple[float, ...]

    def __getitem__(self, k: int) -> float:
        return self.values[k]

    def __len__(self) -> int:
        return len(self.values)


def jack_single_row(y, alpha: float, K: int) -> JackTable:
    """Table of C_k(Y), k = 0..K, for the single-row partitions."""
    if K < 0:
        raise DomainError("table length K must be nonnegative")
    spec = as_spectrum(y)
    c = _genfunc_coeffs(spec.as_array(), alpha, K)
    inva = 1.0 / alpha
    vals = np.empty(K + 1)
    scale = 1.0  # k! / (1/alpha)_k, built incrementally
    for k in range(K + 1):
        vals[k] = scale * c[k]
        scale *= (k + 1.0) / (inva + k)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("Jack table overflowed; reduce K or rescale Y")
    return JackTable(alpha=float(alpha), values=tuple(vals))


def series_eval(
    params: ParameterVectors,
    spike: SpikeArgument,
    y,
    tol: float = 1e-12,
    kmax: int = 5000,
) -> EvalResult:
    """Direct summation of the rank-one matrix-argument series.

    Terms are rho_k x^k c_k / (r/alpha)_k where c_k are the x-scaled
    generating-function coefficients; truncation follows the
    three-consecutive-small-terms rule.  Convergence requires x*max(y) < 1
    when p = q + 1; everything converges when p <= q.
    """
    spec = as_spectrum(y)
    if spec.r != spike.r:
        raise DomainError(
            f"spectrum length {spec.r} does not match spike dimension {spike.r}"
        )
    if params.p == params.q + 1 and spike.x * spec.max >= 1.0:
        raise DomainError(
            f"series diverges: p = q + 1 requires x*max(y) < 1, "
            f"got {spike.x * spec.max:.6g}"
        )
    ralpha = spike.r / spike.alpha
    scaled = spec.as_array() * spike.x  # homogeneity: folds x^k into c_k

    K = 64
    while True:
        c = _genfunc_coeffs(scaled, spike.alpha, K)
        term = complex(1.0)
        total = complex(1.0)
        small_run = 0
        tail = [1.0]
        converged = False
        for k in range(K):
            num = math.prod((al + k) for al in params.a) if params.a else 1.0
            den = math.prod((bl + k) for bl in params.b) if params.b else 1.0
            if c[k] == 0.0:
                term = complex(0.0)
            else:
                term = term * (num / den) * (c[k + 1] / c[k]) / (ralpha + k)
            total += term
            tail.append(abs(term))
            small = abs(term) <= tol * max(abs(total), _TINY)
            small_run = small_run + 1 if small else 0
            if small_run >= 3:
                converged = True
                n_terms = k + 2
                break
        if converged:
            err = float(sum(tail[-3:]))
            return EvalResult(
                value=total, err_estimate=err, method="series", effort=n_terms
            )
        if K >= kmax:
            raise ConvergenceError(
                f"series did not converge within kmax={kmax} terms at tol={tol}"
            )
        K = min(2 * K, kmax)
