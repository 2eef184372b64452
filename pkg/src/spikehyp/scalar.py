"""Scalar generalized hypergeometric kernels.

Evaluates pFq(a; b; z) at complex z for the five classical cases
(0F0, 0F1, 1F0, 1F1, 2F1) plus the unit-numerator kernels 1F2 and 2F2 that
the fractional contour route needs.  The implementations are vectorized
over z and switch between direct series, stabilizing transformations,
large-argument asymptotic expansions, and (in a narrow cancellation window
for the 1F2/2F2 kernels) extended-precision summation.

Principal values throughout: every power and log uses the principal branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import (
    ConvergenceError,
    DomainError,
    GammaPoleError,
    ParameterVectors,
    _is_nonpositive_integer,
    log_gamma,
)

__all__ = [
    "ScalarKernel",
    "classify_case",
    "scalar_pfq",
    "pfq_series",
    "kummer_1f1",
    "gauss_2f1",
    "eval_kernel",
    "eval_kernel_minus_one",
]

_SERIES_CAP = 10_000
_TINY = 1e-300

CASES = ("0F0", "0F1", "1F0", "1F1", "2F1")


def classify_case(params: ParameterVectors) -> str:
    """Map parameter counts to a kernel case tag."""
    shape = (params.p, params.q)
    named = {(0, 0): "0F0", (0, 1): "0F1", (1, 0): "1F0", (1, 1): "1F1", (2, 1): "2F1"}
    if shape in named:
        return named[shape]
    if params.p <= params.q:
        return "generic-series"
    raise DomainError(f"no kernel case for p={params.p}, q={params.q}")


@dataclass(frozen=True)
class ScalarKernel:
    """A parameter set together with its case tag."""

    params: ParameterVectors
    case: str

    def __post_init__(self):
        expected = classify_case(self.params)
        if self.case != expected:
            raise DomainError(
                f"case tag {self.case!r} inconsistent with parameter shape "
                f"(p={self.params.p}, q={self.params.q} gives {expected!r})"
            )

    @classmethod
    def from_params(cls, params: ParameterVectors) -> "ScalarKernel":
        return cls(params=params, case=classify_case(params))


def _as_array(z):
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    return np.atleast_1d(np.asarray(z, dtype=np.complex128)), scalar


def _ret(out, scalar):
    return complex(out[0]) if scalar else out


def _on_positive_cut(z: np.ndarray) -> np.ndarray:
    return (z.imag == 0.0) & (z.real >= 1.0)


# ---------------------------------------------------------------------------
# Direct series
# ---------------------------------------------------------------------------

def pfq_series(a, b, z, tol: float = 1e-12, max_terms: int = _SERIES_CAP, start: int = 0):
    """Taylor series of pFq, vectorized over z.

    With start > 0 the summation begins at term index ``start``; the leading
    terms are dropped exactly, which is the stable way to evaluate the tail
    of the series near z = 0.

    Stops once three consecutive terms fall below tol times the running sum.
    """
    a = [complex(v) for v in a]
    b = [complex(v) for v in b]
    zz, scalar = _as_array(z)
    term = np.ones_like(zz)
    for k in range(start):
        num = np.prod([al + k for al in a]) if a else 1.0
        den = np.prod([bl + k for bl in b]) if b else 1.0
        term = term * zz * (num / (den * (k + 1)))
    total = term.copy()
    small_run = np.zeros(zz.shape, dtype=np.int64)
    done = np.zeros(zz.shape, dtype=bool)
    for k in range(start, start + max_terms):
        num = np.prod([al + k for al in a]) if a else 1.0
        den = np.prod([bl + k for bl in b]) if b else 1.0
        term = term * zz * (num / (den * (k + 1)))
        total = np.where(done, total, total + term)
        small = np.abs(term) <= tol * np.maximum(np.abs(total), _TINY)
        small_run = np.where(small, small_run + 1, 0)
        done |= small_run >= 3
        if done.all():
            break
    else:
        raise ConvergenceError(
            f"pFq series did not reach tol={tol} within {max_terms} terms "
            f"(worst |z| = {np.max(np.abs(zz)):.3g})"
        )
    return _ret(total, scalar)


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def hyp0f0(z):
    zz, scalar = _as_array(z)
    return _ret(np.exp(zz), scalar)


def hyp1f0(a, z):
    """(1 - z)^(-a) with the principal power; cut on z in [1, inf)."""
    a = complex(a)
    zz, scalar = _as_array(z)
    if np.any(_on_positive_cut(zz)):
        raise DomainError("1F0 evaluated on its branch cut [1, inf)")
    return _ret(np.exp(-a * np.log1p(-zz)), scalar)


# ---------------------------------------------------------------------------
# 0F1: series plus Bessel-type large-argument expansion
# ---------------------------------------------------------------------------

def _bessel_pq(nu: complex, w: np.ndarray, max_terms: int = 40):
    """Hankel asymptotic sums P and Q for J_nu and Y_nu at large |w|."""
    four_nu2 = 4.0 * nu * nu
    P = np.ones_like(w)
    Q = np.zeros_like(w)
    ak = np.ones_like(w)  # a_k(nu) / w^k, running
    prev = np.full(w.shape, np.inf)
    for k in range(1, max_terms):
        ak = ak * (four_nu2 - (2 * k - 1) ** 2) / (k * 8.0 * w)
        mag = np.abs(ak)
        grow = mag >= prev
        ak = np.where(grow, 0.0, ak)  # freeze once terms start growing
        prev = np.where(grow, prev, mag)
        if k % 2 == 0:
            P = P + ((-1) ** (k // 2)) * ak
        else:
            Q = Q + ((-1) ** ((k - 1) // 2)) * ak
        if np.all(prev < 1e-18):
            break
    return P, Q


def _bessel_j_asym(nu: complex, w: np.ndarray) -> np.ndarray:
    P, Q = _bessel_pq(nu, w)
    chi = w - (nu * 0.5 + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * w)) * (np.cos(chi) * P - np.sin(chi) * Q)


def _bessel_y_asym(nu: complex, w: np.ndarray) -> np.ndarray:
    P, Q = _bessel_pq(nu, w)
    chi = w - (nu * 0.5 + 0.25) * math.pi
    return np.sqrt(2.0 / (math.pi * w)) * (np.sin(chi) * P + np.cos(chi) * Q)


_HYP0F1_ASYM_CUT = 50.0


def hyp0f1(b, z, tol: float = 1e-12):
    """0F1(; b; z), series for moderate z, Bessel expansion deep on the left."""
    b = complex(b)
    if _is_nonpositive_integer(b):
        raise GammaPoleError(f"0F1 denominator parameter {b} is a nonpositive integer")
    zz, scalar = _as_array(z)
    out = np.empty_like(zz)
    deep = (zz.real <= 0.0) & (np.abs(zz) > _HYP0F1_ASYM_CUT)
    if np.any(~deep):
        out[~deep] = pfq_series([], [b], zz[~deep], tol=tol)
    if np.any(deep):
        zd = zz[deep]
        w = 2.0 * np.sqrt(-zd)
        nu = b - 1.0
        pref = np.exp(log_gamma(b) + (1.0 - b) * np.log(0.5 * w))
        out[deep] = pref * _bessel_j_asym(nu, w)
    return _ret(out, scalar)


# ---------------------------------------------------------------------------
# 1F1: series, Kummer reflection, large-argument expansion
# ---------------------------------------------------------------------------

def kummer_1f1(a, b, z, tol: float = 1e-12):
    """1F1(a; b; z) via the reflection e^z 1F1(b-a; b; -z) for Re z < 0.

    The reflected series has a nonnegative argument, which removes the
    catastrophic cancellation of the direct series on the left half plane.
    """
    a = complex(a)
    b = complex(b)
    if _is_nonpositive_integer(b):
        raise GammaPoleError(f"1F1 denominator parameter {b} is a nonpositive integer")
    zz, scalar = _as_array(z)
    if a == b:
        return _ret(np.exp(zz), scalar)
    out = np.empty_like(zz)
    neg = zz.real < 0.0
    if np.any(neg):
        out[neg] = np.exp(zz[neg]) * pfq_series([b - a], [b], -zz[neg], tol=tol)
    if np.any(~neg):
        out[~neg] = pfq_series([a], [b], zz[~neg], tol=tol)
    return _ret(out, scalar)


_HYP1F1_ASYM_CUT = 40.0


def _hyp1f1_asym_left(a: complex, b: complex, z: np.ndarray) -> np.ndarray:
    """Large-|z| expansion of 1F1 for Re z << 0 (algebraic part dominant)."""
    mz = -z
    # algebraic component: G(b)/G(b-a) (-z)^(-a) sum_k (a)_k (a-b+1)_k / (k! (-z)^k)
    series = np.ones_like(z)
    term = np.ones_like(z)
    prev = np.full(z.shape, np.inf)
    for k in range(60):
        term = term * (a + k) * (a - b + 1.0 + k) / ((k + 1.0) * mz)
        mag = np.abs(term)
        term = np.where(mag >= prev, 0.0, term)
        prev = np.minimum(prev, mag)
        series = series + term
        if np.all(prev < 1e-18):
            break
    alg = np.exp(log_gamma(b) - log_gamma(b - a) - a * np.log(mz)) * series
    # exponential component, usually negligible at Re z <= -40
    with np.errstate(over="ignore", invalid="ignore", under="ignore"):
        exp_part = np.exp(z + (a - b) * np.log(z) + log_gamma(b) - log_gamma(a))
    exp_part = np.where(np.isfinite(exp_part), exp_part, 0.0)
    return alg + exp_part


def hyp1f1(a, b, z, tol: float = 1e-12):
    """1F1(a; b; z) combining the direct series, Kummer reflection and the
    left asymptotic expansion."""
    a = complex(a)
    b = complex(b)
    if _is_nonpositive_integer(b):
        raise GammaPoleError(f"1F1 denominator parameter {b} is a nonpositive integer")
    zz, scalar = _as_array(z)
    if a == b:
        return _ret(np.exp(zz), scalar)
    if _is_nonpositive_integer(a) or _is_nonpositive_integer(b - a):
        # terminating or gamma-degenerate reflection: plain Kummer handling
        return _ret(np.atleast_1d(kummer_1f1(a, b, zz, tol=tol)), scalar)
    out = np.empty_like(zz)
    deep = zz.real <= -_HYP1F1_ASYM_CUT
    if np.any(deep):
        out[deep] = _hyp1f1_asym_left(a, b, zz[deep])
    if np.any(~deep):
        out[~deep] = np.atleast_1d(kummer_1f1(a, b, zz[~deep], tol=tol))
    return _ret(out, scalar)


# ---------------------------------------------------------------------------
# 2F1: direct series plus the transformation ladder
# ---------------------------------------------------------------------------

from functools import lru_cache


@lru_cache(maxsize=4096)
def _lg(v: complex) -> complex:
    return complex(log_gamma(complex(v)))


def _gamma_ratio(nums, dens) -> complex:
    return complex(np.exp(sum(_lg(v) for v in nums) - sum(_lg(v) for v in dens)))


_LADDER_RADIUS = 0.92
_GAMMA_DEGENERACY_TOL = 0.05


def _near_integer(v: complex, tol: float = _GAMMA_DEGENERACY_TOL) -> bool:
    v = complex(v)
    return abs(v.imag) <= tol and abs(v.real - round(v.real)) <= tol


def _hyp2f1_mpmath(a, b, c, z: np.ndarray) -> np.ndarray:
    import mpmath as mp

    out = np.empty_like(z)
    with mp.workdps(30):
        for i, zi in enumerate(z):
            out[i] = complex(mp.hyp2f1(a, b, c, mp.mpc(zi.real, zi.imag)))
    return out


def gauss_2f1(a, b, c, z, tol: float = 1e-12):
    """2F1(a, b; c; z) on the cut plane via the classical transformation
    ladder, choosing per point the mapped argument of smallest modulus among
    z, z/(z-1), 1-z, 1/z, 1/(1-z), (z-1)/z.

    Transformations whose gamma prefactors sit too close to a pole are
    skipped; if no transformation applies, falls back to extended precision.
    """
    a, b, c = complex(a), complex(b), complex(c)
    if _is_nonpositive_integer(c):
        raise GammaPoleError(f"2F1 denominator parameter {c} is a nonpositive integer")
    zz, scalar = _as_array(z)
    if np.any(_on_positive_cut(zz)):
        raise DomainError("2F1 evaluated on its branch cut [1, inf)")
    out = np.full(zz.shape, np.nan, dtype=np.complex128)

    cab_degenerate = _near_integer(c - a - b)
    ab_degenerate = _near_integer(a - b)

    with np.errstate(divide="ignore", invalid="ignore"):
        args = [
            zz,
            zz / (zz - 1.0),
            1.0 - zz,
            1.0 / zz,
            1.0 / (1.0 - zz),
            (zz - 1.0) / zz,
        ]
    mods = np.stack([np.abs(w) for w in args])
    mods = np.where(np.isfinite(mods), mods, np.inf)
    # mild penalty on the gamma-carrying transforms so the plain series and
    # the Pfaff map win ties
    penalty = np.array([0.0, 0.0, 0.05, 0.05, 0.05, 0.05])[:, None]
    if cab_degenerate:
        mods[2] = np.inf
        mods[5] = np.inf
    if ab_degenerate:
        mods[3] = np.inf
        mods[4] = np.inf
    score = mods + penalty
    choice = np.argmin(score, axis=0)
    usable = np.take_along_axis(mods, choice[None, :], axis=0)[0] <= _LADDER_RADIUS
    fallback = ~usable

    def F(aa, bb, cc, w):
        return pfq_series([aa, bb], [cc], w, tol=tol)

    for t in range(6):
        mask = usable & (choice == t)
        if not np.any(mask):
            continue
        zt = zz[mask]
        w = args[t][mask]
        if t == 0:
            val = F(a, b, c, w)
        elif t == 1:
            val = np.exp(-a * np.log1p(-zt)) * F(a, c - b, c, w)
        elif t == 2:
            g1 = _gamma_ratio([c, c - a - b], [c - a, c - b])
            g2 = _gamma_ratio([c, a + b - c], [a, b])
            val = g1 * F(a, b, a + b - c + 1.0, w) + g2 * np.exp(
                (c - a - b) * np.log1p(-zt)
            ) * F(c - a, c - b, c - a - b + 1.0, w)
        elif t == 3:
            g3 = _gamma_ratio([c, b - a], [b, c - a])
            g4 = _gamma_ratio([c, a - b], [a, c - b])
            val = g3 * np.exp(-a * np.log(-zt)) * F(a, a - c + 1.0, a - b + 1.0, w) + g4 * np.exp(
                -b * np.log(-zt)
            ) * F(b, b - c + 1.0, b - a + 1.0, w)
        elif t == 4:
            g3 = _gamma_ratio([c, b - a], [b, c - a])
            g4 = _gamma_ratio([c, a - b], [a, c - b])
            val = g3 * np.exp(-a * np.log1p(-zt)) * F(a, c - b, a - b + 1.0, w) + g4 * np.exp(
                -b * np.log1p(-zt)
            ) * F(b, c - a, b - a + 1.0, w)
        else:
            g1 = _gamma_ratio([c, c - a - b], [c - a, c - b])
            g2 = _gamma_ratio([c, a + b - c], [a, b])
            val = g1 * np.exp(-a * np.log(zt)) * F(a, a - c + 1.0, a + b - c + 1.0, w) + g2 * np.exp(
                (c - a - b) * np.log1p(-zt) + (a - c) * np.log(zt)
            ) * F(c - a, 1.0 - a, c - a - b + 1.0, w)
        out[mask] = val

    if np.any(fallback):
        out[fallback] = _hyp2f1_mpmath(a, b, c, zz[fallback])
    return _ret(out, scalar)


# ---------------------------------------------------------------------------
# Unit-numerator kernels for the fractional route: 1F2 and 2F2
# ---------------------------------------------------------------------------

def _mpmath_pfq(a, b, z: np.ndarray, params_real: bool) -> np.ndarray:
    """Per-node extended-precision summation in the cancellation window.

    mpmath raises its internal working precision on cancellation by itself,
    so a modest output precision suffices.  Conjugate pairs are deduplicated
    when the parameters are real.
    """
    import mpmath as mp

    out = np.empty_like(z)
    seen: dict[complex, complex] = {}
    with mp.workdps(22):
        for i, zi in enumerate(z):
            zi = complex(zi)
            key = np.conj(zi) if (params_real and zi.imag < 0) else zi
            if key in seen:
                v = seen[key]
            else:
                v = complex(mp.hyper(a, b, mp.mpc(key.real, key.imag)))
                seen[key] = v
            out[i] = np.conj(v) if (params_real and zi.imag < 0) else v
    return out


_HYP2F2_SERIES_CUT = 10.0
_HYP2F2_ASYM_CUT = 40.0


def hyp2f2_unit(a, b1, b2, z, tol: float = 1e-12):
    """2F2(a, 1; b1, b2; z).

    Direct series near the origin, algebraic large-argument expansion deep in
    the left half plane, extended precision in between (where the series
    cancels catastrophically but the expansion has not yet converged).
    """
    a, b1, b2 = complex(a), complex(b1), complex(b2)
    for bl in (b1, b2):
        if _is_nonpositive_integer(bl):
            raise GammaPoleError(f"2F2 denominator parameter {bl} is a nonpositive integer")
    zz, scalar = _as_array(z)
    out = np.empty_like(zz)
    degenerate = any(
        _near_integer(v) for v in (a, b1 - a, b2 - a, b1 - 1.0, b2 - 1.0)
    )
    near = (np.abs(zz) <= _HYP2F2_SERIES_CUT) | (zz.real > 0.0)
    deep = ~near & (np.abs(zz) >= _HYP2F2_ASYM_CUT) & (zz.real <= 0.0) & (not degenerate)
    mid = ~near & ~deep
    if np.any(near):
        out[near] = pfq_series([a, 1.0], [b1, b2], zz[near], tol=tol)
    if np.any(deep):
        out[deep] = _hyp2f2_asym_left(a, b1, b2, zz[deep])
    if np.any(mid):
        params_real = all(abs(complex(v).imag) == 0.0 for v in (a, b1, b2))
        out[mid] = _mpmath_pfq([a, 1.0], [b1, b2], zz[mid], params_real)
    return _ret(out, scalar)


def _hyp2f2_asym_left(a: complex, b1: complex, b2: complex, z: np.ndarray) -> np.ndarray:
    """Algebraic expansion of 2F2(a, 1; b1, b2; z) for Re z -> -inf.

    Two power series, one per numerator parameter; the exponentially small
    e^z component is dropped (it is below double precision at |Re z| >= 40).
    """
    mz = -z
    lmz = np.log(mz)
    total = np.zeros_like(z)
    pref = _lg(b1) + _lg(b2) - _lg(a)  # Gamma(1) = 1
    for am, ao in ((a, 1.0), (1.0, a)):
        r0 = np.exp(
            pref + _lg(am) + _lg(ao - am) - _lg(b1 - am) - _lg(b2 - am) - am * lmz
        )
        term = r0.copy() if isinstance(r0, np.ndarray) else np.full(z.shape, r0)
        series = term.copy()
        prev = np.full(z.shape, np.inf)
        for k in range(60):
            factor = (
                (am + k)
                * (b1 - am - k - 1.0)
                * (b2 - am - k - 1.0)
                / ((ao - am - k - 1.0) * (k + 1.0))
            )
            term = term * (-factor) / mz
            mag = np.abs(term)
            term = np.where(mag >= prev, 0.0, term)
            prev = np.minimum(prev, mag)
            series = series + term
            if np.all(prev < 1e-20 * np.abs(series).max()):
                break
        total = total + series
    return total


_HYP1F2_SERIES_CUT = 25.0
_HYP1F2_ASYM_CUT = 200.0


def hyp1f2_unit(b1, b2, z, tol: float = 1e-12):
    """1F2(1; b1, b2; z): series, then a Lommel-type split into an algebraic
    series plus Bessel oscillation for large negative arguments."""
    b1, b2 = complex(b1), complex(b2)
    for bl in (b1, b2):
        if _is_nonpositive_integer(bl):
            raise GammaPoleError(f"1F2 denominator parameter {bl} is a nonpositive integer")
    zz, scalar = _as_array(z)
    out = np.empty_like(zz)
    degenerate = _near_integer(b1 - 1.0) or _near_integer(b2 - 1.0)
    near = (np.abs(zz) <= _HYP1F2_SERIES_CUT) | (zz.real > 0.0)
    deep = ~near & (np.abs(zz) >= _HYP1F2_ASYM_CUT) & (zz.real <= 0.0) & (not degenerate)
    mid = ~near & ~deep
    if np.any(near):
        out[near] = pfq_series([1.0], [b1, b2], zz[near], tol=tol)
    if np.any(deep):
        out[deep] = _hyp1f2_asym_left(b1, b2, zz[deep])
    if np.any(mid):
        params_real = abs(b1.imag) == 0.0 and abs(b2.imag) == 0.0
        out[mid] = _mpmath_pfq([1.0], [b1, b2], zz[mid], params_real)
    return _ret(out, scalar)


def _hyp1f2_asym_left(b1: complex, b2: complex, z: np.ndarray) -> np.ndarray:
    """Large negative z expansion of 1F2(1; b1, b2; z) through the Lommel
    function split: algebraic part plus J/Y Bessel oscillation."""
    beta, gamma = b1, b2
    mu = beta + gamma - 3.0
    nu = gamma - beta
    w = 2.0 * np.sqrt(-z)  # Re w > 0
    # algebraic component of the capital Lommel function
    s_alg = np.ones_like(z)
    term = np.ones_like(z)
    prev = np.full(z.shape, np.inf)
    w2 = w * w
    for k in range(1, 60):
        term = term * (-((mu - 2.0 * k + 1.0) ** 2 - nu * nu)) / w2
        mag = np.abs(term)
        term = np.where(mag >= prev, 0.0, term)
        prev = np.minimum(prev, mag)
        s_alg = s_alg + term
        if np.all(prev < 1e-20):
            break
    S_cap = np.exp((mu - 1.0) * np.log(w)) * s_alg
    half = 0.5 * (mu - nu) * math.pi
    bessel_mix = math.sin(half) * _bessel_j_asym(nu, w) - math.cos(half) * _bessel_y_asym(nu, w) \
        if isinstance(half, float) else None
    if bessel_mix is None:  # complex parameters
        hc = 0.5 * (mu - nu) * math.pi
        bessel_mix = np.sin(hc) * _bessel_j_asym(nu, w) - np.cos(hc) * _bessel_y_asym(nu, w)
    const = np.exp((mu - 1.0) * math.log(2.0) + _lg(beta - 1.0) + _lg(gamma - 1.0))
    s_small = S_cap - const * bessel_mix
    coeff = 4.0 * (beta - 1.0) * (gamma - 1.0)
    return coeff * np.exp(-(mu + 1.0) * np.log(w)) * s_small


# ---------------------------------------------------------------------------
# Dispatch
# ---------------------------------------------------------------------------

def scalar_pfq(kernel, z, tol: float = 1e-12):
    """Evaluate the scalar hypergeometric kernel at complex z.

    kernel may be a ScalarKernel or a ParameterVectors (case inferred).
    Vectorized: z may be a scalar or an ndarray.
    """
    if isinstance(kernel, ParameterVectors):
        kernel = ScalarKernel.from_params(kernel)
    return eval_kernel(kernel.params.a, kernel.params.b, z, tol=tol)


def eval_kernel(a, b, z, tol: float = 1e-12):
    """Evaluate pFq(a; b; z) for the supported parameter shapes."""
    a = tuple(complex(v) for v in a)
    b = tuple(complex(v) for v in b)
    p, q = len(a), len(b)
    if p == 0 and q == 0:
        return hyp0f0(z)
    if p == 0 and q == 1:
        return hyp0f1(b[0], z, tol=tol)
    if p == 1 and q == 0:
        return hyp1f0(a[0], z)
    if p == 1 and q == 1:
        return hyp1f1(a[0], b[0], z, tol=tol)
    if p == 2 and q == 1:
        return gauss_2f1(a[0], a[1], b[0], z, tol=tol)
    if p == 1 and q == 2 and a[0] == 1.0:
        return hyp1f2_unit(b[0], b[1], z, tol=tol)
    if p == 2 and q == 2 and 1.0 in a:
        other = a[0] if a[1] == 1.0 else a[1]
        return hyp2f2_unit(other, b[0], b[1], z, tol=tol)
    if p <= q:
        return pfq_series(a, b, z, tol=tol)
    raise DomainError(
        f"no continuation implemented for a {p}F{q} kernel; "
        "only the five classical cases and the unit-numerator 1F2/2F2 are supported"
    )


def eval_kernel_minus_one(a, b, z, tol: float = 1e-12):
    """pFq(a; b; z) - 1 evaluated without cancellation near z = 0."""
    zz, scalar = _as_array(z)
    out = np.empty_like(zz)
    small = np.abs(zz) < 0.5
    if np.any(small):
        out[small] = pfq_series(a, b, zz[small], tol=tol, start=1)
    if np.any(~small):
        out[~small] = np.atleast_1d(eval_kernel(a, b, zz[~small], tol=tol)) - 1.0
    return _ret(out, scalar)
