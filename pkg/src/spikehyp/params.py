"""Parameter algebra shared by every evaluator.

Rising factorials (integer and gamma-ratio form), the coefficient ratio
rho_k(a, b) built from them, parameter-vector shifts, complex log-gamma,
and the admissibility checks that gate the contour formulas.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpikehypError",
    "DomainError",
    "GammaPoleError",
    "ValidationError",
    "ConvergenceError",
    "ParameterVectors",
    "SpikeArgument",
    "SpikeDecomposition",
    "Violation",
    "ValidationReport",
    "decompose_spike",
    "log_gamma",
    "rising_factorial",
    "rising_factorial_gamma",
    "rho",
    "shift_parameters",
    "validate_contour_conditions",
]


class SpikehypError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SpikehypError, ValueError):
    """Input outside the domain on which an operation is defined."""


class GammaPoleError(DomainError):
    """An argument landed on a pole of the gamma function."""


class ValidationError(DomainError):
    """Parameter admissibility conditions for a contour formula failed."""


class ConvergenceError(SpikehypError, ArithmeticError):
    """An iterative scheme exhausted its budget before reaching tolerance."""


_INT_TOL = 1e-12


def _is_nonpositive_integer(z: complex, tol: float = _INT_TOL) -> bool:
    z = complex(z)
    if abs(z.imag) > tol:
        return False
    n = round(z.real)
    return n <= 0 and abs(z.real - n) <= tol * max(1.0, abs(n))


def _is_integer_in(z: complex, lo: int, hi: int, tol: float = _INT_TOL) -> bool:
    """True when z is (numerically) an integer in [lo, hi]."""
    z = complex(z)
    if abs(z.imag) > tol:
        return False
    n = round(z.real)
    return lo <= n <= hi and abs(z.real - n) <= tol * max(1.0, abs(n))


@dataclass(frozen=True)
class ParameterVectors:
    """Numerator parameters ``a`` and denominator parameters ``b``.

    Denominator entries may not be nonpositive integers, and the number of
    numerator parameters may exceed the denominator count by at most one.
    """

    a: tuple[complex, ...]
    b: tuple[complex, ...]

    def __init__(self, a=(), b=()):
        object.__setattr__(self, "a", tuple(complex(v) for v in a))
        object.__setattr__(self, "b", tuple(complex(v) for v in b))
        for bl in self.b:
            if _is_nonpositive_integer(bl):
                raise DomainError(
                    f"denominator parameter {bl} is a nonpositive integer"
                )
        if self.p > self.q + 1:
            raise DomainError(
                f"got p={self.p} numerator and q={self.q} denominator parameters; "
                "p <= q + 1 is required"
            )

    @property
    def p(self) -> int:
        return len(self.a)

    @property
    def q(self) -> int:
        return len(self.b)

    def all_real(self, tol: float = 0.0) -> bool:
        return all(abs(v.imag) <= tol for v in self.a + self.b)


@dataclass(frozen=True)
class SpikeArgument:
    """Rank-one matrix argument: its positive eigenvalue, the matrix
    dimension, and the family index alpha (2 = real case, 1 = complex case)."""

    x: float
    r: int
    alpha: float = 2.0

    def __post_init__(self):
        if not self.x > 0:
            raise DomainError(f"spike eigenvalue must be positive, got {self.x}")
        if not (isinstance(self.r, int) and self.r >= 1):
            raise DomainError(f"dimension must be a positive integer, got {self.r}")
        if not self.alpha > 0:
            raise DomainError(f"family index must be positive, got {self.alpha}")


@dataclass(frozen=True)
class SpikeDecomposition:
    """Split of r/alpha into the shift order m and fractional remainder.

    route is "integer" when r/alpha is a positive integer (m = r/alpha - 1),
    "fractional" when r/alpha = m + epsilon with epsilon in (0, 1), and
    "half-integer" for the real-case route with odd dimension, where
    m = r/2 - 1 is a half-integer and epsilon is absent.
    """

    m: float
    epsilon: float | None
    route: str

    @property
    def m_is_integer(self) -> bool:
        return self.epsilon is None and self.m == round(self.m)


def decompose_spike(spike: SpikeArgument, *, prefer_half_integer: bool = True) -> SpikeDecomposition:
    """Classify r/alpha and produce the shift order used by the contour formulas."""
    ratio = spike.r / spike.alpha
    nearest = round(ratio)
    if nearest >= 1 and abs(ratio - nearest) <= 1e-12 * max(1.0, nearest):
        return SpikeDecomposition(m=float(nearest - 1), epsilon=None, route="integer")
    if prefer_half_integer and abs(spike.alpha - 2.0) <= 1e-12:
        return SpikeDecomposition(m=spike.r / 2.0 - 1.0, epsilon=None, route="half-integer")
    m = math.floor(ratio)
    eps = ratio - m
    return SpikeDecomposition(m=float(m), epsilon=eps, route="fractional")


# ---------------------------------------------------------------------------
# Complex log-gamma.
#
# Lanczos rational approximation (g = 7, 9 terms) on Re z >= 0.5, reflection
# with an analytically continued log-sin on the left half plane.  Principal
# branch, cut along the nonpositive real axis, continuous from above on the
# cut.  Relative accuracy is around 1e-14 on moderate arguments.
# ---------------------------------------------------------------------------

_LANCZOS_COEFFS = np.array(
    [
        0.99999999999980993,
        676.5203681218851,
        -1259.1392167224028,
        771.32342877765313,
        -176.61502916214059,
        12.507343278686905,
        -0.13857109526572012,
        9.9843695780195716e-6,
        1.5056327351493116e-7,
    ]
)
_LOG_SQRT_2PI = 0.9189385332046727417803297364056176


def _log_gamma_lanczos(z: np.ndarray) -> np.ndarray:
    """Core approximation, valid for Re z >= 0.5."""
    zm1 = z - 1.0
    x = np.full_like(z, _LANCZOS_COEFFS[0])
    for i in range(1, len(_LANCZOS_COEFFS)):
        x = x + _LANCZOS_COEFFS[i] / (zm1 + i)
    t = zm1 + 7.5
    return _LOG_SQRT_2PI + (zm1 + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi_upper(z: np.ndarray) -> np.ndarray:
    """Analytic continuation of log(sin(pi z)) for Im z >= 0.

    Written so the imaginary part grows linearly in Re z instead of wrapping,
    which is what the reflection formula needs.
    """
    return -1j * np.pi * z + 1j * np.pi / 2 - math.log(2.0) + np.log1p(-np.exp(2j * np.pi * z))


def log_gamma(z):
    """Principal branch of log-gamma for complex arguments.

    Accepts scalars or arrays; raises GammaPoleError when any entry is a
    nonpositive integer.  Values on the cut (negative real axis) are the
    limits from above.
    """
    scalar = np.isscalar(z) or (isinstance(z, np.ndarray) and z.ndim == 0)
    zz = np.asarray(z, dtype=np.complex128)
    on_pole = (zz.imag == 0.0) & (zz.real <= 0.0) & (zz.real == np.round(zz.real))
    if np.any(on_pole):
        raise GammaPoleError(f"log_gamma pole at nonpositive integer argument")
    out = np.empty_like(zz)
    right = zz.real >= 0.5
    if np.any(right):
        out[right] = _log_gamma_lanczos(zz[right])
    left = ~right
    if np.any(left):
        zl = zz[left]
        upper = zl.imag >= 0.0
        zu = np.where(upper, zl, np.conj(zl))
        val = math.log(math.pi) - _log_sin_pi_upper(zu) - _log_gamma_lanczos(1.0 - zu)
        out[left] = np.where(upper, val, np.conj(val))
    if scalar:
        return complex(out.reshape(-1)[0])
    return out


def _gamma_ratio_exp(num, den):
    """exp(log_gamma(num) - log_gamma(den)) with pole checks on both."""
    return np.exp(log_gamma(num) - log_gamma(den))


def rising_factorial(a: complex, k: int) -> complex:
    """(a)_k = a (a+1) ... (a+k-1), with (a)_0 = 1."""
    if k < 0 or k != int(k):
        raise DomainError(f"rising_factorial needs a nonnegative integer order, got {k}")
    out = complex(1.0)
    a = complex(a)
    for j in range(int(k)):
        out *= a + j
    return out


def rising_factorial_gamma(a: complex, m) -> complex:
    """(a)_m as Gamma(a+m)/Gamma(a), the extension to non-integer order.

    Falls back to the exact product when m is a nonnegative integer, so the
    two readings agree wherever both are defined.
    """
    a = complex(a)
    if isinstance(m, (int, np.integer)) or (
        isinstance(m, float) and m == int(m) and m >= 0
    ):
        return rising_factorial(a, int(m))
    m = complex(m)
    if _is_nonpositive_integer(a):
        raise GammaPoleError(f"(a)_m with a = {a} sits on a gamma pole")
    if _is_nonpositive_integer(a + m):
        raise GammaPoleError(f"(a)_m with a + m = {a + m} sits on a gamma pole")
    return complex(_gamma_ratio_exp(a + m, a))


def rho(params: ParameterVectors, k_or_m) -> complex:
    """prod_l (a_l)_k / prod_l (b_l)_k for integer or fractional order."""
    is_int = (
        isinstance(k_or_m, (int, np.integer))
        or (isinstance(k_or_m, float) and k_or_m == int(k_or_m) and k_or_m >= 0)
    )
    num = complex(1.0)
    den = complex(1.0)
    if is_int:
        k = int(k_or_m)
        for al in params.a:
            num *= rising_factorial(al, k)
        for bl in params.b:
            den *= rising_factorial(bl, k)
    else:
        for al in params.a:
            num *= rising_factorial_gamma(al, k_or_m)
        for bl in params.b:
            den *= rising_factorial_gamma(bl, k_or_m)
    if den == 0:
        raise GammaPoleError("rho denominator vanished (gamma pole in a (b_l)_k factor)")
    return num / den


def shift_parameters(params: ParameterVectors, m) -> ParameterVectors:
    """Subtract m elementwise from both parameter vectors."""
    pv = object.__new__(ParameterVectors)
    object.__setattr__(pv, "a", tuple(al - m for al in params.a))
    object.__setattr__(pv, "b", tuple(bl - m for bl in params.b))
    return pv


@dataclass(frozen=True)
class Violation:
    kind: str
    index: int
    value: complex
    detail: str


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[Violation, ...] = field(default_factory=tuple)

    def raise_if_failed(self):
        if not self.ok:
            lines = "; ".join(v.detail for v in self.violations)
            raise ValidationError(f"contour formula inadmissible: {lines}")


def validate_contour_conditions(params: ParameterVectors, m) -> ValidationReport:
    """Check the admissibility conditions for the contour representations.

    Integer m: every a_l must avoid {1, ..., m} and every b_l must avoid the
    descending set {m, m-1, m-2, ...}.  Non-integer (half-integer) m: only
    exact gamma poles of the shifted coefficient ratio are rejected, i.e.
    a_l, b_l, a_l - m, b_l - m must stay off the nonpositive integers.
    """
    violations: list[Violation] = []
    m_int = float(m) == int(m)
    if m_int:
        mi = int(m)
        for i, al in enumerate(params.a):
            if mi >= 1 and _is_integer_in(al, 1, mi):
                violations.append(
                    Violation("a", i, al, f"a[{i}] = {al} lies in {{1, ..., {mi}}}")
                )
        for i, bl in enumerate(params.b):
            if abs(bl.imag) <= _INT_TOL and bl.real <= mi + _INT_TOL:
                n = round(bl.real)
                if abs(bl.real - n) <= _INT_TOL * max(1.0, abs(n)) and n <= mi:
                    violations.append(
                        Violation("b", i, bl, f"b[{i}] = {bl} lies in {{{mi}, {mi - 1}, ...}}")
                    )
    else:
        for i, al in enumerate(params.a):
            if _is_nonpositive_integer(al) or _is_nonpositive_integer(al - m):
                violations.append(
                    Violation("a", i, al, f"(a[{i}] - m)_m hits a gamma pole (a[{i}] = {al})")
                )
        for i, bl in enumerate(params.b):
            if _is_nonpositive_integer(bl) or _is_nonpositive_integer(bl - m):
                violations.append(
                    Violation("b", i, bl, f"(b[{i}] - m)_m hits a gamma pole (b[{i}] = {bl})")
                )
    return ValidationReport(ok=not violations, violations=tuple(violations))
