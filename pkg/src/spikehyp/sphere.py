"""Monte Carlo oracle on the unit sphere (real case).

Estimates the spherical average of the scalar kernel at x * q'Yq with q
uniform on the sphere, and checks the exponential-kernel identity that links
that average to a keyhole contour integral.  Sampling uses counter-based
Philox streams in fixed-size blocks, so sample i is reproducible no matter
how the caller chunks the work.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import DomainError, ParameterVectors, SpikeArgument, log_gamma
from .jack import as_spectrum
from .scalar import ScalarKernel, scalar_pfq
from .contour import ContourSpec, QuadSettings, build_contour, quadrature

__all__ = [
    "sphere_samples",
    "sphere_average",
    "sphere_contour_identity_check",
    "IdentityCheckReport",
]

_BLOCK = 1 << 16


def sphere_samples(r: int, n: int, seed: int, start: int = 0) -> np.ndarray:
    """Unit vectors number start .. start+n-1 of the stream for this seed.

    Each block of 2**16 consecutive samples comes from its own Philox
    counter range, so the value of sample i depends only on (seed, i).
    """
    if r < 1 or n < 0:
        raise DomainError("need r >= 1 and n >= 0")
    out = np.empty((n, r))
    filled = 0
    while filled < n:
        idx = start + filled
        block, offset = divmod(idx, _BLOCK)
        count = min(_BLOCK - offset, n - filled)
        bitgen = np.random.Philox(key=seed, counter=block << 66)
        g = np.random.Generator(bitgen).standard_normal((offset + count, r))
        g = g[offset:]
        norms = np.sqrt((g * g).sum(axis=1))
        norms[norms == 0.0] = 1.0
        out[filled : filled + count] = g / norms[:, None]
        filled += count
    return out


def sphere_average(
    params: ParameterVectors,
    spike: SpikeArgument,
    y,
    n_samples: int,
    seed: int = 0,
):
    """Sample mean and standard error of pFq(a, b; x * q'Yq) over the sphere.

    Only defined for the real case alpha = 2; for p = q + 1 the argument
    stays inside the kernel's disk of convergence because x*max(y) < 1.
    """
    if abs(spike.alpha - 2.0) > 1e-12:
        raise DomainError(f"sphere average requires alpha = 2, got {spike.alpha}")
    spec = as_spectrum(y)
    if spec.r != spike.r:
        raise DomainError(
            f"spectrum length {spec.r} does not match spike dimension {spike.r}"
        )
    if params.p == params.q + 1 and spike.x * spec.max >= 1.0:
        raise DomainError(
            f"p = q + 1 requires x*max(y) < 1, got {spike.x * spec.max:.6g}"
        )
    if n_samples < 2:
        raise DomainError("need at least 2 samples for a standard error")
    kernel = ScalarKernel.from_params(params)
    ya = spec.as_array()
    total = 0.0 + 0.0j
    total_sq = 0.0
    done = 0
    while done < n_samples:
        count = min(_BLOCK, n_samples - done)
        q = sphere_samples(spike.r, count, seed, start=done)
        args = spike.x * (q * q) @ ya
        vals = np.atleast_1d(scalar_pfq(kernel, args.astype(np.complex128)))
        total += vals.sum()
        total_sq += float((vals.real**2 + vals.imag**2).sum())
        done += count
    mean = total / n_samples
    var = (total_sq - n_samples * abs(mean) ** 2) / (n_samples - 1)
    stderr = math.sqrt(max(var, 0.0) / n_samples)
    if params.all_real():
        return mean.real, stderr
    return mean, stderr


@dataclass(frozen=True)
class IdentityCheckReport:
    """Both sides of the exponential sphere-to-contour identity."""

    sphere_value: float
    sphere_stderr: float
    contour_value: float
    contour_err: float
    abs_gap: float
    rel_gap: float

    @property
    def sigmas(self) -> float:
        scale = max(self.sphere_stderr, 1e-300)
        return self.abs_gap / scale


def sphere_contour_identity_check(
    x: float,
    w: float,
    y,
    n_samples: int,
    seed: int = 0,
    tol: float = 1e-9,
) -> IdentityCheckReport:
    """Compare the sphere average of exp((x/w) q'Yq) with its contour form.

    The right-hand side is Gamma(r/2) (w/x)^(r/2-1) (1/2 pi i)
    oint exp((x/w) s) prod_j (s - y_j)^(-1/2) ds over a keyhole around the
    spectrum, evaluated directly from that display.
    """
    if x <= 0 or w <= 0:
        raise DomainError("identity check requires x > 0 and w > 0")
    spec = as_spectrum(y)
    r = spec.r
    t = x / w

    lhs, lhs_err = sphere_average(
        ParameterVectors((), ()),
        SpikeArgument(x=t, r=r, alpha=2.0),
        spec,
        n_samples,
        seed=seed,
    )

    ya = spec.as_array()
    spike = SpikeArgument(x=t, r=r, alpha=2.0)
    contour = build_contour(spec, spike, ParameterVectors((), ()), QuadSettings(tol=tol))

    def integrand(s):
        logs = np.log(s[:, None] - ya[None, :]).sum(axis=1)
        return np.exp(t * s - 0.5 * logs)

    integral, qerr = quadrature(contour, integrand, QuadSettings(tol=tol))
    const = math.exp(float(log_gamma(0.5 * r).real) - (0.5 * r - 1.0) * math.log(t))
    rhs = const * integral
    rhs_err = const * qerr
    gap = abs(lhs - rhs.real)
    rel = gap / max(abs(lhs), 1e-300)
    return IdentityCheckReport(
        sphere_value=float(lhs),
        sphere_stderr=float(lhs_err),
        contour_value=float(rhs.real),
        contour_err=float(rhs_err),
        abs_gap=float(gap),
        rel_gap=float(rel),
    )
