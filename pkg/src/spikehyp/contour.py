"""Contour evaluation of the rank-one matrix-argument hypergeometric function.

Builds the integration path (a closed circle when the spectral weight is
meromorphic, a keyhole wrapping the real-axis cuts otherwise), assembles the
integrand kernel(x s) * weight(s) with the appropriate fractional power of s
on the fractional route, and integrates with doubling-based error control:
trapezoid rule in the angle on circles, adaptive composite Gauss-Legendre
panels on keyholes, with the legs extended leftward until their contribution
is negligible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .params import (
    ConvergenceError,
    DomainError,
    ParameterVectors,
    SpikeArgument,
    decompose_spike,
    log_gamma,
    rho,
    rising_factorial,
    shift_parameters,
    validate_contour_conditions,
)
from .jack import as_spectrum
from .scalar import eval_kernel, eval_kernel_minus_one
from .results import EvalResult

__all__ = [
    "QuadSettings",
    "ContourSpec",
    "build_contour",
    "spectral_weight",
    "quadrature",
    "eval_contour_integer",
    "eval_contour_fractional",
    "eval_contour_half",
    "eval_contour_auto",
]

_TINY = 1e-300
_SMALL_SPIKE = 1e-2  # below this x the constant kernel term is subtracted


@dataclass(frozen=True)
class QuadSettings:
    """Quadrature budget and targets."""

    tol: float = 1e-9
    kernel_tol: float = 1e-12
    gl_order: int = 16
    max_depth: int = 13
    circle_nodes: int = 64
    circle_max_nodes: int = 1 << 17
    max_abscissa: float = 1e15
    max_evals: int = 4_000_000


@dataclass(frozen=True)
class ContourSpec:
    """Integration path: geometry parameters plus base-resolution nodes.

    Circles are parameterized by center and radius on the real axis.
    Keyholes run below the real axis from the truncation abscissa to the cap,
    around a semicircular cap of radius leg_height whose rightmost point is
    right_vertex, and back above the axis; dense_left/dense_width control the
    initial panel layout near the spectrum.
    """

    geometry: str
    center: float = 0.0
    radius: float = 0.0
    right_vertex: float = 0.0
    leg_height: float = 0.0
    truncation_abscissa: float = 0.0
    dense_left: float = 0.0
    dense_width: float = 0.0

    def nodes(self, settings: QuadSettings | None = None):
        """Materialize the base-resolution node set as (points, weights).

        The weights are the complex line elements w_i with
        oint f ds ~= sum_i f(s_i) w_i.
        """
        settings = settings or QuadSettings()
        if self.geometry == "closed-circle":
            n = settings.circle_nodes
            theta = _circle_angles(n)
            s = self.center + self.radius * np.exp(1j * theta)
            w = (2j * math.pi * self.radius / n) * np.exp(1j * theta)
            return s, w
        pts = []
        wts = []
        for sign, smap, a, b in _keyhole_pieces(self):
            x, w = _leggauss(settings.gl_order)
            t = 0.5 * (a + b) + 0.5 * (b - a) * x
            s, ds = smap(t)
            pts.append(s)
            wts.append(sign * 0.5 * (b - a) * w * ds)
        return np.concatenate(pts), np.concatenate(wts)


@lru_cache(maxsize=32)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def _circle_angles(n: int) -> np.ndarray:
    # half-step offset keeps every node strictly off the real axis, where the
    # summed-log weight would sit exactly on a cut
    return 2.0 * math.pi * (np.arange(n) + 0.5) / n


def spectral_weight(s, y, alpha: float):
    """prod_j (s - y_j)^(-1/alpha) via summed principal logs.

    Real and positive for real s to the right of the spectrum; raises if any
    point sits exactly on a cut ray (-inf, y_j].
    """
    spec = as_spectrum(y)
    ya = spec.as_array()
    ss = np.atleast_1d(np.asarray(s, dtype=np.complex128))
    on_cut = (ss.imag == 0.0) & (ss.real[:, None] <= ya[None, :]).any(axis=1)
    if np.any(on_cut):
        raise DomainError("spectral weight evaluated on a branch cut (-inf, y_j]")
    logs = np.log(ss[:, None] - ya[None, :]).sum(axis=1)
    out = np.exp(-logs / alpha)
    if np.isscalar(s) or (isinstance(s, np.ndarray) and s.ndim == 0):
        return complex(out[0])
    return out


# ---------------------------------------------------------------------------
# Contour construction
# ---------------------------------------------------------------------------

def build_contour(
    y,
    spike: SpikeArgument,
    params: ParameterVectors,
    budget: QuadSettings | None = None,
) -> ContourSpec:
    """Choose geometry and path parameters for the given evaluation.

    Closed circle when 1/alpha is a positive integer (the weight is
    meromorphic, so the periodic trapezoid rule applies); keyhole otherwise.
    For p = q + 1 the path is confined to the left of 1/x so the kernel
    argument stays off its branch cut.
    """
    budget = budget or QuadSettings()
    spec = as_spectrum(y)
    ymax = spec.max
    ymin = min(spec.y)
    x = spike.x
    pq_edge = params.p == params.q + 1
    if pq_edge:
        if x * ymax >= 1.0:
            raise DomainError(
                f"no admissible contour: p = q + 1 requires x*max(y) < 1, "
                f"got {x * ymax:.6g}"
            )
        right = 0.5 * (ymax + min(1.0 / x, 10.0 * ymax))
    else:
        right = 1.5 * ymax + 1.0

    inv_alpha = 1.0 / spike.alpha
    if abs(inv_alpha - round(inv_alpha)) <= 1e-12 and round(inv_alpha) >= 1:
        left = -(0.15 * ymax + 0.1)
        return ContourSpec(
            geometry="closed-circle",
            center=0.5 * (left + right),
            radius=0.5 * (right - left),
            right_vertex=right,
        )

    spread = ymax - ymin
    h = max(0.05, 0.01 * spread)
    h = min(h, 0.25 * (right - ymax))
    # panel scale near the spectrum: resolve both the weight (scale h) and
    # the kernel (scale set by x and the largest shifted parameter)
    pmax = max([1.0] + [abs(v) for v in params.a + params.b])
    stiff = 1.0 / (x * pmax)
    dense_width = min(2.0 * h, 4.0 * stiff)
    dense_left = min(ymin, 0.0) - max(4.0 * h, 0.25 * spread)
    trunc = dense_left - max(8.0 * h, 2.0 * (abs(dense_left) + right), 1.0)
    return ContourSpec(
        geometry="keyhole",
        right_vertex=right,
        leg_height=h,
        truncation_abscissa=trunc,
        dense_left=dense_left,
        dense_width=dense_width,
    )


def _keyhole_pieces(spec: ContourSpec):
    """Smooth pieces of the keyhole as (sign, map, t0, t1) with natural
    orientation; sign -1 marks pieces traversed against their parameter."""
    h = spec.leg_height
    c0 = spec.right_vertex - h

    def lower(u):
        return u - 1j * h, np.ones_like(u, dtype=np.complex128)

    def upper(u):
        return u + 1j * h, np.ones_like(u, dtype=np.complex128)

    def cap(theta):
        e = np.exp(1j * theta)
        return c0 + h * e, 1j * h * e

    pieces = []
    edges = _keyhole_edges(spec)
    for a, b in zip(edges[:-1], edges[1:]):
        pieces.append((1.0, lower, a, b))
    pieces.append((1.0, cap, -0.5 * math.pi, 0.0))
    pieces.append((1.0, cap, 0.0, 0.5 * math.pi))
    for a, b in zip(edges[:-1], edges[1:]):
        pieces.append((-1.0, upper, a, b))
    return pieces


def _keyhole_edges(spec: ContourSpec) -> list[float]:
    """u-axis panel edges from the truncation abscissa up to the cap."""
    c0 = spec.right_vertex - spec.leg_height
    edges = [c0]
    u = c0
    w = spec.dense_width
    while u > spec.dense_left:
        u -= w
        edges.append(u)
    while u > spec.truncation_abscissa:
        w *= 1.7
        u -= w
        edges.append(u)
    edges.reverse()
    return edges


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _circle_quadrature(spec: ContourSpec, f, settings: QuadSettings):
    n = settings.circle_nodes
    prev = None
    evals = 0
    while n <= settings.circle_max_nodes:
        theta = _circle_angles(n)
        s = spec.center + spec.radius * np.exp(1j * theta)
        vals = f(s)
        evals += n
        cur = (spec.radius / n) * np.sum(vals * np.exp(1j * theta))
        if prev is not None:
            err = abs(cur - prev)
            if err <= settings.tol * max(abs(cur), _TINY) or err == 0.0:
                return cur, err, evals
        prev = cur
        n *= 2
    raise ConvergenceError(
        f"circle trapezoid did not stabilize within {settings.circle_max_nodes} nodes"
    )


def _batch_panel_values(f, panels, order, counter, settings):
    """Evaluate every panel's Gauss-Legendre sum in one integrand call.

    panels is a list of (sign, smap, a, b); returns the per-panel complex
    contributions sign * int_a^b f(s(t)) s'(t) dt.
    """
    x, w = _leggauss(order)
    pts = []
    wts = []
    for sign, smap, a, b in panels:
        t = 0.5 * (a + b) + 0.5 * (b - a) * x
        s, ds = smap(t)
        pts.append(s)
        wts.append((sign * 0.5 * (b - a)) * w * ds)
    s_all = np.concatenate(pts)
    counter[0] += len(s_all)
    if counter[0] > settings.max_evals:
        raise ConvergenceError("quadrature evaluation budget exceeded")
    vals = f(s_all)
    vals = vals.reshape(len(panels), order)
    return (vals * np.stack(wts)).sum(axis=1)


def _integrate_panels(f, panels, order, loc_tols, settings, counter):
    """Level-synchronous adaptive integration of a batch of panels.

    Panels whose coarse/fine Gauss-Legendre values disagree beyond their
    local tolerance are bisected, all surviving panels being evaluated in a
    single integrand call per level.
    """
    total = 0.0 + 0.0j
    toterr = 0.0
    active = list(panels)
    tols = list(loc_tols)
    for depth in range(settings.max_depth + 1):
        coarse = _batch_panel_values(f, active, order, counter, settings)
        fine = _batch_panel_values(f, active, 2 * order, counter, settings)
        errs = np.abs(fine - coarse)
        next_active = []
        next_tols = []
        for i, (sign, smap, a, b) in enumerate(active):
            if errs[i] <= tols[i] or depth == settings.max_depth:
                total += fine[i]
                toterr += errs[i]
            else:
                mid = 0.5 * (a + b)
                next_active.append((sign, smap, a, mid))
                next_active.append((sign, smap, mid, b))
                next_tols.append(0.5 * tols[i])
                next_tols.append(0.5 * tols[i])
        if not next_active:
            break
        active = next_active
        tols = next_tols
    return total, toterr


def _levin_u(sums: list[complex]):
    """Levin u-transform limit estimate for a sequence of partial sums.

    Handles geometric, algebraic, and alternating tails alike, which covers
    every decay pattern the keyhole legs produce.  Returns (limit, spread)
    where spread compares the two highest usable orders.
    """
    n = len(sums)
    if n < 5:
        return sums[-1], math.inf
    omega = [(j + 1.0) * (sums[j + 1] - sums[j]) for j in range(n - 1)]
    omega = [w if w != 0 else _TINY for w in omega]
    estimates = []
    for k in range(2, n - 1):
        num = 0.0 + 0.0j
        den = 0.0 + 0.0j
        for j in range(k + 1):
            c = math.comb(k, j) * ((1.0 + j) / (1.0 + k)) ** (k - 1)
            if j % 2:
                c = -c
            num += c * sums[j] / omega[j]
            den += c / omega[j]
        if abs(den) > _TINY:
            est = num / den
            if np.isfinite(est.real) and np.isfinite(est.imag):
                estimates.append(est)
    if len(estimates) < 2:
        return sums[-1], math.inf
    return estimates[-1], abs(estimates[-1] - estimates[-2])


def _tail_extension(spec, f, settings, total0, order, counter, tail_kind, osc_rate):
    """Integrate the legs beyond the initial truncation abscissa.

    Fast-decaying integrands terminate on the plain smallness rule; slowly
    decaying algebraic or oscillatory tails are summed with panel spacing
    matched to their structure and accelerated with the Levin transform.
    Oscillatory kernels carry phase ~ osc_rate * sqrt(|u|), so the far legs
    are walked in t = sqrt(-u), where the alternation has a fixed period.
    """
    edges = _keyhole_edges(spec)
    u = edges[0]
    w = (edges[1] - edges[0]) if len(edges) > 1 else max(1.0, abs(u) * 0.5)
    h = spec.leg_height

    def lower(t):
        return t - 1j * h, np.ones_like(t, dtype=np.complex128)

    def upper(t):
        return t + 1j * h, np.ones_like(t, dtype=np.complex128)

    def low_t(t):
        return -t * t - 1j * h, -2.0 * t.astype(np.complex128)

    def up_t(t):
        return -t * t + 1j * h, -2.0 * t.astype(np.complex128)

    osc = tail_kind == "osc"
    need_small = 3 if osc else 2
    tail = 0.0 + 0.0j
    tailerr = 0.0
    sums: list[complex] = []
    small_runs = 0
    t_cur = math.sqrt(max(abs(u), 1.0))
    dt = math.pi / max(osc_rate, 1e-6)
    max_panels = 64
    loc_tol = 0.125 * settings.tol * max(abs(total0), _TINY)
    for k in range(max_panels):
        if abs(u) >= settings.max_abscissa:
            break
        if osc:
            t_next = t_cur + dt
            step = [(-1.0, low_t, t_cur, t_next), (1.0, up_t, t_cur, t_next)]
            u = -t_next * t_next
            t_cur = t_next
        else:
            a, b = u - w, u
            step = [(1.0, lower, a, b), (-1.0, upper, a, b)]
            u = a
            w *= 1.7
        contrib, err = _integrate_panels(f, step, order, [loc_tol, loc_tol], settings, counter)
        tail += contrib
        tailerr += err
        sums.append(tail)
        scale = max(abs(total0 + tail), _TINY)
        if abs(contrib) <= 0.02 * settings.tol * scale:
            small_runs += 1
            if small_runs >= need_small:
                return tail, tailerr
        else:
            small_runs = 0
        if k >= 7:
            limit, spread = _levin_u(sums[-24:])
            if spread <= 0.3 * settings.tol * scale:
                return limit, tailerr + spread
    limit, spread = _levin_u(sums[-24:])
    scale = max(abs(total0 + limit), _TINY)
    if spread <= 100.0 * settings.tol * scale:
        return limit, tailerr + spread
    raise ConvergenceError(
        "keyhole leg tail did not converge within the extension budget "
        f"(last extrapolation spread {spread:.3g})"
    )


def _keyhole_quadrature(
    spec: ContourSpec,
    f,
    settings: QuadSettings,
    tail_kind: str = "alg",
    osc_rate: float = 1.0,
):
    counter = [0]
    panels = _keyhole_pieces(spec)
    order = settings.gl_order

    coarse = _batch_panel_values(f, panels, order, counter, settings).sum()
    scale = max(abs(coarse), _TINY)

    def run(loc_scale):
        loc_tol = 0.25 * settings.tol * loc_scale / max(len(panels), 1)
        return _integrate_panels(f, panels, order, [loc_tol] * len(panels), settings, counter)

    total, toterr = run(scale)
    if toterr > settings.tol * max(abs(total), _TINY) and abs(total) < 0.3 * scale:
        total, toterr = run(max(abs(total), _TINY))

    tail, tailerr = _tail_extension(
        spec, f, settings, total, order, counter, tail_kind, osc_rate
    )
    return total + tail, toterr + tailerr, counter[0]


def quadrature(
    contour: ContourSpec,
    integrand,
    settings: QuadSettings | None = None,
    tail_kind: str = "alg",
    osc_rate: float = 1.0,
):
    """Integrate (1/2 pi i) * oint integrand(s) ds along the contour.

    Returns (value, err_estimate).  The integrand must be vectorized over a
    complex ndarray of points.  tail_kind/"osc_rate" hint at the decay
    pattern of the integrand on the far legs of a keyhole ("alg" for
    algebraic or faster, "osc" for sqrt-phase oscillation at rate
    osc_rate * sqrt(|u|)); closed circles ignore them.
    """
    settings = settings or QuadSettings()
    if contour.geometry == "closed-circle":
        raw, err, _ = _circle_quadrature(contour, integrand, settings)
        return raw, err  # trapezoid form already includes 1/(2 pi i)
    raw, err, _ = _keyhole_quadrature(contour, integrand, settings, tail_kind, osc_rate)
    return raw / (2j * math.pi), err / (2.0 * math.pi)


# ---------------------------------------------------------------------------
# Route evaluators
# ---------------------------------------------------------------------------

def _integrate(contour, integrand, settings, tail_kind="alg", osc_rate=1.0):
    if contour.geometry == "closed-circle":
        raw, err, evals = _circle_quadrature(contour, integrand, settings)
        return raw, err, evals
    raw, err, evals = _keyhole_quadrature(contour, integrand, settings, tail_kind, osc_rate)
    return raw / (2j * math.pi), err / (2.0 * math.pi), evals


def _make_integrand(kernel_a, kernel_b, spike, ya, alpha, settings, *, eps=None, subtract):
    x = spike.x
    inv_alpha = 1.0 / alpha

    def f(s):
        logs = np.log(s[:, None] - ya[None, :]).sum(axis=1)
        weight = np.exp(-inv_alpha * logs)
        if subtract:
            kern = eval_kernel_minus_one(kernel_a, kernel_b, x * s, tol=settings.kernel_tol)
        else:
            kern = eval_kernel(kernel_a, kernel_b, x * s, tol=settings.kernel_tol)
        kern = np.atleast_1d(kern)
        if eps is not None:
            kern = kern * np.exp((eps - 1.0) * np.log(s))
        return kern * weight

    return f


def _contour_result(params, spike, y, tol, settings, decomp, method):
    settings = replace(settings, tol=tol) if settings else QuadSettings(tol=tol)
    spec = as_spectrum(y)
    if spec.r != spike.r:
        raise DomainError(
            f"spectrum length {spec.r} does not match spike dimension {spike.r}"
        )
    m = decomp.m
    report = validate_contour_conditions(params, m)
    report.raise_if_failed()
    shifted = shift_parameters(params, m)
    rho_m = rho(shifted, m)
    if rho_m == 0:
        raise DomainError("shifted coefficient ratio vanished; formula degenerates")
    contour = build_contour(spec, spike, params, settings)

    subtract = (m > 0) and (spike.x < _SMALL_SPIKE)
    kernel_a = list(shifted.a)
    kernel_b = list(shifted.b)
    eps = decomp.epsilon
    if eps is not None:
        kernel_a = kernel_a + [1.0]
        kernel_b = kernel_b + [eps]
    f = _make_integrand(
        kernel_a, kernel_b, spike, spec.as_array(), spike.alpha, settings,
        eps=eps, subtract=subtract,
    )
    shape = (len(kernel_a), len(kernel_b))
    osc_shapes = {(0, 1), (1, 2)}
    tail_kind = "osc" if shape in osc_shapes else "alg"
    value_q, err_q, evals = _integrate(
        contour, f, settings, tail_kind=tail_kind, osc_rate=2.0 * math.sqrt(spike.x)
    )

    if eps is None:
        log_const = float(log_gamma(m + 1.0).real) - m * math.log(spike.x)
        const = math.exp(log_const) / rho_m
    else:
        const = complex(rising_factorial(eps, int(m))) / (
            spike.x ** m * rho_m
        )
    value = const * value_q
    err = abs(const) * err_q
    return EvalResult(value=complex(value), err_estimate=float(err), method=method, effort=evals)


def eval_contour_integer(params, spike, y, tol: float = 1e-9, settings: QuadSettings | None = None) -> EvalResult:
    """Contour evaluation on the route requiring r/alpha to be a positive
    integer (shift order m = r/alpha - 1)."""
    decomp = decompose_spike(spike, prefer_half_integer=False)
    if decomp.route != "integer":
        raise DomainError(
            f"integer route needs r/alpha to be a positive integer, got {spike.r}/{spike.alpha}"
        )
    return _contour_result(params, spike, y, tol, settings, decomp, "contour-i")


def eval_contour_fractional(params, spike, y, tol: float = 1e-9, settings: QuadSettings | None = None) -> EvalResult:
    """Contour evaluation for r/alpha = m + eps with eps in (0, 1); the
    kernel gains a unit numerator parameter and eps as a denominator, and the
    integrand carries the extra factor s^(eps-1)."""
    decomp = decompose_spike(spike, prefer_half_integer=False)
    if decomp.route != "fractional":
        raise DomainError(
            f"fractional route needs a non-integer r/alpha, got {spike.r}/{spike.alpha}"
        )
    return _contour_result(params, spike, y, tol, settings, decomp, "contour-ii")


def eval_contour_half(params, spike, y, tol: float = 1e-9, settings: QuadSettings | None = None) -> EvalResult:
    """Real-case route valid for every integer dimension: shift order
    m = r/2 - 1, which is a half-integer for odd r, with gamma-ratio
    rising factorials throughout."""
    if abs(spike.alpha - 2.0) > 1e-12:
        raise DomainError(f"half-integer route requires alpha = 2, got {spike.alpha}")
    decomp = decompose_spike(spike, prefer_half_integer=True)
    return _contour_result(params, spike, y, tol, settings, decomp, "contour-iii")


def eval_contour_auto(params, spike, y, tol: float = 1e-9, settings: QuadSettings | None = None) -> EvalResult:
    """Dispatch on r/alpha: integer route when it is a positive integer, the
    half-integer route when alpha = 2, the fractional route otherwise."""
    decomp = decompose_spike(spike)
    if decomp.route == "integer":
        return eval_contour_integer(params, spike, y, tol, settings)
    if decomp.route == "half-integer":
        return eval_contour_half(params, spike, y, tol, settings)
    return eval_contour_fractional(params, spike, y, tol, settings)
