"""Adaptive quadrature for sharply peaked spectra.

Mechanical resonances can be ~1e7-1e9 times narrower than their centre
frequency, so a uniform grid is useless. The integration domain is cut into
panels placed around the complex poles of the integrand (half-width = padding
times the imaginary part), the gaps are graded geometrically towards each
panel, and a vectorised global-adaptive Gauss-Kronrod (7/15) rule refines
everything. The tail beyond the outermost panel is mapped onto a finite
interval with ``omega = B / t``.

A node next to a resonance of width 1e-9 W cannot be placed closer than one
ulp of W, which alone perturbs the integrand by ~1e-7. Given an ``anchor``
(the common resonance frequency), the upper part of the body is therefore
integrated in the detuning ``d = |omega| - anchor`` and the integrand receives
``d`` alongside ``omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

# Kronrod 15-point abscissae (non-negative half) and weights; Gauss 7-point
# weights live on the odd-indexed Kronrod nodes.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
GAUSS = np.zeros(15)
GAUSS[1:7:2] = _WG[:3]
GAUSS[7] = _WG[3]
GAUSS[9:15:2] = _WG[2::-1]


class QuadratureError(RuntimeError):
    """Raised when refinement stalls; ``partial`` holds the best estimate."""

    def __init__(self, message: str, partial: "QuadResult"):
        super().__init__(message)
        self.partial = partial


@dataclass(frozen=True)
class QuadratureConfig:
    rtol: float = 1e-8
    atol: float = 0.0
    max_intervals: int = 20000
    pole_padding: float = 50.0

    def __post_init__(self):
        if not 0 < self.rtol <= 1e-2:
            raise ValueError("rtol must lie in (0, 1e-2]")
        if self.atol < 0:
            raise ValueError("atol must be non-negative")
        if self.pole_padding < 10:
            raise ValueError("pole_padding must be at least 10")
        if self.max_intervals < 1:
            raise ValueError("max_intervals must be positive")


@dataclass
class QuadResult:
    value: np.ndarray
    error: float
    intervals: int
    edges: np.ndarray = field(repr=False, default=None)
    scale: float = 0.0          # magnitude the relative tolerance referred to

    @property
    def total(self) -> float:
        return float(np.sum(self.value))


def _apply_rule(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * NODES[None, :]
    y = np.asarray(f(x.ravel()), dtype=float)
    ncomp = 1 if y.ndim == 1 else y.shape[0]
    y = y.reshape(ncomp, a.size, NODES.size)
    kron = (y @ KRONROD) * half
    gauss = (y @ GAUSS) * half
    total_k = kron.sum(axis=0)
    err = np.abs(total_k - gauss.sum(axis=0))
    absint = (np.abs(y.sum(axis=0)) @ KRONROD) * np.abs(half)
    return kron, err, absint


def gauss_kronrod(f: Callable[[np.ndarray], np.ndarray], edges, rtol: float = 1e-8,
                  atol: float = 0.0, max_intervals: int = 20000,
                  relative_to: str = "value") -> QuadResult:
    """Globally adaptive G7/K15 quadrature over the intervals between ``edges``.

    ``f`` takes a 1-D array of abscissae and returns either an array of the
    same length or a ``(k, n)`` array of k components; the error is
    controlled on the sum of the components. With ``relative_to="abs"`` the
    relative tolerance refers to the integral of ``|f|``, which is the
    sensible scale for integrands whose integral may vanish.
    """
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1], edges[1:]
    keep = b > a
    a, b = a[keep], b[keep]
    vals, errs, absv = _apply_rule(f, a, b)
    while True:
        total = vals.sum()
        err = errs.sum()
        scale = absv.sum() if relative_to == "abs" else abs(total)
        tol = max(atol, rtol * scale)
        n = a.size
        result = QuadResult(vals.sum(axis=1), float(err), n, np.concatenate([a, b[-1:]]),
                            float(scale))
        if err <= tol:
            return result
        # split the fewest worst intervals whose error, once removed, leaves the rest within tol/2
        order = np.argsort(errs)[::-1]
        remaining = err - np.cumsum(errs[order])
        k = int(np.searchsorted(-remaining, -0.5 * tol)) + 1
        split = np.zeros(n, dtype=bool)
        split[order[:min(k, n)]] = True
        if n + split.sum() > max_intervals:
            raise QuadratureError(
                f"no convergence within {max_intervals} intervals (error {err:.3g}, target {tol:.3g})",
                result)
        sa, sb = a[split], b[split]
        sm = 0.5 * (sa + sb)
        if np.any((sm <= sa) | (sm >= sb)):
            raise QuadratureError("interval width reached machine resolution", result)
        na = np.concatenate([sa, sm])
        nb = np.concatenate([sm, sb])
        nv, ne, nabs = _apply_rule(f, na, nb)
        a = np.concatenate([a[~split], na])
        b = np.concatenate([b[~split], nb])
        vals = np.concatenate([vals[:, ~split], nv], axis=1)
        errs = np.concatenate([errs[~split], ne])
        absv = np.concatenate([absv[~split], nabs])
        order = np.argsort(a, kind="stable")
        a, b, vals, errs, absv = a[order], b[order], vals[:, order], errs[order], absv[order]


def panel_edges(poles, padding: float = 50.0, upper: float | None = None,
                origin: float = 0.0):
    """Breakpoints on ``[0, upper]`` derived from complex pole positions.

    Under-damped poles (``|Im| < |Re|``) get a panel of half-width
    ``padding * |Im|`` around ``|Re|`` plus geometric grading (factor 4) away
    from the peak; over-damped poles only contribute a knee at ``|p|``.
    Returns ``(edges, upper)``; the edges are measured from ``origin``.
    """
    poles = np.asarray(poles, dtype=complex).ravel()
    poles = poles[np.isfinite(poles)]
    centres, widths, knees = [], [], []
    for p in poles:
        c, w = abs(p.real), abs(p.imag)
        if w < c:
            centres.append(c)
            widths.append(max(w, 1e-15 * c))
        elif abs(p) > 0:
            knees.append(abs(p))
    extent = [c + padding * w for c, w in zip(centres, widths)] + knees
    if upper is None:
        upper = 4.0 * max(extent) if extent else 1.0
    pts = [-origin, upper - origin]
    for c, w in zip(centres, widths):
        half = padding * w
        inner = w * 2.0 ** np.arange(0, max(1, math.ceil(math.log2(padding))))
        outer = half * 4.0 ** np.arange(0, max(1, math.ceil(math.log(max(upper / half, 4.0), 4)) + 1))
        offsets = np.concatenate([[0.0], inner[inner < half], outer])
        pts.extend((c - origin) - offsets)
        pts.extend((c - origin) + offsets)
    for k in knees:
        pts.extend(k * np.array([0.25, 0.5, 1.0, 2.0, 4.0]) - origin)
    # log-spaced filler between the smallest and largest scales
    scales = [s for s in list(centres) + knees if s > 0]
    if scales:
        lo, hi = min(scales), upper
        if hi > lo:
            pts.extend(np.geomspace(lo, hi, max(2, int(4 * math.log10(hi / lo)) + 1)) - origin)
    pts = np.unique(np.clip(np.asarray(pts, dtype=float), -origin, upper - origin))
    return pts, upper


def integrate_peaked(f: Callable, poles, config: QuadratureConfig | None = None,
                     even: bool = True, relative_to: str = "value",
                     anchor: float | None = None) -> QuadResult:
    """Integrate ``f`` over the whole real line.

    With ``even=True`` only ``[0, inf)`` is sampled, using the even part
    ``(f(x) + f(-x)) / 2`` and doubling. Otherwise both half-lines are
    integrated separately. ``poles`` are the complex singularities of ``f``
    (either sign of real part; only magnitudes matter for panel placement).

    Without ``anchor``, ``f(omega)`` is called. With it, the call is
    ``f(omega, detuning)`` where ``detuning`` is either ``None`` or the exact
    value of ``|omega| - anchor``.
    """
    config = config or QuadratureConfig()
    edges, upper = panel_edges(poles, config.pole_padding)
    tail_edges = np.array([0.0, 0.125, 0.25, 0.5, 1.0])

    if anchor is None:
        def call(x, d):
            return np.asarray(f(x))
        body = [(lambda x: x, None, edges)]
    else:
        def call(x, d):
            return np.asarray(f(x, d))
        if not 0 < anchor < upper:
            raise ValueError("anchor must lie inside the integration body")
        cut = 0.5 * anchor
        rel, _ = panel_edges(poles, config.pole_padding, upper, origin=anchor)
        low = np.unique(np.concatenate([[0.0, cut], rel[rel < -cut] + anchor]))
        high = np.unique(np.concatenate([[-cut], rel[rel > -cut]]))
        # resonant part first: the later pieces take their floor from its scale
        body = [(lambda d: anchor + d, lambda d: d, high),
                (lambda x: x, None, low[(low >= 0) & (low <= cut)])]

    def piece(to_omega, to_detuning, sign):
        def g(y):
            y = np.asarray(y, dtype=float)
            d = None if to_detuning is None else to_detuning(y)
            return call(sign * to_omega(y), d)
        return g

    def tail(g):
        def h(t):
            t = np.asarray(t)
            return np.asarray(g(upper / t)) * (upper / t ** 2)
        return h

    pieces = []
    for to_omega, to_detuning, e in body:
        plus = piece(to_omega, to_detuning, 1.0)
        minus = piece(to_omega, to_detuning, -1.0)
        if even:
            pieces.append((lambda y, p=plus, m=minus: 0.5 * (p(y) + m(y)), e))
        else:
            pieces += [(plus, e), (minus, e)]
    plus = piece(lambda x: x, None, 1.0)
    minus = piece(lambda x: x, None, -1.0)
    if even:
        pieces.append((tail(lambda x: 0.5 * (plus(x) + minus(x))), tail_edges))
    else:
        pieces += [(tail(plus), tail_edges), (tail(minus), tail_edges)]
    factor = 2.0 if even else 1.0

    value = None
    error = 0.0
    intervals = 0
    scale = 0.0
    # the error budget is split evenly between the pieces; later pieces (low
    # frequencies and tails, small when the panels reach far enough) get an
    # absolute floor from what came before instead of their own scale
    share = len(pieces)
    for g, e in pieces:
        atol = max(config.atol, config.rtol * scale) / share
        res = gauss_kronrod(g, e, rtol=config.rtol / share, atol=atol,
                            max_intervals=config.max_intervals, relative_to=relative_to)
        value = res.value if value is None else value + res.value
        error += res.error
        intervals += res.intervals
        scale += res.scale
    return QuadResult(factor * value, factor * error, intervals, edges, factor * scale)


def lorentzian_integrals(gamma: float, omega: float) -> tuple[float, float]:
    """Closed forms of the two resonance integrals over the real line.

    ``int dw / ((w^2 - W^2)^2 + G^2 w^2) = pi / (G W^2)`` and
    ``int w^2 dw / ((w^2 - W^2)^2 + G^2 w^2) = pi / G``.
    """
    if gamma <= 0 or omega <= 0:
        raise ValueError("gamma and omega must be positive")
    return math.pi / (gamma * omega ** 2), math.pi / gamma


def lorentzian_poles(gamma: float, omega: float) -> np.ndarray:
    """Poles of ``1 / (W^2 - w^2 - i G w)``; the squared modulus has these and their conjugates.

    The quartic ``(w^2 - W^2)^2 + G^2 w^2`` is avoided on purpose: its nearly
    double roots would cost half the working precision.
    """
    from .response import companion_roots

    g = gamma / omega
    return omega * companion_roots([-1.0, -1j * g, 1.0])


@dataclass(frozen=True)
class VarianceReport:
    """Steady-state mechanical position variance and how it was obtained."""

    variance_m2: float
    variance_zp: float
    by_source: dict
    error_zp: float
    panels: int
    intervals: int
    regime: str | None = None

    @property
    def relative_error(self) -> float:
        return self.error_zp / abs(self.variance_zp) if self.variance_zp else math.inf


class InstabilityError(ValueError):
    """The coupled system has no steady state (g >= Omega / 2)."""


def integrate_spectrum(model, config: QuadratureConfig | None = None,
                       even: bool = True) -> VarianceReport:
    """Variance ``(1/2 pi) int S_xx dw`` of a :class:`~hybridcool.spectrum.SpectrumModel`."""
    from .params import classify

    r = model.params
    if not r.stable:
        raise InstabilityError(f"no steady state: g/Omega = {r.g / r.Omega:.6g} >= 0.5")
    config = config or QuadratureConfig()
    xzp2 = model.x_zp_m ** 2
    res = integrate_peaked(model.source_spectra, model.poles(), config, even=even, anchor=r.Omega)
    vals = res.value / (2 * math.pi * xzp2)
    total = float(vals.sum())
    label = str(classify(r, allow_unstable=True).label)
    return VarianceReport(
        variance_m2=total * xzp2,
        variance_zp=total,
        by_source={s.value: float(v) for s, v in zip(model.sources, vals)},
        error_zp=res.error / (2 * math.pi * xzp2),
        panels=len(res.edges) - 1,
        intervals=res.intervals,
        regime=label,
    )


def integrate_gain_derivative(model, config: QuadratureConfig | None = None) -> QuadResult:
    """``d<x^2>/dG`` in zero-point units, tolerance relative to ``int |dS/dG|``."""
    config = config or QuadratureConfig()
    xzp2 = model.x_zp_m ** 2
    res = integrate_peaked(model.ds_dG, model.poles(), config, even=True, relative_to="abs",
                           anchor=model.params.Omega)
    scale = 2 * math.pi * xzp2
    return QuadResult(res.value / scale, res.error / scale, res.intervals, res.edges,
                      res.scale / scale)
