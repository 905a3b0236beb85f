"""Feedback-gain optimisation at fixed sympathetic-cooling parameters.

The stationary condition ``d<x^2>/dG = 0`` is solved with Brent's method on
the derivative obtained by integrating the analytic ``dS/dG``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.optimize import brentq

from .analytic import optimal_gain_feedback_only
from .params import ParameterError, ReducedParams
from .quadrature import QuadratureConfig, integrate_gain_derivative, integrate_spectrum
from .spectrum import MeasurementError, SpectrumModel

#: cells with ``g`` above this fraction of ``Omega`` are refused
TRUNCATION_FRACTION = 0.45


class TruncatedError(ParameterError):
    """Coupling too close to the instability for a reliable gain derivative."""


class OptimizationError(RuntimeError):
    def __init__(self, message: str, bracket: tuple[float, float], values: tuple[float, float]):
        super().__init__(f"{message}; bracket={bracket}, derivative={values}")
        self.bracket = bracket
        self.values = values


@dataclass(frozen=True)
class OptimizerConfig:
    xtol: float = 1e-8          # relative to G_opt^(0)
    bracket_scale: float = 10.0
    max_doublings: int = 3
    second_order_step: float = 0.05
    quadrature: QuadratureConfig = QuadratureConfig()


@dataclass(frozen=True)
class GainOptimum:
    G_opt: float
    variance: float
    variance_no_feedback: float
    G_opt0: float
    iterations: int
    bracket: tuple[float, float]
    status: str                 # "converged" | "boundary"
    second_order_ok: bool
    error_estimate: float

    @property
    def ratio(self) -> float:
        return self.G_opt / self.G_opt0


def _variance(r: ReducedParams, G: float, cfg: QuadratureConfig):
    return integrate_spectrum(SpectrumModel(r.replace(G=G)), cfg)


def gain_derivative(r: ReducedParams, G: float, config: QuadratureConfig | None = None) -> float:
    """``d<x^2>/dG`` in zero-point units."""
    return integrate_gain_derivative(SpectrumModel(r.replace(G=G)), config).total


def optimize_gain(r: ReducedParams, config: OptimizerConfig | None = None) -> GainOptimum:
    config = config or OptimizerConfig()
    if r.c_m == 0:
        raise MeasurementError("feedback without measurement channel (c_m = 0)")
    if r.eta == 0:
        raise MeasurementError("feedback needs a nonzero detection efficiency")
    if not r.stable:
        raise ParameterError("optimize_gain requires stable parameters")
    if r.g > TRUNCATION_FRACTION * r.Omega:
        raise TruncatedError(f"g/Omega = {r.g / r.Omega:.4g} exceeds {TRUNCATION_FRACTION}")
    qc = config.quadrature
    g0 = optimal_gain_feedback_only(r)
    calls = 0

    def deriv(G):
        nonlocal calls
        calls += 1
        return gain_derivative(r, G, qc)

    v_off = _variance(r, 0.0, qc)
    lo, d_lo = 0.0, deriv(0.0)
    hi = config.bracket_scale * g0
    d_hi = deriv(hi)
    doublings = 0
    while d_lo < 0 and d_hi < 0 and doublings < config.max_doublings:
        hi *= 2
        d_hi = deriv(hi)
        doublings += 1

    if d_lo >= 0 or d_hi < 0:
        # no interior stationary point: the better endpoint wins
        v_hi = _variance(r, hi, qc)
        if d_lo < 0 and v_hi.variance_zp > v_off.variance_zp:
            raise OptimizationError("derivative negative throughout bracket yet variance rose",
                                    (lo, hi), (d_lo, d_hi))
        best_G, best = (0.0, v_off) if v_off.variance_zp <= v_hi.variance_zp else (hi, v_hi)
        return GainOptimum(best_G, best.variance_zp, v_off.variance_zp, g0, calls, (lo, hi),
                           "boundary", True, best.error_zp)

    try:
        G_opt, info = brentq(deriv, lo, hi, xtol=config.xtol * max(g0, 1e-300),
                             full_output=True)
    except (RuntimeError, ValueError) as exc:
        raise OptimizationError(str(exc), (lo, hi), (d_lo, d_hi)) from exc
    if not info.converged:
        raise OptimizationError("root finder did not converge", (lo, hi), (d_lo, d_hi))

    best = _variance(r, G_opt, qc)
    step = config.second_order_step * G_opt
    neighbours = [_variance(r, G_opt + s, qc).variance_zp for s in (-step, step)]
    slack = 10 * best.error_zp
    second_order_ok = all(v >= best.variance_zp - slack for v in neighbours)
    return GainOptimum(G_opt, best.variance_zp, v_off.variance_zp, g0, calls, (lo, hi),
                       "converged", second_order_ok, best.error_zp)


def feedback_gain_db(opt: GainOptimum) -> float:
    """Improvement from switching on optimised feedback, ``10 log10(V(0) / V(G_opt))``."""
    return 10 * math.log10(opt.variance_no_feedback / opt.variance)
