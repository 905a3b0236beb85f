"""Feedback and sympathetic cooling of a mechanical oscillator coupled to a trapped atomic ensemble."""

__version__ = "0.1.0"

from .analytic import (AnalyticPrediction, feedback_only_optimum, ground_state_criteria,
                       strong_coupling_variance, weak_coupling_variance)
from .optimizer import GainOptimum, OptimizerConfig, optimize_gain
from .oracle import build_system, oracle_variance, stationary_covariance
from .params import (ParameterError, PhysicalParams, ReducedParams, RegimeLabel, classify,
                     coupling_rate, diagnostics, load_params, reduce, stability)
from .quadrature import QuadratureConfig, VarianceReport, integrate_spectrum, lorentzian_integrals
from .spectrum import NoiseSource, SpectrumModel, correlators, ds_dG, s_xx
from .sweep import SweepGrid, SweepResult, run_sweep

__all__ = [
    "AnalyticPrediction", "GainOptimum", "NoiseSource", "OptimizerConfig", "ParameterError",
    "PhysicalParams", "QuadratureConfig", "ReducedParams", "RegimeLabel", "SpectrumModel",
    "SweepGrid", "SweepResult", "VarianceReport", "build_system", "classify", "correlators",
    "coupling_rate", "diagnostics", "ds_dG", "feedback_only_optimum", "ground_state_criteria",
    "integrate_spectrum", "load_params", "lorentzian_integrals", "optimize_gain",
    "oracle_variance", "reduce", "run_sweep", "s_xx", "stability", "stationary_covariance",
    "strong_coupling_variance", "variance", "weak_coupling_variance",
]


def variance(params: ReducedParams, config: QuadratureConfig | None = None) -> VarianceReport:
    """Steady-state variance of ``params`` (closed form for an ideal filter, else correlator sum)."""
    return integrate_spectrum(SpectrumModel(params), config)
