"""Closed-form variances and ground-state criteria.

All variances are in units of the mechanical zero-point variance x_zp,m^2.
Validity flags use the shared factor-of-ten reading of "much greater than"
(:data:`hybridcool.params.MUCH_GREATER`) and are always computed, never
forced.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .params import MUCH_GREATER, ParameterError, ReducedParams


@dataclass(frozen=True)
class AnalyticPrediction:
    regime: str
    variance: float
    quantities: dict = field(default_factory=dict)
    validity: dict = field(default_factory=dict)

    @property
    def valid(self) -> bool:
        return all(self.validity.values())


def signal_to_noise(r: ReducedParams) -> float:
    """Measurement signal-to-noise ratio ``16 eta c_m (n + c_m + 1/2)``."""
    return 16 * r.eta * r.c_m * (r.n_bath + r.c_m + 0.5)


def optimal_gain_feedback_only(r: ReducedParams) -> float:
    """``sqrt(1 + SNR) - 1``, written to stay accurate for small SNR."""
    snr = signal_to_noise(r)
    return snr / (math.sqrt(1.0 + snr) + 1.0)


def feedback_only_variance(r: ReducedParams, G: float | None = None) -> float:
    """Variance with feedback and no atoms, ideal filter, at gain ``G`` (default ``r.G``).

    Obtained by integrating the spectrum with the Lorentzian integrals: the
    linewidth is ``Gamma_m (1 + G)`` and shot noise adds ``G^2 / (16 eta c_m)``.
    """
    G = r.G if G is None else G
    shot = 0.0 if G == 0 else G * G / (16 * r.eta * r.c_m)
    return 2 * (r.n_bath + r.c_m + 0.5 + shot) / (1 + G)


def feedback_only_optimum(r: ReducedParams) -> AnalyticPrediction:
    if r.c_m == 0:
        raise ParameterError("feedback-only optimum needs c_m > 0")
    if r.eta == 0:
        raise ParameterError("feedback-only optimum needs eta > 0")
    g0 = optimal_gain_feedback_only(r)
    return AnalyticPrediction(
        regime="feedback-only",
        variance=g0 / (4 * r.eta * r.c_m),
        quantities={"SNR": signal_to_noise(r), "G_opt0": g0},
        validity={"no_atoms": r.c_a == 0},
    )


def effective_atomic_phonons(r: ReducedParams) -> float:
    c = r.c
    return (c / 2) / (1 + (r.gamma_m / r.gamma_a) * (1 + c))


def linewidths(r: ReducedParams) -> dict:
    """Parallel and serial sums of atomic and broadened mechanical rates, and the normal-mode width."""
    broadened = r.gamma_m * (1 + r.c)
    return {
        "gamma_par": 1.0 / (1.0 / r.gamma_a + 1.0 / broadened),
        "gamma_ser": r.gamma_a + broadened,
        "gamma_N": 0.5 * (r.gamma_a + r.gamma_m),
    }


def weak_coupling_variance(r: ReducedParams, ratio: float = MUCH_GREATER) -> AnalyticPrediction:
    """Adiabatic-atom limit: mechanics broadened by ``1 + c`` plus an atomic phonon floor."""
    c = r.c
    n_eff = effective_atomic_phonons(r)
    var = 2.0 / (1.0 + c) * (r.n_bath + r.c_m + 0.5 + n_eff)
    return AnalyticPrediction(
        regime="weak",
        variance=var,
        quantities={"c": c, "n_a_eff": n_eff, **linewidths(r)},
        validity={
            "gamma_a_much_greater_than_g": r.gamma_a > ratio * r.g,
            "gamma_a_above_gamma_m": r.gamma_a > r.gamma_m,
        },
    )


def strong_coupling_variance(r: ReducedParams, ratio: float = MUCH_GREATER,
                             form: str = "derived") -> AnalyticPrediction:
    """Hybridised-mode limit ``g >> max(Gamma_a, Gamma_m)``.

    ``form="derived"`` (default) is ``[(Gamma_m/Gamma_N)(n + c_m) + 1] / (1 - 4 g^2/W^2)``,
    the result of integrating the two-peak approximation. ``form="literal"``
    reproduces the published expression, which carries an additional factor
    ``(1 - g^2/W^2)^2 / 2``; it undershoots the numerics by about a factor of
    two and is kept only for comparison.
    """
    gt2 = (r.g / r.Omega) ** 2
    if 4 * gt2 >= 1:
        raise ParameterError("strong-coupling variance diverges for g >= Omega/2")
    widths = linewidths(r)
    bracket = (r.gamma_m / widths["gamma_N"]) * (r.n_bath + r.c_m) + 1
    if form == "derived":
        var = bracket / (1 - 4 * gt2)
    elif form == "literal":
        var = 0.5 * bracket * (1 - gt2) ** 2 / (1 - 4 * gt2)
    else:
        raise ValueError(f"unknown form {form!r}")
    return AnalyticPrediction(
        regime="strong",
        variance=var,
        quantities={"c": r.c, "g_over_omega": math.sqrt(gt2), **widths},
        validity={"g_much_greater_than_rates": r.g > ratio * max(r.gamma_a, r.gamma_m)},
    )


@dataclass(frozen=True)
class Criterion:
    satisfied: bool
    lhs: float
    rhs: float

    @property
    def margin(self) -> float:
        """``rhs / lhs``; above one when satisfied (infinite for a zero left side)."""
        if self.lhs == 0:
            return math.inf if self.rhs > 0 else 0.0
        return self.rhs / self.lhs


@dataclass(frozen=True)
class GroundStateCriteria:
    feedback: Criterion          # n < (9 eta - 1) c_m
    bath_below_c: Criterion      # n < c
    ca_threshold: Criterion      # 1/24 < c_a
    atomic_sufficient: Criterion  # n < (2 + 3 Gm/Ga) n_a,eff - c_m
    overlap_eta: Criterion       # (1 + (2/3) Ga Gm n / W^2) / 9 < eta
    adiabatic: bool              # c Gm/Ga << 1 and Ga >> g
    atoms_outpace_heating: bool  # Gm n << Ga

    def as_dict(self) -> dict:
        out = {}
        for name in ("feedback", "bath_below_c", "ca_threshold", "atomic_sufficient", "overlap_eta"):
            crit = getattr(self, name)
            out[name] = crit.satisfied
            out[name + "_margin"] = crit.margin
        out["adiabatic"] = self.adiabatic
        out["atoms_outpace_heating"] = self.atoms_outpace_heating
        return out


def ground_state_criteria(r: ReducedParams, ratio: float = MUCH_GREATER) -> GroundStateCriteria:
    n = r.n_bath

    def crit(lhs, rhs):
        return Criterion(lhs < rhs, float(lhs), float(rhs))

    atomic_rhs = (2 + 3 * r.gamma_m / r.gamma_a) * effective_atomic_phonons(r) - r.c_m
    overlap_rhs = (1 + (2.0 / 3.0) * r.gamma_a * r.gamma_m * n / r.Omega ** 2) / 9.0
    return GroundStateCriteria(
        feedback=crit(n, (9 * r.eta - 1) * r.c_m),
        bath_below_c=crit(n, r.c),
        ca_threshold=crit(1.0 / 24.0, r.c_a),
        atomic_sufficient=crit(n, atomic_rhs),
        overlap_eta=crit(overlap_rhs, r.eta),
        adiabatic=(ratio * r.c * r.gamma_m < r.gamma_a) and (r.gamma_a > ratio * r.g),
        atoms_outpace_heating=ratio * r.gamma_m * n < r.gamma_a,
    )
