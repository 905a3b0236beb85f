"""Mechanical position power spectrum.

Two assembly routes are provided:

``closed-form``
    The ideal-filter (infinite bandwidth) expression, written term by term
    as vacuum + thermal + back-action + shot-noise/back-action correlation +
    shot noise + cold-bath noise filtered by the atoms.
``correlator-sum``
    A first-principles sum over the force correlator table,
    ``S = sum_jk T_j(w) conj(T_k(w)) C_jk(w)``, valid for any filter
    bandwidth.

Correlators are stored as coefficient functions ``C(w)`` of
``<A(w) B(w')> = 2 pi C(w) delta(w + w')``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .params import HBAR, ReducedParams
from .response import ModifiedSusceptibility, chi_a, feedback_filter


class NoiseSource(str, enum.Enum):
    THERMAL = "thermal"
    MECH_BACK_ACTION = "back_action"
    FEEDBACK_SHOT = "shot_noise"
    FEEDBACK_CROSS = "shot_back_action"
    ATOM_COLD_BATH = "cold_bath"


ALL_SOURCES = tuple(NoiseSource)


class MeasurementError(ValueError):
    """Feedback requested with no optical measurement channel (c_m = 0)."""


# force channels appearing in the correlator table
_FORCES = ("TH", "BA", "SN", "CB")


@dataclass(frozen=True)
class SpectrumModel:
    """Noise coefficients and responses for one parameter point.

    ``M`` and ``atom_mass`` default to values consistent with ``x_zp_m`` /
    ``x_zp_a`` when present, else 1 kg; results in zero-point units do not
    depend on them.

    The shot-noise/back-action term is odd in frequency. Summing both
    orderings of its correlator gives a coefficient ``G/2``; the frequently
    quoted closed form carries ``G/4``, selectable with
    ``literal_cross=True``. Neither choice changes any variance.
    """

    params: ReducedParams
    mode: str = "auto"
    sources: tuple[NoiseSource, ...] = ALL_SOURCES
    M: float = field(default=None)
    atom_mass: float = field(default=None)
    literal_cross: bool = False

    def __post_init__(self):
        r = self.params
        mode = self.mode
        if mode == "auto":
            mode = "closed-form" if r.infinite_bandwidth else "correlator-sum"
        if mode not in ("closed-form", "correlator-sum"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if mode == "closed-form" and not r.infinite_bandwidth:
            raise ValueError("closed-form mode is the infinite-bandwidth limit; "
                             "use correlator-sum for a finite filter")
        object.__setattr__(self, "mode", mode)
        object.__setattr__(self, "sources", tuple(NoiseSource(s) for s in self.sources))
        if self.M is None:
            M = 1.0 if r.x_zp_m is None else HBAR / (2 * r.Omega * r.x_zp_m ** 2)
            object.__setattr__(self, "M", M)
        if self.atom_mass is None:
            ma = self.M if r.x_zp_a is None else HBAR / (2 * r.Omega * r.x_zp_a ** 2)
            object.__setattr__(self, "atom_mass", ma)
        if r.G > 0 and r.c_m == 0:
            raise MeasurementError("feedback without measurement channel (c_m = 0, G > 0)")

    @property
    def x_zp_m(self) -> float:
        return math.sqrt(HBAR / (2 * self.M * self.params.Omega))

    @property
    def susceptibility(self) -> ModifiedSusceptibility:
        return ModifiedSusceptibility(self.params, self.M, self.atom_mass)

    @property
    def K(self) -> float:
        return self.susceptibility.K

    def poles(self) -> np.ndarray:
        from .response import atomic_poles

        return np.concatenate([self.susceptibility.poles(), atomic_poles(self.params)])

    def with_params(self, params: ReducedParams) -> "SpectrumModel":
        return SpectrumModel(params, self.mode, self.sources, self.M, self.atom_mass,
                             self.literal_cross)

    # -- evaluation -------------------------------------------------------

    def source_spectra(self, omega, detuning=None) -> np.ndarray:
        """Spectrum split by noise source, shape ``(len(sources), len(omega))`` (m^2 s).

        ``detuning``, if given, must equal ``|omega| - Omega`` and is used in
        place of ``omega`` wherever the difference matters.
        """
        omega = np.asarray(omega, dtype=float)
        if self.mode == "closed-form":
            parts = _closed_form_parts(self, omega, detuning)
        else:
            parts = _correlator_parts(self, omega, detuning)
        return np.stack([parts[s] for s in self.sources])

    def __call__(self, omega, detuning=None):
        return self.source_spectra(omega, detuning).sum(axis=0)

    def ds_dG(self, omega, detuning=None):
        """Analytic derivative of the total spectrum with respect to the gain."""
        return _ds_dG(self, np.asarray(omega, dtype=float), detuning)


def s_xx(model: SpectrumModel, omega):
    """Total position spectral density (m^2 s) at ``omega`` (rad/s)."""
    return model(omega)


def ds_dG(model: SpectrumModel, omega):
    return model.ds_dG(omega)


def _shot_coefficient(r: ReducedParams) -> float:
    if r.G == 0:
        return 0.0
    if r.c_m == 0:
        raise MeasurementError("feedback without measurement channel (c_m = 0, G > 0)")
    if r.eta == 0:
        return math.inf
    return r.G ** 2 / (16 * r.eta * r.c_m)


def _cross_coefficient(model: SpectrumModel) -> float:
    return 0.25 if model.literal_cross else 0.5


def _closed_form_parts(model: SpectrumModel, omega, detuning=None):
    r = model.params
    chi2 = np.abs(model.susceptibility(omega, detuning)) ** 2
    u = omega / r.Omega
    pref = 2 * HBAR * chi2 * r.gamma_m * model.M * r.Omega
    ca2 = np.abs(chi_a(r, omega, model.atom_mass, detuning)) ** 2
    return {
        NoiseSource.THERMAL: pref * (0.5 + r.n_bath),
        NoiseSource.MECH_BACK_ACTION: pref * r.c_m,
        NoiseSource.FEEDBACK_CROSS: pref * u * r.G * _cross_coefficient(model),
        NoiseSource.FEEDBACK_SHOT: pref * u * u * _shot_coefficient(r),
        NoiseSource.ATOM_COLD_BATH: (2 * HBAR * chi2 * model.K ** 2 * ca2
                                     * r.gamma_a * model.atom_mass * r.Omega * 0.5),
    }


@dataclass(frozen=True)
class Correlators:
    """Force correlator coefficients for one model (finite or infinite bandwidth)."""

    model: SpectrumModel

    def coefficient(self, a: str, b: str, omega):
        """``C_ab(w)`` with ``<F_a(w) F_b(w')> = 2 pi C_ab(w) delta(w + w')``."""
        r = self.model.params
        M, ma = self.model.M, self.model.atom_mass
        omega = np.asarray(omega, dtype=float)
        zero = np.zeros_like(omega, dtype=complex)
        base = 2 * HBAR * r.gamma_m * r.Omega * M
        if (a, b) == ("TH", "TH"):
            return zero + base * (r.n_bath + 0.5)
        if (a, b) == ("CB", "CB"):
            return zero + 2 * HBAR * r.gamma_a * ma * r.Omega * 0.5
        if (a, b) == ("BA", "BA"):
            return zero + base * r.c_m
        if (a, b) == ("SN", "BA"):
            return base * (r.G / 4) * (omega / r.Omega) * feedback_filter(r, omega)
        if (a, b) == ("BA", "SN"):
            # <A(w) B(w')> = <B(-w') A(-w)>^*  with w' = -w
            return np.conj(self.coefficient("SN", "BA", omega))
        if (a, b) == ("SN", "SN"):
            filt = feedback_filter(r, omega)
            # omega * omega' = -omega^2 on the delta shell; filt(-w) = conj(filt(w))
            return (-base * _shot_coefficient(r) * (-(omega / r.Omega) ** 2)
                    * filt * np.conj(filt))
        return zero

    def table(self, omega) -> dict[tuple[str, str], np.ndarray]:
        return {(a, b): self.coefficient(a, b, omega) for a in _FORCES for b in _FORCES}

    def conjugation_residual(self, omega) -> float:
        """Largest violation of ``C_ab(w) = conj(C_ba(w))`` over the table."""
        worst = 0.0
        for a in _FORCES:
            for b in _FORCES:
                lhs = self.coefficient(a, b, omega)
                rhs = np.conj(self.coefficient(b, a, omega))
                scale = max(np.max(np.abs(lhs)), np.max(np.abs(rhs)), 1e-300)
                worst = max(worst, float(np.max(np.abs(lhs - rhs)) / scale))
        return worst


def correlators(model: SpectrumModel) -> Correlators:
    return Correlators(model)


_SOURCE_PAIRS = {
    NoiseSource.THERMAL: [("TH", "TH")],
    NoiseSource.MECH_BACK_ACTION: [("BA", "BA")],
    NoiseSource.FEEDBACK_SHOT: [("SN", "SN")],
    NoiseSource.FEEDBACK_CROSS: [("SN", "BA"), ("BA", "SN")],
    NoiseSource.ATOM_COLD_BATH: [("CB", "CB")],
}


def _correlator_parts(model: SpectrumModel, omega, detuning=None):
    r = model.params
    chi = model.susceptibility(omega, detuning)
    transfer = {
        "TH": chi,
        "BA": chi,
        "SN": chi,
        "CB": chi * model.K * chi_a(r, omega, model.atom_mass, detuning),
    }
    corr = Correlators(model)
    parts = {}
    for source, pairs in _SOURCE_PAIRS.items():
        total = np.zeros_like(omega, dtype=complex)
        for a, b in pairs:
            total += transfer[a] * np.conj(transfer[b]) * corr.coefficient(a, b, omega)
        parts[source] = total.real
    return parts


def _ds_dG(model: SpectrumModel, omega, detuning=None):
    r = model.params
    sus = model.susceptibility
    chi = sus(omega, detuning)
    chi2 = np.abs(chi) ** 2
    # d|chi|^2/dG = -2 |chi|^2 Re(chi * d(chi^-1)/dG)
    dchi2 = -2 * chi2 * np.real(chi * sus.dinverse_dG(omega))
    u = omega / r.Omega
    base = 2 * HBAR * r.gamma_m * model.M * r.Omega
    filt2 = np.abs(feedback_filter(r, omega)) ** 2
    shot = _shot_coefficient(r)
    cross = _cross_coefficient(model) * u * np.real(feedback_filter(r, omega))
    bracket = base * (0.5 + r.n_bath + r.c_m + cross * r.G + u * u * shot * filt2)
    if r.G > 0:
        dshot = 2 * shot / r.G
    elif r.c_m > 0 and r.eta > 0:
        dshot = 0.0
    else:
        raise MeasurementError("gain derivative needs a measurement channel (c_m > 0, eta > 0)")
    dbracket = base * (cross + u * u * dshot * filt2)
    atoms = 2 * HBAR * model.K ** 2 * np.abs(chi_a(r, omega, model.atom_mass, detuning)) ** 2 \
        * r.gamma_a * model.atom_mass * r.Omega * 0.5
    return dchi2 * (bracket + atoms) + chi2 * dbracket
