"""Parameter sets for the hybrid atom-optomechanical cooling model.

Two layers are provided. :class:`PhysicalParams` describes the apparatus in
SI units; :func:`reduce` collapses it to :class:`ReducedParams`, the closed
set of dimensionless cooperativities and rates that every downstream module
works with. All rates are angular (rad/s).
"""

from __future__ import annotations

import dataclasses
import enum
import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from scipy import constants

HBAR = constants.hbar
KB = constants.k

#: Default factor used to operationalise "much greater than".
MUCH_GREATER = 10.0

#: Mechanical-frequency threshold above which a coupling counts as unstable.
STABILITY_FRACTION = 0.5


class ParameterError(ValueError):
    """Raised when a parameter set violates its invariants."""


def _positive(name: str, value: float) -> None:
    if not (value > 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be finite and strictly positive, got {value!r}")


def _nonnegative(name: str, value: float) -> None:
    if not (value >= 0 and math.isfinite(value)):
        raise ParameterError(f"{name} must be finite and non-negative, got {value!r}")


def bose_occupation(omega: float, temperature: float, high_temperature: bool = False) -> float:
    """Mean thermal phonon number of a mode at ``omega`` (rad/s)."""
    if temperature == 0:
        return 0.0
    x = HBAR * omega / (KB * temperature)
    if high_temperature:
        return 1.0 / x
    return 1.0 / math.expm1(x)


def zero_point(mass: float, omega: float) -> float:
    """Zero-point position spread ``sqrt(hbar / 2 m omega)``."""
    return math.sqrt(HBAR / (2.0 * mass * omega))


@dataclass(frozen=True)
class PhysicalParams:
    """Full apparatus description, SI units, angular rates."""

    M: float
    omega_m: float
    gamma_m: float
    T_bath: float
    m_atom: float
    N: float
    omega_a: float
    gamma_a: float
    kappa_MC: float
    kappa_AC: float
    alpha_d: float
    g_m: float
    k_wave: float
    delta_t: float
    mu: float
    mode_volume: float
    gamma_e: float
    eta: float

    def __post_init__(self):
        for name in ("M", "omega_m", "gamma_m", "m_atom", "omega_a", "gamma_a",
                     "kappa_MC", "kappa_AC", "k_wave", "mu", "mode_volume", "gamma_e"):
            _positive(name, getattr(self, name))
        _nonnegative("T_bath", self.T_bath)
        _nonnegative("alpha_d", self.alpha_d)
        # N = 0 is accepted and means "no atoms loaded".
        _nonnegative("N", self.N)
        if not (self.delta_t < 0 and math.isfinite(self.delta_t)):
            raise ParameterError("delta_t must be negative (red detuning)")
        if self.g_m == 0 or not math.isfinite(self.g_m):
            raise ParameterError("g_m must be finite and nonzero")
        if not 0.0 <= self.eta <= 1.0:
            raise ParameterError("eta must lie in [0, 1]")

    @property
    def x_zp_m(self) -> float:
        return zero_point(self.M, self.omega_m)

    @property
    def x_zp_a(self) -> float:
        """Zero-point spread of the atomic centre of mass (infinite when N = 0)."""
        if self.N == 0:
            return math.inf
        return zero_point(self.N * self.m_atom, self.omega_a)

    @property
    def omega_d(self) -> float:
        """Drive (optical) angular frequency inferred from the wavenumber."""
        return constants.c * self.k_wave


@dataclass(frozen=True)
class ReducedParams:
    """Closed parameter set used by the spectrum, quadrature and oracle modules.

    ``fb_bandwidth`` is the feedback filter bandwidth in rad/s; ``math.inf``
    selects the exact infinite-bandwidth limit rather than a large number.
    ``x_zp_m`` / ``x_zp_a`` are optional and only used to express results in
    metres.
    """

    Omega: float
    gamma_m: float
    gamma_a: float
    n_bath: float
    c_m: float
    c_a: float
    eta: float = 1.0
    G: float = 0.0
    fb_bandwidth: float = math.inf
    x_zp_m: float | None = field(default=None, compare=False)
    x_zp_a: float | None = field(default=None, compare=False)

    def __post_init__(self):
        _positive("Omega", self.Omega)
        _positive("gamma_m", self.gamma_m)
        _positive("gamma_a", self.gamma_a)
        _nonnegative("n_bath", self.n_bath)
        _nonnegative("c_m", self.c_m)
        _nonnegative("c_a", self.c_a)
        _nonnegative("G", self.G)
        if not 0.0 <= self.eta <= 1.0:
            raise ParameterError("eta must lie in [0, 1]")
        if not self.fb_bandwidth > 0:
            raise ParameterError("fb_bandwidth must be positive (math.inf for the ideal limit)")

    @property
    def c(self) -> float:
        """Atom-mechanical cooperativity ``16 c_a c_m``."""
        return 16.0 * self.c_a * self.c_m

    @property
    def g(self) -> float:
        """Atom-mechanical coupling rate (rad/s) from ``c = 4 g^2 / (Gamma_a Gamma_m)``."""
        return 0.5 * math.sqrt(self.c * self.gamma_a * self.gamma_m)

    @property
    def infinite_bandwidth(self) -> bool:
        return math.isinf(self.fb_bandwidth)

    @property
    def stable(self) -> bool:
        return stability(self)

    def replace(self, **changes) -> "ReducedParams":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        out = dataclasses.asdict(self)
        return {k: v for k, v in out.items() if v is not None}


@dataclass(frozen=True)
class CouplingRate:
    g: float
    K: float
    g_from_K: float
    x_zp_m: float
    x_zp_a: float


def reduce(p: PhysicalParams, G: float = 0.0, fb_bandwidth: float = math.inf,
           high_temperature: bool = False) -> ReducedParams:
    """Collapse a physical parameter set to cooperativities.

    Requires resonant operation (``omega_a == omega_m``). With no drive light
    (``alpha_d == 0``) or no atoms both cooperativities involving the missing
    ingredient are zero.
    """
    if not math.isclose(p.omega_a, p.omega_m, rel_tol=1e-12):
        raise ParameterError("only resonant operation omega_a == omega_m is supported")
    n_bath = bose_occupation(p.omega_m, p.T_bath, high_temperature)
    if p.alpha_d == 0:
        c_m = 0.0
        c_a = 0.0
    else:
        c_m = (2 * HBAR / (p.M * p.omega_m * p.gamma_m)) * (2 * p.g_m * p.alpha_d / p.kappa_MC) ** 2
        c_a = atom_cooperativity(p)
    x_zp_a = p.x_zp_a if p.N > 0 else None
    return ReducedParams(
        Omega=p.omega_m, gamma_m=p.gamma_m, gamma_a=p.gamma_a, n_bath=n_bath,
        c_m=c_m, c_a=c_a, eta=p.eta, G=G, fb_bandwidth=fb_bandwidth,
        x_zp_m=p.x_zp_m, x_zp_a=x_zp_a,
    )


def coupling_rate(p: PhysicalParams) -> CouplingRate:
    """Atom-mechanical coupling rate from the physical parameters.

    Also evaluates the effective spring constant from the atom-light coupling
    implied by the trap frequency, and checks that ``K x_zp,a x_zp,m / hbar``
    reproduces the direct expression.
    """
    x_zp_m = p.x_zp_m
    if p.N == 0 or p.alpha_d == 0:
        return CouplingRate(0.0, 0.0, 0.0, x_zp_m, p.x_zp_a)
    g = (math.sqrt(p.N) * abs(p.g_m) / p.k_wave * p.omega_a / p.kappa_MC
         * math.sqrt(p.m_atom * p.omega_a / (p.M * p.omega_m)))
    # single-atom light shift consistent with the stated trap frequency (negative: red detuned)
    g_a = -p.m_atom * p.omega_a ** 2 * p.kappa_AC / (32 * HBAR * p.k_wave ** 2 * p.alpha_d ** 2)
    K = -64 * HBAR * p.N * p.k_wave * g_a * abs(p.g_m) * p.alpha_d ** 2 / (p.kappa_AC * p.kappa_MC)
    x_zp_a = p.x_zp_a
    g_from_K = K * x_zp_a * x_zp_m / HBAR
    if not math.isclose(g, g_from_K, rel_tol=1e-12):
        raise RuntimeError(f"coupling-rate routes disagree: {g} vs {g_from_K}")
    return CouplingRate(g, K, g_from_K, x_zp_m, x_zp_a)


def stability(r: ReducedParams) -> bool:
    """True when the resonant coupled system is stable, ``g < Omega / 2``."""
    return r.g < STABILITY_FRACTION * r.Omega


class RegimeLabel(str, enum.Enum):
    SYMPATHETIC_GROUND = "SympatheticGround"
    FEEDBACK_GROUND = "FeedbackGround"
    BOTH_GROUND = "BothGround"
    NEITHER = "Neither"
    UNSTABLE = "Unstable"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class RegimeReport:
    label: RegimeLabel
    bath_below_c: bool
    ca_above_threshold: bool
    atoms_outpace_heating: bool
    feedback_condition: bool
    overlap_eta: bool

    @property
    def sympathetic(self) -> bool:
        return self.bath_below_c and self.ca_above_threshold and self.atoms_outpace_heating


def classify(r: ReducedParams, ratio: float = MUCH_GREATER,
             allow_unstable: bool = False) -> RegimeReport:
    """Assign the ground-state-cooling regime of ``r``.

    Unstable parameters raise unless ``allow_unstable`` is set, in which case
    they are labelled :attr:`RegimeLabel.UNSTABLE`.
    """
    stable = stability(r)
    if not stable and not allow_unstable:
        raise ParameterError("classify requires stable parameters (g < Omega/2)")
    bath_below_c = r.n_bath < r.c
    ca_above = r.c_a > 1.0 / 24.0
    outpace = r.gamma_m * r.n_bath * ratio < r.gamma_a
    feedback = r.n_bath < (9 * r.eta - 1) * r.c_m
    overlap = r.eta > (1 + (2.0 / 3.0) * r.gamma_a * r.gamma_m * r.n_bath / r.Omega ** 2) / 9.0
    symp = bath_below_c and ca_above and outpace
    if not stable:
        label = RegimeLabel.UNSTABLE
    elif symp and feedback:
        label = RegimeLabel.BOTH_GROUND
    elif symp:
        label = RegimeLabel.SYMPATHETIC_GROUND
    elif feedback:
        label = RegimeLabel.FEEDBACK_GROUND
    else:
        label = RegimeLabel.NEITHER
    return RegimeReport(label, bath_below_c, ca_above, outpace, feedback, overlap)


@dataclass(frozen=True)
class DiagnosticsReport:
    gordon_ashkin_rate: float
    gordon_ashkin_negligible: bool
    lossy_heating_rate: float
    adiabatic_MC: bool
    adiabatic_AC: bool
    atom_light_coupling: float
    trap_frequency_from_optics: float


def diagnostics(p: PhysicalParams, ratio: float = MUCH_GREATER) -> DiagnosticsReport:
    """Physical-consistency checks that the linear model silently assumes."""
    ga_rate = p.omega_a * p.gamma_e / (8 * abs(p.delta_t))
    lossy = 2 * p.gamma_a * atom_cooperativity(p)
    fastest = max(p.omega_a, p.omega_m)
    g_a = p.mu ** 2 * p.omega_d / (2 * HBAR * p.delta_t * constants.epsilon_0 * p.mode_volume)
    alpha_lr_sq = 4 * p.alpha_d ** 2 / p.kappa_AC
    trap = 2 * p.k_wave * math.sqrt(-2 * HBAR * g_a * alpha_lr_sq / p.m_atom)
    return DiagnosticsReport(
        gordon_ashkin_rate=ga_rate,
        gordon_ashkin_negligible=ga_rate * ratio < p.gamma_a / 2,
        lossy_heating_rate=lossy,
        adiabatic_MC=p.kappa_MC > ratio * fastest,
        adiabatic_AC=p.kappa_AC > ratio * fastest,
        atom_light_coupling=g_a,
        trap_frequency_from_optics=trap,
    )


def atom_cooperativity(p: PhysicalParams) -> float:
    if p.N == 0 or p.alpha_d == 0:
        return 0.0
    return p.N * p.m_atom * p.omega_a ** 3 / (2 * HBAR * p.gamma_a) / (4 * p.k_wave * p.alpha_d) ** 2


# --- parameter files -------------------------------------------------------

_UNIT_RE = re.compile(r"^\s*([-+0-9.eE]+)\s*([a-zA-Z/]*)\s*$")
_CYCLIC = {"Hz": 1.0, "mHz": 1e-3, "kHz": 1e3, "MHz": 1e6, "GHz": 1e9}


def _parse_value(key: str, value: Any) -> float:
    """Numbers are SI/angular; strings may carry a cyclic unit (``"220 kHz"``)."""
    if isinstance(value, bool):
        raise ParameterError(f"{key}: boolean is not a valid value")
    if isinstance(value, (int, float)):
        return float(value)
    if value is None:
        return math.inf
    if isinstance(value, str):
        if value.strip().lower() in ("inf", "infinity"):
            return math.inf
        m = _UNIT_RE.match(value)
        if not m:
            raise ParameterError(f"{key}: cannot parse {value!r}")
        number, unit = float(m.group(1)), m.group(2)
        if unit in ("", "rad/s"):
            return number
        if unit in _CYCLIC:
            return 2 * math.pi * number * _CYCLIC[unit]
        raise ParameterError(f"{key}: unknown unit {unit!r}")
    raise ParameterError(f"{key}: unsupported value {value!r}")


def _from_mapping(cls, data: dict[str, Any]):
    names = {f.name for f in dataclasses.fields(cls)}
    unknown = set(data) - names
    if unknown:
        raise ParameterError(f"unknown keys for {cls.__name__}: {sorted(unknown)}")
    return cls(**{k: _parse_value(k, v) for k, v in data.items()})


def physical_from_dict(data: dict[str, Any]) -> PhysicalParams:
    return _from_mapping(PhysicalParams, data)


def reduced_from_dict(data: dict[str, Any]) -> ReducedParams:
    return _from_mapping(ReducedParams, data)


def load_params(path: str | Path, reduced: bool = False):
    """Read a flat JSON parameter file; unknown keys are rejected."""
    data = json.loads(Path(path).read_text())
    if not isinstance(data, dict):
        raise ParameterError("parameter file must hold a JSON object")
    return reduced_from_dict(data) if reduced else physical_from_dict(data)
