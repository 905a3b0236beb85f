"""Linear response functions of the coupled atom-mechanical system.

Frequencies are angular (rad/s) and susceptibilities carry SI units
(m/N per unit bandwidth, i.e. s^2/kg). Masses default to 1 kg; only mass
ratios enter dimensionless results.

The modified mechanical susceptibility is evaluated directly in factored
form, ``(W - w)(W + w)``, so that narrow resonances keep full relative
precision. Callers that know the detuning ``|w| - W`` exactly (the
integrator does) may pass it as ``detuning``; the factor then becomes
``-d (2 W + d)`` and no longer depends on how well ``w`` itself is
represented. Its denominator is additionally kept as polynomial coefficients in
the normalised frequency ``nu = w / W`` for pole finding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .params import HBAR, ReducedParams


def companion_roots(coeffs) -> np.ndarray:
    """Roots of a polynomial (highest power first) as companion-matrix eigenvalues."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=complex), "f")
    if c.size < 2:
        return np.empty(0, dtype=complex)
    c = c / c[0]
    n = c.size - 1
    comp = np.zeros((n, n), dtype=complex)
    comp[0, :] = -c[1:]
    comp[1:, :-1] = np.eye(n - 1)
    return np.linalg.eigvals(comp)


def _resonant(omega0, omega, gamma, detuning=None):
    omega = np.asarray(omega, dtype=float)
    if detuning is None:
        diff = (omega0 - omega) * (omega0 + omega)
    else:
        d = np.asarray(detuning, dtype=float)
        diff = -d * (2 * omega0 + d)
    return diff - 1j * omega * gamma


def chi_m(r: ReducedParams, omega, M: float = 1.0, detuning=None):
    """Bare mechanical susceptibility ``1 / (M (W^2 - w^2 - i w Gamma_m))``."""
    return 1.0 / (M * _resonant(r.Omega, omega, r.gamma_m, detuning))


def chi_a(r: ReducedParams, omega, atom_mass: float = 1.0, detuning=None):
    """Atomic centre-of-mass susceptibility; ``atom_mass`` is the total mass N m."""
    return 1.0 / (atom_mass * _resonant(r.Omega, omega, r.gamma_a, detuning))


def feedback_filter(r: ReducedParams, omega):
    """Low-pass factor ``1 / (1 - i w / bandwidth)``; identically 1 in the ideal limit."""
    omega = np.asarray(omega, dtype=float)
    if r.infinite_bandwidth:
        return np.ones_like(omega, dtype=complex)
    return 1.0 / (1.0 - 1j * omega / r.fb_bandwidth)


def spring_constant(r: ReducedParams, M: float = 1.0, atom_mass: float = 1.0) -> float:
    """Effective spring constant rebuilt from the coupling rate, ``hbar g / (x_zp,a x_zp,m)``."""
    x_m = math.sqrt(HBAR / (2 * M * r.Omega))
    x_a = math.sqrt(HBAR / (2 * atom_mass * r.Omega))
    return HBAR * r.g / (x_a * x_m)


@dataclass(frozen=True)
class ModifiedSusceptibility:
    """Mechanical susceptibility dressed by feedback and by the atoms."""

    params: ReducedParams
    M: float = 1.0
    atom_mass: float = 1.0

    @property
    def K(self) -> float:
        return spring_constant(self.params, self.M, self.atom_mass)

    def inverse(self, omega, detuning=None):
        r = self.params
        omega = np.asarray(omega, dtype=float)
        inv = self.M * _resonant(r.Omega, omega, r.gamma_m, detuning)
        if r.G:
            inv = inv - 1j * omega * r.G * self.M * r.gamma_m * feedback_filter(r, omega)
        if r.g:
            inv = inv - self.K ** 2 * chi_a(r, omega, self.atom_mass, detuning)
        return inv

    def __call__(self, omega, detuning=None):
        return 1.0 / self.inverse(omega, detuning)

    def dinverse_dG(self, omega):
        r = self.params
        omega = np.asarray(omega, dtype=float)
        return -1j * omega * self.M * r.gamma_m * feedback_filter(r, omega)

    def denominator(self) -> np.ndarray:
        """Coefficients (highest power first, in ``nu = w / W``) of the pole polynomial.

        Degree 4 in the ideal-filter limit and 5 with a finite bandwidth when
        the atoms are coupled.
        """
        r = self.params
        gm, ga = r.gamma_m / r.Omega, r.gamma_a / r.Omega
        gt = r.g / r.Omega
        d_m = np.array([-1.0, -1j * gm, 1.0])
        d_a = np.array([-1.0, -1j * ga, 1.0])
        if r.infinite_bandwidth:
            mech = np.polyadd(d_m, [-1j * gm * r.G, 0.0])
            filt = np.array([1.0])
        else:
            filt = np.array([-1j * r.Omega / r.fb_bandwidth, 1.0])
            mech = np.polyadd(np.polymul(d_m, filt), [-1j * gm * r.G, 0.0])
        if gt == 0:
            return np.trim_zeros(mech, "f")
        return np.trim_zeros(np.polysub(np.polymul(mech, d_a), 4 * gt * gt * filt), "f")

    def poles(self) -> np.ndarray:
        """Complex poles in rad/s (all in the lower half plane when stable)."""
        return self.params.Omega * companion_roots(self.denominator())


def chi_m_prime(r: ReducedParams, omega, M: float = 1.0, atom_mass: float = 1.0):
    return ModifiedSusceptibility(r, M, atom_mass)(omega)


def atomic_poles(r: ReducedParams) -> np.ndarray:
    return r.Omega * companion_roots([-1.0, -1j * r.gamma_a / r.Omega, 1.0])


def normal_mode_parameters(r: ReducedParams, M: float = 1.0):
    """Effective mass, squared frequencies (+, -) and linewidth of the hybrid modes."""
    gt = r.g / r.Omega
    mass = 2 * M * (1 - gt * gt)
    w2_plus = r.Omega ** 2 * (1 - 2 * gt)
    w2_minus = r.Omega ** 2 * (1 + 2 * gt)
    gamma_n = 0.5 * (r.gamma_a + r.gamma_m)
    return mass, w2_plus, w2_minus, gamma_n


def chi_normal_modes(r: ReducedParams, omega, M: float = 1.0):
    """Susceptibilities of the symmetric (+, lower) and antisymmetric (-) modes."""
    omega = np.asarray(omega, dtype=float)
    mass, w2p, w2m, gamma_n = normal_mode_parameters(r, M)
    chi_p = 1.0 / (mass * (w2p - omega ** 2 - 1j * omega * gamma_n))
    chi_n = 1.0 / (mass * (w2m - omega ** 2 - 1j * omega * gamma_n))
    return chi_p, chi_n
