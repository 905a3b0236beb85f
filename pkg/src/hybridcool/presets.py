"""Reference parameter sets: a SiN nanostring alone and coupled to a Rb-87 ensemble.

The mechanical numbers follow the tabulated nanostring design; atomic constants
are the Rb-87 D2 line values (Steck, "Rubidium 87 D Line Data"). The coupling
rate ``g_m`` is read as angular (rad s^-1 m^-1) and ``Gamma_m/2pi = 31 mHz``.
"""

from __future__ import annotations

import math

from .params import PhysicalParams, ReducedParams, bose_occupation, reduce

OMEGA = 2 * math.pi * 220e3
GAMMA_M = 2 * math.pi * 31e-3
T_BATH = 0.3
MASS = 1.4e-12

RB87_MASS = 1.443160648e-25
RB87_D2_WAVELENGTH = 780.241209686e-9
RB87_D2_DIPOLE = 3.58424e-29          # C m, cycling transition
RB87_D2_DECAY = 2 * math.pi * 6.0666e6  # rad/s

#: tabulated 8 c_m / n for the mechanics-only point (dB)
SQUARE_BACKACTION_DB = 9.03


def _physical(g_m: float, gamma_a: float, N: float) -> PhysicalParams:
    return PhysicalParams(
        M=MASS, omega_m=OMEGA, gamma_m=GAMMA_M, T_bath=T_BATH,
        m_atom=1.44e-25, N=N, omega_a=OMEGA, gamma_a=gamma_a,
        kappa_MC=20 * OMEGA, kappa_AC=20 * OMEGA, alpha_d=6.58e6, g_m=g_m,
        k_wave=2 * math.pi / RB87_D2_WAVELENGTH, delta_t=-2 * math.pi * 1e9,
        mu=RB87_D2_DIPOLE, mode_volume=2.8e-8, gamma_e=RB87_D2_DECAY, eta=1.0,
    )


def square_physical() -> PhysicalParams:
    """Mechanics-only design (no atoms loaded)."""
    return _physical(g_m=9.85e15, gamma_a=OMEGA, N=0)


def square_reduced(eta: float = 1.0) -> ReducedParams:
    """Mechanics-only point with ``8 c_m / n`` fixed to the tabulated 9.03 dB.

    The tabulated ``g_m`` does not reproduce this ratio under either unit
    reading, so ``c_m`` is pinned to the ratio itself, which is what the
    quoted 1.41 x_zp^2 result depends on.
    """
    n = bose_occupation(OMEGA, T_BATH)
    c_m = n * 10 ** (SQUARE_BACKACTION_DB / 10) / 8
    return ReducedParams(OMEGA, GAMMA_M, OMEGA, n, c_m, 0.0, eta)


def diamond_physical(strong: bool = False) -> PhysicalParams:
    """Hybrid design; ``strong`` selects ``Gamma_a = 100 Gamma_m`` instead of ``Omega``."""
    gamma_a = 100 * GAMMA_M if strong else OMEGA
    return _physical(g_m=3.19e15, gamma_a=gamma_a, N=3.1e8)


def diamond_reduced(strong: bool = False, eta: float = 1.0) -> ReducedParams:
    return reduce(diamond_physical(strong)).replace(eta=eta)


def figure_grid_spec(strong: bool = False, nx: int = 64, ny: int = 64) -> dict:
    """Default map: ``log10(8 c_m/n)`` in [-3, 3]; ``log10(c_a)`` in [-3, 3] (weak) or [2, 8] (strong)."""
    n = bose_occupation(OMEGA, T_BATH)
    return {
        "x_range": [-3.0, 3.0], "nx": nx,
        "y_range": [2.0, 8.0] if strong else [-3.0, 3.0], "ny": ny,
        "Omega": OMEGA, "gamma_m": GAMMA_M,
        "gamma_a": 100 * GAMMA_M if strong else OMEGA,
        "n_bath": n, "eta": 1.0,
    }
