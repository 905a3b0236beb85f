"""Time-domain steady-state oracle.

The Langevin equations are written as ``dy/dt = A y + B xi`` with white
inputs ``xi`` whose correlation matrix ``Q`` (``<xi_j(t) xi_k(t')> = Q_jk
delta(t - t')``) is Hermitian but not real: the back-action and measurement
quadratures of the probe light do not commute. The stationary covariance
solves ``A S + S A^T + B Re(Q) B^T = 0``.

Everything here is dimensionless and built independently of the frequency
domain code: ``hbar = Omega = 1`` and both masses are ``1/2``, so
``x_zp = 1`` and the position variance comes out directly in zero-point
units (momenta carry ``p_zp^2 = 1/4``).

Noise construction. With ``a = sqrt(gamma_m c_m)`` the probe amplitude
quadrature ``X+`` drives the mechanics as ``F_BA = -a X+`` (strength
``gamma_m c_m``), and the estimated position carries the imprecision
``x_n = -(X- + sqrt(1/eta - 1) Z) / (2 a)`` (strength ``1/(4 eta gamma_m c_m)``).
``<X- X+> = -i`` then gives ``<F_SN F_BA>`` exactly, while ``Z`` is the
vacuum admitted by inefficient detection. The feedback force is
``-G gamma_m M d/dt(L * (x_m + x_n))`` with ``L`` the low-pass filter.

* finite bandwidth ``d`` and ``G > 0``: state ``(x_a, p_a, x_m, p_m, z)`` with
  ``dz/dt = d (x_m + x_n - z)``, so the force is ``-G gamma_m M d (x_m + x_n - z)``;
* ideal filter: the force is proportional to the derivative of white noise,
  which is absorbed by the canonical variable ``q = p_m + G gamma_m M (x_m + x_n)``;
  state ``(x_a, p_a, x_m, q)``. The physical momentum variance is then
  unbounded and reported as ``inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_continuous_lyapunov

from .params import ParameterError, ReducedParams

MASS = 0.5  # x_zp = sqrt(hbar / (2 m Omega)) = 1
P_ZP2 = MASS / 2  # hbar m Omega / 2

_INPUTS = ("thermal", "cold_bath", "X+", "X-", "vacuum")


class StabilityMismatchError(RuntimeError):
    """Eigenvalue test and the g < Omega/2 rule disagree."""


@dataclass(frozen=True)
class LinearSystem:
    labels: tuple[str, ...]
    A: np.ndarray
    B: np.ndarray
    Q: np.ndarray
    params: ReducedParams

    @property
    def D(self) -> np.ndarray:
        """Symmetrised diffusion matrix ``B Re(Q) B^T``."""
        return self.B @ self.Q.real @ self.B.T

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def is_hurwitz(self) -> bool:
        return bool(np.all(np.linalg.eigvals(self.A).real < 0))

    def transfer(self, nu) -> np.ndarray:
        """``H(nu) = (-i nu - A)^-1 B`` for each normalised frequency, shape ``(len(nu), n, k)``."""
        nu = np.atleast_1d(np.asarray(nu, dtype=float))
        eye = np.eye(self.A.shape[0])
        lhs = -1j * nu[:, None, None] * eye - self.A
        return np.linalg.solve(lhs, np.broadcast_to(self.B, (nu.size,) + self.B.shape))

    def spectrum(self, nu, label: str = "x_m") -> np.ndarray:
        """Position spectrum in zero-point units per unit ``nu``; includes the odd part."""
        i = self.index(label)
        h = self.transfer(nu)[:, i, :]
        return np.einsum("nj,jk,nk->n", h, self.Q, h.conj()).real


def build_system(r: ReducedParams) -> LinearSystem:
    gm = r.gamma_m / r.Omega
    ga = r.gamma_a / r.Omega
    K = r.g / r.Omega  # hbar g / (x_zp,a x_zp,m) with unit zero-point spreads
    M = ma = MASS
    if r.G > 0 and r.c_m == 0:
        raise ParameterError("feedback without measurement channel (c_m = 0, G > 0)")
    if r.G > 0 and r.eta == 0:
        raise ParameterError("feedback with zero detection efficiency has unbounded noise")
    if not r.stable:
        raise ParameterError("oracle requires stable parameters (g < Omega/2)")

    # without feedback the filter state is a spectator and only adds stiffness
    ideal = r.infinite_bandwidth or r.G == 0
    labels = ("x_a", "p_a", "x_m", "q_m" if ideal and r.G > 0 else "p_m")
    if not ideal:
        labels = labels + ("z",)
    n = len(labels)
    XA, PA, XM, PM = 0, 1, 2, 3
    A = np.zeros((n, n))
    B = np.zeros((n, len(_INPUTS)))

    A[XA, PA] = 1 / ma
    A[PA, XA] = -ma
    A[PA, PA] = -ga
    A[PA, XM] = K
    A[PM, XA] = K
    A[PM, XM] = -M
    B[PA, 1] = math.sqrt(ga * ma)  # cold bath: 2 hbar Gamma_a N m Omega / 2
    B[PM, 0] = math.sqrt(gm * M * 2 * (r.n_bath + 0.5))

    amp = math.sqrt(gm * r.c_m)
    B[PM, 2] = -amp
    # imprecision x_n = sum_j w_j xi_j
    w = np.zeros(len(_INPUTS))
    if r.G > 0:
        w[3] = -1 / (2 * amp)
        w[4] = -math.sqrt(1 / r.eta - 1) / (2 * amp)
    k = r.G * gm * M  # feedback force = -k d/dt (filtered estimate)

    if ideal:
        # dx_m/dt = p_m/M = q/M - (k/M)(x_m + x_n);  dq/dt = -M x_m - gm p_m + K x_a + F
        A[XM, PM] = 1 / M
        A[XM, XM] = -k / M
        B[XM] += -(k / M) * w
        A[PM, PM] = -gm
        A[PM, XM] += gm * k
        B[PM] += gm * k * w
    else:
        d = r.fb_bandwidth / r.Omega
        Z = 4
        A[XM, PM] = 1 / M
        A[PM, PM] = -gm
        A[PM, XM] += -k * d
        A[PM, Z] = k * d
        B[PM] += -k * d * w
        A[Z, XM] = d
        A[Z, Z] = -d
        B[Z] += d * w

    Q = np.eye(len(_INPUTS), dtype=complex)
    Q[2, 3] = 1j
    Q[3, 2] = -1j

    system = LinearSystem(labels, A, B, Q, r)
    if not system.is_hurwitz():
        raise StabilityMismatchError(
            f"drift matrix is not Hurwitz although g/Omega = {r.g / r.Omega:.6g} < 0.5")
    return system


@dataclass(frozen=True)
class StationaryState:
    covariance: np.ndarray
    labels: tuple[str, ...]
    residual: float
    momentum_bounded: bool

    def variance(self, label: str = "x_m") -> float:
        i = self.labels.index(label)
        return float(self.covariance[i, i])

    @property
    def x_m(self) -> float:
        return self.variance("x_m")

    @property
    def p_m(self) -> float:
        """Mechanical momentum variance in ``p_zp^2 = hbar M Omega / 2`` units."""
        if not self.momentum_bounded:
            return math.inf
        return self.variance("p_m") / P_ZP2

    def xp_correlation(self) -> float:
        """``|S_xp| / sqrt(S_xx S_pp)`` for the mechanics (0 when momentum is unbounded)."""
        if not self.momentum_bounded:
            return 0.0
        i, j = self.labels.index("x_m"), self.labels.index("p_m")
        s = self.covariance
        return abs(s[i, j]) / math.sqrt(s[i, i] * s[j, j])


def stationary_covariance(system: LinearSystem) -> StationaryState:
    if not system.is_hurwitz():
        raise ParameterError("stationary covariance needs a Hurwitz drift matrix")
    D = system.D
    A = system.A
    S = solve_continuous_lyapunov(A, -D)
    for _ in range(2):
        # iterative refinement: stiff systems (rates spanning 1e-9..1e3) lose a few digits
        S = 0.5 * (S + S.T)
        R = A @ S + S @ A.T + D
        S = S + solve_continuous_lyapunov(A, -R)
    S = 0.5 * (S + S.T)
    resid = np.linalg.norm(A @ S + S @ A.T + D) / max(np.linalg.norm(D), 1e-300)
    bounded = "p_m" in system.labels
    return StationaryState(S, system.labels, float(resid), bounded)


def oracle_variance(r: ReducedParams) -> float:
    """Steady-state ``<x_m^2> / x_zp,m^2`` from the stationary covariance equation."""
    return stationary_covariance(build_system(r)).x_m
