"""Self-check suites behind the ``validate`` subcommand.

Each suite compares two independent routes (quadrature against a closed form
or against the time-domain oracle) and returns a :class:`SuiteResult`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .analytic import (feedback_only_optimum, ground_state_criteria, strong_coupling_variance,
                       weak_coupling_variance)
from .optimizer import optimize_gain
from .oracle import oracle_variance
from .params import ReducedParams
from .presets import GAMMA_M, OMEGA, figure_grid_spec, square_reduced
from .quadrature import (QuadratureConfig, integrate_peaked, integrate_spectrum,
                         lorentzian_integrals, lorentzian_poles)
from .spectrum import SpectrumModel
from .sweep import SweepGrid

REGIMES = ("weak", "strong", "feedback")


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: bool
    worst: float
    threshold: float
    cases: int
    seconds: float

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return (f"{verdict}  {self.name:<24} worst={self.worst:.3e}  limit={self.threshold:.1e}  "
                f"cases={self.cases}  {self.seconds:.1f}s")


def random_parameters(rng: np.random.Generator, regime: str) -> ReducedParams:
    """A random stable parameter set in one of :data:`REGIMES`.

    About a third of the draws use a finite feedback bandwidth.
    """
    W = OMEGA
    gm = W * 10 ** rng.uniform(-7.5, -3)
    n = 10 ** rng.uniform(0, 4.5)
    c_m = 10 ** rng.uniform(-1, 4.5)
    eta = rng.uniform(0.2, 1.0)
    bw = math.inf if rng.uniform() < 2 / 3 else W * 10 ** rng.uniform(-0.5, 3)
    if regime == "weak":
        ga = W * 10 ** rng.uniform(-3, 0)
        g = ga * 10 ** rng.uniform(-4, -1)
        G = 10 ** rng.uniform(-2, 2) if rng.uniform() < 0.5 else 0.0
    elif regime == "strong":
        g = W * rng.uniform(0.05, 0.45)
        ga = g * 10 ** rng.uniform(-4, -1)
        G = 10 ** rng.uniform(-2, 2) if rng.uniform() < 0.5 else 0.0
    elif regime == "feedback":
        ga = W * 10 ** rng.uniform(-3, 0)
        g = ga * 10 ** rng.uniform(-3, -0.5) if rng.uniform() < 0.5 else 0.0
        G = 10 ** rng.uniform(0, 4)
    else:
        raise ValueError(f"unknown regime {regime!r}")
    g = min(g, 0.45 * W)
    c = 4 * g * g / (ga * gm)
    c_a = c / (16 * c_m)
    return ReducedParams(W, gm, ga, n, c_m, c_a, eta, G, bw)


def _timed(name: str, threshold: float, body: Callable[[], list[float]]) -> SuiteResult:
    t0 = time.perf_counter()
    errors = body()
    worst = max(errors) if errors else math.inf
    return SuiteResult(name, worst <= threshold, worst, threshold, len(errors),
                       time.perf_counter() - t0)


def lorentzian_suite(rng, rtol: float = 1e-8, count: int = 20) -> SuiteResult:
    def body():
        errs = []
        ratios = np.concatenate([[1e-9, 1e-8], 10 ** rng.uniform(-9, 0, count - 2)])
        for ratio in ratios:
            Om = 10 ** rng.uniform(-2, 7)
            gam = ratio * Om
            poles = lorentzian_poles(gam, Om)
            cfg = QuadratureConfig(rtol=min(rtol, 1e-9))

            def f(w, d=None):
                diff = (w - Om) * (w + Om) if d is None else d * (2 * Om + d)
                den = diff ** 2 + gam * gam * w * w
                return np.stack([1.0 / den, w * w / den])

            got = integrate_peaked(f, poles, cfg, anchor=Om).value
            want = lorentzian_integrals(gam, Om)
            errs += [abs(got[i] / want[i] - 1) for i in range(2)]
        return errs
    return _timed("lorentzian", rtol, body)


def feedback_optimum_suite(rtol: float = 1e-8) -> SuiteResult:
    def body():
        r = square_reduced()
        opt = optimize_gain(r)
        ref = feedback_only_optimum(r)
        return [abs(opt.variance / ref.variance - 1), abs(opt.G_opt / ref.quantities["G_opt0"] - 1),
                abs(opt.variance / 1.41 - 1)]
    return _timed("feedback_optimum", 1e-2, body)


def oracle_suite(rng, count: int = 100, tol: float = 1e-3, rtol: float = 1e-8) -> SuiteResult:
    cfg = QuadratureConfig(rtol=rtol)

    def body():
        errs = []
        for i in range(count):
            r = random_parameters(rng, REGIMES[i % 3])
            num = integrate_spectrum(SpectrumModel(r, mode="correlator-sum"), cfg).variance_zp
            errs.append(abs(num / oracle_variance(r) - 1))
        return errs
    return _timed("oracle_equivalence", tol, body)


def weak_closed_form_suite(n: int = 16, tol: float = 0.05, rtol: float = 1e-8) -> SuiteResult:
    grid = SweepGrid(**figure_grid_spec(strong=False, nx=n, ny=n), rtol=rtol)
    cfg = QuadratureConfig(rtol=rtol)

    def body():
        errs = []
        for iy in range(grid.ny):
            for ix in range(grid.nx):
                r = grid.params(ix, iy)
                if r.gamma_a > 10 * r.g:
                    num = integrate_spectrum(SpectrumModel(r), cfg).variance_zp
                    errs.append(abs(weak_coupling_variance(r).variance / num - 1))
        return errs
    return _timed("weak_closed_form", tol, body)


def strong_closed_form_suite(n: int = 16, tol: float = 0.10, rtol: float = 1e-8) -> SuiteResult:
    grid = SweepGrid(**figure_grid_spec(strong=True, nx=n, ny=n), rtol=rtol)
    cfg = QuadratureConfig(rtol=rtol)

    def body():
        errs = []
        for iy in range(grid.ny):
            for ix in range(grid.nx):
                r = grid.params(ix, iy)
                if r.g > 10 * r.gamma_a and r.g < 0.45 * r.Omega:
                    num = integrate_spectrum(SpectrumModel(r), cfg).variance_zp
                    errs.append(abs(strong_coupling_variance(r).variance / num - 1))
        return errs
    return _timed("strong_closed_form", tol, body)


def sample_atomic_condition_points(rng, count: int) -> list[ReducedParams]:
    """Stable, weakly coupled points satisfying the atomic sufficient condition."""
    from .params import bose_occupation

    n = bose_occupation(OMEGA, 0.3)
    out = []
    while len(out) < count:
        ga = OMEGA * 10 ** rng.uniform(-3, 0)
        r = ReducedParams(OMEGA, GAMMA_M, ga, n, n / 8 * 10 ** rng.uniform(-4, 1),
                          10 ** rng.uniform(-2, 4))
        if r.stable and r.gamma_a > 10 * r.g and ground_state_criteria(r).atomic_sufficient.satisfied:
            out.append(r)
    return out


def sufficiency_suite(rng, count: int = 50, rtol: float = 1e-8) -> SuiteResult:
    cfg = QuadratureConfig(rtol=rtol)

    def body():
        # error metric: how far above the 3 x_zp^2 bound each point lands (<= 0 is fine)
        return [integrate_spectrum(SpectrumModel(r), cfg).variance_zp / 3 - 1
                for r in sample_atomic_condition_points(rng, count)]
    return _timed("atomic_sufficiency", 0.0, body)


def run_all(seed: int = 0, rtol: float = 1e-8, oracle_count: int = 100) -> list[SuiteResult]:
    rng = np.random.default_rng(seed)
    return [
        lorentzian_suite(rng, rtol),
        feedback_optimum_suite(rtol),
        oracle_suite(rng, oracle_count, rtol=rtol),
        weak_closed_form_suite(rtol=rtol),
        strong_closed_form_suite(rtol=rtol),
        sufficiency_suite(rng, rtol=rtol),
    ]
