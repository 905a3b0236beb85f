"""Independent cross-checks of the frequency-domain engine.

Runs the built-in validation suites (what ``hybridcool validate`` does) and
then compares one finite-bandwidth point against the Lyapunov oracle by hand.
"""

import math

from hybridcool.oracle import build_system, stationary_covariance
from hybridcool.presets import diamond_reduced
from hybridcool.quadrature import integrate_spectrum
from hybridcool.spectrum import SpectrumModel
from hybridcool.validation import run_all

for res in run_all(seed=1):
    print(res.line())

r = diamond_reduced(strong=True)
print()
for bw in (math.inf, 1e3 * r.Omega, 10 * r.Omega):
    p = r.replace(G=20.0, fb_bandwidth=bw)
    freq = integrate_spectrum(SpectrumModel(p, mode="correlator-sum")).variance_zp
    state = stationary_covariance(build_system(p))
    print(f"bandwidth {bw / r.Omega:>6g} Omega: spectrum {freq:.8f}, Lyapunov {state.x_m:.8f}, "
          f"p_m {state.p_m:.4g}")
