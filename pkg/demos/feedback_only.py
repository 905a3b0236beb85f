"""Cold-damping feedback on its own.

Starts from the square-marker point (no atoms, 8 c_m / n at 9.03 dB), scans
the feedback gain by hand, then lets the optimiser find the minimum and
compares it with the closed form.
"""

import numpy as np

from hybridcool.analytic import feedback_only_optimum, feedback_only_variance
from hybridcool.optimizer import optimize_gain
from hybridcool.presets import square_reduced
from hybridcool.quadrature import integrate_spectrum
from hybridcool.spectrum import SpectrumModel

r = square_reduced()
print(f"n_bath = {r.n_bath:.4g}, c_m = {r.c_m:.4g}, eta = {r.eta}")

closed = feedback_only_optimum(r)
g0 = closed.quantities["G_opt0"]
print(f"closed-form optimum gain G_opt0 = {g0:.2f} (SNR {closed.quantities['SNR']:.4g})\n")

print(f"{'G / G_opt0':>10}  {'numeric':>10}  {'closed form':>11}")
for f in np.geomspace(0.1, 10, 9):
    p = r.replace(G=f * g0)
    num = integrate_spectrum(SpectrumModel(p)).variance_zp
    print(f"{f:10.3f}  {num:10.4f}  {feedback_only_variance(p):11.4f}")

opt = optimize_gain(r)
print(f"\noptimiser: G_opt = {opt.G_opt:.2f}, variance {opt.variance:.5f} x_zp^2 "
      f"(status {opt.status}, {opt.iterations} iterations)")
print(f"closed form:             variance {closed.variance:.5f} x_zp^2")
