"""The two diamond-marker points, built from physical parameters.

Both share the optomechanical side; the weak point uses fast atoms
(Gamma_a = Omega), the strong one slow atoms (Gamma_a = 100 Gamma_m).
For each we print the derived cooperativities, the sympathetic-only
variance, the combined optimum and the matching closed-form estimate.
"""

from hybridcool.analytic import strong_coupling_variance, weak_coupling_variance
from hybridcool.optimizer import feedback_gain_db, optimize_gain
from hybridcool.params import classify, diagnostics, reduce
from hybridcool.presets import diamond_physical


def db(x):
    import math
    return 10 * math.log10(x)


for strong in (False, True):
    p = diamond_physical(strong)
    r = reduce(p)
    print(("strong" if strong else "weak") + " coupling point")
    print(f"  c_a = {r.c_a:.4g} ({db(r.c_a):.2f} dB), 8 c_m / n = {db(8 * r.c_m / r.n_bath):.2f} dB")
    print(f"  g / Omega = {r.g / r.Omega:.3g}, Gamma_a / g = {r.gamma_a / r.g:.3g}")
    opt = optimize_gain(r)
    print(f"  atoms only        {opt.variance_no_feedback:10.4f} x_zp^2")
    print(f"  atoms + feedback  {opt.variance:10.4f} x_zp^2  "
          f"(G_opt / G_opt0 = {opt.ratio:.3f}, {feedback_gain_db(opt):.3f} dB better)")
    est = strong_coupling_variance(r) if strong else weak_coupling_variance(r)
    print(f"  closed form       {est.variance:10.4f} x_zp^2  (valid: {est.valid})")
    print(f"  regime            {classify(r).label}")
    flags = [k for k, v in vars(diagnostics(p)).items() if v is True]
    print(f"  diagnostics       {', '.join(flags) or 'none raised'}\n")
