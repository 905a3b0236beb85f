import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.optimize import brentq, minimize_scalar

from hybridcool.params import ReducedParams
from hybridcool.presets import OMEGA
from hybridcool.response import (ModifiedSusceptibility, chi_a, chi_m, chi_m_prime,
                                 chi_normal_modes, companion_roots)

from _support import params_with_g, rel

W = OMEGA


def fwhm(f, centre, guess):
    """Full width at half maximum of a single peak of ``f`` near ``centre``."""
    peak = f(centre)
    lo = brentq(lambda w: f(w) - peak / 2, centre - 20 * guess, centre)
    hi = brentq(lambda w: f(w) - peak / 2, centre, centre + 20 * guess)
    return hi - lo


def test_static_and_resonant_values():
    r = ReducedParams(W, 1e-3 * W, 0.2 * W, 10.0, 1.0, 1.0)
    M, ma = 2.5, 7.0
    assert chi_m(r, 0.0, M) == pytest.approx(1 / (M * W ** 2), rel=1e-15)
    assert chi_a(r, 0.0, ma) == pytest.approx(1 / (ma * W ** 2), rel=1e-15)
    assert abs(chi_m(r, W, M)) == pytest.approx(1 / (M * r.gamma_m * W), rel=1e-15)


def test_decoupled_limit_is_bare():
    r = ReducedParams(W, 1e-4 * W, W, 10.0, 5.0, 0.0)
    w = np.linspace(-3 * W, 3 * W, 1001)
    assert np.array_equal(chi_m_prime(r, w), chi_m(r, w))


def test_vanishing_coupling_converges_pointwise():
    w = np.linspace(0.5 * W, 1.5 * W, 301)
    errs = []
    for scale in (1e-2, 1e-4, 1e-6):
        r = ReducedParams(W, 1e-3 * W, 0.1 * W, 10.0, 1.0, scale, G=scale)
        errs.append(np.max(np.abs(chi_m_prime(r, w) / chi_m(r, w) - 1)))
    # first order in the couplings: each factor 100 in scale buys about 100 in error
    assert errs[1] < 0.02 * errs[0] and errs[2] < 0.02 * errs[1]


def test_feedback_broadens_linewidth():
    gm, G = 1e-4 * W, 4.0
    r = ReducedParams(W, gm, W, 10.0, 1.0, 0.0, G=G)
    width = fwhm(lambda w: abs(chi_m_prime(r, w)) ** 2, W, gm * (1 + G))
    assert width == pytest.approx(gm * (1 + G), rel=1e-4)


def test_weak_coupling_broadened_lorentzian():
    # Gamma_a = Omega, c = 1e3: the atoms add Gamma_m c of damping near resonance
    gm, c = 1e-7 * W, 1e3
    r = ReducedParams(W, gm, W, 10.0, 10.0, c / 160)
    eff = gm * (1 + c)
    f = lambda w: abs(chi_m_prime(r, w)) ** 2  # noqa: E731
    centre = minimize_scalar(lambda w: -f(w), bracket=(W - eff, W, W + eff)).x
    assert fwhm(f, centre, eff) == pytest.approx(eff, rel=0.05)
    assert f(centre) == pytest.approx(1 / (eff * W) ** 2, rel=0.05)


@settings(max_examples=100, deadline=None)
@given(lg=st.floats(-8, -1), la=st.floats(-5, 0.5), gr=st.floats(0, 0.49),
       G=st.floats(0, 100), lbw=st.one_of(st.just(math.inf), st.floats(-1, 4)),
       w=st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=20))
def test_reality_symmetry(lg, la, gr, G, lbw, w):
    bw = math.inf if math.isinf(lbw) else W * 10 ** lbw
    r = params_with_g(gr, gamma_a=W * 10 ** la, gamma_m=W * 10 ** lg, G=G, fb_bandwidth=bw)
    w = np.asarray(w) * W
    for f in (chi_m, chi_a, chi_m_prime, lambda r, w: chi_normal_modes(r, w)[0],
              lambda r, w: chi_normal_modes(r, w)[1]):
        a, b = f(r, -w), np.conj(f(r, w))
        assert np.allclose(a, b, rtol=1e-13, atol=0)
    sq = np.abs(chi_m_prime(r, w)) ** 2
    assert np.allclose(sq, np.abs(chi_m_prime(r, -w)) ** 2, rtol=1e-13, atol=0)


@pytest.mark.parametrize("bw,degree", [(math.inf, 4), (3 * W, 5)])
def test_denominator_degree_and_identity(bw, degree):
    r = params_with_g(0.2, gamma_a=0.05 * W, gamma_m=1e-3 * W, G=3.0, fb_bandwidth=bw)
    sus = ModifiedSusceptibility(r, M=2.0, atom_mass=3.0)
    den = sus.denominator()
    assert den.size - 1 == degree
    # polynomial == chi'^-1 / (M W^2) times the atomic and filter denominators
    nu = np.linspace(-3, 3, 97)
    d_a = 1 - nu ** 2 - 1j * nu * r.gamma_a / W
    filt = 1 if math.isinf(bw) else 1 - 1j * nu * W / bw
    want = sus.inverse(nu * W) / (2.0 * W ** 2) * d_a * filt
    assert np.allclose(np.polyval(den, nu), want, rtol=1e-12, atol=1e-14)


def test_poles_in_lower_half_plane_when_stable():
    for gr in (0.0, 0.1, 0.3, 0.49):
        for bw in (math.inf, 10 * W):
            r = params_with_g(gr, gamma_a=0.01 * W, gamma_m=1e-6 * W, G=2.0, fb_bandwidth=bw)
            assert np.all(ModifiedSusceptibility(r).poles().imag < 0)


def test_companion_roots_against_known_polynomial():
    roots = np.array([1 + 2j, -3.0, 0.5j, 1e-6 - 1j])
    assert np.allclose(np.sort_complex(companion_roots(np.poly(roots))),
                       np.sort_complex(roots), atol=1e-12)


def test_normal_modes_without_coupling():
    r = ReducedParams(W, 1e-3 * W, 3e-3 * W, 10.0, 1.0, 0.0)
    w = np.linspace(0.5 * W, 1.5 * W, 11)
    chi_p, chi_n = chi_normal_modes(r, w, M=1.5)
    gn = 0.5 * (r.gamma_a + r.gamma_m)
    want = 1 / (3.0 * (W ** 2 - w ** 2 - 1j * w * gn))
    assert np.allclose(chi_p, want, rtol=1e-14) and np.allclose(chi_n, want, rtol=1e-14)


def _strong_example():
    gm = 1e-7 * W
    ga = 100 * gm
    gn = 0.5 * (ga + gm)
    return params_with_g(1e3 * gn / W, gamma_a=ga, gamma_m=gm)


def test_normal_mode_peaks():
    r = _strong_example()
    gt = r.g / W
    f = lambda w: abs(chi_normal_modes(r, w)[0]) ** 2 + abs(chi_normal_modes(r, w)[1]) ** 2  # noqa
    for sign in (-1, 1):
        want = W * math.sqrt(1 + sign * 2 * gt)
        got = minimize_scalar(lambda w: -f(w), bracket=(want - r.g / 4, want, want + r.g / 4),
                              tol=1e-14).x
        assert rel(got, want) < 10 * r.gamma_a / W


def test_normal_modes_approximate_full_response_at_peaks():
    r = _strong_example()
    full = lambda w: abs(chi_m_prime(r, w)) ** 2  # noqa: E731
    approx = lambda w: sum(abs(c) ** 2 for c in chi_normal_modes(r, w))  # noqa: E731
    gt = r.g / W
    for sign in (-1, 1):
        guess = W * math.sqrt(1 + sign * 2 * gt)
        peak = minimize_scalar(lambda w: -full(w), bracket=(guess - r.g / 4, guess, guess + r.g / 4),
                               tol=1e-14).x
        assert rel(approx(peak), full(peak)) < 0.10


def test_detuning_form_matches_plain_evaluation():
    r = params_with_g(0.2, gamma_a=0.01 * W, gamma_m=1e-4 * W, G=3.0, fb_bandwidth=7 * W)
    sus = ModifiedSusceptibility(r)
    w = W * np.array([0.3, 0.9, 1.1, 2.5])
    for sign in (1, -1):
        plain = sus(sign * w)
        detuned = sus(sign * w, detuning=w - W)
        assert np.allclose(detuned, plain, rtol=1e-12, atol=0)


def test_detuning_keeps_precision_at_tiny_offsets():
    import mpmath

    r = ReducedParams(W, 1e-9 * W, W, 1.0, 0.0, 0.0)
    d = 1e-10 * W * np.array([-3.7, -0.41, 0.29, 5.3])
    with mpmath.workdps(40):
        # exact value at the intended frequency, not at its double-precision rounding
        exact = [1 / (mpmath.mpf(W) ** 2 - (mpmath.mpf(W) + mpmath.mpf(x)) ** 2
                      - 1j * (mpmath.mpf(W) + mpmath.mpf(x)) * mpmath.mpf(r.gamma_m)) for x in d]
    got = chi_m(r, W + d, detuning=d)
    assert max(abs(complex(g / e) - 1) for g, e in zip(got, exact)) < 1e-14
