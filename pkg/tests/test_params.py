import dataclasses
import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hybridcool.params import (HBAR, KB, ParameterError, PhysicalParams, ReducedParams, RegimeLabel,
                               bose_occupation, classify, coupling_rate, diagnostics, load_params,
                               reduce, reduced_from_dict, stability)
from hybridcool.presets import (GAMMA_M, OMEGA, T_BATH, diamond_physical, square_physical,
                                square_reduced)
from hybridcool.quadrature import integrate_spectrum
from hybridcool.spectrum import SpectrumModel

from _support import params_with_g, rel


def random_physical(rng) -> PhysicalParams:
    w = 2 * math.pi * 10 ** rng.uniform(4, 6)
    return PhysicalParams(
        M=10 ** rng.uniform(-15, -10), omega_m=w, gamma_m=w * 10 ** rng.uniform(-8, -3),
        T_bath=10 ** rng.uniform(-2, 1), m_atom=10 ** rng.uniform(-26, -24.5),
        N=10 ** rng.uniform(4, 10), omega_a=w, gamma_a=w * 10 ** rng.uniform(-5, 0),
        kappa_MC=w * 10 ** rng.uniform(0.5, 3), kappa_AC=w * 10 ** rng.uniform(0.5, 3),
        alpha_d=10 ** rng.uniform(4, 9), g_m=10 ** rng.uniform(13, 17),
        k_wave=2 * math.pi / 780e-9, delta_t=-2 * math.pi * 10 ** rng.uniform(8, 10),
        mu=3.6e-29, mode_volume=10 ** rng.uniform(-10, -7),
        gamma_e=2 * math.pi * 6e6, eta=rng.uniform(0, 1))


# -- reduce -----------------------------------------------------------------

def test_bath_occupation_at_300_mK():
    n = reduce(square_physical()).n_bath
    assert n == pytest.approx(2.8e4, rel=0.02)
    # direct Bose factor and its classical limit bracket the value
    x = HBAR * OMEGA / (KB * T_BATH)
    assert n == pytest.approx(1 / math.expm1(x), rel=1e-14)
    assert bose_occupation(OMEGA, T_BATH, high_temperature=True) == pytest.approx(1 / x)


def test_zero_drive_means_no_light_and_no_coupling():
    p = dataclasses.replace(diamond_physical(), alpha_d=0.0)
    r = reduce(p)
    assert r.c_m == 0 and r.g == 0
    assert coupling_rate(p).g == 0


def test_diamond_atomic_cooperativity_matches_table():
    # tabulated 9.54 dB for the Gamma_a = Omega column
    r = reduce(diamond_physical(strong=False))
    assert r.c_a == pytest.approx(10 ** 0.954, rel=0.05)
    assert 10 * math.log10(8 * r.c_m / r.n_bath) == pytest.approx(-4.38, abs=0.05)


def test_diamond_is_stable():
    r = reduce(diamond_physical(strong=False))
    assert r.g / r.Omega < 0.5 and r.stable


def test_no_atoms_means_no_coupling():
    p = dataclasses.replace(diamond_physical(), N=0)
    assert coupling_rate(p).g == 0
    assert reduce(p).c_a == 0


def test_off_resonant_operation_rejected():
    p = dataclasses.replace(diamond_physical(), omega_a=1.1 * OMEGA)
    with pytest.raises(ParameterError):
        reduce(p)


def test_coupling_routes_agree(rng):
    for _ in range(100):
        p = random_physical(rng)
        r = reduce(p)
        cr = coupling_rate(p)
        assert rel(r.g, cr.g) < 1e-9
        assert rel(cr.g_from_K, cr.g) < 1e-12


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1), s=st.floats(0.05, 20))
def test_drive_scaling_leaves_c_invariant(seed, s):
    p = random_physical(np.random.default_rng(seed))
    r1 = reduce(p)
    r2 = reduce(dataclasses.replace(p, alpha_d=s * p.alpha_d))
    assert r2.c_m == pytest.approx(s * s * r1.c_m, rel=1e-12)
    assert r2.c_a == pytest.approx(r1.c_a / (s * s), rel=1e-12)
    assert r2.c == pytest.approx(r1.c, rel=1e-12)


@pytest.mark.parametrize("field,value", [
    ("M", 0.0), ("gamma_m", -1.0), ("delta_t", 1e9), ("eta", 1.5), ("N", -1.0), ("g_m", 0.0)])
def test_physical_validation(field, value):
    with pytest.raises(ParameterError):
        dataclasses.replace(diamond_physical(), **{field: value})


@pytest.mark.parametrize("field,value", [
    ("Omega", 0.0), ("gamma_a", -1.0), ("n_bath", -1.0), ("c_m", -1.0), ("G", -0.1),
    ("eta", -0.1), ("fb_bandwidth", 0.0)])
def test_reduced_validation(field, value):
    kw = dict(Omega=1.0, gamma_m=1e-3, gamma_a=1.0, n_bath=1.0, c_m=1.0, c_a=1.0)
    kw[field] = value
    with pytest.raises(ParameterError):
        ReducedParams(**kw)


# -- stability ----------------------------------------------------------------

def test_stability_examples():
    assert stability(params_with_g(0.0))
    assert stability(params_with_g(0.49))
    assert not stability(params_with_g(0.51))


def test_stability_boundary_is_unstable():
    # c = 16 * (1/16) * 1 = 1 exactly, so g = sqrt(1)/2 = Omega/2 exactly
    r = ReducedParams(1.0, 1.0, 1.0, 0.0, 1.0, 1 / 16)
    assert r.g == 0.5
    assert not stability(r)


# -- classify -----------------------------------------------------------------

def test_classify_square_is_feedback_ground():
    assert classify(square_reduced()).label is RegimeLabel.FEEDBACK_GROUND


def test_classify_dark_is_neither():
    r = ReducedParams(OMEGA, GAMMA_M, OMEGA, 2.8e4, 0.0, 0.0)
    assert classify(r).label is RegimeLabel.NEITHER


def test_classify_sympathetic_example_verified_numerically():
    # c = 16 * 100 * 625 = 1e6 with 8 c_m = 5000 below the bath occupation
    n = 2.8e4
    r = ReducedParams(OMEGA, 1e-7 * OMEGA, OMEGA, n, 625.0, 100.0)
    assert r.c == pytest.approx(1e6) and 8 * r.c_m < n
    assert classify(r).label is RegimeLabel.SYMPATHETIC_GROUND
    assert integrate_spectrum(SpectrumModel(r)).variance_zp <= 3.0


def test_classify_literal_example_tuple_is_inconsistent():
    # c = 1e6 together with c_a = 1 forces 8 c_m = 5e5 > n, so both routes qualify
    r = ReducedParams(OMEGA, 1e-7 * OMEGA, OMEGA, 2.8e4, 1e6 / 16, 1.0)
    assert 8 * r.c_m > r.n_bath
    assert classify(r).label is RegimeLabel.BOTH_GROUND


def test_classify_unstable():
    r = params_with_g(0.6)
    with pytest.raises(ParameterError):
        classify(r)
    assert classify(r, allow_unstable=True).label is RegimeLabel.UNSTABLE


def test_classify_threshold_is_configurable():
    r = ReducedParams(OMEGA, GAMMA_M, 3 * GAMMA_M * 2.8e4, 2.8e4, 625.0, 100.0)
    assert classify(r, ratio=1).label is RegimeLabel.SYMPATHETIC_GROUND
    assert classify(r, ratio=10).label is RegimeLabel.NEITHER


@settings(max_examples=200, deadline=None)
@given(x=st.floats(-4, 2), y0=st.floats(-4, 6), dy=st.floats(0, 4),
       ga=st.floats(-4, 0), eta=st.floats(0, 1))
def test_classify_monotone_in_c_a(x, y0, dy, ga, eta):
    n = 2.8e4
    base = ReducedParams(OMEGA, GAMMA_M, OMEGA * 10 ** ga, n, n * 10 ** x / 8, 10 ** y0, eta)
    more = base.replace(c_a=10 ** (y0 + dy))
    if not (base.stable and more.stable):
        return
    before, after = classify(base).label, classify(more).label
    if before is RegimeLabel.SYMPATHETIC_GROUND:
        assert after is not RegimeLabel.NEITHER
    if before is RegimeLabel.BOTH_GROUND:
        assert after is RegimeLabel.BOTH_GROUND


# -- diagnostics --------------------------------------------------------------

def test_gordon_ashkin_rate_by_hand():
    p = diamond_physical()
    rep = diagnostics(p)
    hand = (2 * math.pi * 220e3) * (2 * math.pi * 6.0666e6) / (8 * 2 * math.pi * 1e9)
    assert rep.gordon_ashkin_rate == pytest.approx(hand, rel=1e-12)


def test_gordon_ashkin_vanishes_far_detuned():
    rates = [diagnostics(dataclasses.replace(diamond_physical(), delta_t=-d)).gordon_ashkin_rate
             for d in (1e9, 1e12, 1e15, 1e18)]
    assert all(b < a for a, b in zip(rates, rates[1:]))
    assert rates[-1] < 1e-8 * rates[0]


def test_adiabatic_flags_and_lossy_heating():
    p = diamond_physical()
    rep = diagnostics(p)
    assert rep.adiabatic_MC and rep.adiabatic_AC
    assert rep.lossy_heating_rate == pytest.approx(2 * p.gamma_a * reduce(p).c_a, rel=1e-12)
    slow = diagnostics(dataclasses.replace(p, kappa_MC=2 * OMEGA))
    assert not slow.adiabatic_MC


# -- parameter files ----------------------------------------------------------

def test_parameter_file_units_and_unknown_keys(tmp_path):
    path = tmp_path / "r.json"
    path.write_text(json.dumps({"Omega": "220 kHz", "gamma_m": "31 mHz", "gamma_a": 1e6,
                                "n_bath": 10, "c_m": 1, "c_a": 0, "fb_bandwidth": "inf"}))
    r = load_params(path, reduced=True)
    assert r.Omega == pytest.approx(OMEGA) and r.gamma_m == pytest.approx(GAMMA_M)
    assert math.isinf(r.fb_bandwidth)
    with pytest.raises(ParameterError, match="unknown"):
        reduced_from_dict({"Omega": 1, "gamma_m": 1, "gamma_a": 1, "n_bath": 0, "c_m": 0,
                           "c_a": 0, "colour": 3})
    with pytest.raises(ParameterError, match="unit"):
        reduced_from_dict({"Omega": "3 furlongs"})


def test_physical_file_round_trip(tmp_path):
    p = diamond_physical()
    path = tmp_path / "p.json"
    path.write_text(json.dumps(dataclasses.asdict(p)))
    assert load_params(path) == p
