import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import optimize

from kinjump.gas import ARGON, GasModel, GasState, euler_flux, conserved_from_primitive
from kinjump.riemann import (ConvergenceError, VacuumError, conserved_average, exact_riemann,
                             godunov_flux, mach_from_temperature_ratio, max_density_ratio,
                             rankine_hugoniot, rh_pair, rh_residual, star_region, two_shock_split,
                             upstream_velocity)

SOD = GasModel.continuum()
SOD_L = GasState(1.0, 0.0, 1.0)
SOD_R = GasState(0.125, 0.0, 0.8)


def test_ma5_ratios():
    up, down = rh_pair(5.0, 1.0, 300.0, ARGON)
    assert down.rho / up.rho == pytest.approx(25.0 / 7.0, rel=1e-12)
    assert down.u / up.u == pytest.approx(0.28, rel=1e-12)
    assert down.T / up.T == pytest.approx(8.68, rel=1e-12)


def test_upstream_speed_in_thermal_units():
    T1 = 273.0
    beta1 = 1.0 / math.sqrt(2 * ARGON.R * T1)
    assert upstream_velocity(3.0, T1, ARGON) == pytest.approx(math.sqrt(5 / 6) * 3.0 / beta1, rel=1e-14)


def test_sonic_limit_is_identity_and_subsonic_rejected():
    up = GasState(1.0, upstream_velocity(1.0, 273.0, ARGON), 273.0)
    down = rankine_hugoniot(1.0, up, ARGON)
    assert (down.rho, down.u, down.T) == pytest.approx((up.rho, up.u, up.T), rel=1e-14)
    with pytest.raises(ValueError):
        rankine_hugoniot(0.9, up, ARGON)


def test_strong_shock_limit():
    up, down = rh_pair(1e4, 1.0, 273.0, ARGON)
    assert down.rho / up.rho == pytest.approx(4.0, rel=1e-7)
    assert max_density_ratio(1.4) == pytest.approx(6.0)


@settings(max_examples=100, deadline=None)
@given(Ma=st.floats(1.01, 50.0), gamma=st.sampled_from([1.4, 5.0 / 3.0]))
def test_rh_conserves_fluxes(Ma, gamma):
    gm = GasModel(gamma=gamma)
    up, down = rh_pair(Ma, 0.5, 250.0, gm)
    assert rh_residual(up, down, gm) < 1e-12


@settings(max_examples=100, deadline=None)
@given(r=st.floats(1.0001, 500.0), gamma=st.sampled_from([1.4, 5.0 / 3.0]))
def test_mach_from_temperature_ratio_inverts_rh(r, gamma):
    gm = GasModel(gamma=gamma)
    Ma = mach_from_temperature_ratio(r, gamma)
    up, down = rh_pair(Ma, 1.0, 273.0, gm)
    assert down.T / up.T == pytest.approx(r, rel=1e-10)


def test_mach_for_temperature_ratio_eight():
    # independent root find on the temperature relation
    g = 5.0 / 3.0

    def f(M):
        M2 = M * M
        return (2 * g * M2 - (g - 1)) * ((g - 1) * M2 + 2) / ((g + 1) ** 2 * M2) - 8.0

    ref = optimize.brentq(f, 1.0, 10.0, xtol=1e-15, rtol=1e-15)
    assert mach_from_temperature_ratio(8.0) == pytest.approx(ref, rel=1e-12)
    assert 4.7 < ref < 4.85
    assert mach_from_temperature_ratio(1.0 + 1e-9) == pytest.approx(1.0, abs=1e-4)
    with pytest.raises(ValueError):
        mach_from_temperature_ratio(1.0)


def test_sod_star_state():
    fan = exact_riemann(SOD_L, SOD_R, SOD)
    assert fan.p_star == pytest.approx(0.30313, abs=1e-5)
    assert fan.u_star == pytest.approx(0.92745, abs=1e-5)
    assert fan.left_wave.kind == "rarefaction" and fan.right_wave.kind == "shock"


def test_sod_star_pressure_solves_pressure_function():
    g = 1.4
    pL, pR = 1.0, 0.1

    def fk(p, rho, pk):
        a = math.sqrt(g * pk / rho)
        if p > pk:
            A, B = 2 / ((g + 1) * rho), (g - 1) / (g + 1) * pk
            return (p - pk) * math.sqrt(A / (p + B))
        return 2 * a / (g - 1) * ((p / pk) ** ((g - 1) / (2 * g)) - 1)

    ref = optimize.brentq(lambda p: fk(p, 1.0, pL) + fk(p, 0.125, pR), 1e-6, 1.0, xtol=1e-15, rtol=1e-15)
    fan = exact_riemann(SOD_L, SOD_R, SOD)
    assert fan.p_star == pytest.approx(ref, rel=1e-12)


def test_sampler_limits_and_ordering():
    fan = exact_riemann(SOD_L, SOD_R, SOD)
    far_l, far_r = fan.sample(-100.0), fan.sample(100.0)
    assert (far_l.rho, far_l.u, far_l.T) == pytest.approx((1.0, 0.0, 1.0))
    assert (far_r.rho, far_r.u, far_r.T) == pytest.approx((0.125, 0.0, 0.8))
    head, tail = fan.left_wave.speeds
    assert head < tail < fan.u_star < fan.right_wave.speeds[0]
    # the shock joins states satisfying Rankine-Hugoniot in its own frame
    S = fan.right_wave.speeds[0]
    behind = fan.sample(S - 1e-9)
    up = GasState(SOD_R.rho, SOD_R.u - S, SOD_R.T)
    down = GasState(behind.rho, behind.u - S, behind.T)
    assert rh_residual(up, down, SOD) < 1e-10


def test_entropy_inside_rarefaction_is_constant():
    fan = exact_riemann(SOD_L, SOD_R, SOD)
    head, tail = fan.left_wave.speeds
    s = fan.sample(np.linspace(head, tail, 50))
    p = s.rho * SOD.R * s.T
    np.testing.assert_allclose(p / s.rho**1.4, 1.0, rtol=1e-10)


def test_uniform_data_is_waveless():
    s = GasState(1.0, 30.0, 300.0)
    fan = exact_riemann(s, s, ARGON)
    assert fan.p_star == pytest.approx(s.pressure(ARGON), rel=1e-12)
    assert fan.u_star == pytest.approx(30.0, rel=1e-12)
    assert fan.left_wave.kind == fan.right_wave.kind == "none"


def test_stationary_rh_pair_is_its_own_solution():
    up, down = rh_pair(5.0, 1.0, 273.0, ARGON)
    fan = exact_riemann(up, down, ARGON)
    # upstream gas enters from the left, so the stationary shock is the left-family wave
    assert fan.left_wave.kind == "shock"
    assert fan.right_wave.kind == "none"
    assert fan.left_wave.speeds[0] == pytest.approx(0.0, abs=1e-8 * up.u)
    for xi, ref in ((-1.0, up), (1.0, down)):
        s = fan.sample(xi)
        assert (s.rho, s.u, s.T) == pytest.approx((ref.rho, ref.u, ref.T), rel=1e-10)


def test_vacuum_detected():
    with pytest.raises(VacuumError):
        exact_riemann(GasState(1.0, -20.0, 1.0), GasState(1.0, 20.0, 1.0), SOD)


@settings(max_examples=100, deadline=None)
@given(rho=st.floats(1e-3, 1e3), u=st.floats(-1e3, 1e3), T=st.floats(10.0, 1e4))
def test_godunov_flux_of_uniform_state(rho, u, T):
    s = GasState(rho, u, T)
    f, ref = godunov_flux(s, s, ARGON), euler_flux(s, ARGON)
    np.testing.assert_allclose(f.as_array(), ref.as_array(), rtol=1e-12, atol=1e-12 * rho * (abs(u) + 400) ** 3)


def test_colliding_streams_have_no_mass_flux():
    f = godunov_flux(GasState(1.0, 300.0, 273.0), GasState(1.0, -300.0, 273.0), ARGON)
    assert f.mass == pytest.approx(0.0, abs=1e-9)


def test_sod_flux_is_star_state_flux():
    fan = exact_riemann(SOD_L, SOD_R, SOD)
    ref = euler_flux(fan.sample(0.0), SOD)
    np.testing.assert_allclose(godunov_flux(SOD_L, SOD_R, SOD).as_array(), ref.as_array(), rtol=1e-14)


def test_vectorised_star_region_matches_scalar():
    rhoL = np.array([1.0, 2.0, 0.5])
    pL = np.array([1.0, 5.0, 0.1])
    p, u = star_region(rhoL, np.zeros(3), pL, np.full(3, 0.125), np.zeros(3), np.full(3, 0.1), 1.4)
    for i in range(3):
        ps, us = star_region(rhoL[i], 0.0, pL[i], 0.125, 0.0, 0.1, 1.4)
        assert p[i] == pytest.approx(float(ps), rel=1e-13)
        assert u[i] == pytest.approx(float(us), rel=1e-13, abs=1e-14)


def test_strong_pair_converges():
    up, down = rh_pair(100.0, 1.0, 273.0, ARGON)
    fan = exact_riemann(up, down, ARGON)
    assert fan.left_wave.kind == "shock"
    assert fan.p_star == pytest.approx(down.pressure(ARGON), rel=1e-10)


def test_two_shock_split_ma20():
    up, down = rh_pair(20.0, 1.0, 273.0, ARGON)
    rep = two_shock_split(up, None, down, ARGON)
    assert rep.both_shocked
    assert rep.combined_ratio > max_density_ratio(ARGON.gamma)
    assert rep.single_shock_ratio < 4.0
    # the averaged state is the conserved mean
    w = conserved_average(up, down, ARGON)
    wm = conserved_from_primitive(rep.mid, ARGON)
    assert (wm.rho, wm.mom, wm.E) == pytest.approx((w.rho, w.mom, w.E), rel=1e-12)


@pytest.mark.parametrize("which", ["up", "down"])
def test_two_shock_split_degenerate(which):
    up, down = rh_pair(20.0, 1.0, 273.0, ARGON)
    mid = conserved_from_primitive(up if which == "up" else down, ARGON)
    rep = two_shock_split(up, mid, down, ARGON)
    assert rep.combined_ratio == pytest.approx(rep.single_shock_ratio, rel=1e-8)
    quiet = rep.upstream_fan if which == "up" else rep.downstream_fan
    assert quiet.left_wave.kind == quiet.right_wave.kind == "none"


def test_convergence_error_is_runtime_error():
    assert issubclass(ConvergenceError, RuntimeError)
