import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kinjump.fluxes import (GksParams, collision_time, free_transport_weight, gks_flux,
                            interface_equilibrium, kfvs_flux)
from kinjump.gas import ARGON, GasModel, GasState, conserved_from_primitive, euler_flux
from kinjump.riemann import godunov_flux

states = st.builds(GasState, st.floats(1e-3, 10.0), st.floats(-2000.0, 2000.0), st.floats(50.0, 5000.0))


@settings(max_examples=100, deadline=None)
@given(s=states)
def test_kfvs_of_uniform_state_is_euler_flux(s):
    np.testing.assert_allclose(kfvs_flux(s, s, ARGON).as_array(), euler_flux(s, ARGON).as_array(),
                               rtol=1e-12, atol=1e-12 * s.rho * (abs(s.u) + 1500.0) ** 3)


@settings(max_examples=100, deadline=None)
@given(l=states, r=states)
def test_interface_equilibrium_is_admissible(l, r):
    # each side contributes a fraction of its density; a uniform pair reproduces itself
    w0 = interface_equilibrium(l, r, ARGON)
    assert 0.0 < w0.rho <= l.rho + r.rho
    assert w0.T > 0
    same = interface_equilibrium(l, l, ARGON)
    assert (same.rho, same.T) == pytest.approx((l.rho, l.T), rel=1e-10)
    assert same.u == pytest.approx(l.u, rel=1e-9, abs=1e-9 * (abs(l.u) + 500.0))


def test_equilibrium_at_rest_contact():
    # halves at rest: mass is the mean, momentum is the net thermal flux of the denser side
    T = 300.0
    l, r = GasState(1.0, 0.0, T), GasState(0.5, 0.0, T)
    beta = 1.0 / np.sqrt(2.0 * ARGON.R * T)
    w0 = interface_equilibrium(l, r, ARGON)
    rho0 = 0.75
    mom = (1.0 - 0.5) / (2.0 * np.sqrt(np.pi) * beta)
    E = rho0 * 1.5 * ARGON.R * T
    assert w0.rho == pytest.approx(rho0, rel=1e-14)
    assert w0.rho * w0.u == pytest.approx(mom, rel=1e-13)
    assert w0.T == pytest.approx((E - 0.5 * mom**2 / rho0) / (1.5 * ARGON.R * rho0), rel=1e-12)


def test_free_transport_weight_limits():
    assert free_transport_weight(1e-12, 1.0) == pytest.approx(1e-12, rel=1e-6)
    assert free_transport_weight(1e12, 1.0) == pytest.approx(1.0, rel=1e-9)
    assert free_transport_weight(1.0, 1.0) == pytest.approx(1.0 - np.exp(-1.0), rel=1e-14)
    assert free_transport_weight(0.0, 1.0) == 0.0
    w = free_transport_weight(np.logspace(-5, 5, 50), 1.0)
    assert np.all(np.diff(w) > 0)


def test_collision_time_terms():
    W0 = GasState(1.0, 0.0, 273.0)
    p0 = W0.pressure(ARGON)
    tau = collision_time(W0, p0, p0, 1e-6, GksParams(C_jump=1.0), ARGON)
    assert tau == pytest.approx(ARGON.mu_ref / p0, rel=1e-14)
    tau_j = collision_time(W0, 3 * p0, p0, 1e-6, GksParams(C_jump=2.0), ARGON)
    assert tau_j - tau == pytest.approx(2.0 * 1e-6 * 0.5, rel=1e-12)
    with pytest.raises(ValueError):
        collision_time(W0, p0, p0, 0.0, GksParams(), ARGON)
    with pytest.raises(ValueError):
        GksParams(C_jump=-1.0)


def test_gks_limits():
    l, r = GasState(1.0, 0.0, 1.0), GasState(0.125, 0.0, 0.8)
    inviscid = GasModel.continuum()
    # no viscosity, no jump term: pure equilibrium flux of the interface state
    g0 = gks_flux(l, r, 1e-3, GksParams(C_jump=0.0), inviscid)
    ref = euler_flux(interface_equilibrium(l, r, inviscid), inviscid)
    np.testing.assert_allclose(g0.as_array(), ref.as_array(), rtol=1e-14)
    # huge viscosity: free transport
    thick = GasModel.continuum(mu_ref=1e9)
    g1 = gks_flux(l, r, 1e-3, GksParams(C_jump=0.0), thick)
    np.testing.assert_allclose(g1.as_array(), kfvs_flux(l, r, thick).as_array(), rtol=1e-9)


def test_gks_of_uniform_state():
    s = GasState(1.2, 150.0, 400.0)
    np.testing.assert_allclose(gks_flux(s, s, 1e-7, GksParams(), ARGON).as_array(),
                               euler_flux(s, ARGON).as_array(), rtol=1e-11)


def test_kfvs_more_dissipative_than_godunov_on_contact():
    # a stationary contact: the exact solver passes no mass, free transport does
    l, r = GasState(1.0, 0.0, 1.0), GasState(0.25, 0.0, 4.0)
    gm = GasModel.continuum()
    assert godunov_flux(l, r, gm).mass == pytest.approx(0.0, abs=1e-14)
    assert kfvs_flux(l, r, gm).mass > 1e-3


def test_fluxes_vectorised():
    l = GasState(np.array([1.0, 2.0]), np.array([0.0, 100.0]), np.array([300.0, 500.0]))
    r = GasState(np.array([0.5, 1.0]), np.array([10.0, -50.0]), np.array([600.0, 250.0]))
    f = gks_flux(l, r, 1e-8, GksParams(), ARGON)
    for i in range(2):
        fi = gks_flux(GasState(l.rho[i], l.u[i], l.T[i]), GasState(r.rho[i], r.u[i], r.T[i]), 1e-8,
                      GksParams(), ARGON)
        np.testing.assert_allclose(f.as_array()[:, i], fi.as_array(), rtol=1e-13)


def test_extra_energy_factor_for_diatomic():
    # for gamma = 1.4 each molecule carries RT/2 per extra degree of freedom beyond c_x
    gm = GasModel.continuum(gamma=1.4)
    s = GasState(1.0, 0.3, 2.0)
    w = conserved_from_primitive(s, gm)
    assert w.E == pytest.approx(1.0 * (0.5 * 0.09 + 2.0 / 0.4), rel=1e-14)
    np.testing.assert_allclose(kfvs_flux(s, s, gm).as_array(), euler_flux(s, gm).as_array(), rtol=1e-12)


def _quad_half(s, gm, side, k):
    """Quadrature of c^k * (1, c, c^2/2 + e_rest) over one half line of the x-marginal."""
    from scipy import integrate
    beta = 1.0 / np.sqrt(2.0 * gm.R * s.T)
    e_rest = gm.extra_energy_factor() * gm.R * s.T
    f = lambda c: s.rho * beta / np.sqrt(np.pi) * np.exp(-beta**2 * (c - s.u) ** 2)
    lo, hi = (0.0, np.inf) if side == "right" else (-np.inf, 0.0)
    out = []
    for psi in (lambda c: 1.0, lambda c: c, lambda c: 0.5 * c * c + e_rest):
        # split at the peak so quad sees the bulk of narrow, offset Maxwellians
        pts = sorted({lo, hi, min(max(s.u, lo), hi)})
        val = sum(integrate.quad(lambda c: c**k * psi(c) * f(c), a, b, epsabs=0, epsrel=1e-13, limit=200)[0]
                  for a, b in zip(pts[:-1], pts[1:]) if a < b)
        out.append(val)
    return np.array(out)


pairs = st.tuples(states, states)


@settings(max_examples=100, deadline=None)
@given(pair=pairs, gm=st.sampled_from([ARGON, GasModel.continuum(gamma=1.4, R=208.0)]))
def test_kfvs_matches_quadrature(pair, gm):
    l, r = pair
    ref = _quad_half(l, gm, "right", 1) + _quad_half(r, gm, "left", 1)
    got = kfvs_flux(l, r, gm).as_array()
    scale = np.abs(_quad_half(l, gm, "right", 1)) + np.abs(_quad_half(r, gm, "left", 1))
    np.testing.assert_allclose(got, ref, rtol=0, atol=1e-10 * scale.max(axis=0) + 1e-300)


@pytest.mark.parametrize("gm", [GasModel.continuum(), ARGON])
def test_interface_equilibrium_matches_quadrature(gm):
    if gm is ARGON:
        l, r = GasState(1.0, 0.0, 300.0), GasState(0.125, 0.0, 240.0)
    else:
        l, r = GasState(1.0, 0.0, 1.0), GasState(0.125, 0.0, 0.8)
    w = _quad_half(l, gm, "right", 0) + _quad_half(r, gm, "left", 0)
    w0 = conserved_from_primitive(interface_equilibrium(l, r, gm), gm)
    np.testing.assert_allclose([w0.rho, w0.mom, w0.E], w, rtol=1e-10)


def test_mirror_pair_equilibrium_is_at_rest():
    w0 = interface_equilibrium(GasState(1.0, 250.0, 300.0), GasState(1.0, -250.0, 300.0), ARGON)
    assert w0.u == pytest.approx(0.0, abs=1e-9)
    f = kfvs_flux(GasState(1.0, 250.0, 300.0), GasState(1.0, -250.0, 300.0), ARGON)
    assert f.mass == pytest.approx(0.0, abs=1e-12) and f.momentum > 0


def test_weight_is_monotone_over_twelve_decades():
    r = np.logspace(-6, 6, 400)
    a = free_transport_weight(r, 1.0)
    assert np.all(np.diff(a) > 0) and a[0] < 1e-5 and a[-1] > 1 - 1e-6


def test_strong_jump_is_free_transport_dominated():
    W0 = GasState(1.0, 0.0, 273.0)
    dt = 1e-6
    tau = collision_time(W0, 1e6, 1.0, dt, GksParams(1.0), ARGON)
    assert tau >= dt * (1 - 1e-5)
    assert free_transport_weight(tau, dt) >= 1 - np.exp(-1.0) - 1e-6


def test_smooth_jump_is_second_order_close_to_interface_equilibrium_flux():
    # with tau_phys << dt the jump term alone sets alpha = O(jump), so the
    # free-transport correction to Euler(W0) is O(jump^2)
    base = GasState(1.0, 100.0, 300.0)
    devs = []
    for eps in (1e-2, 5e-3, 2.5e-3, 1.25e-3):
        l = GasState(base.rho * (1 + eps), base.u, base.T * (1 + eps))
        r = GasState(base.rho * (1 - eps), base.u, base.T * (1 - eps))
        ref = euler_flux(interface_equilibrium(l, r, ARGON), ARGON).as_array()
        g = gks_flux(l, r, 1.0, GksParams(1.0), ARGON).as_array()
        devs.append(np.max(np.abs(g - ref) / np.abs(ref)))
    rates = np.log2(np.array(devs[:-1]) / np.array(devs[1:]))
    np.testing.assert_allclose(rates, 2.0, atol=0.05)
