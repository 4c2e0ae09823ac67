"""Kinetic interface fluxes: free transport (KFVS), equilibrium, and BGK-weighted GKS.

All functions accept scalar or array-valued :class:`GasState` pairs.  The
energy flux carries ``gm.extra_energy_factor() * R T`` of non-x internal
energy per unit mass, i.e. the two transverse translational modes for a
monatomic gas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gas import (ConservedState, FluxVector, GasModel, GasState, euler_flux,
                  half_moments_all, maxwellian_from_state, primitive_from_conserved)


@dataclass(frozen=True)
class GksParams:
    C_jump: float = 1.0

    def __post_init__(self):
        if self.C_jump < 0:
            raise ValueError("C_jump must be non-negative")


def _half_fluxes(s: GasState, side: str, gm: GasModel):
    """Half-range (density, mass flux, momentum flux, energy flux) of one state.

    Returns the moments of psi = (1, c, c^2/2 + e_rest) and of c * psi over
    c > 0 (``side='right'``) or c < 0.
    """
    mx = maxwellian_from_state(s, gm)
    m = half_moments_all(mx, side, 3)
    e_rest = gm.extra_energy_factor() * gm.R * s.T
    mass = gm.m
    w = ConservedState(mass * m[0], mass * m[1], mass * (0.5 * m[2] + e_rest * m[0]))
    f = FluxVector(mass * m[1], mass * m[2], mass * (0.5 * m[3] + e_rest * m[1]))
    return w, f


def kfvs_flux(left: GasState, right: GasState, gm: GasModel) -> FluxVector:
    """Collisionless flux: right-moving half of the left Maxwellian plus the
    left-moving half of the right Maxwellian."""
    _, fl = _half_fluxes(left, "right", gm)
    _, fr = _half_fluxes(right, "left", gm)
    return fl + fr


def interface_equilibrium(left: GasState, right: GasState, gm: GasModel) -> GasState:
    """Equilibrium state carrying the conserved moments of the colliding halves."""
    wl, _ = _half_fluxes(left, "right", gm)
    wr, _ = _half_fluxes(right, "left", gm)
    w0 = ConservedState(wl.rho + wr.rho, wl.mom + wr.mom, wl.E + wr.E)
    return primitive_from_conserved(w0, gm)


def collision_time(W0: GasState, p_left, p_right, dt: float, params: GksParams, gm: GasModel):
    """Physical relaxation time mu/p plus a pressure-jump term that keeps
    free transport active across unresolved discontinuities."""
    if not dt > 0:
        raise ValueError("dt must be positive")
    p0 = W0.rho * gm.R * W0.T
    jump = np.abs(p_left - p_right) / (p_left + p_right)
    return gm.viscosity(W0.T) / p0 + params.C_jump * dt * jump


def free_transport_weight(tau, dt):
    """Step average of exp(-t/tau): (tau/dt) (1 - exp(-dt/tau)).

    Tends to 0 for tau << dt and to 1 for tau >> dt.
    """
    r = np.asarray(tau, dtype=float) / dt
    with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
        a = -r * np.expm1(-1.0 / r)
    # r -> 0 underflows to 0*inf-free 0; r -> inf handled by expm1 precision
    a = np.where(r <= 0, 0.0, a)
    return a if a.ndim else float(a)


def gks_flux(left: GasState, right: GasState, dt: float, params: GksParams, gm: GasModel) -> FluxVector:
    W0 = interface_equilibrium(left, right, gm)
    pl = left.rho * gm.R * left.T
    pr = right.rho * gm.R * right.T
    tau = collision_time(W0, pl, pr, dt, params, gm)
    alpha = free_transport_weight(tau, dt)
    return kfvs_flux(left, right, gm).scaled(alpha) + euler_flux(W0, gm).scaled(1.0 - alpha)
