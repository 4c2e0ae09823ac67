"""Rankine-Hugoniot relations, exact Euler Riemann solver and Godunov flux.

The star-region solver follows Toro, *Riemann Solvers and Numerical Methods
for Fluid Dynamics*, ch. 4: Newton iteration on the two-sided pressure
function, started from the two-rarefaction estimate and guarded by a
bisection bracket.  All array routines broadcast over interfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .gas import (ConservedState, FluxVector, GasModel, GasState, euler_flux,
                  primitive_from_conserved)


class VacuumError(ValueError):
    """The data would generate vacuum; the exact solver does not handle it."""


class ConvergenceError(RuntimeError):
    pass


# --------------------------------------------------------------------------
# Rankine-Hugoniot
# --------------------------------------------------------------------------

def upstream_velocity(Ma1: float, T1: float, gm: GasModel) -> float:
    # sqrt(5/6) Ma1 / beta1 for gamma = 5/3
    return Ma1 * math.sqrt(gm.gamma * gm.R * T1)


def rankine_hugoniot(Ma1: float, upstream: GasState, gm: GasModel) -> GasState:
    """Downstream state of a steady normal shock with upstream Mach ``Ma1``.

    ``upstream.u`` is taken as the shock-frame inflow speed when it is
    positive; otherwise the inflow speed is ``Ma1 * a1``.
    """
    if not Ma1 >= 1.0:
        raise ValueError(f"shock Mach number must be >= 1, got {Ma1}")
    g = gm.gamma
    M2 = Ma1 * Ma1
    u1 = upstream.u if upstream.u > 0 else upstream_velocity(Ma1, upstream.T, gm)
    density_ratio = (g + 1.0) * M2 / ((g - 1.0) * M2 + 2.0)
    T_ratio = (2.0 * g * M2 - (g - 1.0)) * ((g - 1.0) * M2 + 2.0) / ((g + 1.0) ** 2 * M2)
    return GasState(upstream.rho * density_ratio, u1 / density_ratio, upstream.T * T_ratio)


def rh_pair(Ma1: float, rho1: float, T1: float, gm: GasModel) -> tuple[GasState, GasState]:
    up = GasState(rho1, upstream_velocity(Ma1, T1, gm), T1)
    return up, rankine_hugoniot(Ma1, up, gm)


def rh_residual(up: GasState, down: GasState, gm: GasModel) -> float:
    """Largest relative mismatch of the mass, momentum and energy fluxes."""
    fu, fd = euler_flux(up, gm).as_array(), euler_flux(down, gm).as_array()
    return float(np.max(np.abs(fu - fd) / np.maximum(np.abs(fu), 1e-300)))


def max_density_ratio(gamma: float) -> float:
    """Strong-shock density ratio limit (gamma + 1) / (gamma - 1)."""
    return (gamma + 1.0) / (gamma - 1.0)


def mach_from_temperature_ratio(T_ratio: float, gamma: float = 5.0 / 3.0) -> float:
    """Upstream Mach number whose normal shock has temperature ratio ``T_ratio``.

    The temperature relation is a quadratic in Ma^2; the larger root is the
    physical one.
    """
    if not T_ratio > 1.0:
        raise ValueError(f"temperature ratio must exceed 1, got {T_ratio}")
    g = gamma
    # (2g y - (g-1)) ((g-1) y + 2) = r (g+1)^2 y
    a = 2.0 * g * (g - 1.0)
    b = 4.0 * g - (g - 1.0) ** 2 - T_ratio * (g + 1.0) ** 2
    c = -2.0 * (g - 1.0)
    disc = math.sqrt(b * b - 4.0 * a * c)
    # numerically stable form of the positive root
    y = (-b + disc) / (2.0 * a) if b < 0 else (2.0 * c) / (-b - disc)
    return math.sqrt(y)


# --------------------------------------------------------------------------
# exact Riemann solver (vectorised)
# --------------------------------------------------------------------------

def _f_k(p, rho_k, p_k, a_k, g):
    """Toro's f_K(p) and derivative for one side."""
    A = 2.0 / ((g + 1.0) * rho_k)
    B = (g - 1.0) / (g + 1.0) * p_k
    shock = p > p_k
    ps = np.where(shock, p, p_k)  # keep each branch finite
    sq = np.sqrt(A / (ps + B))
    f_s = (ps - p_k) * sq
    df_s = sq * (1.0 - 0.5 * (ps - p_k) / (ps + B))
    pr = np.where(shock, p_k, p)
    ratio = pr / p_k
    f_r = 2.0 * a_k / (g - 1.0) * (ratio ** ((g - 1.0) / (2.0 * g)) - 1.0)
    df_r = 1.0 / (rho_k * a_k) * ratio ** (-(g + 1.0) / (2.0 * g))
    return np.where(shock, f_s, f_r), np.where(shock, df_s, df_r)


def star_region(rhoL, uL, pL, rhoR, uR, pR, gamma: float, rtol: float = 1e-13, max_iter: int = 200):
    """Star pressure and velocity for arrays of Riemann problems."""
    rhoL, uL, pL, rhoR, uR, pR = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in
                                                        (rhoL, uL, pL, rhoR, uR, pR)))
    g = gamma
    aL = np.sqrt(g * pL / rhoL)
    aR = np.sqrt(g * pR / rhoR)
    du = uR - uL
    if np.any(du >= 2.0 * (aL + aR) / (g - 1.0)):
        raise VacuumError("initial data generate vacuum")

    def func(p):
        fL, dL = _f_k(p, rhoL, pL, aL, g)
        fR, dR = _f_k(p, rhoR, pR, aR, g)
        return fL + fR + du, dL + dR

    # two-rarefaction guess (exact when both waves are rarefactions)
    z = (g - 1.0) / (2.0 * g)
    p = ((aL + aR - 0.5 * (g - 1.0) * du) / (aL / pL**z + aR / pR**z)) ** (1.0 / z)
    p = np.maximum(p, 1e-300)

    # bracket: f(0+) < 0 by the no-vacuum condition, f increasing
    lo = np.zeros_like(p)
    hi = np.maximum(np.maximum(pL, pR), p)
    for _ in range(400):
        fh, _d = func(hi)
        grow = fh < 0
        if not np.any(grow):
            break
        hi = np.where(grow, 2.0 * hi, hi)

    for _ in range(max_iter):
        f, df = func(p)
        lo = np.where(f < 0, np.maximum(lo, p), lo)
        hi = np.where(f > 0, np.minimum(hi, p), hi)
        exact = f == 0
        p_new = p - np.where(exact, 0.0, f) / df
        bad = ~((p_new >= lo) & (p_new <= hi)) & ~exact
        p_new = np.where(bad, 0.5 * (lo + hi), p_new)
        change = np.abs(p_new - p) / (0.5 * (p_new + p))
        p = p_new
        if np.all((change < rtol) | (f == 0)):
            break
    else:
        raise ConvergenceError("star pressure iteration did not converge")

    fL, _ = _f_k(p, rhoL, pL, aL, g)
    fR, _ = _f_k(p, rhoR, pR, aR, g)
    u = 0.5 * (uL + uR) + 0.5 * (fR - fL)
    return p, u


def sample_primitive(xi, rhoL, uL, pL, rhoR, uR, pR, p_star, u_star, gamma):
    """(rho, u, p) of the self-similar solution at speed ``xi`` (Toro 4.5)."""
    g = gamma
    xi, rhoL, uL, pL, rhoR, uR, pR, p_star, u_star = np.broadcast_arrays(
        *(np.asarray(v, dtype=float) for v in (xi, rhoL, uL, pL, rhoR, uR, pR, p_star, u_star)))
    gm1, gp1 = g - 1.0, g + 1.0

    def side(rho_k, u_k, p_k, sign):
        # sign = +1 for the left wave, -1 for the right wave (mirror)
        a_k = np.sqrt(g * p_k / rho_k)
        us = sign * u_star
        uk = sign * u_k
        x = sign * xi
        ratio = p_star / p_k
        shock = p_star > p_k
        # shock
        S = uk - a_k * np.sqrt(gp1 / (2 * g) * ratio + gm1 / (2 * g))
        rho_sh = rho_k * (ratio + gm1 / gp1) / (gm1 / gp1 * ratio + 1.0)
        # rarefaction
        rho_rf = rho_k * ratio ** (1.0 / g)
        a_star = a_k * ratio ** (gm1 / (2 * g))
        head = uk - a_k
        tail = us - a_star
        fan_u = 2.0 / gp1 * (a_k + gm1 / 2.0 * uk + x)
        fan_c = 2.0 / gp1 + gm1 / (gp1 * a_k) * (uk - x)
        fan_rho = rho_k * np.abs(fan_c) ** (2.0 / gm1)
        fan_p = p_k * np.abs(fan_c) ** (2.0 * g / gm1)

        rho = np.where(shock,
                       np.where(x <= S, rho_k, rho_sh),
                       np.where(x <= head, rho_k, np.where(x >= tail, rho_rf, fan_rho)))
        u = np.where(shock,
                     np.where(x <= S, uk, us),
                     np.where(x <= head, uk, np.where(x >= tail, us, fan_u)))
        p = np.where(shock,
                     np.where(x <= S, p_k, p_star),
                     np.where(x <= head, p_k, np.where(x >= tail, p_star, fan_p)))
        return rho, sign * u, p

    left = side(rhoL, uL, pL, 1.0)
    right = side(rhoR, uR, pR, -1.0)
    on_left = xi <= u_star
    return tuple(np.where(on_left, l, r) for l, r in zip(left, right))


@dataclass(frozen=True)
class Wave:
    kind: str            # "shock" | "rarefaction" | "none"
    speeds: tuple        # (shock speed,) or (head, tail)
    density_ratio: float  # post-wave over pre-wave density


@dataclass(frozen=True)
class RiemannFan:
    left: GasState
    right: GasState
    gm: GasModel = field(repr=False)
    p_star: float
    u_star: float
    rho_star_left: float
    rho_star_right: float
    left_wave: Wave
    right_wave: Wave

    def sample(self, xi) -> GasState:
        gm = self.gm
        rho, u, p = sample_primitive(
            xi, self.left.rho, self.left.u, self.left.pressure(gm),
            self.right.rho, self.right.u, self.right.pressure(gm),
            self.p_star, self.u_star, gm.gamma)
        if np.ndim(xi) == 0:
            rho, u, p = float(rho), float(u), float(p)
        return GasState(rho, u, p / (rho * gm.R))

    __call__ = sample


def _classify(p_star, p_k, rtol=1e-9):
    if abs(p_star - p_k) <= rtol * p_k:
        return "none"
    return "shock" if p_star > p_k else "rarefaction"


def exact_riemann(left: GasState, right: GasState, gm: GasModel) -> RiemannFan:
    g = gm.gamma
    pL, pR = float(left.pressure(gm)), float(right.pressure(gm))
    p, u = star_region(left.rho, left.u, pL, right.rho, right.u, pR, g)
    p, u = float(p), float(u)
    waves, rhos = [], []
    for st, pk, sign in ((left, pL, 1.0), (right, pR, -1.0)):
        kind = _classify(p, pk)
        a = math.sqrt(g * pk / st.rho)
        ratio = p / pk
        if p > pk:
            rho_s = st.rho * (ratio + (g - 1) / (g + 1)) / ((g - 1) / (g + 1) * ratio + 1.0)
            S = st.u - sign * a * math.sqrt((g + 1) / (2 * g) * ratio + (g - 1) / (2 * g))
            speeds = (S,)
        else:
            rho_s = st.rho * ratio ** (1.0 / g)
            a_s = a * ratio ** ((g - 1) / (2 * g))
            speeds = (st.u - sign * a, u - sign * a_s)
        waves.append(Wave(kind, speeds, rho_s / st.rho))
        rhos.append(rho_s)
    return RiemannFan(left, right, gm, p, u, rhos[0], rhos[1], waves[0], waves[1])


def godunov_flux(left: GasState, right: GasState, gm: GasModel) -> FluxVector:
    """Euler flux of the exact Riemann solution sampled at x/t = 0."""
    g = gm.gamma
    pL = left.rho * gm.R * left.T
    pR = right.rho * gm.R * right.T
    p_star, u_star = star_region(left.rho, left.u, pL, right.rho, right.u, pR, g)
    rho, u, p = sample_primitive(0.0, left.rho, left.u, pL, right.rho, right.u, pR, p_star, u_star, g)
    if np.ndim(left.rho) == 0 and np.ndim(right.rho) == 0:
        rho, u, p = float(rho), float(u), float(p)
    return euler_flux(GasState(rho, u, p / (rho * gm.R)), gm)


# --------------------------------------------------------------------------
# two-shock representation of a captured shock
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class SplitReport:
    upstream_fan: RiemannFan
    downstream_fan: RiemannFan
    mid: GasState
    shock_ratios: tuple       # density ratio of the strongest shock in each sub-problem
    combined_ratio: float     # product of the two
    single_shock_ratio: float  # rho_d / rho_u of the undivided jump
    both_shocked: bool

    def waves(self):
        return ((self.upstream_fan.left_wave.kind, self.upstream_fan.right_wave.kind),
                (self.downstream_fan.left_wave.kind, self.downstream_fan.right_wave.kind))


def _strongest_shock(fan: RiemannFan) -> float:
    ratios = [w.density_ratio for w in (fan.left_wave, fan.right_wave) if w.kind == "shock"]
    return max(ratios) if ratios else 1.0


def conserved_average(a: GasState, b: GasState, gm: GasModel) -> ConservedState:
    from .gas import conserved_from_primitive
    wa, wb = conserved_from_primitive(a, gm), conserved_from_primitive(b, gm)
    return ConservedState(0.5 * (wa.rho + wb.rho), 0.5 * (wa.mom + wb.mom), 0.5 * (wa.E + wb.E))


def two_shock_split(upstream: GasState, mid: ConservedState | None, downstream: GasState,
                    gm: GasModel) -> SplitReport:
    """Solve the (W_u, W_m) and (W_m, W_d) Riemann problems of a captured shock.

    ``mid=None`` selects the arithmetic mean of the conserved variables, the
    state a finite-volume cell straddling the shock would hold.
    """
    if mid is None:
        mid = conserved_average(upstream, downstream, gm)
    wm = primitive_from_conserved(mid, gm)
    wm = GasState(float(wm.rho), float(wm.u), float(wm.T))
    f1 = exact_riemann(upstream, wm, gm)
    f2 = exact_riemann(wm, downstream, gm)
    r1, r2 = _strongest_shock(f1), _strongest_shock(f2)
    both = (any(w.kind == "shock" for w in (f1.left_wave, f1.right_wave))
            and any(w.kind == "shock" for w in (f2.left_wave, f2.right_wave)))
    return SplitReport(f1, f2, wm, (r1, r2), r1 * r2, downstream.rho / upstream.rho, both)
