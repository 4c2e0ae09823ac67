"""Collisionless evolution of a planar jump between two Maxwellian gases.

At time t a molecule found at x with velocity c started from x - c t, so the
distribution is the left Maxwellian for c > x/t and the right one for
c < x/t.  Every macroscopic field is therefore a function of xi = x/t only.

Two closed forms are provided (a stationary contact and a steady shock pair)
together with a generic two-Maxwellian evaluation and an adaptive-quadrature
oracle that integrates the distribution directly.

Published-form note: the contact x-temperature is often quoted as
``Tn + U xi / R``; the second moment actually gives ``Tn + U (xi - U) / R``.
Likewise the shock velocity profile needs the drift contributions
``u_i * (fraction of side-i molecules)``.  The functions here use the forms
that agree with direct integration; :func:`published_contact_tx` and
:func:`published_shock_velocity` keep the quoted expressions for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.special import erf, erfc

from .gas import SQRT_PI, ARGON, GasModel, GasState, Maxwellian, maxwellian_from_state


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""

    def __init__(self, message: str, achieved: float):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class DiscontinuityIC:
    left: GasState
    right: GasState
    kind: str = "generic"

    def __post_init__(self):
        if self.kind not in ("contact", "shock", "generic"):
            raise ValueError(f"unknown discontinuity kind {self.kind!r}")


@dataclass(frozen=True)
class PointState:
    rho: object
    U: object
    Tn: object
    Tx: object

    @property
    def T(self):
        return (self.Tx + 2.0 * self.Tn) / 3.0


def contact_ic(T_ratio: float, rho1: float = 1.0, T1: float = 273.0) -> DiscontinuityIC:
    """Stationary contact: equal pressure, T2 = T_ratio * T1."""
    if not T_ratio > 0:
        raise ValueError("temperature ratio must be positive")
    left = GasState(rho1, 0.0, T1)
    right = GasState(rho1 / T_ratio, 0.0, T1 * T_ratio)
    return DiscontinuityIC(left, right, "contact")


def shock_ic(Ma1: float, rho1: float = 1.0, T1: float = 273.0, gm: GasModel = ARGON) -> DiscontinuityIC:
    """Shock-frame Rankine-Hugoniot pair with upstream gas on the left."""
    from .riemann import rankine_hugoniot, upstream_velocity

    up = GasState(rho1, upstream_velocity(Ma1, T1, gm), T1)
    return DiscontinuityIC(up, rankine_hugoniot(Ma1, up, gm), "shock")


def reference_scales(state1: GasState, gm: GasModel = ARGON) -> tuple[float, float]:
    """(lambda1, tau1) of the reference (left) gas."""
    n1 = state1.rho / gm.m
    lam = gm.mean_free_path(n1, state1.T)
    return lam, lam / gm.mean_speed(state1.T)


def _check_time(t):
    if np.any(np.asarray(t) <= 0):
        raise ValueError("free-molecular profiles require t > 0")


def _sides(ic: DiscontinuityIC, gm: GasModel):
    return maxwellian_from_state(ic.left, gm), maxwellian_from_state(ic.right, gm)


def contact_profile(ic: DiscontinuityIC, x, t, gm: GasModel = ARGON) -> PointState:
    if ic.kind != "contact":
        raise ValueError("contact_profile needs a contact discontinuity")
    _check_time(t)
    R = gm.R
    T1, T2 = ic.left.T, ic.right.T
    rho1 = ic.left.rho
    r = T1 / T2
    b1 = 1.0 / math.sqrt(2.0 * R * T1)
    xi = np.asarray(x, dtype=float) / t
    z = b1 * xi
    e1, e2 = erf(z), erf(math.sqrt(r) * z)
    rho_ratio = 0.5 * (1.0 - e1) + 0.5 * r * (1.0 + e2)
    U = (1.0 / rho_ratio) / (2.0 * SQRT_PI * b1) * (np.exp(-z**2) - math.sqrt(r) * np.exp(-r * z**2))
    Tn = 0.5 * T1 / rho_ratio * (2.0 + e2 - e1)
    Tx = Tn + U * (xi - U) / R
    return PointState(rho1 * rho_ratio, U, Tn, Tx)


def published_contact_tx(ic: DiscontinuityIC, x, t, gm: GasModel = ARGON):
    """x-temperature in the commonly quoted form ``Tn + U xi / R`` (lacks -U^2/R)."""
    p = contact_profile(ic, x, t, gm)
    return p.Tn + p.U * (np.asarray(x, dtype=float) / t) / gm.R


def shock_profile(ic: DiscontinuityIC, x, t, gm: GasModel = ARGON) -> PointState:
    if ic.kind != "shock":
        raise ValueError("shock_profile needs a shock discontinuity")
    _check_rh(ic, gm)
    _check_time(t)
    R = gm.R
    (rho1, u1, T1), (rho2, u2, T2) = _prim(ic.left), _prim(ic.right)
    b1 = 1.0 / math.sqrt(2.0 * R * T1)
    b2 = 1.0 / math.sqrt(2.0 * R * T2)
    xi = np.asarray(x, dtype=float) / t
    a1, a2 = b1 * (xi - u1), b2 * (xi - u2)
    g1, g2 = np.exp(-a1**2), np.exp(-a2**2)
    # fraction of each side's molecules present at xi
    f1, f2 = 0.5 * erfc(a1), 0.5 * erfc(-a2)
    rho = rho1 * f1 + rho2 * f2
    w1, w2 = rho1 / rho, rho2 / rho
    U = (w1 / (2.0 * SQRT_PI * b1) * g1 - w2 / (2.0 * SQRT_PI * b2) * g2
         + w1 * u1 * f1 + w2 * u2 * f2)
    Tn = T1 * w1 * f1 + T2 * w2 * f2
    Tx = (T1 / SQRT_PI * w1 * (a1 + 2.0 * b1 * u1) * g1
          - T2 / SQRT_PI * w2 * (a2 + 2.0 * b2 * u2) * g2
          + T1 * w1 * (1.0 + 2.0 * b1**2 * u1**2) * f1
          + T2 * w2 * (1.0 + 2.0 * b2**2 * u2**2) * f2
          - U**2 / R)
    return PointState(rho, U, Tn, Tx)


def published_shock_velocity(ic: DiscontinuityIC, x, t, gm: GasModel = ARGON):
    """Shock velocity profile as commonly quoted: Gaussian terms only, no drift terms."""
    p = shock_profile(ic, x, t, gm)
    (rho1, u1, T1), (rho2, u2, T2) = _prim(ic.left), _prim(ic.right)
    b1 = 1.0 / math.sqrt(2.0 * gm.R * T1)
    b2 = 1.0 / math.sqrt(2.0 * gm.R * T2)
    xi = np.asarray(x, dtype=float) / t
    return (rho1 / p.rho / (2.0 * SQRT_PI * b1) * np.exp(-(b1 * (xi - u1)) ** 2)
            - rho2 / p.rho / (2.0 * SQRT_PI * b2) * np.exp(-(b2 * (xi - u2)) ** 2))


def jump_profile(ic: DiscontinuityIC, x, t, gm: GasModel = ARGON) -> PointState:
    """Generic two-Maxwellian closed form built from shifted half-range moments."""
    _check_time(t)
    xi = np.asarray(x, dtype=float) / t
    left, right = _sides(ic, gm)
    # left gas contributes c > xi, right gas c < xi; shift the frame by xi
    mL = _half_range(left, xi, "right")
    mR = _half_range(right, xi, "left")
    n = mL[0] + mR[0]
    c1 = (mL[1] + mR[1]) / n
    c2 = (mL[2] + mR[2]) / n
    U = c1 + xi
    Tx = (c2 - c1**2) / gm.R
    Tn = (mL[0] * ic.left.T + mR[0] * ic.right.T) / n
    return PointState(n * gm.m, U, Tn, Tx)


def _half_range(mx: Maxwellian, xi, side):
    from .gas import half_moments_all
    shifted = Maxwellian(mx.n, mx.u - xi, mx.beta)
    return half_moments_all(shifted, side, 2)


def _prim(s: GasState):
    return s.rho, s.u, s.T


def _check_rh(ic: DiscontinuityIC, gm: GasModel, rtol: float = 1e-9):
    from .riemann import rh_residual

    res = rh_residual(ic.left, ic.right, gm)
    if res > rtol:
        raise ValueError(f"states do not satisfy the Rankine-Hugoniot relations (residual {res:.3e})")


def distribution_eval(ic: DiscontinuityIC, c, x, t, gm: GasModel = ARGON):
    """Value of the 1D (x-velocity) distribution at (c, x, t)."""
    _check_time(t)
    left, right = _sides(ic, gm)
    c = np.asarray(c, dtype=float)
    from_left = (x - c * t) < 0
    return np.where(from_left, left(c), right(c))


def profile(ic: DiscontinuityIC, x, t, gm: GasModel = ARGON) -> PointState:
    """Dispatch to the closed form matching ``ic.kind``."""
    if ic.kind == "contact":
        return contact_profile(ic, x, t, gm)
    if ic.kind == "shock":
        return shock_profile(ic, x, t, gm)
    return jump_profile(ic, x, t, gm)


def moment_oracle(ic: DiscontinuityIC, x: float, t: float, gm: GasModel = ARGON,
                  epsabs: float = 1e-13, epsrel: float = 1e-13) -> PointState:
    """Macroscopic state at (x, t) by adaptive quadrature of the distribution.

    Velocities are scaled by the left thermal width and densities by n1 so
    the absolute tolerance is meaningful; each Maxwellian is truncated at
    eight thermal widths and the Heaviside split is a breakpoint.
    """
    _check_time(t)
    left, right = _sides(ic, gm)
    v0 = 1.0 / left.beta
    n0 = left.n
    xi = x / t

    def scaled(mx):
        return mx.n / n0, mx.u / v0, mx.beta * v0

    sides = []
    for mx, lo_side in ((left, True), (right, False)):
        n, u, b = scaled(mx)
        lo, hi = u - 8.0 / b, u + 8.0 / b
        if lo_side:
            lo = max(lo, xi / v0)
        else:
            hi = min(hi, xi / v0)
        sides.append((n, u, b, lo, hi))

    def moment(k):
        total = 0.0
        for n, u, b, lo, hi in sides:
            if hi <= lo:
                continue
            val, err = integrate.quad(lambda c: c**k * n * b / SQRT_PI * math.exp(-(b * (c - u)) ** 2),
                                      lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200)
            if err > max(epsabs, epsrel * abs(val)) * 10:
                raise QuadratureError(f"moment {k} did not converge", achieved=err)
            total += val
        return total

    def transverse_fraction(i):
        # n-weighted transverse temperature of side i, from int c_y^2 g(c_y) dc_y
        n, u, b, lo, hi = sides[i]
        if hi <= lo:
            return 0.0, 0.0
        dens, _ = integrate.quad(lambda c: n * b / SQRT_PI * math.exp(-(b * (c - u)) ** 2),
                                 lo, hi, epsabs=epsabs, epsrel=epsrel, limit=200)
        cy2, err = integrate.quad(lambda c: c * c * b / SQRT_PI * math.exp(-(b * c) ** 2),
                                  -8.0 / b, 8.0 / b, epsabs=epsabs, epsrel=epsrel, limit=200)
        return dens, cy2

    m0, m1, m2 = moment(0), moment(1), moment(2)
    if not m0 > 0:
        raise QuadratureError("zero density in oracle", achieved=m0)
    U = m1 / m0
    Tx = (m2 / m0 - U**2) * v0**2 / gm.R
    num = 0.0
    for i in range(2):
        dens, cy2 = transverse_fraction(i)
        num += dens * cy2 * v0**2 / gm.R
    Tn = num / m0
    return PointState(m0 * n0 * gm.m, U * v0, Tn, Tx)
