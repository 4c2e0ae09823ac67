"""Gas model, macroscopic states and Maxwellian velocity moments.

States hold either Python floats or equally shaped numpy arrays; every
function here broadcasts, so the finite-volume code can pass whole grids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np
from scipy.special import erfc, gamma as gamma_fn

Array = Union[float, np.ndarray]

SQRT_PI = math.sqrt(math.pi)


class PositivityError(ValueError):
    """A density, temperature or internal energy became non-positive."""

    def __init__(self, message: str, field: str = "", index=None):
        super().__init__(message)
        self.field = field
        self.index = index


@dataclass(frozen=True)
class GasModel:
    """Single-species gas with a variable-hard-sphere molecular model.

    Defaults are argon (Bird 1994, Appendix A).  ``mu_ref`` left as ``None``
    is filled with the VHS viscosity implied by ``d_ref`` and ``omega``.
    """

    R: float = 208.13
    gamma: float = 5.0 / 3.0
    m: float = 6.63e-26
    d_ref: float = 4.17e-10
    T_ref: float = 273.0
    omega: float = 0.81
    mu_ref: float | None = None

    def __post_init__(self):
        if not self.R > 0:
            raise ValueError(f"R must be positive, got {self.R}")
        if not 1.0 < self.gamma <= 5.0 / 3.0 + 1e-12:
            raise ValueError(f"gamma must lie in (1, 5/3], got {self.gamma}")
        if not self.m > 0 or not self.d_ref > 0 or not self.T_ref > 0:
            raise ValueError("m, d_ref and T_ref must be positive")
        if not 0.5 <= self.omega <= 1.0:
            raise ValueError(f"omega must lie in [0.5, 1], got {self.omega}")
        if self.mu_ref is None:
            object.__setattr__(self, "mu_ref", self.vhs_viscosity_ref())
        elif self.mu_ref < 0:
            raise ValueError("mu_ref must be non-negative")

    @classmethod
    def continuum(cls, gamma: float = 1.4, R: float = 1.0, mu_ref: float = 0.0) -> "GasModel":
        """Non-dimensional gas for Euler test problems (Sod, strong shocks).

        The molecular fields keep harmless placeholder values; only ``R``,
        ``gamma`` and ``mu_ref`` matter to the continuum code.
        """
        return cls(R=R, gamma=gamma, m=1.0, d_ref=1.0, T_ref=1.0, omega=0.81, mu_ref=mu_ref)

    @property
    def k_B(self) -> float:
        # Boltzmann constant implied by (m, R); keeps R*m bookkeeping exact.
        return self.m * self.R

    def vhs_viscosity_ref(self) -> float:
        w = self.omega
        return (15.0 * math.sqrt(math.pi * self.m * self.k_B * self.T_ref)
                / (2.0 * math.pi * self.d_ref**2 * (5.0 - 2.0 * w) * (7.0 - 2.0 * w)))

    def viscosity(self, T: Array) -> Array:
        return self.mu_ref * (np.asarray(T) / self.T_ref) ** self.omega

    @property
    def sigma_ref(self) -> float:
        """Prefactor of sigma_T(c_r) = sigma_ref * (c_ref / c_r)**(2*omega - 1)."""
        return math.pi * self.d_ref**2 / gamma_fn(2.5 - self.omega)

    @property
    def c_ref(self) -> float:
        # 2 k T_ref / m_r with reduced mass m/2
        return math.sqrt(4.0 * self.R * self.T_ref)

    def cross_section(self, c_r: Array) -> Array:
        """VHS total collision cross section at relative speed ``c_r``."""
        return self.sigma_ref * (self.c_ref / np.asarray(c_r)) ** (2.0 * self.omega - 1.0)

    def cross_section_at(self, T: float) -> float:
        """VHS equivalent cross section at temperature ``T`` (mean-free-path sense)."""
        return math.pi * self.d_ref**2 * (self.T_ref / T) ** (2.0 * self.omega - 1.0)

    def mean_free_path(self, n: float, T: float) -> float:
        return 1.0 / (math.sqrt(2.0) * self.cross_section_at(T) * n)

    def mean_speed(self, T: float) -> float:
        return math.sqrt(8.0 * self.R * T / math.pi)

    def mean_collision_time(self, n: float, T: float) -> float:
        return self.mean_free_path(n, T) / self.mean_speed(T)

    def collision_frequency(self, n: float, T: float) -> float:
        """Equilibrium per-molecule collision rate n <sigma_T c_r> of the VHS model."""
        # c_r is Maxwellian with per-component variance 2RT
        k = 2.0 - 2.0 * self.omega
        mean_cr_k = (2.0 / SQRT_PI) * (4.0 * self.R * T) ** (k / 2.0) * gamma_fn((k + 3.0) / 2.0)
        return n * self.sigma_ref * self.c_ref ** (2.0 * self.omega - 1.0) * mean_cr_k

    def sound_speed(self, T: Array) -> Array:
        return np.sqrt(self.gamma * self.R * np.asarray(T))

    def extra_energy_factor(self) -> float:
        """Internal energy per unit mass beyond the x-translational part, over RT.

        Equals 1 for a monatomic gas: the two transverse translational modes.
        """
        return 1.0 / (self.gamma - 1.0) - 0.5


ARGON = GasModel()


@dataclass(frozen=True)
class GasState:
    """Primitive state: mass density, x-velocity, temperature."""

    rho: Array
    u: Array
    T: Array

    def pressure(self, gm: GasModel) -> Array:
        return self.rho * gm.R * self.T

    def number_density(self, gm: GasModel) -> Array:
        return self.rho / gm.m

    def validate(self):
        if np.any(np.asarray(self.rho) <= 0) or np.any(np.asarray(self.T) <= 0):
            raise PositivityError(f"invalid state {self}", field="rho" if np.any(np.asarray(self.rho) <= 0) else "T")
        return self


@dataclass(frozen=True)
class ConservedState:
    rho: Array
    mom: Array
    E: Array


@dataclass(frozen=True)
class FluxVector:
    mass: Array
    momentum: Array
    energy: Array

    def __add__(self, other: "FluxVector") -> "FluxVector":
        return FluxVector(self.mass + other.mass, self.momentum + other.momentum,
                          self.energy + other.energy)

    def scaled(self, a: Array) -> "FluxVector":
        return FluxVector(a * self.mass, a * self.momentum, a * self.energy)

    def as_array(self) -> np.ndarray:
        return np.array([self.mass, self.momentum, self.energy], dtype=float)


@dataclass(frozen=True)
class Maxwellian:
    """n (beta/sqrt(pi)) exp(-beta^2 (c - u)^2) along x, with beta = 1/sqrt(2RT)."""

    n: Array
    u: Array
    beta: Array

    def temperature(self, gm: GasModel) -> Array:
        return 1.0 / (2.0 * gm.R * self.beta**2)

    def __call__(self, c: Array) -> Array:
        return self.n * self.beta / SQRT_PI * np.exp(-self.beta**2 * (c - self.u) ** 2)


def maxwellian_from_state(s: GasState, gm: GasModel) -> Maxwellian:
    return Maxwellian(n=s.rho / gm.m, u=s.u, beta=1.0 / np.sqrt(2.0 * gm.R * s.T))


def conserved_from_primitive(s: GasState, gm: GasModel) -> ConservedState:
    mom = s.rho * s.u
    E = 0.5 * s.rho * s.u**2 + s.rho * gm.R * s.T / (gm.gamma - 1.0)
    return ConservedState(s.rho, mom, E)


def moments_full(mx: Maxwellian, gm: GasModel) -> ConservedState:
    return conserved_from_primitive(GasState(mx.n * gm.m, mx.u, mx.temperature(gm)), gm)


def primitive_from_conserved(w: ConservedState, gm: GasModel) -> GasState:
    rho = np.asarray(w.rho, dtype=float)
    if np.any(~(rho > 0)):
        idx = np.flatnonzero(~(np.atleast_1d(rho) > 0))
        raise PositivityError(f"non-positive density at index {idx.tolist()}", field="rho", index=idx)
    e_int = w.E - 0.5 * w.mom**2 / w.rho
    if np.any(~(np.asarray(e_int) > 0)):
        idx = np.flatnonzero(~(np.atleast_1d(e_int) > 0))
        raise PositivityError(f"non-positive internal energy at index {idx.tolist()}",
                              field="E", index=idx)
    u = w.mom / w.rho
    T = (gm.gamma - 1.0) * e_int / (w.rho * gm.R)
    return GasState(w.rho, u, T)


def _moment_recursion(zeroth, first, u, beta, order):
    # <c^{k+2}> = u <c^{k+1}> + (k+1)/(2 beta^2) <c^k>, valid for full and half ranges
    m = [zeroth, first]
    for k in range(order - 1):
        m.append(u * m[k + 1] + (k + 1) / (2.0 * beta**2) * m[k])
    return m[: order + 1]


def full_moments(mx: Maxwellian, order: int) -> list:
    """[int c^k f dc for k = 0..order] over the whole real line."""
    n, u, beta = mx.n, mx.u, mx.beta
    m = _moment_recursion(1.0 + 0.0 * u, u + 0.0 * beta, u, beta, max(order, 1))
    return [n * mk for mk in m[: order + 1]]


def half_moments_all(mx: Maxwellian, side: str, order: int) -> list:
    """[int_{c>0} c^k f dc] (side='right') or over c<0 (side='left'), k = 0..order."""
    n, u, beta = mx.n, mx.u, mx.beta
    s = beta * u
    gauss = np.exp(-s**2) / (2.0 * SQRT_PI * beta)
    if side == "right":
        m0 = 0.5 * erfc(-s)
        m1 = u * m0 + gauss
    elif side == "left":
        m0 = 0.5 * erfc(s)
        m1 = u * m0 - gauss
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    m = _moment_recursion(m0, m1, u, beta, max(order, 1))
    return [n * mk for mk in m[: order + 1]]


def half_moments(mx: Maxwellian, side: str, order: int) -> Array:
    if order < 0:
        raise ValueError("order must be non-negative")
    return half_moments_all(mx, side, order)[order]


def euler_flux(s: GasState, gm: GasModel) -> FluxVector:
    p = s.rho * gm.R * s.T
    E = 0.5 * s.rho * s.u**2 + p / (gm.gamma - 1.0)
    return FluxVector(s.rho * s.u, s.rho * s.u**2 + p, s.u * (E + p))
