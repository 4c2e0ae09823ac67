"""1D finite-volume solver with Godunov, KFVS and GKS interface fluxes."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .diagnostics import Profile
from .fluxes import GksParams, gks_flux, kfvs_flux
from .gas import (ConservedState, FluxVector, GasModel, GasState, PositivityError,
                  conserved_from_primitive, primitive_from_conserved)
from .riemann import godunov_flux

FLUXES = ("godunov", "kfvs", "gks")
LIMITERS = ("none", "minmod", "vanleer")


@dataclass(frozen=True)
class SchemeConfig:
    flux: str = "godunov"
    limiter: str = "none"
    cfl: float = 0.5
    gks: GksParams = field(default_factory=GksParams)

    def __post_init__(self):
        if self.flux not in FLUXES:
            raise ValueError(f"unknown flux {self.flux!r}")
        if self.limiter not in LIMITERS:
            raise ValueError(f"unknown limiter {self.limiter!r}")
        if not 0 < self.cfl <= 0.9:
            raise ValueError(f"cfl must lie in (0, 0.9], got {self.cfl}")


@dataclass
class Grid1D:
    x_min: float
    x_max: float
    W: ConservedState                 # arrays of length N
    bc_left: str = "zero-gradient"    # or "fixed"
    bc_right: str = "zero-gradient"
    fixed_left: GasState | None = None
    fixed_right: GasState | None = None

    def __post_init__(self):
        if self.N < 4:
            raise ValueError("grid needs at least 4 cells")
        if not self.x_max > self.x_min:
            raise ValueError("x_max must exceed x_min")
        for side in ("left", "right"):
            kind = getattr(self, f"bc_{side}")
            if kind not in ("fixed", "zero-gradient"):
                raise ValueError(f"unknown boundary kind {kind!r}")
            if kind == "fixed" and getattr(self, f"fixed_{side}") is None:
                raise ValueError(f"fixed {side} boundary needs a state")

    @property
    def N(self) -> int:
        return int(np.size(self.W.rho))

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.N

    @property
    def centers(self) -> np.ndarray:
        return self.x_min + (np.arange(self.N) + 0.5) * self.dx

    def totals(self) -> np.ndarray:
        return self.dx * np.array([np.sum(self.W.rho), np.sum(self.W.mom), np.sum(self.W.E)])

    def with_W(self, W: ConservedState) -> "Grid1D":
        return replace(self, W=W)


def riemann_grid(left: GasState, right: GasState, N: int, x_min: float, x_max: float,
                 gm: GasModel, x0: float = 0.0, bc: str = "zero-gradient") -> Grid1D:
    """Grid holding ``left`` for x < x0 and ``right`` for x > x0."""
    xc = x_min + (np.arange(N) + 0.5) * (x_max - x_min) / N
    is_left = xc < x0
    s = GasState(np.where(is_left, left.rho, right.rho), np.where(is_left, left.u, right.u),
                 np.where(is_left, left.T, right.T))
    W = conserved_from_primitive(s, gm)
    if bc == "fixed":
        return Grid1D(x_min, x_max, W, "fixed", "fixed", left, right)
    return Grid1D(x_min, x_max, W, bc, bc)


def _minmod(a, b):
    return np.where(a * b > 0, np.sign(a) * np.minimum(np.abs(a), np.abs(b)), 0.0)


def _vanleer(a, b):
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.where(a * b > 0, 2.0 * a * b / (a + b), 0.0)
    return r


def _padded_primitives(grid: Grid1D, W: ConservedState, gm: GasModel, ng: int = 2):
    """(rho, u, p) with ``ng`` ghost cells per side."""
    try:
        s = primitive_from_conserved(W, gm)
    except PositivityError as exc:
        raise PositivityError(f"{exc} (cells {exc.index.tolist() if exc.index is not None else '?'})",
                              exc.field, exc.index) from None
    prims = [s.rho, s.u, s.rho * gm.R * s.T]
    out = []
    for k, q in enumerate(prims):
        if grid.bc_left == "fixed":
            fl = grid.fixed_left
            ql = [fl.rho, fl.u, fl.rho * gm.R * fl.T][k]
        else:
            ql = q[0]
        if grid.bc_right == "fixed":
            fr = grid.fixed_right
            qr = [fr.rho, fr.u, fr.rho * gm.R * fr.T][k]
        else:
            qr = q[-1]
        out.append(np.concatenate([np.full(ng, ql), q, np.full(ng, qr)]))
    return out


def _interface_states(grid: Grid1D, W: ConservedState, limiter: str, gm: GasModel):
    rho, u, p = _padded_primitives(grid, W, gm)
    if limiter == "none":
        qs_l = [q[1:-2] for q in (rho, u, p)]
        qs_r = [q[2:-1] for q in (rho, u, p)]
    else:
        lim = _minmod if limiter == "minmod" else _vanleer
        slopes = []
        for q in (rho, u, p):
            dq = np.diff(q)
            slopes.append(lim(dq[:-1], dq[1:]))       # slopes of cells 1 .. N+2
        # zero slopes whose reconstructed values lose positivity
        for k in (0, 2):
            q = (rho, u, p)[k][1:-1]
            bad = (q - 0.5 * np.abs(slopes[k]) <= 0)
            for s in slopes:
                s[bad] = 0.0
        faces_minus, faces_plus = [], []
        for q, s in zip((rho, u, p), slopes):
            c = q[1:-1]
            faces_minus.append(c - 0.5 * s)
            faces_plus.append(c + 0.5 * s)
        # interface i+1/2 between padded cells j and j+1 for j = 1 .. N+1 (cells 0..N)
        qs_l = [fp[:-1] for fp in faces_plus]
        qs_r = [fm[1:] for fm in faces_minus]
    left = GasState(qs_l[0], qs_l[1], qs_l[2] / (qs_l[0] * gm.R))
    right = GasState(qs_r[0], qs_r[1], qs_r[2] / (qs_r[0] * gm.R))
    return left, right


def reconstruct(grid: Grid1D, limiter: str, gm: GasModel) -> tuple[GasState, GasState]:
    """Left/right states at the N + 1 interfaces of ``grid``."""
    return _interface_states(grid, grid.W, limiter, gm)


def cfl_dt(grid: Grid1D, cfl: float, gm: GasModel) -> float:
    s = primitive_from_conserved(grid.W, gm)
    smax = np.max(np.abs(s.u) + gm.sound_speed(s.T))
    return float(cfl * grid.dx / smax)


def interface_fluxes(left: GasState, right: GasState, scheme: SchemeConfig, dt: float,
                     gm: GasModel) -> FluxVector:
    if scheme.flux == "godunov":
        return godunov_flux(left, right, gm)
    if scheme.flux == "kfvs":
        return kfvs_flux(left, right, gm)
    return gks_flux(left, right, dt, scheme.gks, gm)


def _rhs(grid, W, scheme, dt, gm):
    left, right = _interface_states(grid, W, scheme.limiter, gm)
    F = interface_fluxes(left, right, scheme, dt, gm)
    dF = [np.diff(F.mass), np.diff(F.momentum), np.diff(F.energy)]
    boundary = np.array([[F.mass[0], F.momentum[0], F.energy[0]],
                         [F.mass[-1], F.momentum[-1], F.energy[-1]]])
    return dF, boundary


def _update(W, dF, lam):
    return ConservedState(W.rho - lam * dF[0], W.mom - lam * dF[1], W.E - lam * dF[2])


def _check(W: ConservedState, gm: GasModel, scheme: SchemeConfig):
    try:
        primitive_from_conserved(W, gm)
    except PositivityError as exc:
        raise PositivityError(f"positivity lost in cells {np.asarray(exc.index).tolist()} "
                              f"({exc.field}) with {scheme.flux}/{scheme.limiter}",
                              exc.field, exc.index) from None


@dataclass
class StepInfo:
    dt: float
    boundary_flux: np.ndarray   # time-integrated (left inflow - right outflow) of mass, momentum, energy


def step(grid: Grid1D, scheme: SchemeConfig, gm: GasModel, dt: float | None = None):
    """Advance one time step; returns the new grid and a :class:`StepInfo`.

    Forward Euler with piecewise-constant data, Heun's two-stage method when a
    limiter is active.
    """
    if dt is None:
        dt = cfl_dt(grid, scheme.cfl, gm)
    lam = dt / grid.dx
    dF1, b1 = _rhs(grid, grid.W, scheme, dt, gm)
    W1 = _update(grid.W, dF1, lam)
    _check(W1, gm, scheme)
    if scheme.limiter == "none":
        net = dt * (b1[0] - b1[1])
        return grid.with_W(W1), StepInfo(dt, net)
    dF2, b2 = _rhs(grid, W1, scheme, dt, gm)
    W2 = _update(W1, dF2, lam)
    W = ConservedState(0.5 * (grid.W.rho + W2.rho), 0.5 * (grid.W.mom + W2.mom), 0.5 * (grid.W.E + W2.E))
    _check(W, gm, scheme)
    net = 0.5 * dt * ((b1[0] - b1[1]) + (b2[0] - b2[1]))
    return grid.with_W(W), StepInfo(dt, net)


def grid_profile(grid: Grid1D, t: float, gm: GasModel, x_scale: float = 1.0, t_scale: float = 1.0,
                 x_unit: str = "m", t_unit: str = "s") -> Profile:
    s = primitive_from_conserved(grid.W, gm)
    return Profile(grid.centers / x_scale, s.rho, s.u, s.T, s.T, t / t_scale, "fvm", x_unit, t_unit)


def run(grid: Grid1D, scheme: SchemeConfig, t_end: float, gm: GasModel,
        sample_times=None, max_steps: int = 10_000_000, **profile_kw) -> list[Profile]:
    """Step to ``t_end`` landing exactly on each sample time (default: ``t_end`` only)."""
    times = sorted(sample_times) if sample_times is not None else [t_end]
    if times and times[-1] > t_end:
        raise ValueError("sample times beyond t_end")
    out = []
    t = 0.0
    nsteps = 0
    for target in times:
        while t < target * (1 - 1e-14):
            dt = min(cfl_dt(grid, scheme.cfl, gm), target - t)
            grid, _ = step(grid, scheme, gm, dt)
            t = target if dt == target - t else t + dt
            nsteps += 1
            if nsteps > max_steps:
                raise RuntimeError("step limit exceeded")
        out.append(grid_profile(grid, t, gm, **profile_kw))
    return out
