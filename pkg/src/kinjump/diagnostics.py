"""Profile container and the measurements taken from it.

Thickness follows the 0.2/0.8 normalized-density crossing rule, with the
crossings taken on the central monotone segment so that overshoot lobes
never produce extra crossings.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats


class DiagnosticError(ValueError):
    pass


class AmbiguityError(DiagnosticError):
    def __init__(self, message, candidates):
        super().__init__(message)
        self.candidates = candidates


class UnderResolvedWarning(UserWarning):
    pass


@dataclass
class Profile:
    x: np.ndarray
    rho: np.ndarray
    U: np.ndarray
    Tn: np.ndarray
    Tx: np.ndarray
    t: float
    source: str = "freemol"
    x_unit: str = "lambda1"
    t_unit: str = "tau1"
    Ttot: np.ndarray = field(default=None)
    # per-cell sample counts (DSMC); None elsewhere
    counts: np.ndarray | None = None

    def __post_init__(self):
        self.x = np.asarray(self.x, dtype=float)
        n = self.x.size
        for name in ("rho", "U", "Tn", "Tx"):
            arr = np.broadcast_to(np.asarray(getattr(self, name), dtype=float), (n,)).copy()
            setattr(self, name, arr)
        if self.Ttot is None:
            self.Ttot = total_temperature(self.Tx, self.Tn)
        if n > 1 and not np.all(np.diff(self.x) > 0):
            raise ValueError("profile x must be strictly increasing")

    def rescaled(self, x_scale: float, t_scale: float, x_unit: str, t_unit: str) -> "Profile":
        """Same fields with x / x_scale and t / t_scale."""
        return Profile(self.x / x_scale, self.rho, self.U, self.Tn, self.Tx, self.t / t_scale,
                       self.source, x_unit, t_unit, self.Ttot, self.counts)


def total_temperature(Tx, Tn):
    return (np.asarray(Tx) + 2.0 * np.asarray(Tn)) / 3.0


def plateaus(rho: np.ndarray, fraction: float = 0.1) -> tuple[float, float]:
    """Mean density over the outer ``fraction`` of cells on each side."""
    k = max(1, int(round(fraction * rho.size)))
    return float(np.nanmean(rho[:k])), float(np.nanmean(rho[-k:]))


def normalized_density(p: Profile, far: tuple[float, float] | None = None) -> np.ndarray:
    """rho* = (rho - rho_min) / (rho_max - rho_min) from the far-field values."""
    left, right = far if far is not None else plateaus(p.rho)
    lo, hi = min(left, right), max(left, right)
    if hi - lo <= 0:
        raise DiagnosticError("far-field densities are equal; rho* undefined")
    return (p.rho - lo) / (hi - lo)


def _crossing(x, y, i, level):
    # linear interpolation between samples i and i+1
    return x[i] + (level - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i])


def thickness(p: Profile, far: tuple[float, float] | None = None) -> float:
    """(x at rho*=0.2 - x at rho*=0.8) / 0.6, in the units of ``p.x``, as a positive length."""
    x = p.x
    r = normalized_density(p, far)
    left, right = far if far is not None else plateaus(p.rho)
    # orient so rho* rises with x
    y = r if right > left else 1.0 - r
    ok = np.isfinite(y)
    x, y = x[ok], y[ok]
    above = y >= 0.5
    mids = np.flatnonzero(above[1:] != above[:-1])
    if mids.size == 0:
        raise DiagnosticError("no rho* = 0.5 crossing; degenerate profile")
    if mids.size > 1:
        cands = [float(_crossing(x, y, i, 0.5)) for i in mids]
        raise AmbiguityError(f"multiple central crossings at x = {cands}", cands)
    i0 = mids[0]
    # walk outwards from the centre until leaving the [0.2, 0.8] band
    lo = i0
    while lo >= 0 and y[lo] > 0.2:
        lo -= 1
    hi = i0 + 1
    while hi < y.size and y[hi] < 0.8:
        hi += 1
    if lo < 0 or hi >= y.size:
        raise DiagnosticError("profile does not reach both 0.2 and 0.8 levels")
    x02 = _crossing(x, y, lo, 0.2)
    x08 = _crossing(x, y, hi - 1, 0.8)
    if hi - lo == 1:
        warnings.warn("thickness below one grid spacing; profile under-resolved",
                      UnderResolvedWarning, stacklevel=2)
    return abs(x08 - x02) / 0.6


@dataclass(frozen=True)
class Overshoot:
    max_over: float
    max_under: float


def overshoot(p: Profile, far: tuple[float, float] | None = None) -> Overshoot:
    r = normalized_density(p, far)
    r = r[np.isfinite(r)]
    return Overshoot(max(0.0, float(r.max()) - 1.0), max(0.0, -float(r.min())))


@dataclass(frozen=True)
class Exponent:
    value: float
    stderr: float

    def band(self, k: float = 2.0) -> tuple[float, float]:
        return self.value - k * self.stderr, self.value + k * self.stderr


def scaling_exponent(series) -> Exponent:
    """Least-squares slope of log d against log t."""
    t, d = np.asarray(series, dtype=float).T
    if t.size < 5:
        raise DiagnosticError("need at least 5 (t, d) points")
    if np.any(t <= 0) or np.any(d <= 0):
        raise DiagnosticError("t and d must be positive")
    fit = stats.linregress(np.log(t), np.log(d))
    return Exponent(float(fit.slope), float(fit.stderr))


def l1_error(p: Profile, ref, field: str = "rho") -> float:
    """Delta-x weighted mean |p.field - ref| over p's grid.

    ``ref`` is either another Profile (linearly interpolated) or a callable
    returning the reference field at an array of x.
    """
    x = p.x
    vals = getattr(p, field)
    if isinstance(ref, Profile):
        if x[0] < ref.x[0] - 1e-12 * abs(ref.x[0]) or x[-1] > ref.x[-1] + 1e-12 * abs(ref.x[-1]):
            raise DiagnosticError("reference profile does not cover the domain")
        other = np.interp(x, ref.x, getattr(ref, field))
    else:
        other = np.asarray(ref(x), dtype=float)
    if x.size == 1:
        return float(abs(vals[0] - other[0]))
    # cell widths from midpoints between samples
    edges = np.concatenate(([x[0] - 0.5 * (x[1] - x[0])], 0.5 * (x[1:] + x[:-1]),
                            [x[-1] + 0.5 * (x[-1] - x[-2])]))
    w = np.diff(edges)
    return float(np.sum(w * np.abs(vals - other)) / np.sum(w))


def anisotropy_max(p: Profile) -> float:
    d = p.Tx - p.Tn
    d = d[np.isfinite(d)]
    return float(d.max()) if d.size else math.nan
