"""Stationary strong shock held on a 1D grid.

The centre cell starts at the conserved average of the two sides.  Godunov
relaxes it onto a sharp shock.  The piecewise-constant GKS flux with the
pressure-jump collision time loses positivity ahead of strong shocks unless
C_jump is raised; the scan below shows where.
"""

import numpy as np

from kinjump.fluxes import GksParams
from kinjump.fvm import Grid1D, SchemeConfig, riemann_grid, step
from kinjump.gas import ARGON, PositivityError
from kinjump.riemann import conserved_average, rh_pair


def hold(Ma, flux, C_jump=1.0, steps=3000, N=101):
    up, down = rh_pair(Ma, 1.0, 273.0, ARGON)
    g = riemann_grid(up, down, N, -1.0, 1.0, ARGON, bc="fixed")
    wm = conserved_average(up, down, ARGON)
    g.W.rho[N // 2], g.W.mom[N // 2], g.W.E[N // 2] = wm.rho, wm.mom, wm.E
    g = Grid1D(g.x_min, g.x_max, g.W, "fixed", "fixed", up, down)
    scheme = SchemeConfig(flux, gks=GksParams(C_jump))
    for k in range(steps):
        try:
            g, _ = step(g, scheme, ARGON)
        except PositivityError:
            return f"fails at step {k + 1}"
    return "holds"


for Ma in (5.0, 10.0, 14.0, 20.0):
    print(f"Ma {Ma:4.0f}: godunov {hold(Ma, 'godunov'):>18}, kfvs {hold(Ma, 'kfvs'):>18}, "
          f"gks C_jump=1 {hold(Ma, 'gks'):>18}")
for C in (1.0, 2.0, 3.0, 5.0):
    print(f"Ma 20, gks C_jump={C:g}: {hold(20.0, 'gks', C)}")
