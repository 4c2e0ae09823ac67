"""Sod shock tube with the three interface fluxes, checked against the exact solution."""

from kinjump import diagnostics as dg
from kinjump.fluxes import GksParams
from kinjump.fvm import SchemeConfig, riemann_grid, run
from kinjump.gas import GasModel, GasState
from kinjump.riemann import exact_riemann

gm = GasModel.continuum()
left, right = GasState(1.0, 0.0, 1.0), GasState(0.125, 0.0, 0.8)
fan = exact_riemann(left, right, gm)
print(f"exact: p* = {fan.p_star:.5f}, u* = {fan.u_star:.5f}")

exact = lambda x: fan.sample((x - 0.5) / 0.2).rho
print(f"{'N':>5} {'godunov':>9} {'kfvs':>9} {'gks':>9} {'godunov+minmod':>15}")
for N in (100, 200, 400, 800):
    errs = []
    for flux, lim in (("godunov", "none"), ("kfvs", "none"), ("gks", "none"), ("godunov", "minmod")):
        grid = riemann_grid(left, right, N, 0.0, 1.0, gm, x0=0.5)
        p = run(grid, SchemeConfig(flux, lim, gks=GksParams(1.0)), 0.2, gm)[-1]
        errs.append(dg.l1_error(p, exact))
    print(f"{N:5d} " + " ".join(f"{e:9.5f}" for e in errs[:3]) + f" {errs[3]:15.5f}")
