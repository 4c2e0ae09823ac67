"""Worked example: a weak contact (T2/T1 = 1.1) in sea-level argon after 6 microseconds.

The DSMC run covers 100-1000 collision times, where the layer grows like
sqrt(t).  The fitted prefactor is carried out to 6 us and converted to
metres.  A continuum cross-check treats the layer as heat conduction with
density following pressure balance, giving an erf profile.
Roughly two minutes on one core.  With only three replicas the 10% density
contrast is noisy and the prefactor moves by tens of percent between seeds;
the acceptance test uses ten replicas and finer bins.
"""

import math

import numpy as np
from scipy import special

from kinjump import diagnostics as dg
from kinjump.dsmc import DsmcConfig, run_unsteady
from kinjump.freemol import contact_ic
from kinjump.gas import ARGON

P0, T0 = 101325.0, 288.15
rho0 = P0 / (ARGON.R * T0)
n0 = rho0 / ARGON.m
lam = ARGON.mean_free_path(n0, T0)
tau = lam / ARGON.mean_speed(T0)
t_star = 6e-6 / tau
print(f"lambda1 = {lam * 1e9:.1f} nm, tau1 = {tau * 1e12:.1f} ps, 6 us = {t_star:.0f} tau1")

ic = contact_ic(1.1, rho1=rho0, T1=T0)
times = (100.0, 150.0, 200.0, 300.0, 400.0, 600.0, 800.0, 1000.0)
cfg = DsmcConfig(ic, half_length=300.0, cells_per_lambda=2.0, particles_per_cell=100.0, dt=0.2,
                 replicas=3, sample_times=times, seed=11)
series = np.array([(sp.profile.t, dg.thickness(sp.profile)) for sp in run_unsteady(cfg, ARGON, bin_cells=40)])
for t, d in series:
    print(f"  t = {t:6.0f} tau1   d = {d:6.1f} lambda1")
a = math.exp(np.mean(np.log(series[:, 1]) - 0.5 * np.log(series[:, 0])))
print(f"free exponent {dg.scaling_exponent(series).value:.3f}; sqrt fit d = {a:.2f} sqrt(t/tau1) lambda1")
d_dsmc = a * math.sqrt(t_star) * lam
print(f"DSMC extrapolation: {d_dsmc * 1e6:.1f} um")

# continuum: rho* = (1 + erf(x / (2 sqrt(kappa t)))) / 2, kappa = k / (rho c_p)
T_mean = T0 * 1.05
mu = ARGON.viscosity(T_mean)
k = 15.0 / 4.0 * ARGON.R * mu
kappa = k / (rho0 / 1.05 * 2.5 * ARGON.R)
z = special.erfinv(0.6)
d_cont = 2.0 * 2.0 * z * math.sqrt(kappa * 6e-6) / 0.6
print(f"continuum estimate: {d_cont * 1e6:.1f} um (kappa = {kappa:.2e} m^2/s)")
print("quoted value: about 20 um")
