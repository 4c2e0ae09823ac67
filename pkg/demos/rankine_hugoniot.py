"""Normal-shock jumps and the two-shock picture of a captured shock.

A finite-volume scheme that smears a stationary shock over one cell holds
an intermediate state.  Godunov's method then solves two Riemann problems,
upstream|middle and middle|downstream.  For a strong shock both are shocks,
and their combined density ratio exceeds the single-shock limit.
"""

from kinjump.gas import ARGON, GasModel
from kinjump.riemann import (mach_from_temperature_ratio, max_density_ratio, rh_pair,
                             two_shock_split)

print("Ma1   rho2/rho1   u2/u1   T2/T1")
for Ma in (1.1, 2.0, 5.0, 10.0, 20.0):
    up, down = rh_pair(Ma, 1.0, 273.0, ARGON)
    print(f"{Ma:4.1f}  {down.rho / up.rho:9.4f}  {down.u / up.u:7.4f}  {down.T / up.T:7.3f}")

for r in (1.1, 2.0, 8.0):
    print(f"T2/T1 = {r:g}  ->  Ma1 = {mach_from_temperature_ratio(r):.4f}")

up, down = rh_pair(20.0, 1.0, 273.0, ARGON)
rep = two_shock_split(up, None, down, ARGON)
print(f"\nMa 20 argon, conserved-average middle cell:")
print(f"  upstream|middle  : {rep.upstream_fan.left_wave.kind} / {rep.upstream_fan.right_wave.kind}")
print(f"  middle|downstream: {rep.downstream_fan.left_wave.kind} / {rep.downstream_fan.right_wave.kind}")
print(f"  combined density ratio {rep.combined_ratio:.3f}, single shock {rep.single_shock_ratio:.3f}, "
      f"strong-shock bound {max_density_ratio(ARGON.gamma):g}")
g = 1.4
print(f"diatomic bound {max_density_ratio(g):g}; two stacked strong shocks allow {max_density_ratio(g) ** 2:g}")
