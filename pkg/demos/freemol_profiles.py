"""Free-molecular contact and shock profiles at one mean collision time.

Prints density, velocity and the two temperature components on a coarse
grid in units of the upstream mean free path.  Profiles are self-similar in
x/t, so any other time is a stretch of these columns.
"""

import numpy as np

from kinjump import diagnostics as dg
from kinjump.freemol import contact_ic, profile, reference_scales, shock_ic
from kinjump.riemann import mach_from_temperature_ratio

x = np.linspace(-6.0, 6.0, 13)

for label, ic in (("contact T2/T1 = 8", contact_ic(8.0)),
                  ("shock   T2/T1 = 8", shock_ic(mach_from_temperature_ratio(8.0)))):
    lam, tau = reference_scales(ic.left)
    p = profile(ic, x * lam, tau)
    print(f"\n{label}   (lambda1 = {lam:.3e} m, tau1 = {tau:.3e} s)")
    print(f"{'x/lam1':>7} {'rho/rho1':>9} {'U [m/s]':>9} {'Tn/T1':>7} {'Tx/T1':>7}")
    for row in zip(x, p.rho / ic.left.rho, p.U, p.Tn / ic.left.T, p.Tx / ic.left.T):
        print("{:7.1f} {:9.4f} {:9.2f} {:7.3f} {:7.3f}".format(*row))

    # the same measures the acceptance suite uses, on a fine grid
    xf = np.linspace(-12.0, 12.0, 4801)
    pf = profile(ic, xf * lam, tau)
    prof = dg.Profile(xf, pf.rho, pf.U, pf.Tn, pf.Tx, 1.0)
    far = (ic.left.rho, ic.right.rho)
    o = dg.overshoot(prof, far)
    print(f"thickness {dg.thickness(prof, far):.3f} lambda1, overshoot {o.max_over:.4f}, "
          f"undershoot {o.max_under:.2e}, max Tx/T2 {pf.Tx.max() / ic.right.T:.3f}")
