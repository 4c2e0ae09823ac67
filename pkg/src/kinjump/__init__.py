"""Kinetic and continuum models of one-dimensional contact and shock jumps.

Submodules: ``gas`` (gas model, Maxwellian moments), ``freemol`` (closed-form
free-molecular profiles), ``riemann`` (exact Euler Riemann solver and
Rankine-Hugoniot relations), ``dsmc`` (particle simulation), ``fluxes``
(KFVS and gas-kinetic interface fluxes), ``fvm`` (finite-volume solver),
``diagnostics`` (thickness, overshoot, scaling exponents) and ``cli``.
"""

__version__ = "0.1.0"
