"""A 1 rad turn about one axis is irrational, yet looks periodic for a while.

The ratio 1/pi has the continued-fraction convergent 113/355 followed by a
large partial quotient, so an orbit nearly closes after 355 steps and only
drifts off that near-cycle slowly. The density measured at a fixed point
therefore converges to its closed form only after about a million steps.
A 0.7 rad turn has no such near-resonance and converges much sooner.
"""

import numpy as np

from hemipwi import density, oracles
from hemipwi.pwi import Protocol

z = np.linspace(-0.9, 0.9, 100)
r = np.sqrt(1 - z**2)
pts = np.stack([np.zeros_like(z), -r, z], axis=-1)
want = oracles.analytic_rho(z, 1e-3)
for phi in (1.0, 0.7):
    for n in (10_000, 100_000, 1_000_000):
        _, n2, _ = density.count_returns(pts, Protocol(phi, 0.0), 1e-3, n)
        err = np.abs(n2 / (n + 1) / want - 1).max()
        print(f"phi = {phi} rad, N = {n:>9,}: worst relative density error {err:.3f}")
