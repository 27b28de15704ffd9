#!/usr/bin/env python3
"""Phase-space portrait of the sawtooth map at K = -0.5.

The stable map (-4 <= K <= 0) organizes the torus into elliptic
islands embedded in a thin diffusive web.  Seeds launched inside the
main island at (pi, 0) trace closed ellipses forever; a seed next to
the force discontinuity at theta = 0 wanders.  The script evolves a
fan of seeds, reports how much of the torus each orbit visits, and
writes the section to CSV for plotting with any external tool.
"""

import math

import numpy as np

from sawtoothsim import ClassicalParams, PhasePoint, poincare_section
from sawtoothsim.io import write_poincare

K = -0.5
STEPS = 2000

params = ClassicalParams(K=K)
seeds = [PhasePoint(math.pi + r, 0.0) for r in (0.4, 0.8, 1.2, 1.6, 2.0, 2.5)]
seeds.append(PhasePoint(math.pi, 2.4))   # secondary structure near the border
seeds.append(PhasePoint(0.05, 0.0))      # diffusive web

trajectories = poincare_section(seeds, params, STEPS)

# occupancy: fraction of a coarse 16 x 16 grid each orbit touches
print(f"sawtooth map, K = {K}, {STEPS} steps per seed")
print(f"{'seed':>22} {'cells':>6} {'max |theta-pi|':>15} {'max |p|':>9}")
for seed, traj in zip(seeds, trajectories):
    cells = np.unique(
        (traj[:, 0] // (2 * math.pi / 16)).astype(int) * 16
        + ((traj[:, 1] + math.pi) // (2 * math.pi / 16)).astype(int)).size
    spread_t = np.max(np.abs(((traj[:, 0] - math.pi + math.pi) % (2 * math.pi))
                             - math.pi))
    spread_p = np.max(np.abs(traj[:, 1]))
    label = f"({seed.theta:.3f}, {seed.p:.1f})"
    print(f"{label:>22} {cells:>6d} {spread_t:>15.3f} {spread_p:>9.3f}")

write_poincare("portrait.csv", trajectories,
               meta={"K": K, "steps": STEPS}, timestamp=False)
print("\nwrote portrait.csv (seed_index, step, theta, p)")
print("island orbits touch a handful of cells; the diffusive seed "
      "spreads over the web")
