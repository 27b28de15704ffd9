#!/usr/bin/env python3
"""Gate noise barely notices the underlying classical dynamics.

Kick noise decays fidelity very differently in the chaotic and
quasi-integrable maps (exponential vs Gaussian, rate tracking the
perturbation or saturating at the Lyapunov exponent).  Gate noise is
different: its rate is set by the circuit, not the dynamics.  The
script fits decay rates across kick strengths K for three initial
states:

- a packet inside the main island of the stable map at (1, 0),
- a packet in the diffusive region at (0, 0),
- a random state spread over all levels.

Only the island packet in the stable map decays noticeably slower,
and only by a modest factor.
"""

import numpy as np

from sawtoothsim import sweep_rate_vs_K

K_LIST = [0.5, 2.0, 5.0, -0.5]

records = sweep_rate_vs_K(K_LIST, n_q=7, epsilon=2e-2, n_noise=20,
                          t_max=250, master_seed=1)

rate = {(r.K, r.kind): r for r in records}
kinds = ("island", "diffusive", "random")

header = "".join(f"{kind:>12}" for kind in kinds)
print(f"{'K':>6}{header}")
for K in K_LIST:
    cells = "".join(f"{rate[(K, kind)].rate:>12.5f}" for kind in kinds)
    tag = "stable" if -4.0 <= K <= 0.0 else "chaotic"
    print(f"{K:>6.1f}{cells}   {tag}")

chaotic = [K for K in K_LIST if K > 0]
mean_island = np.mean([rate[(K, 'island')].rate for K in chaotic])
ratio = mean_island / rate[(-0.5, "island")].rate
print(f"\nisland packet, chaotic/stable rate ratio = {ratio:.2f} "
      "(the whole dynamical fingerprint)")
