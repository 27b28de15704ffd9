#!/usr/bin/env python3
"""Collapse of the fidelity time scale t_f.

t_f is the first time the ensemble fidelity drops through 0.9.  For
memoryless gate noise the combination t_f * eps^2 * n_q^2 is a
constant: doubling the noise amplitude quarters the usable circuit
depth, and larger registers lose depth as 1/n_q^2 because the gate
count per step grows as 3 n_q^2.  The script scans a small
(n_q, eps) grid and prints the collapsed values.
"""

import numpy as np

from sawtoothsim import collapse_constant, sweep_tf

N_Q = [4, 5, 6]
EPS = [5e-3, 1e-2, 2e-2, 4e-2]

records = sweep_tf(N_Q, EPS, K=5.0, n_noise=30, master_seed=0)

print(f"{'n_q':>4} {'eps':>8} {'t_f':>9} {'t_f eps^2 n_q^2':>16}")
for r in records:
    print(f"{r.n_q:>4d} {r.epsilon:>8.3f} {r.t_f:>9.2f} {r.collapse:>16.3f}")

print(f"\nmean collapse constant = {collapse_constant(records):.3f}")

# scaling exponent: pool log t_f against log eps at fixed n_q
slopes = []
for n_q in N_Q:
    sub = [r for r in records if r.n_q == n_q]
    slopes.append(np.polyfit(np.log([r.epsilon for r in sub]),
                             np.log([r.t_f for r in sub]), 1)[0])
print("log-log slope of t_f vs eps per n_q:",
      ", ".join(f"{s:.2f}" for s in slopes), "(expected -2)")
