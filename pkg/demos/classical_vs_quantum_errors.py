#!/usr/bin/env python3
"""Two perturbation channels, one observable.

Fidelity f(t) = |<psi(t)|psi_eps(t)>|^2 between an ideal evolution
and a perturbed twin, for the two error channels the simulator
supports:

- kick noise ("classical errors"): the kick strength picks up a fresh
  random offset every map step, identically in a classical simulation;
- gate noise ("quantum errors"): every Hadamard and controlled-phase
  of the circuit realization is slightly miscalibrated, which has no
  classical counterpart.

Both channels produce exponential decay in the chaotic map; the
script fits both curves and prints the rates side by side.
"""

import numpy as np

from sawtoothsim import (
    ExperimentConfig,
    LatticeParams,
    fidelity_curve,
    fit_decay,
)

lattice = LatticeParams(n_q=8, K=0.5)
print(f"lattice: {lattice.N} levels (n_q = {lattice.n_q}), K = {lattice.K}")

kick = ExperimentConfig(
    lattice=lattice, channel="classical", delta_K=2e-3,
    initial="gaussian", theta0=1.0, p0=0.0,
    t_max=400, n_states=1, n_noise=25, master_seed=7)
gate = ExperimentConfig(
    lattice=lattice, channel="quantum", epsilon=1e-2,
    initial="gaussian", theta0=1.0, p0=0.0,
    t_max=400, n_states=1, n_noise=25, master_seed=7)

for label, config in (("kick noise", kick), ("gate noise", gate)):
    curve = fidelity_curve(config)
    fit = fit_decay(curve, "exponential")
    half = int(np.argmax(curve.f < 0.5))
    print(f"\n{label}:")
    if label.startswith("kick"):
        print(f"  amplitude deltaK = {config.delta_K} "
              f"(delta_k = {config.delta_K / lattice.T:.3f} momentum levels)")
    else:
        print(f"  amplitude epsilon = {config.epsilon} on every gate")
    print(f"  f = 0.5 reached at t = {half}")
    print(f"  exponential fit: rate = {fit.rate:.5f}, r2 = {fit.r_squared:.4f}"
          f" over {fit.n_points} points")

print("\nthe channels differ microscopically but the chaotic map turns "
      "both into clean exponential decay")
