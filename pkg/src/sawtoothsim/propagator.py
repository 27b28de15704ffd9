"""Split-operator reference evolution of the quantum sawtooth map.

One map step is the unitary

    U = exp(-i T n^2 / 2) . exp(i k (theta - pi)^2 / 2),

applied kick first: transform to the angle basis, multiply the
quadratic kick phase, transform back, multiply the free-rotation phase.
Both factors are diagonal in their own basis, so a step costs two FFTs.

The "classical error" channel perturbs the kick strength only: step t
uses k + delta_k(t) with delta_k(t) drawn uniformly from
[-delta_k_max, +delta_k_max], one draw per map step.  This channel has
a classical limit (it perturbs the map parameter), in contrast to the
per-gate noise of :mod:`sawtoothsim.circuit`.

``BatchPropagator`` holds precomputed phase tables and advances a whole
(members, N) ensemble per call; the ``QuantumState`` entry points wrap
it for single states.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .states import (
    ANGLE,
    MOMENTUM,
    LatticeParams,
    QuantumState,
    angle_values,
    momentum_values,
    to_angle,
    to_momentum,
)

__all__ = [
    "StepPerturbation",
    "apply_kick",
    "apply_rotation",
    "step_exact",
    "step_exact_inverse",
    "evolve",
    "BatchPropagator",
]


@dataclass(frozen=True)
class StepPerturbation:
    """Per-step kick-strength noise delta_k(t), in k units.

    The same physical schedule expressed in K units is
    delta_K(t) = T delta_k(t); amplitudes convert with the lattice's T.
    """

    delta_k_max: float
    seed: int = 0

    def __post_init__(self):
        if self.delta_k_max < 0:
            raise ValueError("delta_k_max must be >= 0")

    def values(self, steps: int) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(-self.delta_k_max, self.delta_k_max, steps)


def apply_kick(state: QuantumState, k_eff: float) -> QuantumState:
    """Diagonal kick phase exp(i k_eff (theta - pi)^2 / 2) in the angle basis."""
    if state.basis != ANGLE:
        raise ValueError("apply_kick expects an angle-basis state")
    theta = angle_values(state.lattice)
    phase = np.exp(1j * k_eff * (theta - math.pi) ** 2 / 2.0)
    return QuantumState(state.amps * phase, ANGLE, state.lattice)


def apply_rotation(state: QuantumState, T: float) -> QuantumState:
    """Diagonal free rotation exp(-i T n^2 / 2) in the momentum basis."""
    if state.basis != MOMENTUM:
        raise ValueError("apply_rotation expects a momentum-basis state")
    n = momentum_values(state.lattice)
    phase = np.exp(-1j * T * n.astype(float) ** 2 / 2.0)
    return QuantumState(state.amps * phase, MOMENTUM, state.lattice)


def step_exact(state: QuantumState, lattice: LatticeParams,
               delta_k: float = 0.0) -> QuantumState:
    """One full map step with kick strength k + delta_k.

    Accepts and returns momentum-basis states.
    """
    if state.lattice != lattice:
        raise ValueError("state lattice does not match")
    kicked = apply_kick(to_angle(state), lattice.k + delta_k)
    return apply_rotation(to_momentum(kicked), lattice.T)


def step_exact_inverse(state: QuantumState, lattice: LatticeParams,
                       delta_k: float = 0.0) -> QuantumState:
    """Inverse map step: conjugate phases in reverse order."""
    if state.lattice != lattice:
        raise ValueError("state lattice does not match")
    unrotated = apply_rotation(state, -lattice.T)
    unkicked = apply_kick(to_angle(unrotated), -(lattice.k + delta_k))
    return to_momentum(unkicked)


def evolve(state: QuantumState, lattice: LatticeParams,
           perturbation: StepPerturbation | None, t: int,
           keep: str = "final"):
    """Iterate the map t steps, optionally with per-step kick noise.

    keep="final" returns (state_t, drawn_deltas); keep="all" returns
    ([state_0 .. state_t], drawn_deltas).  The draw log makes any run
    replayable from (initial state, schedule seed).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if keep not in ("final", "all"):
        raise ValueError("keep must be 'final' or 'all'")
    deltas = (np.zeros(t) if perturbation is None
              else perturbation.values(t))
    states = [state]
    current = state
    for step in range(t):
        current = step_exact(current, lattice, deltas[step])
        if keep == "all":
            states.append(current)
    if keep == "all":
        return states, deltas
    return current, deltas


class BatchPropagator:
    """Vectorized exact evolution of a (members, N) amplitude block.

    The (-1)^l twiddles of the two basis changes cancel between the
    inverse and forward transforms inside one step, leaving

        psi <- rot * fft(kick * ifft(psi))

    with kick and rot the diagonal phase tables.  Kick noise enters as
    a per-member column of extra quadratic phases.
    """

    def __init__(self, lattice: LatticeParams):
        self.lattice = lattice
        theta = angle_values(lattice)
        n = momentum_values(lattice).astype(float)
        self.kick_quad = (theta - math.pi) ** 2 / 2.0
        self.kick_phase = np.exp(1j * lattice.k * self.kick_quad)
        self.rot_phase = np.exp(-1j * lattice.T * n * n / 2.0)

    def step(self, amps: np.ndarray, delta_k=None) -> np.ndarray:
        """Advance a (members, N) block one map step.

        delta_k is None (noiseless) or a length-members vector of kick
        perturbations, one per ensemble member.
        """
        work = np.fft.ifft(amps, axis=-1)
        if delta_k is None:
            work *= self.kick_phase
        else:
            dk = np.asarray(delta_k, float).reshape(-1, 1)
            work *= self.kick_phase * np.exp(1j * dk * self.kick_quad)
        work = np.fft.fft(work, axis=-1)
        work *= self.rot_phase
        return work

    def step_inverse(self, amps: np.ndarray, delta_k=None) -> np.ndarray:
        """Inverse of :meth:`step` with the same noise values."""
        work = amps * self.rot_phase.conj()
        work = np.fft.ifft(work, axis=-1)
        if delta_k is None:
            work *= self.kick_phase.conj()
        else:
            dk = np.asarray(delta_k, float).reshape(-1, 1)
            work *= (self.kick_phase * np.exp(1j * dk * self.kick_quad)).conj()
        return np.fft.fft(work, axis=-1)
