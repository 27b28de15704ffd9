"""Gate-level realization of one sawtooth-map step, with unitary noise.

The step factors into four blocks over n_q qubits:

1. a Fourier ladder (Hadamard plus controlled-phase pairs, then an
   index bit reversal) taking the momentum register to the angle
   register;
2. a diagonal quadratic-phase block implementing the kick
   exp(i k (theta_l - pi)^2 / 2) on the angle index l;
3. the reversed ladder with negated angles, returning to momentum;
4. a diagonal quadratic-phase block implementing the free rotation
   exp(-i T n^2 / 2) on n = l - N/2.

Writing an index as l = sum_j a_j 2^j with binary digits a_j, any
quadratic exponent in l expands as single-digit terms (a_j^2 = a_j)
plus cross terms a_j1 a_j2 over ordered pairs j1 != j2, each symmetric
cross term split across its two ordered pairs.  Digit terms become
single-qubit phase gates, cross terms controlled-phase gates, and the
digit-independent remainder accumulates into one recorded scalar
``phase_offset`` per step (applied during execution but carried by no
gate, so it is exempt from gate noise).  The bit reversal is pure index
bookkeeping: no gates, no noise.

Gate budget per step: 2 n_q Hadamards and 3 n_q^2 - n_q gates of
controlled-phase class (counting the single-qubit phases, which are
controlled-phases restricted to a two-dimensional subspace).

Noise model: every counted gate is replaced by an imperfect unitary
with parameters drawn uniformly from [-epsilon, +epsilon].
Controlled-phase-class gates acquire independent extra phases on each
computational sector; Hadamards become pi rotations about a tilted
axis (polar angle pi/4 + nu1, azimuth nu2), with the global phase of
the rotation dropped (fidelity never sees it).  In the memoryless
regime parameters are redrawn at every application; in the static
regime one draw per gate position is frozen and reused forever.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .states import MOMENTUM, LatticeParams, QuantumState

PARAMS_PER_GATE = 4  # fixed RNG consumption per noisy gate, every kind

__all__ = [
    "Gate",
    "CircuitProgram",
    "NoiseModel",
    "build_sawtooth_circuit",
    "bit_reversal_permutation",
    "apply_gate",
    "apply_noisy_gate",
    "run_step_noisy",
    "CircuitEngine",
    "circuit_deviation",
]

HADAMARD = "hadamard"
CPHASE = "cphase"
PHASE1 = "phase"
BITREV = "bitrev"

NOISY_KINDS = (HADAMARD, CPHASE, PHASE1)


@dataclass(frozen=True)
class Gate:
    """One circuit element.

    kind "hadamard": target only.  kind "cphase": control, target and
    angle on the |11> sector.  kind "phase": target and angle on the
    |1> sector (controlled-phase class for counting and noise).  kind
    "bitrev": index bookkeeping, no parameters, exempt from noise.
    """

    kind: str
    target: int = -1
    control: int = -1
    angle: float = 0.0

    def __post_init__(self):
        if self.kind not in (HADAMARD, CPHASE, PHASE1, BITREV):
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if self.kind == CPHASE and self.control == self.target:
            raise ValueError("cphase control and target must differ")


@dataclass(frozen=True)
class CircuitProgram:
    """Ordered gate list realizing exactly one map step."""

    n_q: int
    gates: tuple
    phase_offset: float
    hadamard_count: int = field(init=False)
    cphase_count: int = field(init=False)

    def __post_init__(self):
        h = sum(1 for g in self.gates if g.kind == HADAMARD)
        cp = sum(1 for g in self.gates if g.kind in (CPHASE, PHASE1))
        object.__setattr__(self, "hadamard_count", h)
        object.__setattr__(self, "cphase_count", cp)

    @property
    def noisy_gate_count(self) -> int:
        return self.hadamard_count + self.cphase_count

    @property
    def gate_count(self) -> int:
        """Total counted gates n_g = 3 n_q^2 + n_q."""
        return self.hadamard_count + self.cphase_count


@dataclass(frozen=True)
class NoiseModel:
    """Unitary gate-error specification.

    epsilon bounds every drawn parameter; regime selects fresh draws
    per application ("memoryless") or one frozen draw per gate position
    ("static", derived from ``seed``).
    """

    epsilon: float
    regime: str = "memoryless"
    seed: int = 0

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be >= 0")
        if self.regime not in ("memoryless", "static"):
            raise ValueError("regime must be 'memoryless' or 'static'")

    def static_params(self, program: CircuitProgram) -> np.ndarray:
        """The frozen (noisy_gate_count, 4) parameter table."""
        rng = np.random.default_rng(self.seed)
        return rng.uniform(-self.epsilon, self.epsilon,
                           (program.noisy_gate_count, PARAMS_PER_GATE))


def build_sawtooth_circuit(lattice: LatticeParams) -> CircuitProgram:
    """Gate program for one map step on the given lattice."""
    n_q = lattice.n_q
    N = float(lattice.N)
    k = lattice.k
    T = lattice.T
    gates = []

    # momentum -> angle: Hadamard/controlled-phase ladder, then index
    # bit reversal (bookkeeping only)
    for t in reversed(range(n_q)):
        gates.append(Gate(HADAMARD, target=t))
        for c in reversed(range(t)):
            gates.append(Gate(CPHASE, control=c, target=t,
                              angle=math.pi / 2.0 ** (t - c)))
    gates.append(Gate(BITREV))

    # kick phase exp(i k (2 pi l / N - pi)^2 / 2) expanded over the
    # binary digits of the angle index l
    for j in range(n_q):
        w = 2.0 ** j / N
        gates.append(Gate(PHASE1, target=j, angle=2.0 * k * math.pi ** 2 * w * (w - 1.0)))
    for j1 in range(n_q):
        for j2 in range(n_q):
            if j1 != j2:
                gates.append(Gate(CPHASE, control=j1, target=j2,
                                  angle=2.0 * k * math.pi ** 2 * 2.0 ** (j1 + j2) / N ** 2))

    # angle -> momentum: exact reversal of the forward ladder with
    # negated angles
    gates.append(Gate(BITREV))
    for t in range(n_q):
        for c in range(t):
            gates.append(Gate(CPHASE, control=c, target=t,
                              angle=-math.pi / 2.0 ** (t - c)))
        gates.append(Gate(HADAMARD, target=t))

    # free rotation exp(-i T (l - N/2)^2 / 2) expanded over the binary
    # digits of the momentum index l
    for j in range(n_q):
        w = 2.0 ** j
        gates.append(Gate(PHASE1, target=j, angle=(T * w / 2.0) * (N - w)))
    for j1 in range(n_q):
        for j2 in range(n_q):
            if j1 != j2:
                gates.append(Gate(CPHASE, control=j1, target=j2,
                                  angle=-(T / 2.0) * 2.0 ** (j1 + j2)))

    # digit-independent remainders of both quadratic expansions
    offset = k * math.pi ** 2 / 2.0 - T * N ** 2 / 8.0
    return CircuitProgram(n_q=n_q, gates=tuple(gates), phase_offset=offset)


def bit_reversal_permutation(n_q: int) -> np.ndarray:
    """Index permutation reversing the n_q-bit binary representation."""
    idx = np.arange(1 << n_q)
    rev = np.zeros_like(idx)
    for j in range(n_q):
        rev |= ((idx >> j) & 1) << (n_q - 1 - j)
    return rev


# ---------------------------------------------------------------------------
# batched kernels: amps has shape (members, N), C contiguous
# ---------------------------------------------------------------------------

def _h_views(amps, n_q, t):
    m = amps.shape[0]
    return amps.reshape(m, 1 << (n_q - 1 - t), 2, 1 << t)


def _apply_h_ideal(amps, n_q, t):
    v = _h_views(amps, n_q, t)
    a = v[:, :, 0, :].copy()
    b = v[:, :, 1, :]
    s = 1.0 / math.sqrt(2.0)
    v[:, :, 0, :] = s * (a + b)
    v[:, :, 1, :] = s * (a - b)


def _apply_h_tilted(amps, n_q, t, nu1, nu2):
    """Pi rotation about the tilted axis, batched over members.

    Matrix [[cos th, sin th e^{-i phi}], [sin th e^{i phi}, -cos th]]
    with th = pi/4 + nu1, phi = nu2; nu arrays have length members.
    """
    th = math.pi / 4.0 + nu1
    c = np.cos(th)[:, None, None]
    s = np.sin(th)
    ep = (s * np.exp(1j * nu2))[:, None, None]
    em = (s * np.exp(-1j * nu2))[:, None, None]
    v = _h_views(amps, n_q, t)
    a = v[:, :, 0, :].copy()
    b = v[:, :, 1, :]
    v[:, :, 0, :] = c * a + em * b
    v[:, :, 1, :] = ep * a - c * b


def _cp_views(amps, n_q, qa, qb):
    m = amps.shape[0]
    hi, lo = max(qa, qb), min(qa, qb)
    return amps.reshape(m, 1 << (n_q - 1 - hi), 2, 1 << (hi - lo - 1), 2, 1 << lo)


def _apply_cp_ideal(amps, n_q, control, target, angle):
    v = _cp_views(amps, n_q, control, target)
    v[:, :, 1, :, 1, :] *= np.exp(1j * angle)


def _apply_cp_noisy(amps, n_q, control, target, angle, eps):
    """Ideal controlled-phase followed by sector dephasing.

    eps has shape (members, 4); sectors are labelled by the
    (control bit, target bit) pair as 00, 01, 10, 11, with the drawn
    phase eps[:, 3] joining the ideal angle on the 11 sector.
    """
    v = _cp_views(amps, n_q, control, target)
    hi = max(control, target)
    ph = np.exp(1j * eps)

    def sector(bc, bt):
        bh, bl = (bc, bt) if control == hi else (bt, bc)
        return v[:, :, bh, :, bl, :]

    sector(0, 0)[...] *= ph[:, 0, None, None, None]
    sector(0, 1)[...] *= ph[:, 1, None, None, None]
    sector(1, 0)[...] *= ph[:, 2, None, None, None]
    sector(1, 1)[...] *= (np.exp(1j * angle) * ph[:, 3])[:, None, None, None]


def _p1_views(amps, n_q, t):
    m = amps.shape[0]
    return amps.reshape(m, 1 << (n_q - 1 - t), 2, 1 << t)


def _apply_p1_ideal(amps, n_q, t, angle):
    v = _p1_views(amps, n_q, t)
    v[:, :, 1, :] *= np.exp(1j * angle)


def _apply_p1_noisy(amps, n_q, t, angle, eps):
    """Phase gate with independent dephasing on both of its sectors."""
    v = _p1_views(amps, n_q, t)
    v[:, :, 0, :] *= np.exp(1j * eps[:, 0])[:, None, None]
    v[:, :, 1, :] *= np.exp(1j * (angle + eps[:, 1]))[:, None, None]


class CircuitEngine:
    """Executes a program on (members, N) amplitude blocks in place.

    One engine instance precomputes the bit-reversal permutation and
    walks the gate list; parameters for noisy runs arrive as a
    (members, noisy_gate_count, 4) block per step.
    """

    def __init__(self, program: CircuitProgram):
        self.program = program
        self.n_q = program.n_q
        self.perm = bit_reversal_permutation(program.n_q)
        self.offset_phase = complex(np.exp(1j * program.phase_offset))

    def step_ideal(self, amps: np.ndarray) -> np.ndarray:
        n_q = self.n_q
        for g in self.program.gates:
            if g.kind == HADAMARD:
                _apply_h_ideal(amps, n_q, g.target)
            elif g.kind == CPHASE:
                _apply_cp_ideal(amps, n_q, g.control, g.target, g.angle)
            elif g.kind == PHASE1:
                _apply_p1_ideal(amps, n_q, g.target, g.angle)
            else:
                amps = np.ascontiguousarray(amps[:, self.perm])
        amps *= self.offset_phase
        return amps

    def step_noisy(self, amps: np.ndarray, params: np.ndarray) -> np.ndarray:
        """params: (members, noisy_gate_count, 4) in program gate order."""
        n_q = self.n_q
        gi = 0
        for g in self.program.gates:
            if g.kind == HADAMARD:
                _apply_h_tilted(amps, n_q, g.target,
                                params[:, gi, 0], params[:, gi, 1])
                gi += 1
            elif g.kind == CPHASE:
                _apply_cp_noisy(amps, n_q, g.control, g.target, g.angle,
                                params[:, gi, :])
                gi += 1
            elif g.kind == PHASE1:
                _apply_p1_noisy(amps, n_q, g.target, g.angle, params[:, gi, :])
                gi += 1
            else:
                amps = np.ascontiguousarray(amps[:, self.perm])
        amps *= self.offset_phase
        return amps


# ---------------------------------------------------------------------------
# single-state entry points
# ---------------------------------------------------------------------------

def _require_register(state: QuantumState):
    if state.basis != MOMENTUM:
        raise ValueError("circuit gates act on the computational (momentum) register")


def apply_gate(state: QuantumState, gate: Gate) -> QuantumState:
    """Ideal application of one gate."""
    _require_register(state)
    n_q = state.lattice.n_q
    if gate.kind != BITREV and not (0 <= gate.target < n_q):
        raise IndexError(f"target {gate.target} out of range for n_q={n_q}")
    if gate.kind == CPHASE and not (0 <= gate.control < n_q):
        raise IndexError(f"control {gate.control} out of range for n_q={n_q}")
    amps = state.amps.copy().reshape(1, -1)
    if gate.kind == HADAMARD:
        _apply_h_ideal(amps, n_q, gate.target)
    elif gate.kind == CPHASE:
        _apply_cp_ideal(amps, n_q, gate.control, gate.target, gate.angle)
    elif gate.kind == PHASE1:
        _apply_p1_ideal(amps, n_q, gate.target, gate.angle)
    else:
        amps = amps[:, bit_reversal_permutation(n_q)]
    return QuantumState(amps[0], MOMENTUM, state.lattice)


def apply_noisy_gate(state: QuantumState, gate: Gate, noise: NoiseModel,
                     rng: np.random.Generator) -> QuantumState:
    """One gate with parameters drawn fresh from ``rng``.

    Every noisy gate consumes exactly four uniforms from the stream
    regardless of kind, so draw logs have fixed shape.  Bookkeeping
    gates consume nothing.
    """
    _require_register(state)
    if gate.kind == BITREV:
        return apply_gate(state, gate)
    n_q = state.lattice.n_q
    params = rng.uniform(-noise.epsilon, noise.epsilon, (1, PARAMS_PER_GATE))
    amps = state.amps.copy().reshape(1, -1)
    if gate.kind == HADAMARD:
        _apply_h_tilted(amps, n_q, gate.target, params[:, 0], params[:, 1])
    elif gate.kind == CPHASE:
        _apply_cp_noisy(amps, n_q, gate.control, gate.target, gate.angle, params)
    elif gate.kind == PHASE1:
        _apply_p1_noisy(amps, n_q, gate.target, gate.angle, params)
    return QuantumState(amps[0], MOMENTUM, state.lattice)


def run_step_noisy(state: QuantumState, program: CircuitProgram,
                   noise: NoiseModel, rng: np.random.Generator | None = None) -> QuantumState:
    """One full noisy map step.

    Memoryless regime draws (noisy_gate_count, 4) fresh parameters from
    ``rng``; static regime uses the table frozen from ``noise.seed``
    and ignores ``rng``.
    """
    _require_register(state)
    if noise.regime == "static":
        params = noise.static_params(program)
    else:
        if rng is None:
            raise ValueError("memoryless noise needs an rng")
        params = rng.uniform(-noise.epsilon, noise.epsilon,
                             (program.noisy_gate_count, PARAMS_PER_GATE))
    engine = CircuitEngine(program)
    amps = engine.step_noisy(state.amps.copy().reshape(1, -1), params[None, :, :])
    return QuantumState(amps[0], MOMENTUM, state.lattice)


def run_step_ideal(state: QuantumState, program: CircuitProgram) -> QuantumState:
    """One full noiseless map step through the gate list."""
    _require_register(state)
    engine = CircuitEngine(program)
    amps = engine.step_ideal(state.amps.copy().reshape(1, -1))
    return QuantumState(amps[0], MOMENTUM, state.lattice)


@dataclass(frozen=True)
class NoisyGateDraw:
    """Audit record of the error parameters one noisy gate consumed.

    ``params`` holds the parameters the gate actually uses: four
    sector phases for a controlled-phase, two for a single-qubit
    phase, and the two axis tilts (nu1, nu2) for a Hadamard.
    ``gate_position`` indexes the program's gate list, so records line
    up with the circuit dump.
    """

    step: int
    gate_position: int
    kind: str
    params: tuple


_USED_PARAMS = {HADAMARD: 2, CPHASE: 4, PHASE1: 2}


def log_noise_draws(program: CircuitProgram, noise: NoiseModel, steps: int,
                    rng: np.random.Generator | None = None):
    """Replay the draw sequence of ``steps`` noisy map steps.

    Produces exactly the parameters :func:`run_step_noisy` (and the
    batch engine) would consume, without evolving any state, so a
    logged run can be audited or reproduced.  Memoryless regime
    consumes from ``rng``; static regime repeats the frozen table.
    """
    if steps < 0:
        raise ValueError("steps must be >= 0")
    draws = []
    if noise.regime == "static":
        table = noise.static_params(program)
    for step in range(steps):
        if noise.regime == "static":
            params = table
        else:
            if rng is None:
                raise ValueError("memoryless noise needs an rng")
            params = rng.uniform(-noise.epsilon, noise.epsilon,
                                 (program.noisy_gate_count, PARAMS_PER_GATE))
        gi = 0
        for pos, g in enumerate(program.gates):
            if g.kind == BITREV:
                continue
            used = _USED_PARAMS[g.kind]
            draws.append(NoisyGateDraw(
                step=step, gate_position=pos, kind=g.kind,
                params=tuple(float(v) for v in params[gi, :used])))
            gi += 1
    return draws


def circuit_deviation(lattice: LatticeParams, n_states: int = 20,
                      seed: int = 0) -> float:
    """Max amplitude deviation, noiseless circuit vs split-operator step.

    Contract check used by tests and the command-line ``circuit-check``:
    the two engines must agree to near machine precision on random
    states.
    """
    from .propagator import step_exact
    from .states import random_state

    program = build_sawtooth_circuit(lattice)
    engine = CircuitEngine(program)
    worst = 0.0
    rng = np.random.default_rng(seed)
    for _ in range(n_states):
        psi = random_state(lattice, rng)
        via_circuit = engine.step_ideal(psi.amps.copy().reshape(1, -1))[0]
        via_exact = step_exact(psi, lattice).amps
        worst = max(worst, float(np.max(np.abs(via_circuit - via_exact))))
    return worst
