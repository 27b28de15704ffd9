"""Finite torus Hilbert space: states, transforms, initial conditions.

The N = 2^n_q dimensional space discretizes the torus with momentum
levels n = index - N/2 (n in [-N/2, N/2)) and angle grid
theta_l = 2 pi l / N.  The effective Planck constant is T = 2 pi / N:
commutators scale with T, so growing n_q approaches the classical
limit.  The basis change is the unitary kernel

    <theta_l | n> = exp(i n theta_l) / sqrt(N),

implemented as a power-of-two FFT with (-1)^l twiddle factors that
account for the half-spectrum momentum offset.

All operations return new states; amplitudes are never mutated through
a ``QuantumState`` the caller still holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi

MOMENTUM = "momentum"
ANGLE = "angle"

__all__ = [
    "LatticeParams",
    "QuantumState",
    "WavePacketSpec",
    "momentum_values",
    "angle_values",
    "gaussian_packet",
    "packet_amplitudes",
    "random_state",
    "random_amplitudes",
    "to_angle",
    "to_momentum",
    "fidelity",
    "overlap",
    "momentum_moments",
    "angle_moments",
    "packet_widths",
]


@dataclass(frozen=True)
class LatticeParams:
    """Single source of truth for all scales of one simulation.

    n_q qubits give dimension N = 2^n_q, effective Planck constant
    T = 2 pi / N, and kick strength k = K / T, so the classical limit
    at fixed K is n_q -> infinity.
    """

    n_q: int
    K: float

    def __post_init__(self):
        if not (isinstance(self.n_q, (int, np.integer)) and self.n_q >= 1):
            raise ValueError(f"n_q must be a positive integer, got {self.n_q!r}")
        if not math.isfinite(self.K):
            raise ValueError("K must be finite")

    @property
    def N(self) -> int:
        return 1 << self.n_q

    @property
    def T(self) -> float:
        return TWO_PI / self.N

    @property
    def k(self) -> float:
        return self.K / self.T


@dataclass(frozen=True)
class QuantumState:
    """Normalized amplitude vector with a declared basis tag."""

    amps: np.ndarray
    basis: str
    lattice: LatticeParams

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=complex)
        if amps.shape != (self.lattice.N,):
            raise ValueError(
                f"amps shape {amps.shape} does not match N={self.lattice.N}")
        if self.basis not in (MOMENTUM, ANGLE):
            raise ValueError(f"unknown basis {self.basis!r}")
        object.__setattr__(self, "amps", amps)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))


@dataclass(frozen=True)
class WavePacketSpec:
    """Center (theta0, p0) and momentum-space width of a Gaussian packet.

    ``sigma`` is the e-folding half-width of the momentum probability
    density in integer-n units; None selects the symmetric default
    sigma^2 = N / (2 pi L) for which the packet has equal angle and
    momentum widths sqrt(T) (minimum uncertainty on the lattice).
    """

    theta0: float
    p0: float
    sigma: float | None = None
    L: float = 1.0

    def resolved_sigma(self, lattice: LatticeParams) -> float:
        sigma = self.sigma
        if sigma is None:
            sigma = math.sqrt(lattice.N / (TWO_PI * self.L))
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        if sigma > lattice.N / 6:
            raise ValueError(
                f"sigma={sigma:.3g} wraps the torus (limit N/6={lattice.N / 6:.3g})")
        return sigma


def momentum_values(lattice: LatticeParams) -> np.ndarray:
    """Integer momentum levels n = index - N/2."""
    return np.arange(lattice.N) - lattice.N // 2


def angle_values(lattice: LatticeParams) -> np.ndarray:
    """Angle grid theta_l = 2 pi l / N."""
    return TWO_PI * np.arange(lattice.N) / lattice.N


def packet_amplitudes(spec: WavePacketSpec, lattice: LatticeParams) -> np.ndarray:
    """Raw normalized momentum amplitudes of a coherent Gaussian packet.

    The envelope is centered on n0 = p0 / T using wrapped distance, and
    the phase exp(-i (n - n0/2) theta0) places the angle center at
    theta0 under this module's transform convention.
    """
    sigma = spec.resolved_sigma(lattice)
    N = lattice.N
    n = momentum_values(lattice)
    n0 = spec.p0 / lattice.T
    d = np.mod(n - n0 + N / 2, N) - N / 2
    amps = np.exp(-d * d / (2.0 * sigma * sigma)).astype(complex)
    amps *= np.exp(-1j * (n - n0 / 2.0) * spec.theta0)
    amps /= np.linalg.norm(amps)
    return amps


def gaussian_packet(spec: WavePacketSpec, lattice: LatticeParams) -> QuantumState:
    """Coherent Gaussian wave packet in the momentum basis."""
    return QuantumState(packet_amplitudes(spec, lattice), MOMENTUM, lattice)


def random_amplitudes(N: int, rng: np.random.Generator) -> np.ndarray:
    """Moduli exactly 1/sqrt(N), phases i.i.d. uniform on [0, 2pi)."""
    phases = rng.uniform(0.0, TWO_PI, N)
    return np.exp(1j * phases) / math.sqrt(N)


def random_state(lattice: LatticeParams, seed) -> QuantumState:
    """Random-phase state of uniform modulus (an ergodic initial state).

    ``seed`` may be anything ``numpy.random.default_rng`` accepts,
    including a Generator to draw from an existing stream.
    """
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return QuantumState(random_amplitudes(lattice.N, rng), MOMENTUM, lattice)


def to_angle(state: QuantumState) -> QuantumState:
    """Momentum -> angle basis change.

    psi(theta_l) = sum_n psi_n exp(i n theta_l) / sqrt(N)
                 = sqrt(N) (-1)^l ifft(psi)_l  for n = index - N/2.
    """
    if state.basis != MOMENTUM:
        raise ValueError("to_angle expects a momentum-basis state")
    N = state.lattice.N
    signs = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    amps = math.sqrt(N) * signs * np.fft.ifft(state.amps)
    return QuantumState(amps, ANGLE, state.lattice)


def to_momentum(state: QuantumState) -> QuantumState:
    """Angle -> momentum basis change (inverse of :func:`to_angle`)."""
    if state.basis != ANGLE:
        raise ValueError("to_momentum expects an angle-basis state")
    N = state.lattice.N
    signs = np.where(np.arange(N) % 2 == 0, 1.0, -1.0)
    amps = np.fft.fft(signs * state.amps) / math.sqrt(N)
    return QuantumState(amps, MOMENTUM, state.lattice)


def overlap(a: QuantumState, b: QuantumState) -> complex:
    """Inner product <a|b> of same-basis, same-lattice states."""
    if a.lattice != b.lattice:
        raise ValueError("states live on different lattices")
    if a.basis != b.basis:
        raise ValueError("states are in different bases")
    return complex(np.vdot(a.amps, b.amps))


def fidelity(a: QuantumState, b: QuantumState) -> float:
    """Squared overlap |<a|b>|^2; symmetric and global-phase blind."""
    return abs(overlap(a, b)) ** 2


def momentum_moments(state: QuantumState):
    """(mean, standard deviation) of the integer momentum n."""
    if state.basis != MOMENTUM:
        state = to_momentum(state)
    prob = np.abs(state.amps) ** 2
    n = momentum_values(state.lattice)
    mean = float(np.sum(prob * n))
    var = float(np.sum(prob * (n - mean) ** 2))
    return mean, math.sqrt(var)


def angle_moments(state: QuantumState):
    """Circular (mean, standard deviation) of the angle distribution.

    Uses the first circular moment R e^{i mean}; the circular standard
    deviation sqrt(-2 ln R) reduces to the linear one for narrow
    distributions and stays finite across the periodic seam.
    """
    if state.basis != ANGLE:
        state = to_angle(state)
    prob = np.abs(state.amps) ** 2
    z = np.sum(prob * np.exp(1j * angle_values(state.lattice)))
    R = min(abs(z), 1.0)
    mean = float(np.angle(z)) % TWO_PI
    std = math.sqrt(max(-2.0 * math.log(R), 0.0)) if R > 0 else math.inf
    return mean, std


def packet_widths(state: QuantumState):
    """(Delta_theta, Delta_p): e-folding half-widths of the marginals.

    Defined as sqrt(2) times the standard deviation, so a default
    Gaussian packet gives Delta_theta = Delta_p = sqrt(T) and the
    product Delta_theta * Delta_p = T, the effective Planck constant.
    """
    _, s_theta = angle_moments(state)
    _, s_n = momentum_moments(state)
    return math.sqrt(2.0) * s_theta, math.sqrt(2.0) * s_n * state.lattice.T
