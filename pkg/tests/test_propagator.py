"""Split-operator evolution: diagonal factors, steps, reversibility."""

import math

import numpy as np
import pytest

from sawtoothsim.classical import ClassicalParams, PhasePoint, step_classical
from sawtoothsim.propagator import (
    BatchPropagator,
    StepPerturbation,
    apply_kick,
    apply_rotation,
    evolve,
    step_exact,
    step_exact_inverse,
)
from sawtoothsim.states import (
    LatticeParams,
    WavePacketSpec,
    angle_moments,
    gaussian_packet,
    momentum_moments,
    random_state,
    to_angle,
    to_momentum,
)

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# diagonal factors
# ---------------------------------------------------------------------------

def test_kick_zero_is_identity():
    lat = LatticeParams(n_q=6, K=0.4)
    psi = to_angle(random_state(lat, seed=1))
    out = apply_kick(psi, 0.0)
    assert np.array_equal(out.amps, psi.amps)


def test_kick_preserves_moduli():
    lat = LatticeParams(n_q=6, K=0.4)
    psi = to_angle(random_state(lat, seed=2))
    out = apply_kick(psi, 3.7)
    assert np.allclose(np.abs(out.amps), np.abs(psi.amps), atol=1e-14)


def test_kick_inverse_round_trip():
    lat = LatticeParams(n_q=6, K=0.4)
    psi = to_angle(random_state(lat, seed=3))
    out = apply_kick(apply_kick(psi, lat.k), -lat.k)
    assert np.max(np.abs(out.amps - psi.amps)) < 1e-12


def test_kick_composition():
    lat = LatticeParams(n_q=7, K=0.4)
    psi = to_angle(random_state(lat, seed=4))
    a, b = 1.3, -0.45
    two = apply_kick(apply_kick(psi, a), b)
    one = apply_kick(psi, a + b)
    assert np.max(np.abs(two.amps - one.amps)) < 1e-12


def test_kick_rejects_momentum_basis():
    lat = LatticeParams(n_q=4, K=0.4)
    with pytest.raises(ValueError):
        apply_kick(random_state(lat, seed=0), 1.0)


def test_rotation_zero_is_identity():
    lat = LatticeParams(n_q=6, K=0.4)
    psi = random_state(lat, seed=5)
    assert np.array_equal(apply_rotation(psi, 0.0).amps, psi.amps)


def test_rotation_leaves_n0_invariant():
    lat = LatticeParams(n_q=6, K=0.4)
    amps = np.zeros(lat.N, dtype=complex)
    amps[lat.N // 2] = 1.0  # n = 0 level
    from sawtoothsim.states import MOMENTUM, QuantumState
    psi = QuantumState(amps, MOMENTUM, lat)
    out = apply_rotation(psi, lat.T)
    assert np.max(np.abs(out.amps - psi.amps)) < 1e-14


def test_rotation_inverse_round_trip():
    lat = LatticeParams(n_q=6, K=0.4)
    psi = random_state(lat, seed=6)
    out = apply_rotation(apply_rotation(psi, lat.T), -lat.T)
    assert np.max(np.abs(out.amps - psi.amps)) < 1e-12


def test_rotation_rejects_angle_basis():
    lat = LatticeParams(n_q=4, K=0.4)
    with pytest.raises(ValueError):
        apply_rotation(to_angle(random_state(lat, seed=0)), lat.T)


# ---------------------------------------------------------------------------
# full steps
# ---------------------------------------------------------------------------

def test_step_norm_and_basis():
    lat = LatticeParams(n_q=8, K=0.3)
    psi = random_state(lat, seed=7)
    out = step_exact(psi, lat)
    assert out.basis == "momentum"
    assert np.sum(np.abs(out.amps) ** 2) == pytest.approx(1.0, abs=1e-12)


def test_packet_center_follows_classical_map():
    # semiclassical check: three steps of the quantum centroid track the
    # classical orbit to within a few packet widths
    lat = LatticeParams(n_q=12, K=0.1)
    spec = WavePacketSpec(theta0=2.0, p0=0.5)
    psi = gaussian_packet(spec, lat)
    point = PhasePoint(2.0, 0.5)
    params = ClassicalParams(K=0.1)
    sigma_n = math.sqrt(lat.N / TWO_PI)
    sigma_theta = math.sqrt(lat.T)
    for _ in range(3):
        psi = step_exact(psi, lat)
        point = step_classical(point, params)
        mean_n, _ = momentum_moments(psi)
        p_wrapped = (point.p + math.pi) % TWO_PI - math.pi
        assert abs(mean_n * lat.T - p_wrapped) < 3 * sigma_n * lat.T
        mean_theta, _ = angle_moments(to_angle(psi))
        d_theta = (mean_theta - point.theta + math.pi) % TWO_PI - math.pi
        assert abs(d_theta) < 3 * sigma_theta


def test_island_packet_oscillates():
    lat = LatticeParams(n_q=10, K=-0.5)
    psi = gaussian_packet(WavePacketSpec(theta0=1.0, p0=0.0), lat)
    means = []
    for _ in range(30):
        psi = step_exact(psi, lat)
        means.append(momentum_moments(psi)[0] * lat.T)
    means = np.asarray(means)
    # the centroid swings through zero and back: several sign changes
    assert np.sum(np.abs(np.diff(np.sign(means)))) >= 4
    assert np.max(np.abs(means)) > 0.3


def test_evolve_contracts():
    lat = LatticeParams(n_q=6, K=0.3)
    psi = random_state(lat, seed=8)

    final, deltas = evolve(psi, lat, None, 0)
    assert np.array_equal(final.amps, psi.amps)
    assert deltas.size == 0

    pert0 = StepPerturbation(0.0, seed=1)
    with_pert, _ = evolve(psi, lat, pert0, 25)
    without, _ = evolve(psi, lat, None, 25)
    assert np.max(np.abs(with_pert.amps - without.amps)) < 1e-14


def test_evolve_keep_all_and_delta_log():
    lat = LatticeParams(n_q=6, K=0.3)
    psi = random_state(lat, seed=9)
    pert = StepPerturbation(0.2, seed=5)
    states, deltas = evolve(psi, lat, pert, 12, keep="all")
    assert len(states) == 13
    assert deltas.shape == (12,)
    assert np.abs(deltas).max() <= 0.2
    assert np.array_equal(deltas, StepPerturbation(0.2, seed=5).values(12))


def test_evolve_matches_manual_steps_bitwise():
    lat = LatticeParams(n_q=6, K=0.3)
    psi = random_state(lat, seed=10)
    pert = StepPerturbation(0.1, seed=6)
    final, deltas = evolve(psi, lat, pert, 8)
    manual = psi
    for dk in deltas:
        manual = step_exact(manual, lat, dk)
    assert np.array_equal(final.amps, manual.amps)


def test_time_reversal():
    lat = LatticeParams(n_q=8, K=0.3)
    psi = random_state(lat, seed=11)
    forward = psi
    for _ in range(50):
        forward = step_exact(forward, lat)
    back = forward
    for _ in range(50):
        back = step_exact_inverse(back, lat)
    f = abs(np.vdot(psi.amps, back.amps)) ** 2
    assert f > 1 - 1e-10


def test_norm_drift_long_run():
    lat = LatticeParams(n_q=10, K=0.3)
    psi = random_state(lat, seed=12)
    amps = psi.amps.copy().reshape(1, -1)
    prop = BatchPropagator(lattice=lat)
    for _ in range(10000):
        amps = prop.step(amps)
    norm = float(np.sum(np.abs(amps) ** 2))
    assert abs(norm - 1.0) < 1e-9


# ---------------------------------------------------------------------------
# batch engine
# ---------------------------------------------------------------------------

def test_batch_matches_single_step():
    lat = LatticeParams(n_q=7, K=0.3)
    prop = BatchPropagator(lattice=lat)
    block = np.stack([random_state(lat, seed=s).amps for s in range(4)])
    out = prop.step(block.copy())
    for m in range(4):
        single = step_exact(random_state(lat, seed=m), lat)
        assert np.max(np.abs(out[m] - single.amps)) < 1e-12


def test_batch_per_member_deltas():
    lat = LatticeParams(n_q=6, K=0.3)
    prop = BatchPropagator(lattice=lat)
    block = np.stack([random_state(lat, seed=s).amps for s in range(3)])
    deltas = np.array([0.0, 0.05, -0.08])
    out = prop.step(block.copy(), deltas)
    for m in range(3):
        single = step_exact(random_state(lat, seed=m), lat, deltas[m])
        assert np.max(np.abs(out[m] - single.amps)) < 1e-12


def test_batch_inverse_round_trip():
    lat = LatticeParams(n_q=8, K=0.3)
    prop = BatchPropagator(lattice=lat)
    block = np.stack([random_state(lat, seed=s).amps for s in range(2)])
    out = prop.step_inverse(prop.step(block.copy()))
    assert np.max(np.abs(out - block)) < 1e-12


def test_step_perturbation_bounds():
    pert = StepPerturbation(0.3, seed=2)
    vals = pert.values(1000)
    assert np.abs(vals).max() <= 0.3
    assert np.array_equal(vals, StepPerturbation(0.3, seed=2).values(1000))
