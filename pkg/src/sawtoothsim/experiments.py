"""Fidelity-decay experiments: curves, fits, time scales, sweeps.

The central observable is the overlap decay

    f(t) = |<psi(t) | psi_pert(t)>|^2

between an ideal evolution and a perturbed twin started from the same
state.  Two perturbation channels are supported:

- "classical": the kick strength fluctuates, k -> k + delta_k(t), one
  uniform draw per map step; both branches run under the
  split-operator propagator.
- "quantum": every gate of the circuit realization is noisy; the
  perturbed branch runs gate by gate while the ideal branch uses the
  split-operator propagator (identical to the noiseless circuit to
  near machine precision, and much faster).

Ensembles average over initial states and/or noise realizations, with
per-member derived RNG streams so curves are reproducible bit for bit
from (config, master_seed) regardless of ensemble size or execution
order.

Decay models are fitted on -log f: linear in t (exponential decay,
rate Gamma) or linear in t^2 (Gaussian decay, rate 1/tau^2), by least
squares inside an f-window that excludes the short-time transient and
the finite-N saturation floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import streams
from .circuit import CircuitEngine, NoiseModel, build_sawtooth_circuit, PARAMS_PER_GATE
from .classical import lyapunov_exponent
from .propagator import BatchPropagator
from .states import (
    LatticeParams,
    WavePacketSpec,
    packet_amplitudes,
    random_amplitudes,
)

TWO_PI = 2.0 * math.pi

__all__ = [
    "ExperimentConfig",
    "FidelityCurve",
    "DecayFit",
    "TfRecord",
    "RateRecord",
    "RegimeRecord",
    "FitError",
    "NoCrossingError",
    "fidelity_curve",
    "fit_decay",
    "estimate_tf",
    "sweep_tf",
    "collapse_constant",
    "sweep_rate_vs_K",
    "classical_error_regimes",
    "scattering_fidelity",
    "DEFAULT_FIT_WINDOW",
]

DEFAULT_FIT_WINDOW = (0.1, 0.9)

EXPONENTIAL = "exponential"
GAUSSIAN = "gaussian"


class FitError(ValueError):
    """Raised when a decay fit cannot be performed as requested."""


class NoCrossingError(ValueError):
    """Raised when a curve never crosses the requested fidelity level."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Full description of one fidelity experiment.

    ``initial`` is "gaussian" or "random"; Gaussian centers default to
    the canonical point (1, 0), while ``theta0=None`` draws a fresh
    uniform center on the torus for every initial state in the
    ensemble (the standard choice when averaging over packets in the
    chaotic regime).

    ``n_states`` counts initial states, ``n_noise`` noise realizations
    per initial state; the ensemble has ``n_states * n_noise`` members.
    """

    lattice: LatticeParams
    channel: str = "quantum"
    epsilon: float = 0.0
    regime: str = "memoryless"
    delta_K: float = 0.0
    initial: str = "gaussian"
    theta0: float | None = 1.0
    p0: float | None = 0.0
    sigma: float | None = None
    t_max: int = 100
    n_states: int = 1
    n_noise: int = 1
    master_seed: int = 0

    def __post_init__(self):
        if self.channel not in ("quantum", "classical"):
            raise ValueError("channel must be 'quantum' or 'classical'")
        if self.initial not in ("gaussian", "random"):
            raise ValueError("initial must be 'gaussian' or 'random'")
        if self.t_max < 1:
            raise ValueError("t_max must be >= 1")
        if self.n_states < 1 or self.n_noise < 1:
            raise ValueError("ensemble sizes must be >= 1")

    @property
    def n_members(self) -> int:
        return self.n_states * self.n_noise


@dataclass(frozen=True)
class FidelityCurve:
    """Ensemble-averaged fidelity versus step count."""

    t: np.ndarray
    f: np.ndarray
    f_err: np.ndarray
    member_f: np.ndarray | None = None
    config: ExperimentConfig | None = None


@dataclass(frozen=True)
class DecayFit:
    """Least-squares decay fit of -log f inside an f-window."""

    model: str
    rate: float
    window: tuple
    r_squared: float
    n_points: int
    intercept: float
    rate_stderr: float


@dataclass(frozen=True)
class TfRecord:
    """Characteristic decay time t_f with its grid coordinates."""

    t_f: float
    n_q: int | None = None
    epsilon: float | None = None

    @property
    def collapse(self) -> float | None:
        """The scaling combination t_f * epsilon^2 * n_q^2."""
        if self.n_q is None or self.epsilon is None:
            return None
        return self.t_f * self.epsilon ** 2 * self.n_q ** 2


@dataclass(frozen=True)
class RateRecord:
    """Fitted decay rate for one (K, initial-state kind) grid point."""

    K: float
    kind: str
    rate: float
    r_squared: float


@dataclass(frozen=True)
class RegimeRecord:
    """Classification of one kick-noise amplitude.

    ``delta_k`` is the amplitude in k units (delta_K / T); the regime
    is "fgr" (perturbative, rate growing as delta_K^2) when the noise
    couples less than one momentum level, "lyapunov" (rate saturated
    at the classical stretching exponent) when delta_k exceeds one,
    and "island" for quasi-integrable dynamics where the competition
    is between decay shapes instead of rates.
    """

    delta_K: float
    delta_k: float
    regime: str
    model: str
    rate: float
    rate_stderr: float
    r_squared: float
    r2_exponential: float | None
    r2_gaussian: float | None
    window: tuple
    lyapunov: float


# ---------------------------------------------------------------------------
# initial ensembles
# ---------------------------------------------------------------------------

def _initial_block(config: ExperimentConfig) -> np.ndarray:
    """(n_states, N) initial amplitudes from per-state derived streams."""
    lattice = config.lattice
    block = np.empty((config.n_states, lattice.N), dtype=complex)
    for s in range(config.n_states):
        rng = streams.stream(config.master_seed, streams.DOMAIN_INITIAL, s)
        if config.initial == "random":
            block[s] = random_amplitudes(lattice.N, rng)
        else:
            theta0, p0 = config.theta0, config.p0
            if theta0 is None:
                theta0 = rng.uniform(0.0, TWO_PI)
                p0 = rng.uniform(-math.pi, math.pi)
            elif p0 is None:
                p0 = 0.0
            spec = WavePacketSpec(theta0=theta0, p0=p0, sigma=config.sigma)
            block[s] = packet_amplitudes(spec, lattice)
    return block


def _member_gate_rngs(config: ExperimentConfig):
    return [streams.stream(config.master_seed, streams.DOMAIN_GATE, m)
            for m in range(config.n_members)]


def _classical_deltas(config: ExperimentConfig) -> np.ndarray:
    """(n_members, t_max) per-step kick perturbations in k units."""
    lattice = config.lattice
    dk_max = config.delta_K / lattice.T
    out = np.empty((config.n_members, config.t_max))
    for m in range(config.n_members):
        rng = streams.stream(config.master_seed, streams.DOMAIN_CLASSICAL, m)
        out[m] = rng.uniform(-dk_max, dk_max, config.t_max)
    return out


# ---------------------------------------------------------------------------
# curves
# ---------------------------------------------------------------------------

def fidelity_curve(config: ExperimentConfig) -> FidelityCurve:
    """Ensemble-averaged f(t) for the configured channel."""
    lattice = config.lattice
    n_members = config.n_members
    state_of_member = np.repeat(np.arange(config.n_states), config.n_noise)

    ideal = _initial_block(config)
    pert = ideal[state_of_member].copy()

    member_f = np.empty((n_members, config.t_max + 1))
    member_f[:, 0] = 1.0

    prop = BatchPropagator(lattice)

    if config.channel == "classical":
        deltas = _classical_deltas(config)
        for t in range(1, config.t_max + 1):
            ideal = prop.step(ideal)
            pert = prop.step(pert, deltas[:, t - 1])
            member_f[:, t] = np.abs(
                np.sum(ideal[state_of_member].conj() * pert, axis=1)) ** 2
    else:
        program = build_sawtooth_circuit(lattice)
        engine = CircuitEngine(program)
        noise = NoiseModel(config.epsilon, config.regime)
        n_noisy = program.noisy_gate_count
        if noise.regime == "static":
            frozen = np.empty((n_members, n_noisy, PARAMS_PER_GATE))
            for m, rng in enumerate(_member_gate_rngs(config)):
                frozen[m] = rng.uniform(-noise.epsilon, noise.epsilon,
                                        (n_noisy, PARAMS_PER_GATE))
            rngs = None
        else:
            rngs = _member_gate_rngs(config)
        params = np.empty((n_members, n_noisy, PARAMS_PER_GATE))
        for t in range(1, config.t_max + 1):
            ideal = prop.step(ideal)
            if rngs is None:
                params = frozen
            else:
                for m, rng in enumerate(rngs):
                    params[m] = rng.uniform(-noise.epsilon, noise.epsilon,
                                            (n_noisy, PARAMS_PER_GATE))
            pert = engine.step_noisy(pert, params)
            member_f[:, t] = np.abs(
                np.sum(ideal[state_of_member].conj() * pert, axis=1)) ** 2

    np.clip(member_f, 0.0, 1.0, out=member_f)
    f = member_f.mean(axis=0)
    f[0] = 1.0
    if n_members > 1:
        f_err = member_f.std(axis=0, ddof=1) / math.sqrt(n_members)
    else:
        f_err = np.zeros(config.t_max + 1)
    return FidelityCurve(t=np.arange(config.t_max + 1), f=f, f_err=f_err,
                         member_f=member_f, config=config)


# ---------------------------------------------------------------------------
# fits and time scales
# ---------------------------------------------------------------------------

def _window_mask(t, f, window):
    lo, hi = window
    return (f >= lo) & (f <= hi) & (t > 0) & (f > 0)


def fit_decay(curve_or_tf, model: str = EXPONENTIAL,
              window: tuple = DEFAULT_FIT_WINDOW,
              min_points: int = 5) -> DecayFit:
    """Least-squares decay fit of -log f against t or t^2.

    Accepts a FidelityCurve or a (t, f) pair.  The fit uses only
    points with f inside ``window``, needs at least ``min_points`` of
    them, and keeps a free intercept so an early transient offsets the
    fit instead of biasing the rate.
    """
    if isinstance(curve_or_tf, FidelityCurve):
        t, f = curve_or_tf.t, curve_or_tf.f
    else:
        t, f = curve_or_tf
        t, f = np.asarray(t, float), np.asarray(f, float)
    if model not in (EXPONENTIAL, GAUSSIAN):
        raise ValueError(f"unknown model {model!r}")
    mask = _window_mask(t, f, window)
    n = int(mask.sum())
    if n < min_points:
        raise FitError(
            f"only {n} points inside f-window {window}, need {min_points}")
    x = t[mask].astype(float)
    if model == GAUSSIAN:
        x = x * x
    y = -np.log(f[mask])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    if n > 2:
        s2 = ss_res / (n - 2)
        slope_var = s2 / float(np.sum((x - x.mean()) ** 2))
        stderr = math.sqrt(slope_var)
    else:
        stderr = math.inf
    return DecayFit(model=model, rate=float(slope), window=tuple(window),
                    r_squared=r2, n_points=n, intercept=float(intercept),
                    rate_stderr=stderr)


def estimate_tf(curve: FidelityCurve, A: float = 0.9) -> TfRecord:
    """First crossing f(t_f) = A, linearly interpolated between steps."""
    if not (0.0 < A < 1.0):
        raise ValueError("A must be in (0, 1)")
    f = curve.f
    below = np.nonzero(f < A)[0]
    if below.size == 0:
        raise NoCrossingError(f"curve never drops below A={A}")
    i = int(below[0])
    if i == 0:
        raise NoCrossingError("curve starts below A; no crossing")
    t_f = (i - 1) + (f[i - 1] - A) / (f[i - 1] - f[i])
    n_q = curve.config.lattice.n_q if curve.config else None
    eps = curve.config.epsilon if curve.config else None
    return TfRecord(t_f=float(t_f), n_q=n_q, epsilon=eps)


# ---------------------------------------------------------------------------
# sweeps
# ---------------------------------------------------------------------------

def _point_seed(master_seed: int, index: int) -> int:
    """Independent derived master seed for sweep grid point ``index``."""
    return int(streams.stream(master_seed, streams.DOMAIN_SWEEP, index)
               .integers(2 ** 63))


def _tf_point(args):
    n_q, epsilon, K, n_noise, seed, theta0, p0 = args
    lattice = LatticeParams(n_q=n_q, K=K)
    # the crossing sits near 0.126/(eps^2 nq^2); leave generous headroom
    t_guess = 0.32 / (epsilon ** 2 * n_q ** 2)
    t_max = int(min(max(12, t_guess), 20000))
    config = ExperimentConfig(
        lattice=lattice, channel="quantum", epsilon=epsilon,
        initial="gaussian", theta0=theta0, p0=p0,
        t_max=t_max, n_states=1, n_noise=n_noise, master_seed=seed)
    curve = fidelity_curve(config)
    return estimate_tf(curve)


def sweep_tf(n_q_list, epsilon_list, K: float, n_noise: int = 50,
             master_seed: int = 0, theta0: float = 1.0, p0: float = 0.0,
             jobs: int = 1):
    """t_f on the (n_q, epsilon) grid, fresh ensembles per point."""
    points = [(n_q, eps) for n_q in n_q_list for eps in epsilon_list]
    args = [(n_q, eps, K, n_noise, _point_seed(master_seed, i), theta0, p0)
            for i, (n_q, eps) in enumerate(points)]
    return _run_points(_tf_point, args, jobs)


def collapse_constant(records) -> float:
    """Mean collapse combination t_f * epsilon^2 * n_q^2 over records."""
    values = [r.collapse for r in records if r.collapse is not None]
    if not values:
        raise ValueError("no records with grid coordinates")
    return float(np.mean(values))


RATE_KINDS = ("island", "diffusive", "random")

_KIND_CENTERS = {"island": (1.0, 0.0), "diffusive": (0.0, 0.0)}


def _rate_point(args):
    K, kind, n_q, epsilon, n_noise, t_max, seed, window = args
    lattice = LatticeParams(n_q=n_q, K=K)
    if kind == "random":
        config = ExperimentConfig(
            lattice=lattice, channel="quantum", epsilon=epsilon,
            initial="random", t_max=t_max, n_states=1, n_noise=n_noise,
            master_seed=seed)
    else:
        theta0, p0 = _KIND_CENTERS[kind]
        config = ExperimentConfig(
            lattice=lattice, channel="quantum", epsilon=epsilon,
            initial="gaussian", theta0=theta0, p0=p0, t_max=t_max,
            n_states=1, n_noise=n_noise, master_seed=seed)
    curve = fidelity_curve(config)
    fit = fit_decay(curve, EXPONENTIAL, window)
    return RateRecord(K=K, kind=kind, rate=fit.rate, r_squared=fit.r_squared)


def sweep_rate_vs_K(K_list, n_q: int = 9, epsilon: float = 1e-2,
                    kinds=RATE_KINDS, n_noise: int = 25,
                    t_max: int | None = None, master_seed: int = 0,
                    window: tuple = DEFAULT_FIT_WINDOW, jobs: int = 1):
    """Fitted quantum-channel decay rate per (K, initial-state kind).

    Kinds: "island" is a packet at (1, 0), inside the main island when
    -4 < K < 0; "diffusive" is a packet at (0, 0) in the chaotic
    layer; "random" is a uniform-modulus random-phase state.
    """
    if t_max is None:
        n_g = 3 * n_q ** 2 + n_q
        t_max = int(min(max(40, 3.5 / (0.25 * epsilon ** 2 * n_g)), 20000))
    points = [(K, kind) for K in K_list for kind in kinds]
    args = [(K, kind, n_q, epsilon, n_noise, t_max,
             _point_seed(master_seed, 101 + i), window)
            for i, (K, kind) in enumerate(points)]
    return _run_points(_rate_point, args, jobs)


def saturation_window(lattice: LatticeParams) -> tuple:
    """f-window isolating the saturated decay of strong kick noise.

    Strong per-step noise decoheres most ensemble members within a few
    steps, producing a fast perturbation-dependent shoulder above
    f ~ 0.1; the perturbation-independent decay at the classical
    stretching rate shows up below it, until the curve bends onto the
    finite-N floor (a few times 1/N for a mean over members).  The
    window [16/N, 0.08] keeps the fit inside that band.
    """
    return (16.0 / lattice.N, 0.08)


def _regime_point(args):
    (K, delta_K, n_q, n_states, n_noise, t_max, seed, fgr_window,
     bootstrap) = args
    lattice = LatticeParams(n_q=n_q, K=K)
    delta_k = delta_K / lattice.T
    lam = lyapunov_exponent(K)
    stable = -4.0 <= K <= 0.0

    if delta_K == 0.0:
        # nothing decays; report the trivial record with no fit
        return RegimeRecord(
            delta_K=0.0, delta_k=0.0, regime="none", model="none",
            rate=0.0, rate_stderr=0.0, r_squared=math.nan,
            r2_exponential=None, r2_gaussian=None, window=(),
            lyapunov=lam)

    if stable:
        regime = "island"
        theta0, p0 = 1.0, 0.0
        window = fgr_window
    else:
        regime = "lyapunov" if delta_k > 1.0 else "fgr"
        theta0, p0 = None, None  # uniform centers over the chaotic torus
        window = saturation_window(lattice) if regime == "lyapunov" else fgr_window

    if t_max is None:
        if regime == "fgr":
            # perturbative rate estimate Gamma ~ 0.24 delta_k^2 sets the span
            guess = 4.0 / max(0.2 * delta_k ** 2, 1e-12)
            t_max = int(min(max(40, guess), 30000))
        else:
            t_max = 60 if regime == "lyapunov" else 1500

    config = ExperimentConfig(
        lattice=lattice, channel="classical", delta_K=delta_K,
        initial="gaussian", theta0=theta0, p0=p0, t_max=t_max,
        n_states=n_states, n_noise=n_noise, master_seed=seed)
    curve = fidelity_curve(config)

    fit_exp = fit_decay(curve, EXPONENTIAL, window)
    try:
        fit_gauss = fit_decay(curve, GAUSSIAN, window)
    except FitError:
        fit_gauss = None

    if regime == "island" and fit_gauss is not None:
        best = fit_gauss if fit_gauss.r_squared > fit_exp.r_squared else fit_exp
    else:
        best = fit_exp

    stderr = best.rate_stderr
    if bootstrap and curve.member_f is not None and curve.member_f.shape[0] > 3:
        stderr = _bootstrap_rate_stderr(curve, best.model, window, bootstrap)

    return RegimeRecord(
        delta_K=delta_K, delta_k=delta_k, regime=regime, model=best.model,
        rate=best.rate, rate_stderr=stderr, r_squared=best.r_squared,
        r2_exponential=fit_exp.r_squared,
        r2_gaussian=None if fit_gauss is None else fit_gauss.r_squared,
        window=tuple(window), lyapunov=lam)


def _bootstrap_rate_stderr(curve: FidelityCurve, model: str, window,
                           n_boot: int) -> float:
    """Rate spread over member-resampled mean curves."""
    member_f = curve.member_f
    m = member_f.shape[0]
    rng = np.random.default_rng(0xB007)
    rates = []
    for _ in range(n_boot):
        pick = rng.integers(0, m, m)
        f = member_f[pick].mean(axis=0)
        try:
            rates.append(fit_decay((curve.t, f), model, window,
                                   min_points=3).rate)
        except FitError:
            continue
    if len(rates) < max(10, n_boot // 4):
        return math.inf
    return float(np.std(rates, ddof=1))


def classical_error_regimes(K: float, deltaK_list, n_q: int = 12,
                            n_states: int = 50, n_noise: int = 1,
                            t_max: int | None = None, master_seed: int = 0,
                            fgr_window: tuple = DEFAULT_FIT_WINDOW,
                            bootstrap: int = 200, jobs: int = 1):
    """Classify kick-noise amplitudes into decay regimes.

    For chaotic K each delta_K is tagged "fgr" (couples less than one
    momentum level, delta_k < 1) or "lyapunov" (delta_k > 1), and its
    exponential rate is fitted in the matching window: the default
    window for perturbative decay, the post-shoulder band of
    :func:`saturation_window` for saturated decay.  For stable K the
    initial state is the canonical island packet and both decay models
    compete on r^2.  delta_K = 0 yields a trivial record with no fit.
    """
    for dK in deltaK_list:
        if dK < 0:
            raise ValueError("delta_K values must be >= 0")
    args = [(K, dK, n_q, n_states, n_noise, t_max,
             _point_seed(master_seed, 211 + i), fgr_window, bootstrap)
            for i, dK in enumerate(deltaK_list)]
    return _run_points(_regime_point, args, jobs)


def _run_points(fn, args, jobs):
    if jobs and jobs > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, args))
    return [fn(a) for a in args]


# ---------------------------------------------------------------------------
# scattering circuit
# ---------------------------------------------------------------------------

def scattering_fidelity(config: ExperimentConfig, t: int,
                        mode: str = "analytic", shots: int = 10 ** 4,
                        member: int = 0) -> float:
    """Fidelity at step t from the ancilla-interference circuit.

    Simulates the (n_q + 1)-qubit circuit: Hadamard on a fresh
    ancilla, then, controlled on the ancilla, the echo operator (t
    noisy forward steps followed by t exact inverse steps), then a
    closing ancilla Hadamard.  The ancilla polarizations recover the
    complex overlap w = <psi | echo | psi>:

        <sigma_z> = Re w,    <sigma_y> = -Im w,

    and the fidelity is <sigma_z>^2 + <sigma_y>^2 = |w|^2.  The noise
    stream matches :func:`fidelity_curve` member ``member``, so the
    analytic mode equals the direct overlap at identical draws.

    mode "analytic" evaluates the polarizations from the joint state;
    mode "sampled" estimates each from ``shots`` simulated projective
    measurements (two settings, 2 * shots measurements total).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if mode not in ("analytic", "sampled"):
        raise ValueError("mode must be 'analytic' or 'sampled'")
    lattice = config.lattice
    state_index = member // config.n_noise
    ideal = _initial_block(replace(config, n_states=state_index + 1))
    psi = ideal[state_index]

    # |1>-branch: forward noisy evolution, then exact inverse
    branch = psi.copy().reshape(1, -1)
    prop = BatchPropagator(lattice)
    if config.channel == "classical":
        dk_max = config.delta_K / lattice.T
        rng = streams.stream(config.master_seed, streams.DOMAIN_CLASSICAL, member)
        deltas = rng.uniform(-dk_max, dk_max, max(t, 1))
        for step in range(t):
            branch = prop.step(branch, deltas[step:step + 1])
    else:
        program = build_sawtooth_circuit(lattice)
        engine = CircuitEngine(program)
        rng = streams.stream(config.master_seed, streams.DOMAIN_GATE, member)
        if config.regime == "static":
            frozen = rng.uniform(-config.epsilon, config.epsilon,
                                 (1, program.noisy_gate_count, PARAMS_PER_GATE))
        for step in range(t):
            if config.regime == "static":
                params = frozen
            else:
                params = rng.uniform(-config.epsilon, config.epsilon,
                                     (1, program.noisy_gate_count, PARAMS_PER_GATE))
            branch = engine.step_noisy(branch, params)
    for _ in range(t):
        branch = prop.step_inverse(branch)

    # joint (ancilla, system) state after the closing Hadamard:
    # a0 = (psi + echo psi)/2, a1 = (psi - echo psi)/2
    echo = branch[0]
    a0 = 0.5 * (psi + echo)
    a1 = 0.5 * (psi - echo)
    sz = float(np.sum(np.abs(a0) ** 2) - np.sum(np.abs(a1) ** 2))
    sy = float(2.0 * np.sum(np.imag(np.conj(a0) * a1)))

    if mode == "sampled":
        if shots < 1:
            raise ValueError("shots must be >= 1")
        rng = streams.stream(config.master_seed, streams.DOMAIN_SHOTS, member, t)
        hits_z = rng.binomial(shots, np.clip((1.0 + sz) / 2.0, 0.0, 1.0))
        hits_y = rng.binomial(shots, np.clip((1.0 + sy) / 2.0, 0.0, 1.0))
        sz = 2.0 * hits_z / shots - 1.0
        sy = 2.0 * hits_y / shots - 1.0

    return sz * sz + sy * sy
