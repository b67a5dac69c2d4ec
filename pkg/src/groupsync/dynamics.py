"""Network phase dynamics.

The model couples N phase oscillators through a visual-interaction graph:

    dtheta_k/dt = omega_k(t) + (c/N) * sum_h a_kh * sin(theta_h - theta_k)

The divisor in the coupling prefactor is the total player count N for
every topology, not the node degree. Trials are integrated with a
classical fixed-step 4th-order Runge-Kutta scheme whose step equals the
100 Hz sampling interval of the recordings, so the trajectory grid and
the metric grid coincide.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .ensemble import FrequencyProfile, FrequencySignal, constant_frequencies, sample_frequencies
from .errors import ConfigurationError
from .graphs import AdjacencyMatrix

__all__ = [
    "TrialConfig",
    "PhaseTrajectory",
    "kuramoto_rhs",
    "integrate_trial",
    "integrate_signal",
    "integrate_signals",
    "synth_positions",
    "trajectory_to_csv",
]

DEFAULT_T = 30.0
DEFAULT_DT = 0.01
DEFAULT_TAU_OMEGA = 0.01
DEFAULT_THETA0 = np.pi / 2


@dataclass(frozen=True)
class TrialConfig:
    """Parameters of one simulated trial.

    ``theta0`` may be a scalar (applied to every player) or a vector.
    ``seed`` feeds the per-trial frequency draw; pass a tuple such as
    (master_seed, trial_index) to derive independent trial streams.
    ``omega_mode`` selects the frequency temporal structure: "resample"
    redraws every ``tau_omega`` seconds, "constant" draws once per trial.
    """

    c: float
    T: float = DEFAULT_T
    dt: float = DEFAULT_DT
    theta0: float | np.ndarray = DEFAULT_THETA0
    seed: int | tuple = 0
    tau_omega: float = DEFAULT_TAU_OMEGA
    omega_mode: str = "resample"

    def __post_init__(self):
        if self.T <= 0:
            raise ConfigurationError(f"T: duration must be positive, got {self.T}")
        if not (0 < self.dt <= self.T):
            raise ConfigurationError(f"dt: step must satisfy 0 < dt <= T, got {self.dt}")
        if self.c < 0:
            raise ConfigurationError(f"c: coupling must be nonnegative, got {self.c}")
        steps = self.T / self.dt
        if abs(steps - round(steps)) > 1e-9 * steps:
            raise ConfigurationError(
                f"dt: T/dt must be an integer, got {self.T}/{self.dt} = {steps}")
        if self.tau_omega <= 0:
            raise ConfigurationError(
                f"tau_omega: resample interval must be positive, got {self.tau_omega}")
        if self.omega_mode not in ("resample", "constant"):
            raise ConfigurationError(
                f"omega_mode: expected 'resample' or 'constant', got {self.omega_mode!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.T / self.dt))

    def theta0_vector(self, n: int) -> np.ndarray:
        th0 = np.asarray(self.theta0, dtype=float)
        if th0.ndim == 0:
            return np.full(n, float(th0))
        if th0.shape != (n,):
            raise ConfigurationError(
                f"theta0: expected scalar or length-{n} vector, got shape {th0.shape}")
        return th0.copy()


@dataclass(frozen=True)
class PhaseTrajectory:
    """Unwrapped phases on the uniform grid t_i = i*dt, i = 1..n_steps.

    The initial state theta(0) is a config input, not a stored sample;
    metrics therefore average over exactly n_steps points.
    """

    theta: np.ndarray  # (n_players, n_steps), rad, unwrapped
    dt: float
    theta0: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        th = np.asarray(self.theta, dtype=float)
        if th.ndim != 2:
            raise ConfigurationError(f"theta: expected (n_players, n_steps), got {th.shape}")
        if not np.all(np.isfinite(th)):
            raise ConfigurationError("theta: every phase sample must be finite")
        if th.shape[1] > 1 and np.abs(np.diff(th, axis=1)).max() >= np.pi:
            raise ConfigurationError(
                "theta: per-step increment reached pi rad; the grid undersamples the dynamics")
        object.__setattr__(self, "theta", th)
        th.setflags(write=False)

    @property
    def n(self) -> int:
        return self.theta.shape[0]

    @property
    def n_steps(self) -> int:
        return self.theta.shape[1]

    @property
    def t(self) -> np.ndarray:
        return (np.arange(self.n_steps) + 1) * self.dt

    @property
    def T(self) -> float:
        return self.n_steps * self.dt


def _rhs_batch(theta: np.ndarray, omega: np.ndarray, c_over_n: float,
               a: np.ndarray) -> np.ndarray:
    """Vectorized right-hand side for a (batch, N) phase array.

    Elementwise multiply-and-reduce rather than a matrix product so that
    a batch row reproduces the single-trial arithmetic bit for bit.
    """
    diff = theta[:, None, :] - theta[:, :, None]  # [b, k, h] = theta_h - theta_k
    return omega + c_over_n * (a[None, :, :] * np.sin(diff)).sum(axis=2)


def kuramoto_rhs(theta, omega, c: float, A: AdjacencyMatrix) -> np.ndarray:
    """Instantaneous phase velocities, rad/s."""
    th = np.asarray(theta, dtype=float)
    om = np.asarray(omega, dtype=float)
    if th.shape != (A.n,) or om.shape != (A.n,):
        raise ConfigurationError(
            f"theta/omega: expected length-{A.n} vectors, got {th.shape} and {om.shape}")
    return _rhs_batch(th[None, :], om[None, :], c / A.n, A.a)[0]


def _integrate_core(a: np.ndarray, omega_segments: np.ndarray, theta0: np.ndarray,
                    n_steps: int, dt: float, c: float, tau: float) -> np.ndarray:
    """RK4 over a batch. omega_segments (batch, n_segments, N), theta0 (batch, N).

    omega is held constant within each step at the segment covering the
    step midpoint; when tau is a multiple of dt the midpoint lookup is
    exact and segment boundaries coincide with step boundaries, which
    keeps the halving-convergence property of the smooth-piece scheme.
    """
    batch, nseg, n = omega_segments.shape
    cn = c / n
    out = np.empty((batch, n, n_steps))
    th = theta0.copy()
    for i in range(n_steps):
        seg = min(int((i * dt + 0.5 * dt) / tau), nseg - 1)
        om = omega_segments[:, seg, :]
        k1 = _rhs_batch(th, om, cn, a)
        k2 = _rhs_batch(th + 0.5 * dt * k1, om, cn, a)
        k3 = _rhs_batch(th + 0.5 * dt * k2, om, cn, a)
        k4 = _rhs_batch(th + dt * k3, om, cn, a)
        th = th + (dt / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        out[:, :, i] = th
    return out


def _signal_for(config: TrialConfig, profile: FrequencyProfile) -> FrequencySignal:
    if config.omega_mode == "constant":
        return constant_frequencies(profile, config.T, config.seed)
    return sample_frequencies(profile, config.T, config.tau_omega, config.seed)


def integrate_trial(config: TrialConfig, A: AdjacencyMatrix,
                    profile: FrequencyProfile) -> PhaseTrajectory:
    """Simulate one trial, drawing the frequency signal from config.seed."""
    if profile.n != A.n:
        raise ConfigurationError(
            f"profile: {profile.n} players but the topology has {A.n}")
    return integrate_signal(config, A, _signal_for(config, profile))


def integrate_signal(config: TrialConfig, A: AdjacencyMatrix,
                     signal: FrequencySignal) -> PhaseTrajectory:
    """Simulate one trial over a frozen frequency signal."""
    if signal.n != A.n:
        raise ConfigurationError(
            f"signal: {signal.n} players but the topology has {A.n}")
    if abs(signal.T - config.T) > 1e-9:
        raise ConfigurationError(
            f"signal: covers [0, {signal.T}] but the trial lasts {config.T}")
    th0 = config.theta0_vector(A.n)
    theta = _integrate_core(A.a, signal.values[None, :, :], th0[None, :],
                            config.n_steps, config.dt, config.c, signal.tau)
    return PhaseTrajectory(theta[0], dt=config.dt, theta0=th0)


def integrate_signals(config: TrialConfig, A: AdjacencyMatrix,
                      signals: list[FrequencySignal]) -> list[PhaseTrajectory]:
    """Simulate a batch of trials in one vectorized pass.

    Outputs are bitwise identical to calling integrate_signal per trial;
    all signals must share (T, tau) so their segment grids align.
    """
    if not signals:
        return []
    tau = signals[0].tau
    for s in signals:
        if s.n != A.n:
            raise ConfigurationError(f"signal: {s.n} players but the topology has {A.n}")
        if s.tau != tau or abs(s.T - config.T) > 1e-9:
            raise ConfigurationError("signals: batch members must share T and tau")
    th0 = config.theta0_vector(A.n)
    stacked = np.stack([s.values for s in signals])
    theta = _integrate_core(A.a, stacked, np.broadcast_to(th0, (len(signals), A.n)).copy(),
                            config.n_steps, config.dt, config.c, tau)
    return [PhaseTrajectory(theta[j], dt=config.dt, theta0=th0) for j in range(len(signals))]


def synth_positions(traj: PhaseTrajectory, amplitude) -> np.ndarray:
    """Oscillatory position readout x_k[t_i] = amplitude_k * sin(theta_k[t_i])."""
    amp = np.asarray(amplitude, dtype=float)
    if amp.ndim == 0:
        amp = np.full(traj.n, float(amp))
    if amp.shape != (traj.n,):
        raise ConfigurationError(
            f"amplitude: expected scalar or length-{traj.n} vector, got shape {amp.shape}")
    if np.any(amp <= 0):
        raise ConfigurationError("amplitude: amplitudes must be positive")
    return amp[:, None] * np.sin(traj.theta)


def trajectory_to_csv(traj: PhaseTrajectory) -> str:
    """CSV text with columns t, theta_1..theta_N (rad, unwrapped), one row per step."""
    buf = io.StringIO()
    cols = ",".join(f"theta_{k + 1}" for k in range(traj.n))
    buf.write(f"t,{cols}\n")
    t = traj.t
    for i in range(traj.n_steps):
        row = ",".join(f"{traj.theta[k, i]:.9f}" for k in range(traj.n))
        buf.write(f"{t[i]:.4f},{row}\n")
    return buf.getvalue()
