"""Synchronisation indices.

All indices derive from unit phasors of phase differences, averaged
either over time or over the group:

  cluster phase   q(t)      angle of the group-mean phasor
  individual      rho_k     |time mean of e^{j(theta_k - q)}|
  group           rho_g(t)  group-mean phasor of (phi_k - phi_bar_k)
  group scalar    rho_g     time mean of rho_g(t)
  dyadic          rho_d     |time mean of e^{j(theta_h - theta_k)}|

Time integrals use the plain arithmetic mean over the trajectory grid,
matching the discrete estimators the indices are defined by; no
trapezoidal correction. Functions accept a PhaseTrajectory or a raw
(n_players, n_steps) array of unwrapped phases.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "SyncReport",
    "wrap",
    "cluster_phase",
    "cluster_phase_series",
    "individual_sync",
    "group_sync_t",
    "group_sync",
    "dyadic_sync",
    "dyadic_table",
    "trial_report",
]


def wrap(angle):
    """Map angles to (-pi, pi]; the boundary maps to +pi under atan2 rules."""
    a = np.asarray(angle, dtype=float)
    w = np.arctan2(np.sin(a), np.cos(a))
    return w if w.ndim else float(w)


def _phases(traj) -> np.ndarray:
    theta = getattr(traj, "theta", traj)
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 2 or theta.shape[0] < 1 or theta.shape[1] < 1:
        raise ConfigurationError(f"trajectory: expected (n_players, n_steps), got {theta.shape}")
    return theta


@dataclass(frozen=True)
class SyncReport:
    """Per-trial (or trial-aggregated) synchronisation summary."""

    rho_k: np.ndarray      # (n,) individual indices in [0, 1]
    phi_bar: np.ndarray    # (n,) mean relative phases, rad
    rho_g_t: np.ndarray    # (n_steps,) instantaneous group index
    rho_g: float           # time mean of rho_g_t
    dyad_mu: np.ndarray    # (n, n) dyadic means, unit diagonal
    dyad_sigma: np.ndarray  # (n, n) dyadic spread over trials, zero diagonal

    def to_json(self) -> str:
        return json.dumps({
            "rho_k": self.rho_k.tolist(),
            "phi_bar": self.phi_bar.tolist(),
            "rho_g": self.rho_g,
            "rho_g_t": self.rho_g_t.tolist(),
            "dyad_mu": self.dyad_mu.tolist(),
            "dyad_sigma": self.dyad_sigma.tolist(),
        })

    def players_csv(self) -> str:
        """Per-player table: player, rho_k, phi_bar (1-based labels)."""
        buf = io.StringIO()
        buf.write("player,rho_k,phi_bar\n")
        for k in range(len(self.rho_k)):
            buf.write(f"{k + 1},{self.rho_k[k]:.6f},{self.phi_bar[k]:.6f}\n")
        return buf.getvalue()

    def trace_csv(self, dt: float) -> str:
        """Trace table: t, rho_g_t, one row per grid point t_i = i*dt."""
        buf = io.StringIO()
        buf.write("t,rho_g\n")
        for i, v in enumerate(self.rho_g_t):
            buf.write(f"{(i + 1) * dt:.4f},{v:.6f}\n")
        return buf.getvalue()


def cluster_phase(theta_slice) -> tuple[complex, float]:
    """Group-mean phasor q' and its angle q for one time slice."""
    th = np.asarray(theta_slice, dtype=float)
    if th.size == 0:
        raise ConfigurationError("theta_slice: need at least one phase")
    qp = np.exp(1j * th).mean()
    return complex(qp), float(np.arctan2(qp.imag, qp.real))


def cluster_phase_series(traj) -> tuple[np.ndarray, np.ndarray]:
    """q'(t) and q(t) over the whole trajectory."""
    theta = _phases(traj)
    qp = np.exp(1j * theta).mean(axis=0)
    return qp, np.angle(qp)


def _relative_phases(theta: np.ndarray):
    """phi_k(t) about the cluster phase, plus the per-player mean phasor."""
    _, q = cluster_phase_series(theta)
    phi = wrap(theta - q[None, :])
    mean_phasor = np.exp(1j * phi).mean(axis=1)  # time average, one per player
    return phi, mean_phasor


def individual_sync(traj) -> tuple[np.ndarray, np.ndarray]:
    """Per-player index rho_k and mean relative phase phi_bar_k."""
    theta = _phases(traj)
    _, mean_phasor = _relative_phases(theta)
    return np.abs(mean_phasor), np.angle(mean_phasor)


def group_sync_t(traj) -> np.ndarray:
    """Instantaneous group index rho_g(t) in [0, 1]."""
    theta = _phases(traj)
    phi, mean_phasor = _relative_phases(theta)
    phi_bar = np.angle(mean_phasor)
    return np.abs(np.exp(1j * (phi - phi_bar[:, None])).mean(axis=0))


def group_sync(traj) -> float:
    """Scalar group index: time mean of rho_g(t)."""
    return float(group_sync_t(traj).mean())


def dyadic_sync(traj, h: int, k: int) -> float:
    """Dyadic index for players h and k (1-based labels).

    The self-dyad h == k returns 1 by convention; it is plumbing for
    table construction and never carries information.
    """
    theta = _phases(traj)
    n = theta.shape[0]
    if not (1 <= h <= n and 1 <= k <= n):
        raise ConfigurationError(f"players: labels must be in 1..{n}, got ({h}, {k})")
    if h == k:
        return 1.0
    d = theta[h - 1] - theta[k - 1]
    return float(np.abs(np.exp(1j * d).mean()))


def _dyad_matrix(theta: np.ndarray) -> np.ndarray:
    n = theta.shape[0]
    z = np.exp(1j * theta)
    m = np.eye(n)
    for a in range(n):
        for b in range(a + 1, n):
            v = np.abs((z[a] * np.conj(z[b])).mean())
            m[a, b] = v
            m[b, a] = v
    return m


def dyadic_table(trials) -> tuple[np.ndarray, np.ndarray]:
    """Entrywise mean and population standard deviation of the dyadic
    index over a list of trials (divisor = trial count).

    Diagonals follow the self-dyad convention: mean 1, spread 0.
    """
    if not trials:
        raise ConfigurationError("trials: need at least one trajectory")
    mats = np.stack([_dyad_matrix(_phases(t)) for t in trials])
    mu = mats.mean(axis=0)
    sigma = mats.std(axis=0, ddof=0)
    np.fill_diagonal(sigma, 0.0)
    return mu, sigma


def trial_report(traj) -> SyncReport:
    """All indices of a single trial in one pass."""
    theta = _phases(traj)
    phi, mean_phasor = _relative_phases(theta)
    rho_k = np.abs(mean_phasor)
    phi_bar = np.angle(mean_phasor)
    rho_g_t = np.abs(np.exp(1j * (phi - phi_bar[:, None])).mean(axis=0))
    dyad_mu = _dyad_matrix(theta)
    return SyncReport(rho_k=rho_k, phi_bar=phi_bar, rho_g_t=rho_g_t,
                      rho_g=float(rho_g_t.mean()), dyad_mu=dyad_mu,
                      dyad_sigma=np.zeros_like(dyad_mu))
