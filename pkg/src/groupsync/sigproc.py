"""Measurement pipeline for oscillatory position signals.

Mirrors the treatment of recorded hand trajectories: spike removal,
gap interpolation, projection of planar motion onto its principal axis,
instantaneous phase via the analytic signal, and natural-frequency
estimation in both the Fourier and Hilbert domains. Gaps are carried as
NaN between stages so despike -> interpolate_gaps composes directly.

All routines are deterministic; none draw random numbers.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert

from .errors import ConfigurationError, SignalError

__all__ = [
    "MarkerSeries",
    "despike",
    "interpolate_gaps",
    "pca_project",
    "hilbert_phase",
    "estimate_frequency_fourier",
    "estimate_frequency_hilbert",
]

# Absolute fallback used when the median successive difference vanishes
# (constant signal); in length units of the input.
_FLAT_EPS = 1e-12


@dataclass(frozen=True)
class MarkerSeries:
    """Uniformly sampled 3-D marker positions, mm."""

    t: np.ndarray    # (n_steps,) seconds
    xyz: np.ndarray  # (3, n_steps) mm
    fs: float = 100.0

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float)
        xyz = np.asarray(self.xyz, dtype=float)
        if xyz.ndim != 2 or xyz.shape[0] != 3 or xyz.shape[1] != t.size:
            raise ConfigurationError(f"xyz: expected (3, {t.size}), got {xyz.shape}")
        if t.size >= 2:
            dt = np.diff(t)
            if np.max(np.abs(dt - 1.0 / self.fs)) > 1e-9:
                raise ConfigurationError("t: sampling must be uniform at rate fs")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "xyz", xyz)

    @staticmethod
    def from_csv(text: str, fs: float = 100.0) -> "MarkerSeries":
        rows = [r for r in text.strip().splitlines() if r.strip()]
        if not rows or rows[0].strip().lower().replace(" ", "") != "t,x,y,z":
            raise ConfigurationError("marker CSV: expected header 't,x,y,z'")
        data = np.array([[float(v) for v in r.split(",")] for r in rows[1:]])
        if data.size == 0:
            raise ConfigurationError("marker CSV: no samples")
        return MarkerSeries(t=data[:, 0], xyz=data[:, 1:4].T, fs=fs)

    def to_csv(self, mask: np.ndarray | None = None) -> str:
        buf = io.StringIO()
        buf.write("t,x,y,z" + (",mask\n" if mask is not None else "\n"))
        for i in range(self.t.size):
            row = f"{self.t[i]:.4f},{self.xyz[0, i]:.6f},{self.xyz[1, i]:.6f},{self.xyz[2, i]:.6f}"
            if mask is not None:
                row += f",{int(mask[i])}"
            buf.write(row + "\n")
        return buf.getvalue()


def despike(series, threshold_factor: float = 5.0) -> tuple[np.ndarray, np.ndarray]:
    """Mark implausible jumps as gaps.

    A sample is a spike when its distance from the most recent retained
    sample exceeds threshold_factor times the median absolute successive
    difference, scaled by the gap length so genuine motion resumed after
    a masked run is not flagged. Flagged samples become NaN in the
    returned signal; the boolean mask marks them.

    A constant signal has zero median difference; the test then falls
    back to an absolute threshold so exact plateaus survive unchanged.
    """
    x = np.asarray(series, dtype=float)
    if x.ndim != 1 or x.size < 3:
        raise ConfigurationError("series: need a 1-D signal with at least 3 samples")
    if threshold_factor <= 0:
        raise ConfigurationError("threshold_factor: must be positive")
    step = np.median(np.abs(np.diff(x)))
    if step <= _FLAT_EPS:
        step = max(float(np.mean(np.abs(np.diff(x)))), _FLAT_EPS)
    mask = np.zeros(x.size, dtype=bool)
    last = x[0]
    gap = 1
    for i in range(1, x.size):
        if abs(x[i] - last) > threshold_factor * step * gap:
            mask[i] = True
            gap += 1
        else:
            last = x[i]
            gap = 1
    cleaned = x.copy()
    cleaned[mask] = np.nan
    return cleaned, mask


def interpolate_gaps(signal) -> np.ndarray:
    """Fill NaN gaps: linear across interior gaps, nearest value at edges."""
    x = np.asarray(signal, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ConfigurationError("signal: need a nonempty 1-D signal")
    good = ~np.isnan(x)
    if not good.any():
        raise SignalError("signal: every sample is a gap, nothing to interpolate from")
    if good.all():
        return x.copy()
    idx = np.arange(x.size)
    # np.interp clamps outside the support, which fills edge gaps with
    # the nearest retained value
    return np.interp(idx, idx[good], x[good])


def pca_project(xy) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Principal-axis decomposition of planar motion.

    Mean-centers the 2 x n_steps input and projects onto the
    eigenvectors of the 2x2 sample covariance, ordered by descending
    eigenvalue, so x_pca carries maximal variance. The leading direction
    is sign-fixed (largest component positive) for determinism.
    """
    z = np.asarray(xy, dtype=float)
    if z.ndim != 2 or z.shape[0] != 2 or z.shape[1] < 2:
        raise ConfigurationError(f"xy: expected (2, n_steps >= 2), got {z.shape}")
    centered = z - z.mean(axis=1, keepdims=True)
    cov = centered @ centered.T / (z.shape[1] - 1)
    if not cov.any():
        raise SignalError("xy: zero variance in both coordinates, no principal axis")
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evecs = evecs[:, order]
    for j in range(2):
        lead = np.argmax(np.abs(evecs[:, j]))
        if evecs[lead, j] < 0:
            evecs[:, j] = -evecs[:, j]
    proj = evecs.T @ centered
    return proj[0], proj[1], evecs[:, 0]


def _analytic_phase(x: np.ndarray) -> np.ndarray:
    """Wrapped phase of the spectrum-doubling analytic signal."""
    return np.angle(hilbert(x - x.mean()))


def hilbert_phase(x, fs: float = 100.0) -> np.ndarray:
    """Instantaneous phase theta(t) of a mean-removed signal, wrapped.

    Computed over the full window; edge distortion of the analytic
    signal is left in place, so validation statistics should be taken on
    the central portion of the samples.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 16:
        raise ConfigurationError("x: need a 1-D signal with at least 16 samples")
    if not np.any(x - x.mean()):
        raise SignalError("x: zero signal has no phase")
    return _analytic_phase(x)


def estimate_frequency_fourier(x, fs: float = 100.0) -> float:
    """Dominant angular frequency from the spectrum, rad/s.

    The mean-removed signal is Hann-windowed, the largest nonzero
    frequency bin located, and the peak refined by quadratic
    interpolation of log magnitude over its three bins. The plain
    rectangular-window parabola biases the refinement by up to a quarter
    bin at these record lengths, which the window suppresses.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 64:
        raise ConfigurationError("x: need a 1-D signal with at least 64 samples")
    n = x.size
    spec = np.abs(np.fft.rfft((x - x.mean()) * np.hanning(n)))
    if spec.size < 3 or not np.any(spec[1:] > 0):
        raise SignalError("x: flat spectrum, no dominant frequency")
    k = int(np.argmax(spec[1:])) + 1
    df = fs / n
    if 1 <= k < spec.size - 1 and spec[k - 1] > 0 and spec[k + 1] > 0:
        y0, y1, y2 = np.log(spec[k - 1:k + 2])
        denom = y0 - 2.0 * y1 + y2
        delta = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        delta = float(np.clip(delta, -0.5, 0.5))
    else:
        delta = 0.0
    return 2.0 * np.pi * (k + delta) * df


def estimate_frequency_hilbert(x, fs: float = 100.0) -> tuple[np.ndarray, float]:
    """Instantaneous angular frequency series and its central-window mean.

    The unwrapped analytic phase is differentiated by central
    differences; the scalar summary averages the central 80% of samples
    to keep analytic-signal edge distortion out of the estimate.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim != 1 or x.size < 16:
        raise ConfigurationError("x: need a 1-D signal with at least 16 samples")
    if not np.any(x - x.mean()):
        raise SignalError("x: zero signal has no phase")
    phase = np.unwrap(_analytic_phase(x))
    omega = np.gradient(phase) * fs
    lo = int(round(0.1 * x.size))
    hi = int(round(0.9 * x.size))
    return omega, float(omega[lo:hi].mean())
