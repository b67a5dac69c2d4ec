"""Natural-frequency statistics and stochastic frequency signals.

Each player k oscillates at an intrinsic rate drawn around a personal
mean. The per-player (mu_k, sigma_k) pairs measured for the two
seven-player groups are embedded as constants; trials sample a
piecewise-constant omega_k(t) that is redrawn from N(mu_k, sigma_k^2)
every ``tau`` seconds.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

__all__ = [
    "FrequencyProfile",
    "FrequencySignal",
    "builtin_profiles",
    "profile_by_name",
    "sample_frequencies",
    "constant_frequencies",
    "coefficient_of_variation",
    "individual_cv",
]

# Per-player mean and standard deviation of the natural oscillation
# frequency (rad/s), estimated from the eyes-closed solo trials of the
# two seven-player groups.
_GROUP1_MU = (4.2568, 4.3143, 4.6691, 4.2951, 4.3623, 2.9433, 4.2184)
_GROUP1_SIGMA = (0.3941, 0.3492, 0.3999, 0.3543, 0.3406, 0.6609, 0.3314)
_GROUP2_MU = (2.7151, 2.9299, 4.0344, 2.1476, 3.9117, 3.7429, 3.2827)
_GROUP2_SIGMA = (0.0741, 0.1525, 0.1035, 0.1023, 0.1085, 0.2309, 0.2911)


@dataclass(frozen=True)
class FrequencyProfile:
    """Per-player natural-frequency statistics, rad/s."""

    mu: np.ndarray
    sigma: np.ndarray
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        if mu.ndim != 1 or sigma.shape != mu.shape:
            raise ConfigurationError("profile: mu and sigma must be equal-length vectors")
        if mu.size == 0:
            raise ConfigurationError("profile: need at least one player")
        if np.any(mu <= 0):
            raise ConfigurationError("mu: natural frequencies must be positive")
        if np.any(sigma < 0):
            raise ConfigurationError("sigma: standard deviations must be nonnegative")
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "sigma", sigma)
        mu.setflags(write=False)
        sigma.setflags(write=False)

    @property
    def n(self) -> int:
        return self.mu.size

    def to_json(self) -> str:
        return json.dumps({"mu": self.mu.tolist(), "sigma": self.sigma.tolist(),
                           "name": self.name})

    @staticmethod
    def from_json(text: str) -> "FrequencyProfile":
        obj = json.loads(text)
        if "mu" not in obj or "sigma" not in obj:
            raise ConfigurationError("profile: JSON needs 'mu' and 'sigma' arrays")
        return FrequencyProfile(np.array(obj["mu"], float), np.array(obj["sigma"], float),
                                name=obj.get("name", "custom"))


@dataclass(frozen=True)
class FrequencySignal:
    """Piecewise-constant omega_k(t) on [0, T], rad/s.

    ``values[s, k]`` holds player k's frequency on the window
    [s*tau, (s+1)*tau); the final window is truncated at T. Segment
    boundaries tile [0, T] exactly.
    """

    values: np.ndarray  # (n_segments, n_players)
    tau: float
    T: float

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1:
            raise ConfigurationError("values: expected (n_segments, n_players)")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("values: every segment value must be finite")
        expected = _segment_count(self.T, self.tau)
        if v.shape[0] != expected:
            raise ConfigurationError(
                f"values: {v.shape[0]} segments do not tile [0, {self.T}] at tau={self.tau}")
        object.__setattr__(self, "values", v)
        v.setflags(write=False)

    @property
    def n(self) -> int:
        return self.values.shape[1]

    @property
    def n_segments(self) -> int:
        return self.values.shape[0]

    def segment_index(self, t: float) -> int:
        """Index of the window containing time t (right edge belongs to the last window)."""
        s = int(t / self.tau)
        return min(max(s, 0), self.n_segments - 1)

    def value_at(self, t: float) -> np.ndarray:
        return self.values[self.segment_index(t)]


def _segment_count(T: float, tau: float) -> int:
    if T <= 0:
        raise ConfigurationError(f"T: duration must be positive, got {T}")
    if tau <= 0:
        raise ConfigurationError(f"tau: resample interval must be positive, got {tau}")
    # ceil with protection against T/tau landing a hair above an integer
    return max(1, int(np.ceil(T / tau - 1e-9)))


def builtin_profiles() -> tuple[FrequencyProfile, FrequencyProfile]:
    """The two embedded seven-player profiles (group1, group2)."""
    g1 = FrequencyProfile(np.array(_GROUP1_MU), np.array(_GROUP1_SIGMA), name="group1")
    g2 = FrequencyProfile(np.array(_GROUP2_MU), np.array(_GROUP2_SIGMA), name="group2")
    return g1, g2


def profile_by_name(name: str) -> FrequencyProfile:
    g1, g2 = builtin_profiles()
    table = {"group1": g1, "group2": g2}
    try:
        return table[name]
    except KeyError:
        raise ConfigurationError(f"profile: unknown name {name!r}, expected 'group1' or 'group2'")


def sample_frequencies(profile: FrequencyProfile, T: float, tau: float,
                       rng_seed) -> FrequencySignal:
    """Draw a piecewise-constant frequency signal for one trial.

    Independent N(mu_k, sigma_k^2) draws per player, held constant on
    consecutive windows of length ``tau`` (last window truncated at T).
    Deterministic for a fixed ``rng_seed``; the seed may be an int or a
    sequence of ints (e.g. (master_seed, trial_index)).

    Draws are not truncated: a nonpositive draw is redrawn, which at the
    embedded parameter scales happens with probability < 1e-5.
    """
    nseg = _segment_count(T, tau)
    rng = np.random.default_rng(np.random.SeedSequence(rng_seed))
    vals = rng.normal(profile.mu, profile.sigma, size=(nseg, profile.n))
    while np.any(vals <= 0):
        bad = vals <= 0
        vals[bad] = rng.normal(np.broadcast_to(profile.mu, vals.shape)[bad],
                               np.broadcast_to(profile.sigma, vals.shape)[bad])
    return FrequencySignal(vals, tau=tau, T=T)


def constant_frequencies(profile: FrequencyProfile, T: float, rng_seed) -> FrequencySignal:
    """One draw per player held for the whole trial (single-segment signal)."""
    return sample_frequencies(profile, T, tau=T, rng_seed=rng_seed)


def coefficient_of_variation(means) -> float:
    """Sample standard deviation (n-1 denominator) over mean of a vector."""
    v = np.asarray(means, dtype=float)
    if v.size == 0:
        raise ConfigurationError("means: need a nonempty vector")
    m = v.mean()
    if m == 0:
        raise ConfigurationError("means: coefficient of variation undefined for zero mean")
    if v.size == 1 or np.all(v == v[0]):
        return 0.0
    return float(v.std(ddof=1) / m)


def individual_cv(profile: FrequencyProfile, k: int) -> float:
    """sigma_k / mu_k for player k (1-based label)."""
    if not (1 <= k <= profile.n):
        raise IndexError(f"player index {k} out of range 1..{profile.n}")
    return float(profile.sigma[k - 1] / profile.mu[k - 1])
