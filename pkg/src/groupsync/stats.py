"""Descriptive statistics, one-way and Welch ANOVA, Welch t.

p-values are computed from the regularized incomplete beta function
evaluated by Lentz's continued fraction, so no statistical tables or
external distribution code are involved and results are deterministic
to machine precision.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import StatisticsError

__all__ = [
    "AnovaResult",
    "describe",
    "one_way_anova",
    "welch_anova",
    "welch_t",
    "f_sf",
    "betainc_reg",
]

_MAX_CF_ITER = 300
_CF_EPS = 1e-15


@dataclass(frozen=True)
class AnovaResult:
    F: float
    df1: float
    df2: float
    p: float
    eta_sq: float

    def to_json(self) -> str:
        return json.dumps({"F": self.F, "df1": self.df1, "df2": self.df2,
                           "p": self.p, "eta_sq": self.eta_sq})


def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta function (modified
    Lentz iteration over the even/odd coefficient pairs)."""
    tiny = 1e-300
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_CF_ITER + 1):
        m2 = 2 * m
        coef = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + coef * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coef / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        coef = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + coef * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + coef / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            return h
    return h  # converged to working precision for all df used here


def betainc_reg(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise StatisticsError("betainc: shape parameters must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                + a * math.log(x) + b * math.log1p(-x))
    front = math.exp(ln_front)
    # continued fraction converges fastest below the distribution mode
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(a, b, x) / a
    return 1.0 - front * _beta_cf(b, a, 1.0 - x) / b


def f_sf(F: float, df1: float, df2: float) -> float:
    """Upper-tail probability of the F distribution."""
    if df1 <= 0 or df2 <= 0:
        raise StatisticsError("f_sf: degrees of freedom must be positive")
    if F <= 0:
        return 1.0
    x = df2 / (df2 + df1 * F)
    return betainc_reg(df2 / 2.0, df1 / 2.0, x)


def _t_sf_two_sided(t: float, df: float) -> float:
    if df <= 0:
        raise StatisticsError("t test: degrees of freedom must be positive")
    if t == 0:
        return 1.0
    x = df / (df + t * t)
    return betainc_reg(df / 2.0, 0.5, x)


def describe(samples) -> tuple[float, float, int]:
    """(mean, sample standard deviation, count); std is 0 for count 1."""
    v = np.asarray(samples, dtype=float)
    if v.size == 0:
        raise StatisticsError("describe: need at least one sample")
    sd = float(v.std(ddof=1)) if v.size > 1 else 0.0
    return float(v.mean()), sd, int(v.size)


def _check_groups(groups, min_size=2):
    gs = [np.asarray(g, dtype=float) for g in groups]
    if len(gs) < 2:
        raise StatisticsError("anova: need at least two groups")
    for g in gs:
        if g.ndim != 1 or g.size < min_size:
            raise StatisticsError(f"anova: every group needs >= {min_size} samples")
    return gs


def one_way_anova(groups) -> AnovaResult:
    """Fixed-effects one-way ANOVA.

    F = MS_between / MS_within with df1 = g - 1, df2 = n_total - g;
    eta_sq = SS_between / SS_total. Identical groups give the F = 0,
    p = 1 path rather than an error.
    """
    gs = _check_groups(groups)
    g = len(gs)
    n_total = sum(x.size for x in gs)
    grand = np.concatenate(gs).mean()
    ss_b = sum(x.size * (x.mean() - grand) ** 2 for x in gs)
    ss_w = sum(((x - x.mean()) ** 2).sum() for x in gs)
    ss_t = ss_b + ss_w
    df1 = g - 1
    df2 = n_total - g
    if ss_w == 0.0:
        if ss_b == 0.0:
            return AnovaResult(F=0.0, df1=df1, df2=df2, p=1.0, eta_sq=0.0)
        return AnovaResult(F=float("inf"), df1=df1, df2=df2, p=0.0, eta_sq=1.0)
    F = (ss_b / df1) / (ss_w / df2)
    eta = ss_b / ss_t if ss_t > 0 else 0.0
    return AnovaResult(F=float(F), df1=float(df1), df2=float(df2),
                       p=f_sf(F, df1, df2), eta_sq=float(eta))


def welch_anova(groups) -> AnovaResult:
    """Heteroscedastic one-way ANOVA (Welch).

    Group means are weighted by n_i / s_i^2; the denominator correction
    and the fractional df2 follow the Satterthwaite-style expansion.
    eta_sq is reported from the ordinary sums of squares for
    comparability with the fixed-effects table.
    """
    gs = _check_groups(groups)
    g = len(gs)
    n = np.array([x.size for x in gs], dtype=float)
    means = np.array([x.mean() for x in gs])
    var = np.array([x.var(ddof=1) for x in gs])
    if np.any(var == 0):
        # fully degenerate case (e.g. the same constant list repeated) is
        # a no-effect answer, not an error
        if np.all(var == 0) and np.all(means == means[0]):
            return AnovaResult(F=0.0, df1=float(g - 1), df2=float(n.sum() - g),
                               p=1.0, eta_sq=0.0)
        raise StatisticsError("welch_anova: a group has zero variance")
    w = n / var
    w_sum = w.sum()
    grand_w = (w * means).sum() / w_sum
    lam = ((1.0 - w / w_sum) ** 2 / (n - 1.0)).sum() / (g * g - 1.0)
    if np.all(means == means[0]):
        F = 0.0
    else:
        num = (w * (means - grand_w) ** 2).sum() / (g - 1)
        F = num / (1.0 + 2.0 * (g - 2.0) * lam)
    df1 = g - 1.0
    df2 = 1.0 / (3.0 * lam)
    grand = np.concatenate(gs).mean()
    ss_b = sum(x.size * (x.mean() - grand) ** 2 for x in gs)
    ss_t = sum(((x - grand) ** 2).sum() for x in gs)
    eta = ss_b / ss_t if ss_t > 0 else 0.0
    return AnovaResult(F=float(F), df1=df1, df2=float(df2),
                       p=f_sf(F, df1, df2) if F > 0 else 1.0, eta_sq=float(eta))


def welch_t(a, b) -> tuple[float, float, float]:
    """Welch's unequal-variance t test, two-sided.

    Returns (t, Welch-Satterthwaite df, p). Two zero-variance samples
    with equal means give the t = 0, p = 1 path.
    """
    x = np.asarray(a, dtype=float)
    y = np.asarray(b, dtype=float)
    if x.size < 2 or y.size < 2:
        raise StatisticsError("welch_t: each sample needs at least 2 values")
    vx = x.var(ddof=1) / x.size
    vy = y.var(ddof=1) / y.size
    se_sq = vx + vy
    if se_sq == 0.0:
        if x.mean() == y.mean():
            return 0.0, float(x.size + y.size - 2), 1.0
        return math.copysign(float("inf"), x.mean() - y.mean()), float(x.size + y.size - 2), 0.0
    t = (x.mean() - y.mean()) / math.sqrt(se_sq)
    df = se_sq ** 2 / (vx ** 2 / (x.size - 1) + vy ** 2 / (y.size - 1))
    return float(t), float(df), _t_sf_two_sided(t, df)
