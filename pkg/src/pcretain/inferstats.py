"""One-way ANOVA and Tukey HSD with self-contained F and studentized-range tails."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Mapping, Sequence

import numpy as np
from scipy.special import ndtr

P_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# incomplete beta and F distribution


def _beta_cf(x: float, a: float, b: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz."""
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
    for m in range(1, 10000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-16:
            return h
    raise RuntimeError(f"incomplete beta continued fraction did not converge (x={x}, a={a}, b={b})")


def regularized_incomplete_beta(x: float, a: float, b: float) -> float:
    """I_x(a, b) for x in [0, 1], a > 0, b > 0."""
    if not (a > 0 and b > 0):
        raise ValueError(f"a and b must be positive, got a={a}, b={b}")
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
        + a * math.log(x) + b * math.log1p(-x)
    )
    front = math.exp(log_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _beta_cf(x, a, b) / a
    return 1.0 - front * _beta_cf(1.0 - x, b, a) / b


def f_sf(f: float, df1: float, df2: float) -> float:
    """P(F > f) for the F(df1, df2) distribution."""
    if df1 <= 0 or df2 <= 0:
        raise ValueError(f"degrees of freedom must be positive, got ({df1}, {df2})")
    if f < 0 or math.isnan(f):
        raise ValueError(f"f must be non-negative, got {f}")
    if math.isinf(f):
        return 0.0
    return regularized_incomplete_beta(df2 / (df2 + df1 * f), df2 / 2.0, df1 / 2.0)


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| > |t|) for Student's t with ``df`` degrees of freedom."""
    return regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5)


# ---------------------------------------------------------------------------
# studentized range

_GL_NODES = 20


@lru_cache(maxsize=None)
def _gauss_legendre(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(_GL_NODES)
    edges = np.linspace(lo, hi, panels + 1)
    half = (edges[1:] - edges[:-1]) / 2.0
    mid = (edges[1:] + edges[:-1]) / 2.0
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _range_cdf(w: np.ndarray, k: int) -> np.ndarray:
    """P(range of k iid standard normals <= w), vectorized over ``w``."""
    z, wz = _gauss_legendre(-8.5, 8.5, 24)
    phi = np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
    inner = np.clip(ndtr(z[None, :]) - ndtr(z[None, :] - w[:, None]), 0.0, 1.0)
    return np.clip(k * (inner ** (k - 1) * (phi * wz)[None, :]).sum(axis=1), 0.0, 1.0)


def _log_chi_density(s: np.ndarray, df: float) -> np.ndarray:
    # density of S = sqrt(chi2_df / df)
    half = df / 2.0
    return (math.log(2.0) + half * math.log(half) - math.lgamma(half)
            + (df - 1.0) * np.log(s) - half * s * s)


def studentized_range_sf(q: float, k: int, df: float) -> float:
    """P(Q > q) for the studentized range of ``k`` means with ``df`` error d.f.

    Outer Gauss-Legendre integral over the scaled chi distribution of the
    pooled standard deviation, inner integral over the normal range.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if df < 1:
        raise ValueError(f"df must be >= 1, got {df}")
    if q < 0 or math.isnan(q):
        raise ValueError(f"q must be non-negative, got {q}")
    if q == 0:
        return 1.0
    if math.isinf(q):
        return 0.0
    if df > 1e5:
        return float(1.0 - _range_cdf(np.array([q]), k)[0])
    spread = 9.0 / math.sqrt(2.0 * df)
    lo = max(1e-12, 1.0 - spread) if df >= 8 else 1e-12
    hi = 1.0 + spread + (12.0 / math.sqrt(df) if df < 8 else 0.0)
    s, ws = _gauss_legendre(lo, hi, 40)
    dens = np.exp(_log_chi_density(s, df))
    cdf = float(np.sum(ws * dens * _range_cdf(q * s, k)))
    return float(min(max(1.0 - cdf, 0.0), 1.0))


def studentized_range_isf(alpha: float, k: int, df: float, tol: float = 1e-10) -> float:
    """Critical value ``q`` with ``P(Q > q) == alpha``, found by bisection."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    lo, hi = 0.0, 10.0
    while studentized_range_sf(hi, k, df) > alpha:
        hi *= 2.0
    while hi - lo > tol * max(1.0, hi):
        mid = 0.5 * (lo + hi)
        if studentized_range_sf(mid, k, df) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# ANOVA and Tukey HSD


@dataclass(frozen=True)
class AnovaTable:
    ss_groups: float
    ss_error: float
    ss_total: float
    df_groups: int
    df_error: int
    df_total: int
    ms_groups: float
    ms_error: float
    f_stat: float
    p_value: float
    degenerate: bool = False
    p_floored: bool = False


@dataclass(frozen=True)
class TukeyComparison:
    group_a: str
    group_b: str
    mean_diff: float
    ci_lower: float
    ci_upper: float
    p_value: float
    significant: bool
    p_floored: bool = False


def _labeled(groups) -> dict[str, np.ndarray]:
    if isinstance(groups, Mapping):
        items = groups.items()
    else:
        items = ((f"G{i + 1}", g) for i, g in enumerate(groups))
    out = {}
    for name, g in items:
        arr = np.asarray(g, dtype=float).ravel()
        if arr.size < 1:
            raise ValueError(f"group {name!r} is empty")
        if not np.all(np.isfinite(arr)):
            raise ValueError(f"group {name!r} has non-finite values")
        out[str(name)] = arr
    return out


def anova_oneway(groups: Sequence[Sequence[float]] | Mapping[str, Sequence[float]]) -> AnovaTable:
    data = _labeled(groups)
    if len(data) < 2:
        raise ValueError("one-way ANOVA needs at least two groups")
    sizes = np.array([g.size for g in data.values()])
    if sizes.max() < 2:
        raise ValueError("at least one group needs two or more observations")
    k = len(data)
    total_n = int(sizes.sum())
    if total_n - k < 1:
        raise ValueError("no error degrees of freedom")
    pooled = np.concatenate(list(data.values()))
    grand = pooled.mean()
    ss_groups = float(sum(g.size * (g.mean() - grand) ** 2 for g in data.values()))
    ss_error = float(sum(np.sum((g - g.mean()) ** 2) for g in data.values()))
    ss_total = float(np.sum((pooled - grand) ** 2))
    df_groups, df_error = k - 1, total_n - k
    ms_groups = ss_groups / df_groups
    ms_error = ss_error / df_error
    # relative guard: within-group spread that is pure rounding counts as zero
    if ms_error <= 1e-14 * max(ms_groups, 1e-300) or ss_error == 0.0:
        if ss_groups == 0.0:
            return AnovaTable(ss_groups, ss_error, ss_total, df_groups, df_error, total_n - 1,
                              ms_groups, ms_error, 0.0, 1.0, degenerate=True)
        return AnovaTable(ss_groups, ss_error, ss_total, df_groups, df_error, total_n - 1,
                          ms_groups, ms_error, math.inf, 0.0, degenerate=True, p_floored=True)
    f_stat = ms_groups / ms_error
    p = f_sf(f_stat, df_groups, df_error)
    floored = p < P_FLOOR
    return AnovaTable(ss_groups, ss_error, ss_total, df_groups, df_error, total_n - 1,
                      ms_groups, ms_error, f_stat, 0.0 if floored else p, p_floored=floored)


def tukey_hsd(groups: Sequence[Sequence[float]] | Mapping[str, Sequence[float]],
              alpha: float = 0.05) -> list[TukeyComparison]:
    """All pairwise comparisons, ``mean_diff = mean(a) - mean(b)``.

    Unequal group sizes use the Tukey-Kramer standard error
    ``sqrt(ms_error / 2 * (1/n_a + 1/n_b))``.
    """
    data = _labeled(groups)
    if len(data) < 2:
        raise ValueError("Tukey HSD needs at least two groups")
    table = anova_oneway(data)
    k = len(data)
    df = table.df_error
    q_crit = studentized_range_isf(alpha, k, df)
    out = []
    for (na, a), (nb, b) in combinations(data.items(), 2):
        diff = float(a.mean() - b.mean())
        se = math.sqrt(table.ms_error / 2.0 * (1.0 / a.size + 1.0 / b.size))
        half = q_crit * se
        if se == 0.0:
            p = 1.0 if diff == 0.0 else 0.0
        else:
            p = studentized_range_sf(abs(diff) / se, k, df)
        floored = p < P_FLOOR
        p = 0.0 if floored else p
        out.append(TukeyComparison(na, nb, diff, diff - half, diff + half, p, p < alpha, floored))
    return out
