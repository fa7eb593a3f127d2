"""OLS trend regressions with Newey-West (Bartlett) HAC inference.

Every slope estimator used here is linear in the data, beta_hat = sum_t a_t y_t,
so its HAC variance is T times the long-run variance of the per-period
scores a_t * u_t. Joint covariances of several slopes (co-trending, the
acceleration system) come from stacking those score sequences.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import stats

from . import fixedb
from .distributions import CharacteristicSeries, check_aligned

INFERENCE = ("fixed-b", "normal")
_DEGENERATE_RTOL = 1e-10


class OlsFit(NamedTuple):
    alpha: float
    beta: float
    residuals: np.ndarray


@dataclass(frozen=True)
class TrendResult:
    """Slope estimate with HAC standard error.

    ``p_value`` is two-sided and ``p_greater`` is for the alternative
    beta > null. ``degenerate`` marks an exact fit (zero residuals), where
    the standard error is zero and the t-statistic is 0 or infinite.
    """

    alpha: float
    beta: float
    se_hac: float
    t_stat: float
    p_value: float
    p_greater: float
    T: int
    bandwidth: int
    null: float = 0.0
    inference: str = "fixed-b"
    degenerate: bool = False
    name: str = ""

    def rejects(self, level: float, sidedness: str = "two-sided") -> bool:
        if sidedness == "two-sided":
            return self.p_value < level
        if sidedness == "greater":
            return self.p_greater < level
        raise ValueError(f"unknown sidedness {sidedness!r}")

    def significant_sign(self, level: float) -> int:
        """+1 or -1 for a two-sided rejection in that direction, else 0."""
        if not self.rejects(level):
            return 0
        return 1 if self.beta > self.null else -1


@dataclass(frozen=True)
class WaldResult:
    statistic: float
    df: int
    p_value: float
    restriction: str
    slopes: tuple[float, ...] = field(default=())
    inference: str = "fixed-b"


def newey_west_bandwidth(T: int) -> int:
    """floor(4 (T/100)^(2/9))."""
    return int(math.floor(4.0 * (T / 100.0) ** (2.0 / 9.0)))


def hac_variance(scores, bandwidth: int):
    """Bartlett-weighted long-run variance of a score sequence.

    Gamma_0 + sum_{j=1..bw} (1 - j/(bw+1)) (Gamma_j + Gamma_j'), with
    Gamma_j = (1/T) sum_t s_t s_{t-j}'. Scores are not demeaned (regression
    scores have mean zero). 1-d input gives a scalar, (T, k) input a k x k
    matrix.
    """
    if bandwidth < 0:
        raise ValueError("bandwidth must be non-negative")
    s = np.asarray(scores, dtype=float)
    vector = s.ndim == 1
    if vector:
        s = s[:, None]
    T = s.shape[0]
    omega = s.T @ s
    for j in range(1, min(bandwidth, T - 1) + 1):
        G = s[j:].T @ s[:-j]
        omega += (1.0 - j / (bandwidth + 1.0)) * (G + G.T)
    omega /= T
    return float(omega[0, 0]) if vector else omega


def _trend_data(series) -> tuple[np.ndarray, np.ndarray]:
    if isinstance(series, CharacteristicSeries):
        return series.t, np.asarray(series.values, dtype=float)
    y = np.asarray(series, dtype=float)
    return np.arange(1, y.size + 1, dtype=float), y


def _fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, np.ndarray, np.ndarray]:
    """OLS of y on (1, x); returns alpha, beta, residuals and slope weights a_t."""
    xc = x - x.mean()
    sxx = float(xc @ xc)
    if sxx <= 0:
        raise ValueError("regressor has zero variance")
    a = xc / sxx
    yc = y - y.mean()
    beta = float(xc @ yc) / sxx
    alpha = float(y.mean() - beta * x.mean())
    resid = yc - beta * xc
    return alpha, beta, resid, a


def ols_trend(series) -> OlsFit:
    """Least squares fit of C_t = alpha + beta t + u_t, with t = 1..T."""
    x, y = _trend_data(series)
    if y.size < 3:
        raise ValueError(f"need at least 3 observations, got {y.size}")
    alpha, beta, resid, _ = _fit(x, y)
    return OlsFit(alpha, beta, resid)


def _is_exact_fit(y: np.ndarray, resid: np.ndarray) -> bool:
    scale = float(np.max(np.abs(y))) if y.size else 0.0
    return float(np.max(np.abs(resid))) <= _DEGENERATE_RTOL * scale or scale == 0.0


def _slope_test(x, y, bandwidth, inference, null, name, trend_model) -> TrendResult:
    if inference not in INFERENCE:
        raise ValueError(f"inference must be one of {INFERENCE}")
    T = y.size
    if T < 3:
        raise ValueError(f"need at least 3 observations, got {T}")
    bw = newey_west_bandwidth(T) if bandwidth is None else int(bandwidth)
    alpha, beta, resid, a = _fit(x, y)
    diff = beta - null
    if _is_exact_fit(y, resid):
        tiny = _DEGENERATE_RTOL * (abs(beta) + abs(null) + np.finfo(float).tiny)
        t_stat = 0.0 if abs(diff) <= tiny else math.copysign(math.inf, diff)
        se = 0.0
        degenerate = True
    else:
        scores = a * resid
        m = float(np.max(np.abs(scores)))  # rescale so tiny residuals do not underflow
        se = m * math.sqrt(T * hac_variance(scores / m, bw))
        t_stat = diff / se if se > 0 else (math.copysign(math.inf, diff) if diff else 0.0)
        degenerate = False
    # The fixed-b reference is exact only for the (1, t) design with no gaps.
    if inference == "fixed-b" and trend_model and np.all(np.diff(x) == 1):
        p_two, p_greater = fixedb.t_pvalues(t_stat, T, bw)
        used = "fixed-b"
    else:
        p_two = float(2 * stats.norm.sf(abs(t_stat)))
        p_greater = float(stats.norm.sf(t_stat))
        used = "normal"
    return TrendResult(
        alpha, beta, se, float(t_stat), p_two, p_greater, T, bw,
        null=null, inference=used, degenerate=degenerate, name=name,
    )


def trend_test(series, bandwidth: int | None = None, inference: str = "fixed-b") -> TrendResult:
    """HAC t-test of beta = 0 in C_t = alpha + beta t + u_t."""
    x, y = _trend_data(series)
    name = series.id if isinstance(series, CharacteristicSeries) else ""
    return _slope_test(x, y, bandwidth, inference, 0.0, name, trend_model=True)


def spacing_test(series_i: CharacteristicSeries, series_j: CharacteristicSeries, **kwargs) -> TrendResult:
    """Trend test on the difference series C_i - C_j."""
    return trend_test(series_i - series_j, **kwargs)


def covariate_regression(
    y: CharacteristicSeries, x: CharacteristicSeries,
    bandwidth: int | None = None, null: float = 0.0,
) -> TrendResult:
    """Slope of y on a covariate x with HAC standard error; tests slope = null.

    Inference is asymptotic normal: the covariate is stochastic, so the
    trend-model fixed-b reference does not apply.
    """
    check_aligned([y, x])
    xv = np.asarray(x.values, dtype=float)
    if np.ptp(xv) == 0:
        raise ValueError(f"covariate {x.id!r} has zero variance")
    return _slope_test(xv, np.asarray(y.values, dtype=float), bandwidth, "normal", null,
                       f"{y.id}~{x.id}", trend_model=False)


def slope_covariance(series: Sequence[CharacteristicSeries], bandwidth: int | None = None):
    """Trend slopes of aligned series and their joint HAC covariance."""
    check_aligned(series)
    x = series[0].t
    Y = np.column_stack([s.values for s in series])
    T = Y.shape[0]
    bw = newey_west_bandwidth(T) if bandwidth is None else int(bandwidth)
    xc = x - x.mean()
    a = xc / float(xc @ xc)
    Yc = Y - Y.mean(axis=0)
    betas = a @ Yc
    resid = Yc - np.outer(xc, betas)
    V = T * hac_variance(a[:, None] * resid, bw)
    return betas, V, bw


def wald_equal_slopes(betas, V, T: int, bandwidth: int, inference: str, label: str,
                      fixed_b_ok: bool = True) -> WaldResult:
    m = betas.size
    if m < 2:
        raise ValueError("need at least two slopes")
    R = np.eye(m)[:-1] - np.eye(m)[1:]
    d = R @ betas
    C = R @ V @ R.T
    evals, evecs = np.linalg.eigh(C)
    scale = max(float(np.max(np.abs(np.diag(V)))), np.finfo(float).tiny)
    keep = evals > 1e-12 * scale
    proj = evecs.T @ d
    if not np.all(keep):
        if np.any(np.abs(proj[~keep]) > 1e-8 * (np.max(np.abs(betas)) + np.finfo(float).tiny)):
            raise np.linalg.LinAlgError(
                f"{label}: slope-difference covariance is rank deficient "
                f"({int(keep.sum())} of {m - 1}) but the slopes differ"
            )
    stat = float(np.sum(proj[keep] ** 2 / evals[keep]))
    q = int(keep.sum())
    if q == 0:
        return WaldResult(0.0, m - 1, 1.0, label, tuple(map(float, betas)), inference)
    if inference == "fixed-b" and fixed_b_ok:
        p = fixedb.wald_pvalue(stat, T, bandwidth, q)
    else:
        p = float(stats.chi2.sf(stat, q))
    return WaldResult(stat, q, p, label, tuple(map(float, betas)), inference)


def multi_trend_wald(
    series: Sequence[CharacteristicSeries], bandwidth: int | None = None,
    inference: str = "fixed-b", label: str | None = None,
) -> WaldResult:
    """Wald test that all trend slopes are equal (m - 1 restrictions)."""
    if len(series) < 2:
        raise ValueError("co-trending needs at least two series")
    if inference not in INFERENCE:
        raise ValueError(f"inference must be one of {INFERENCE}")
    betas, V, bw = slope_covariance(series, bandwidth)
    label = label or "=".join(s.id for s in series)
    gapless = bool(np.all(np.diff(series[0].years) == 1))
    return wald_equal_slopes(betas, V, len(series[0]), bw, inference, label, fixed_b_ok=gapless)
