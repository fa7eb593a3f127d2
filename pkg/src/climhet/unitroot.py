"""Augmented Dickey-Fuller unit-root test with SBIC lag selection."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from statsmodels.tsa.adfvalues import mackinnoncrit, mackinnonp

from .distributions import CharacteristicSeries

DETERMINISTICS = {"c": 1, "ct": 2}


@dataclass(frozen=True)
class AdfResult:
    statistic: float
    lags: int
    nobs: int
    p_value: float
    critical_5pct: float
    regression: str
    name: str = ""

    @property
    def rejects_unit_root(self) -> bool:
        return self.statistic < self.critical_5pct


def _design(y: np.ndarray, lags: int, maxlag: int, regression: str, full_sample: bool):
    dy = np.diff(y)
    start = lags if full_sample else maxlag
    n = dy.size - start
    cols = [y[start:-1]]
    cols += [dy[start - i:dy.size - i] for i in range(1, lags + 1)]
    cols.append(np.ones(n))
    if regression == "ct":
        cols.append(np.arange(start + 1, start + n + 1, dtype=float))
    return np.column_stack(cols), dy[start:]


def _ols(X, z):
    coef, *_ = np.linalg.lstsq(X, z, rcond=None)
    resid = z - X @ coef
    return coef, float(resid @ resid)


def default_maxlag(T: int) -> int:
    """Schwert's rule, 12 (T/100)^(1/4)."""
    return int(math.ceil(12.0 * (T / 100.0) ** 0.25))


def adf_test(series, max_lags: int | None = None, regression: str = "c") -> AdfResult:
    """ADF test of a unit root.

    Lags 0..max_lags are compared by SBIC on a common estimation sample;
    the chosen model is then re-estimated on all usable observations.
    ``regression`` is "c" (constant) or "ct" (constant and trend).
    """
    if regression not in DETERMINISTICS:
        raise ValueError(f"regression must be one of {sorted(DETERMINISTICS)}")
    y = np.asarray(series.values if isinstance(series, CharacteristicSeries) else series, dtype=float)
    T = y.size
    if T < 20:
        raise ValueError(f"ADF needs at least 20 observations, got {T}")
    maxlag = default_maxlag(T) if max_lags is None else int(max_lags)
    k_det = DETERMINISTICS[regression]
    if maxlag < 0 or T - 1 - maxlag < maxlag + k_det + 2:
        raise ValueError(f"series of length {T} too short for {maxlag} lags")

    best_lag, best_bic = 0, math.inf
    for p in range(maxlag + 1):
        X, z = _design(y, p, maxlag, regression, full_sample=False)
        _, ssr = _ols(X, z)
        n = z.size
        bic = n * math.log(ssr / n) + X.shape[1] * math.log(n)
        if bic < best_bic - 1e-12:
            best_lag, best_bic = p, bic

    X, z = _design(y, best_lag, maxlag, regression, full_sample=True)
    coef, ssr = _ols(X, z)
    n, k = X.shape
    sigma2 = ssr / (n - k)
    cov = sigma2 * np.linalg.inv(X.T @ X)
    stat = float(coef[0] / math.sqrt(cov[0, 0]))
    crit = float(mackinnoncrit(N=1, regression=regression, nobs=n)[1])
    return AdfResult(
        stat, best_lag, n, float(mackinnonp(stat, regression=regression, N=1)), crit, regression,
        name=getattr(series, "id", ""),
    )
