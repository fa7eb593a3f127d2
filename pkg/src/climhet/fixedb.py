"""Fixed-b reference distributions for HAC tests on linear trend slopes.

With a Bartlett kernel whose bandwidth is a non-negligible fraction of the
sample, the HAC t- and Wald statistics are far from their normal and
chi-square limits at climate-record lengths (T around 50-100). The null
distribution of the statistic for the regression on (1, t) is pivotal: it
depends only on T, the bandwidth and the number of restrictions q. It is
simulated here under iid Gaussian errors, at the sample's own T and
bandwidth, and cached.
"""
from __future__ import annotations

from functools import lru_cache

import numpy as np

REPS = 20_000
SEED = 20220710
_CHUNK = 2_000


def trend_weights(T: int) -> tuple[np.ndarray, np.ndarray]:
    """Slope weights ``a`` (beta_hat = a @ y) and the hat projector for (1, t)."""
    t = np.arange(1, T + 1, dtype=float)
    X = np.column_stack([np.ones(T), t])
    P = np.linalg.solve(X.T @ X, X.T)
    return P[1], X @ P


def _bartlett_sum(V: np.ndarray, bandwidth: int) -> np.ndarray:
    # V has shape (reps, T, q); returns (reps, q, q) sum-form HAC matrices.
    S = np.einsum("rti,rtj->rij", V, V)
    for j in range(1, bandwidth + 1):
        G = np.einsum("rti,rtj->rij", V[:, j:], V[:, :-j])
        S += (1.0 - j / (bandwidth + 1.0)) * (G + G.transpose(0, 2, 1))
    return S


@lru_cache(maxsize=128)
def null_draws(T: int, bandwidth: int, q: int, reps: int = REPS) -> np.ndarray:
    """Sorted draws of the Wald statistic for q equal-slope restrictions.

    For q = 1 the draws are squared t-statistics.
    """
    a, H = trend_weights(T)
    rng = np.random.default_rng(np.random.SeedSequence(SEED, spawn_key=(T, bandwidth, q)))
    out = []
    for start in range(0, reps, _CHUNK):
        n = min(_CHUNK, reps - start)
        E = rng.standard_normal((n, T, q))
        slopes = np.einsum("t,rti->ri", a, E)
        U = E - np.einsum("st,rti->rsi", H, E)
        S = _bartlett_sum(U * a[None, :, None], bandwidth)
        out.append(np.einsum("ri,ri->r", slopes, np.linalg.solve(S, slopes[..., None])[..., 0]))
    draws = np.sort(np.concatenate(out))
    draws.setflags(write=False)
    return draws


def wald_pvalue(statistic: float, T: int, bandwidth: int, q: int) -> float:
    draws = null_draws(T, bandwidth, q)
    exceed = draws.size - np.searchsorted(draws, statistic, side="left")
    return float((1 + exceed) / (draws.size + 1))


def t_pvalues(t_stat: float, T: int, bandwidth: int) -> tuple[float, float]:
    """Two-sided and upper one-sided p-values of a trend-slope t-statistic."""
    if np.isinf(t_stat):
        return 0.0, (0.0 if t_stat > 0 else 1.0)
    two = min(1.0, wald_pvalue(t_stat * t_stat, T, bandwidth, 1))
    upper = two / 2 if t_stat >= 0 else 1.0 - two / 2
    return two, upper
