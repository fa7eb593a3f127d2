"""Decision procedures built on trend regressions: acceleration, amplification,
warming dominance between two regions, and the W0-W3 warming typology."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np
from scipy import stats

from .distributions import CharacteristicSeries, check_aligned
from .regression import (
    TrendResult, WaldResult, _fit, _is_exact_fit, covariate_regression,
    hac_variance, newey_west_bandwidth, trend_test,
)

DEFAULT_LEVEL = 0.10
DEFAULT_TAUS = (0.05, 0.10, 0.20, 0.30, 0.40, 0.50, 0.60, 0.70, 0.80, 0.90, 0.95)
MIN_LATE_YEARS = 10
ACCELERATION_MODES = ("full", "prefix")


@dataclass(frozen=True)
class AccelerationResult:
    """``split_year`` is the first year of the late segment."""

    name: str
    beta_full: float
    beta_late: float
    t_diff: float
    p_one_sided: float
    split_year: int
    se_diff: float
    mode: str = "full"
    bandwidth: int = 0
    degenerate: bool = False


def acceleration_test(
    series: CharacteristicSeries, split_year: int,
    bandwidth: int | None = None, mode: str = "full",
) -> AccelerationResult:
    """Test beta_late = beta_early against beta_late > beta_early.

    The early slope comes from the whole sample (``mode="full"``) or from
    the years before ``split_year`` (``mode="prefix"``); the late slope from
    ``split_year`` onward. Both slopes are linear in the data, so their
    joint HAC covariance comes from stacking the two score sequences.
    """
    if mode not in ACCELERATION_MODES:
        raise ValueError(f"mode must be one of {ACCELERATION_MODES}")
    years = series.years
    if not years[0] < split_year <= years[-1]:
        raise ValueError(f"split year {split_year} not inside {years[0]}-{years[-1]}")
    late = years >= split_year
    if late.sum() < MIN_LATE_YEARS:
        raise ValueError(f"late segment has {late.sum()} years, need {MIN_LATE_YEARS}")
    early = np.ones_like(late) if mode == "full" else ~late
    if early.sum() < 3:
        raise ValueError("early segment too short")

    t, y = series.t, np.asarray(series.values, dtype=float)
    T = y.size
    bw = newey_west_bandwidth(T) if bandwidth is None else int(bandwidth)
    scores = np.zeros((T, 2))
    betas, exact = [], True
    for col, mask in enumerate((early, late)):
        _, beta, resid, a = _fit(t[mask], y[mask])
        scores[mask, col] = a * resid
        betas.append(beta)
        exact = exact and _is_exact_fit(y[mask], resid)
    diff = betas[1] - betas[0]
    if exact:
        tiny = 1e-10 * (abs(betas[0]) + abs(betas[1]) + np.finfo(float).tiny)
        t_diff = 0.0 if abs(diff) <= tiny else math.copysign(math.inf, diff)
        se = 0.0
    else:
        V = T * hac_variance(scores, bw)
        se = math.sqrt(max(V[0, 0] + V[1, 1] - 2 * V[0, 1], 0.0))
        t_diff = diff / se if se > 0 else math.copysign(math.inf, diff) if diff else 0.0
    return AccelerationResult(
        series.id, betas[0], betas[1], float(t_diff), float(stats.norm.sf(t_diff)),
        int(split_year), se, mode, bw, exact,
    )


@dataclass(frozen=True)
class AmplificationResult:
    characteristic: str
    slope_on_mean: float
    se_hac: float
    t_stat: float
    p_one_sided: float
    mode: str


def amplification_test(
    series: CharacteristicSeries, mean_series: CharacteristicSeries,
    mode: str = "inner", bandwidth: int | None = None,
) -> AmplificationResult:
    """One-sided HAC test of slope = 1 against slope > 1 in C_t = b0 + b1 mean_t.

    ``mode`` records whether the mean comes from the same distribution
    ("inner") or from another region ("outer").
    """
    if mode not in ("inner", "outer"):
        raise ValueError("mode must be 'inner' or 'outer'")
    res = covariate_regression(series, mean_series, bandwidth=bandwidth, null=1.0)
    return AmplificationResult(series.id, res.beta, res.se_hac, res.t_stat, res.p_greater, mode)


@dataclass(frozen=True)
class DominanceRow:
    tau: float
    beta: float
    t_stat: float
    p_value: float


@dataclass(frozen=True)
class DominanceResult:
    """Per-quantile trends of q_tau(A) - q_tau(B) and the verdict.

    Verdicts: A-dominates, B-dominates, none, and for significant trends of
    both signs: partial-A-upper (A ahead in the upper quantiles, B in the
    lower), partial-A-lower (the mirror case), or mixed (signs interleave).
    """

    rows: tuple[DominanceRow, ...]
    verdict: str
    level: float
    a_taus: tuple[float, ...] = ()
    b_taus: tuple[float, ...] = ()


def dominance_verdict(rows: Sequence[DominanceRow], level: float) -> tuple[str, tuple, tuple]:
    pos = tuple(r.tau for r in rows if r.p_value < level and r.beta > 0)
    neg = tuple(r.tau for r in rows if r.p_value < level and r.beta < 0)
    if not pos and not neg:
        verdict = "none"
    elif not neg:
        verdict = "A-dominates"
    elif not pos:
        verdict = "B-dominates"
    elif min(pos) > max(neg):
        verdict = "partial-A-upper"
    elif max(pos) < min(neg):
        verdict = "partial-A-lower"
    else:
        verdict = "mixed"
    return verdict, pos, neg


def dominance_test(
    quantiles_a: Sequence[CharacteristicSeries], quantiles_b: Sequence[CharacteristicSeries],
    taus: Sequence[float] = DEFAULT_TAUS, level: float = DEFAULT_LEVEL,
    bandwidth: int | None = None, inference: str = "fixed-b",
) -> DominanceResult:
    """Trend test on q_tau(A) - q_tau(B) for every tau of the grid.

    Insignificant negative slopes do not break dominance; significance is
    two-sided at ``level``.
    """
    taus = tuple(float(x) for x in taus)
    if not (len(quantiles_a) == len(quantiles_b) == len(taus)):
        raise ValueError("quantile grids of A and B do not match the tau grid")
    if any(b <= a for a, b in zip(taus, taus[1:])):
        raise ValueError("taus must be strictly increasing")
    rows = []
    for tau, qa, qb in zip(taus, quantiles_a, quantiles_b):
        check_aligned([qa, qb])
        res = trend_test(qa - qb, bandwidth=bandwidth, inference=inference)
        rows.append(DominanceRow(tau, res.beta, res.t_stat, res.p_value))
    verdict, pos, neg = dominance_verdict(rows, level)
    return DominanceResult(tuple(rows), verdict, level, pos, neg)


@dataclass(frozen=True)
class TypologyVerdict:
    label: str
    level: float
    low_confidence: bool
    reason: str
    evidence: dict = field(default_factory=dict, compare=False)


def classify_typology(
    quantile_trends: Sequence[TrendResult],
    cotrend: Mapping[str, WaldResult],
    spacings: Mapping[str, TrendResult],
    level: float = DEFAULT_LEVEL,
) -> TypologyVerdict:
    """Assign W0-W3 from quantile trend tests, co-trending and spacing tests.

    ``cotrend`` must hold the all-quantiles Wald test under key "all";
    ``spacings`` must hold "iqr" and may hold "q95-q05".

    W0: no quantile trend is significant. W1: the all-quantiles equal-slope
    test and the iqr trend test both fail to reject. Otherwise the sign of
    the significant dispersion trends decides: negative gives W2, positive
    W3. When no dispersion trend is significant, or iqr and q95-q05 disagree,
    the spacing with the larger |t| sets the sign and the verdict is flagged
    low confidence.
    """
    evidence = dict(quantile_trends=list(quantile_trends), cotrend=dict(cotrend),
                    spacings=dict(spacings), level=level)
    if "all" not in cotrend or "iqr" not in spacings:
        raise ValueError("need cotrend['all'] and spacings['iqr']")
    if not any(r.rejects(level) for r in quantile_trends):
        return TypologyVerdict("W0", level, False, "no quantile trend", evidence)

    wald_rejects = cotrend["all"].p_value < level
    iqr = spacings["iqr"]
    if not wald_rejects and iqr.significant_sign(level) == 0:
        return TypologyVerdict("W1", level, False, "equal quantile slopes, no iqr trend", evidence)

    tests = [spacings[k] for k in ("iqr", "q95-q05") if k in spacings]
    signs = {r.significant_sign(level) for r in tests} - {0}
    if len(signs) == 1:
        sign = signs.pop()
        return TypologyVerdict("W2" if sign < 0 else "W3", level, False,
                               "significant dispersion trend", evidence)
    strongest = max(tests, key=lambda r: abs(r.t_stat))
    if strongest.beta == 0:
        return TypologyVerdict("W1", level, True, "dispersion trend exactly zero", evidence)
    reason = "conflicting dispersion trends" if signs else "slopes differ but no dispersion trend"
    return TypologyVerdict("W2" if strongest.beta < 0 else "W3", level, True, reason, evidence)
