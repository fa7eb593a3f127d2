"""Data-generating processes for characteristic series and Monte Carlo checks
of how the trend-slope estimator and its HAC t-statistic scale with T."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy.signal import lfilter

from .distributions import CharacteristicSeries
from .regression import newey_west_bandwidth, trend_test

KINDS = ("iid", "ar1", "polynomial", "random-walk", "fractional", "near-unit-root", "local-level")
PERSISTENT = ("random-walk", "fractional", "near-unit-root", "local-level")


@dataclass(frozen=True)
class DgpSpec:
    """C_t = mu + z_t (plus a polynomial trend for kind="polynomial").

    Parameters used per kind: ar1 -> rho; polynomial -> coefficients
    (beta_1..beta_k of t, ..., t^k, noise iid); fractional -> d, the MA
    expansion of (1-L)^-d started at zero; near-unit-root -> c, with
    rho_T = 1 - c/T; local-level -> q, random walk plus independent noise of
    variance q sigma^2.
    """

    kind: str
    T: int
    sigma: float = 1.0
    seed: int = 0
    mu: float = 0.0
    rho: float = 0.0
    d: float = 1.0
    c: float = 0.0
    q: float = 0.0
    coefficients: tuple[float, ...] = field(default=())
    innovations: str = "normal"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown DGP kind {self.kind!r}; expected one of {KINDS}")
        if self.T < 3:
            raise ValueError("T must be at least 3")
        if self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if self.kind == "fractional" and not 0.5 < self.d < 1.5:
            raise ValueError("fractional d must lie in (1/2, 3/2)")
        if self.kind == "local-level" and self.q < 0:
            raise ValueError("local-level q must be non-negative")
        if self.kind == "ar1" and not -1 < self.rho < 1:
            raise ValueError("ar1 needs |rho| < 1")
        if self.kind == "polynomial" and not self.coefficients:
            raise ValueError("polynomial kind needs coefficients")
        if self.innovations not in ("normal", "student-t5", "uniform"):
            raise ValueError(f"unknown innovation law {self.innovations!r}")


def _innovations(rng: np.random.Generator, law: str, n: int) -> np.ndarray:
    if law == "normal":
        return rng.standard_normal(n)
    if law == "student-t5":
        return rng.standard_t(5, n) / np.sqrt(5 / 3)
    return rng.uniform(-np.sqrt(3), np.sqrt(3), n)


def fractional_weights(d: float, n: int) -> np.ndarray:
    """First n MA coefficients of (1 - L)^-d: psi_k = psi_{k-1} (k - 1 + d) / k."""
    k = np.arange(1, n)
    return np.concatenate([[1.0], np.cumprod((k - 1 + d) / k)])


def _path(spec: DgpSpec, rng: np.random.Generator) -> np.ndarray:
    T, s = spec.T, spec.sigma
    eps = s * _innovations(rng, spec.innovations, T)
    kind = spec.kind
    if kind == "iid":
        z = eps
    elif kind == "ar1":
        z = lfilter([1.0], [1.0, -spec.rho], eps)
    elif kind == "polynomial":
        t = np.arange(1, T + 1, dtype=float)
        z = sum(b * t ** (i + 1) for i, b in enumerate(spec.coefficients)) + eps
    elif kind == "random-walk":
        z = np.cumsum(eps)
    elif kind == "fractional":
        # Started at zero: z_t = sum_{k<t} psi_k eps_{t-k}, so d = 1 is a random walk.
        psi = fractional_weights(spec.d, T)
        n = 1 << (2 * T - 1).bit_length()
        z = np.fft.irfft(np.fft.rfft(eps, n) * np.fft.rfft(psi, n), n)[:T]
    elif kind == "near-unit-root":
        z = lfilter([1.0], [1.0, -(1.0 - spec.c / T)], eps)
    else:  # local-level
        noise = np.sqrt(spec.q) * s * _innovations(rng, spec.innovations, T)
        z = np.cumsum(eps) + noise
    return spec.mu + z


def generate(spec: DgpSpec) -> CharacteristicSeries:
    """One reproducible draw of the process, indexed by years 1..T."""
    rng = np.random.default_rng(spec.seed)
    return CharacteristicSeries(spec.kind, np.arange(1, spec.T + 1), _path(spec, rng))


def replicate(spec: DgpSpec, reps: int):
    """Yield ``reps`` independent paths; replication r is seeded from (seed, T, r)."""
    for r in range(reps):
        ss = np.random.SeedSequence(spec.seed, spawn_key=(spec.T, r))
        yield _path(spec, np.random.default_rng(ss))


def expected_exponent(spec: DgpSpec, statistic: str) -> float:
    """Growth exponent of median |beta_hat| or |t| in T for the worked cases."""
    kind = spec.kind
    if statistic == "beta":
        if kind in ("iid", "ar1"):
            return -1.5
        if kind in ("random-walk", "near-unit-root", "local-level"):
            return -0.5
        if kind == "fractional":
            return spec.d - 1.5
        k = max(i + 1 for i, b in enumerate(spec.coefficients) if b != 0)
        return float(k - 1)
    if statistic == "t":
        if kind in ("iid", "ar1"):
            return 0.0
        if kind in PERSISTENT:
            return 0.5
    raise ValueError(f"no worked rate for {statistic!r} under {kind!r}")


@dataclass(frozen=True)
class RateCheckResult:
    statistic: str
    kind: str
    lengths: tuple[int, ...]
    medians: tuple[float, ...]
    exponent: float
    target: float
    tolerance: float
    passed: bool
    reps: int
    bandwidth: int | None = None


def _rate_check(spec, lengths, reps, statistic, target, tolerance, bandwidth) -> RateCheckResult:
    lengths = tuple(int(T) for T in lengths)
    if len(lengths) < 3 or any(b <= a for a, b in zip(lengths, lengths[1:])):
        raise ValueError("need at least 3 strictly increasing lengths")
    if reps < 200:
        raise ValueError("rate checks need at least 200 replications per length")
    if target is None:
        target = expected_exponent(spec, statistic)
    if bandwidth is None and statistic == "t":
        # A bandwidth growing with T would shrink the |t| exponent below 1/2.
        bandwidth = newey_west_bandwidth(lengths[0])
    medians = []
    for T in lengths:
        s = replace(spec, T=T)
        values = []
        for path in replicate(s, reps):
            res = trend_test(path, bandwidth=bandwidth, inference="normal")
            values.append(abs(res.beta if statistic == "beta" else res.t_stat))
        medians.append(float(np.median(values)))
    exponent = float(np.polyfit(np.log(lengths), np.log(medians), 1)[0])
    return RateCheckResult(
        statistic, spec.kind, lengths, tuple(medians), exponent, float(target), tolerance,
        abs(exponent - target) <= tolerance, reps, bandwidth,
    )


def rate_check_beta(spec: DgpSpec, lengths: Sequence[int], reps: int = 500,
                    target: float | None = None, tolerance: float = 0.15,
                    bandwidth: int | None = None) -> RateCheckResult:
    """Log-log slope of median |beta_hat| against T."""
    return _rate_check(spec, lengths, reps, "beta", target, tolerance, bandwidth)


def rate_check_tstat(spec: DgpSpec, lengths: Sequence[int], reps: int = 500,
                     target: float | None = None, tolerance: float = 0.15,
                     bandwidth: int | None = None) -> RateCheckResult:
    """Log-log slope of median |t_(beta=0)| against T.

    The HAC bandwidth is held fixed across lengths; by default it is the
    Newey-West rule evaluated at the shortest length.
    """
    return _rate_check(spec, lengths, reps, "t", target, tolerance, bandwidth)


def rejection_rate(spec: DgpSpec, reps: int, level: float = 0.05, inference: str = "fixed-b") -> float:
    """Share of replications where the two-sided trend test rejects at ``level``."""
    hits = sum(trend_test(path, inference=inference).p_value < level for path in replicate(spec, reps))
    return hits / reps
