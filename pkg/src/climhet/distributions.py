"""Distributional characteristics of annual samples, stacked into time series."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DataError
from .ingest import AnnualSample

QUANTILE_LEVELS = {
    "q05": 0.05, "q10": 0.10, "q20": 0.20, "q30": 0.30, "q40": 0.40, "q50": 0.50,
    "q60": 0.60, "q70": 0.70, "q80": 0.80, "q90": 0.90, "q95": 0.95,
}
CHARACTERISTICS = ("mean", "max", "min", "std", "iqr", "rank", "kur", "skw", *QUANTILE_LEVELS)
MIN_YEARS = 10


def _as_values(sample) -> np.ndarray:
    values = sample.values if isinstance(sample, AnnualSample) else np.asarray(sample, dtype=float)
    if values.size == 0:
        raise DataError("empty sample")
    return values


def _interpolate(sorted_values: np.ndarray, taus: np.ndarray) -> np.ndarray:
    # Order statistic at position h = (n - 1) * tau + 1 (1-based), linear in between.
    n = sorted_values.size
    h = (n - 1) * taus
    lo = np.floor(h).astype(int)
    hi = np.minimum(lo + 1, n - 1)
    frac = h - lo
    return sorted_values[lo] + frac * (sorted_values[hi] - sorted_values[lo])


def quantile(sample, tau: float) -> float:
    """Empirical quantile by linear interpolation between order statistics."""
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must lie in (0, 1), got {tau}")
    values = np.sort(_as_values(sample))
    return float(_interpolate(values, np.array([tau]))[0])


def quantiles(sample, taus: Sequence[float]) -> np.ndarray:
    taus = np.asarray(taus, dtype=float)
    if np.any((taus <= 0) | (taus >= 1)):
        raise ValueError("every tau must lie in (0, 1)")
    return _interpolate(np.sort(_as_values(sample)), taus)


def characteristics(sample) -> dict[str, float]:
    """All characteristics of one annual sample.

    std uses the n-1 denominator; skw and kur use n-denominator central
    moments and kur is excess kurtosis. A constant sample has zero spread,
    and its skw and kur are reported as 0.
    """
    x = _as_values(sample)
    if x.size < 4:
        raise DataError(f"need at least 4 observations, got {x.size}")
    s = np.sort(x)
    mean = float(np.mean(s))
    dev = s - mean
    m2 = float(np.mean(dev**2))
    if m2 > 0:
        z = dev / np.sqrt(m2)
        skw = float(np.mean(z**3))
        kur = float(np.mean(z**4)) - 3.0
    else:
        skw = kur = 0.0
    taus = np.array([0.25, 0.75, *QUANTILE_LEVELS.values()])
    q = _interpolate(s, taus)
    out = {
        "mean": mean,
        "max": float(s[-1]),
        "min": float(s[0]),
        "std": float(np.sqrt(m2 * s.size / (s.size - 1))),
        "iqr": float(q[1] - q[0]),
        "rank": float(s[-1] - s[0]),
        "kur": kur,
        "skw": skw,
    }
    out.update({name: float(v) for name, v in zip(QUANTILE_LEVELS, q[2:])})
    return out


@dataclass(frozen=True)
class CharacteristicSeries:
    """One characteristic observed over years. ``gaps`` lists missing years."""

    id: str
    years: np.ndarray
    values: np.ndarray
    gaps: tuple[int, ...] = field(default=())

    def __post_init__(self):
        years = np.array(self.years, dtype=int)
        values = np.array(self.values, dtype=float)
        if years.shape != values.shape or years.ndim != 1:
            raise ValueError("years and values must be 1-d and of equal length")
        if years.size > 1 and np.any(np.diff(years) <= 0):
            raise ValueError("years must be strictly increasing")
        if not np.all(np.isfinite(values)):
            raise ValueError(f"series {self.id!r} has non-finite values")
        gaps = tuple(sorted(set(range(years[0], years[-1] + 1)) - set(years.tolist()))) if years.size else ()
        years.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "years", years)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "gaps", gaps)

    def __len__(self) -> int:
        return int(self.values.size)

    @property
    def t(self) -> np.ndarray:
        """Trend regressor: 1 for the first year, counting calendar years."""
        return (self.years - self.years[0] + 1).astype(float)

    def between(self, start: int, end: int) -> "CharacteristicSeries":
        mask = (self.years >= start) & (self.years <= end)
        return CharacteristicSeries(self.id, self.years[mask], self.values[mask])

    def __sub__(self, other: "CharacteristicSeries") -> "CharacteristicSeries":
        check_aligned([self, other])
        return CharacteristicSeries(f"{self.id}-{other.id}", self.years, self.values - other.values)


def check_aligned(series: Sequence[CharacteristicSeries]) -> None:
    first = series[0].years
    for s in series[1:]:
        if s.years.shape != first.shape or np.any(s.years != first):
            raise ValueError(f"series {s.id!r} is not aligned with {series[0].id!r}")


def characteristic_series(samples: Mapping[int, AnnualSample]) -> dict[str, CharacteristicSeries]:
    """Stack per-year characteristics into one series per characteristic."""
    years = sorted(samples)
    if len(years) < MIN_YEARS:
        raise DataError(f"need at least {MIN_YEARS} years, got {len(years)}")
    rows = [characteristics(samples[y]) for y in years]
    return {
        cid: CharacteristicSeries(cid, np.array(years), np.array([r[cid] for r in rows]))
        for cid in CHARACTERISTICS
    }


def quantile_series(samples: Mapping[int, AnnualSample], tau: float, name: str | None = None) -> CharacteristicSeries:
    years = sorted(samples)
    return CharacteristicSeries(
        name or f"q{tau:g}", np.array(years), np.array([quantile(samples[y], tau) for y in years])
    )


def write_matrix(series: Mapping[str, CharacteristicSeries], path: str | Path) -> None:
    """Rows are years, columns the characteristics in canonical order."""
    ids = [c for c in CHARACTERISTICS if c in series] + sorted(set(series) - set(CHARACTERISTICS))
    years = series[ids[0]].years
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["year", *ids])
        for i, year in enumerate(years):
            writer.writerow([int(year), *(repr(float(series[c].values[i])) for c in ids)])


def read_matrix(path: str | Path) -> dict[str, CharacteristicSeries]:
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if not header or header[0] != "year":
            raise DataError(f"{path}: first column must be 'year'")
        rows = [row for row in reader if row]
    years = np.array([int(r[0]) for r in rows])
    return {
        cid: CharacteristicSeries(cid, years, np.array([float(r[j]) for r in rows]))
        for j, cid in enumerate(header[1:], start=1)
    }


def write_samples(samples: Mapping[int, AnnualSample], path: str | Path) -> None:
    """Long-format export of raw annual samples (for external density plots)."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["year", "value"])
        for year in sorted(samples):
            for v in samples[year].values:
                writer.writerow([year, repr(float(v))])


def read_samples(path: str | Path) -> dict[int, AnnualSample]:
    values: dict[int, list[float]] = {}
    with Path(path).open(newline="", encoding="utf-8") as handle:
        reader = csv.reader(handle)
        if next(reader, None) != ["year", "value"]:
            raise DataError(f"{path}: expected header year,value")
        for row in reader:
            if row:
                values.setdefault(int(row[0]), []).append(float(row[1]))
    return {y: AnnualSample(y, np.array(v)) for y, v in sorted(values.items())}
