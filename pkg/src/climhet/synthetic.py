"""Synthetic temperature panels with controlled location and dispersion trends.

Year t (t = 1..T) draws n values
    x = base + location_slope * t + shock_t + (1 + scale_slope * t) * spread * z,
with z iid standard normal and shock_t a common N(0, shock_sd^2) year effect.
A negative ``scale_slope`` makes the lower quantiles trend faster (W2), a
positive one the upper quantiles (W3).
"""
from __future__ import annotations

import csv
import datetime as dt
from pathlib import Path

import numpy as np

from .ingest import AnnualSample


def synthetic_samples(
    T: int = 70, n: int = 360, location_slope: float = 0.02, scale_slope: float = 0.0,
    shock_sd: float = 0.3, spread: float = 1.0, base: float = 15.0,
    start_year: int = 1950, seed=0,
) -> dict[int, AnnualSample]:
    rng = np.random.default_rng(seed)
    t = np.arange(1, T + 1, dtype=float)
    scale = spread * (1.0 + scale_slope * t)
    if np.any(scale <= 0):
        raise ValueError("scale_slope drives the spread to zero within the sample")
    shocks = rng.normal(0.0, shock_sd, T)
    z = rng.standard_normal((T, n))
    values = base + (location_slope * t + shocks)[:, None] + scale[:, None] * z
    return {start_year + i: AnnualSample(start_year + i, values[i]) for i in range(T)}


def write_station_file(
    path: str | Path, start_year: int = 1950, end_year: int = 2019, n_stations: int = 12,
    location_slope: float = 0.02, scale_slope: float = 0.0, seed=0,
    missing_months: int = 0, bad_rows: int = 0, single_station: bool = False,
) -> Path:
    """Write an AEMET-style daily file (station,date,tmin,tmax,tavg).

    Each station has its own climate offset and a seasonal cycle; station
    annual anomalies follow the panel model above. ``missing_months`` drops
    that many whole station-months (from the first station), ``bad_rows``
    appends rows with an invalid date.
    """
    rng = np.random.default_rng(seed)
    path = Path(path)
    stations = ["S001"] if single_station else [f"S{i + 1:03d}" for i in range(n_stations)]
    offsets = rng.normal(14.0, 3.0, len(stations))
    dropped = set()
    for k in range(missing_months):
        dropped.add((stations[0], start_year + 3 + k, 1 + k % 12))
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["station_id", "date", "tmin", "tmax", "tavg"])
        day = dt.timedelta(days=1)
        for s, offset in zip(stations, offsets):
            amplitude = rng.uniform(6.0, 10.0)
            for year in range(start_year, end_year + 1):
                t = year - start_year + 1
                scale = 1.0 + scale_slope * t
                shock = rng.normal(0.0, 0.3)
                date = dt.date(year, 1, 1)
                while date.year == year:
                    if (s, year, date.month) not in dropped:
                        doy = date.timetuple().tm_yday
                        season = -amplitude * np.cos(2 * np.pi * (doy - 15) / 365.25)
                        tavg = offset + location_slope * t + shock + scale * (season + rng.normal(0, 2.0))
                        half = abs(rng.normal(5.0, 1.0))
                        writer.writerow([s, date.isoformat(), f"{tavg - half:.2f}",
                                         f"{tavg + half:.2f}", f"{tavg:.2f}"])
                    date += day
        for k in range(bad_rows):
            writer.writerow([stations[0], f"{start_year}-02-30", "1.0", "2.0", "1.5"])
    return path
