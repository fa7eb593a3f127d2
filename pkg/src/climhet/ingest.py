"""Station file parsing and assembly of annual temperature samples.

Two assembly modes are supported. In cross-sectional mode every station
contributes one monthly mean per calendar month, and the sample of year t
is the set of station-month units observed in that year (a balanced panel
keeps the number of units fixed across years). In single-station mode the
sample of year t is the set of daily mean temperatures of one station.
"""
from __future__ import annotations

import calendar
import csv
import datetime as dt
import logging
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from statistics import fmean
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DataError, IngestError, PanelError

logger = logging.getLogger(__name__)

CROSS_SECTIONAL = "cross-sectional-monthly"
SINGLE_STATION = "single-station-daily"
MODES = (CROSS_SECTIONAL, SINGLE_STATION)

# strict: a station must report all 12 months in every year.
# per-month: each (station, calendar month) pair is kept if present in every year.
PANEL_RULES = ("strict", "per-month")

FIELDS = ("station_id", "date", "tmin", "tmax", "tavg")
MAX_REJECT_FRACTION = 0.5


@dataclass(frozen=True)
class StationRecord:
    station_id: str
    date: dt.date
    tmin: float | None
    tmax: float | None
    tavg: float


@dataclass(frozen=True)
class StationMonthUnit:
    station_id: str
    year: int
    month: int
    value: float
    n_days: int
    n_records: int


@dataclass(frozen=True)
class AnnualSample:
    """All temperature observations that make up one year's distribution."""

    year: int
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 1 or values.size == 0:
            raise DataError(f"annual sample for {self.year} is empty")
        if not np.all(np.isfinite(values)):
            raise DataError(f"annual sample for {self.year} has non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class PanelSpec:
    start_year: int
    end_year: int
    mode: str = CROSS_SECTIONAL
    coverage: float = 0.8
    rule: str = "strict"

    def __post_init__(self):
        if self.start_year >= self.end_year:
            raise ValueError("start_year must be before end_year")
        if self.mode not in MODES:
            raise ValueError(f"unknown mode {self.mode!r}; expected one of {MODES}")
        if self.rule not in PANEL_RULES:
            raise ValueError(f"unknown panel rule {self.rule!r}; expected one of {PANEL_RULES}")
        if not 0.0 < self.coverage <= 1.0:
            raise ValueError("coverage must be in (0, 1]")

    @property
    def years(self) -> range:
        return range(self.start_year, self.end_year + 1)


@dataclass(frozen=True)
class FileFormat:
    """Column layout of a delimited station file.

    ``columns`` maps the logical field names (station_id, date, tmin, tmax,
    tavg) to header names in the file. ``tavg`` may be left out, in which
    case it is derived from tmin and tmax.
    """

    delimiter: str = ","
    columns: Mapping[str, str] = field(default_factory=lambda: {f: f for f in FIELDS})
    date_format: str = "%Y-%m-%d"
    missing: tuple[str, ...] = ("", "NA", "NaN", "nan", "-9999", "-99.9")


@dataclass(frozen=True)
class RejectedRow:
    line: int
    reason: str
    raw: str


@dataclass
class ParseResult:
    records: list[StationRecord]
    rejects: list[RejectedRow]
    n_rows: int


@dataclass
class PanelSelection:
    stations: tuple[str, ...]
    samples: dict[int, AnnualSample]
    units_per_year: int
    used_units: list[StationMonthUnit]


@dataclass
class IngestReport:
    """Row accounting: ``kept + rejected + filtered == rows``."""

    rows: int = 0
    rejected: int = 0
    filtered_coverage: int = 0
    filtered_panel: int = 0
    kept: int = 0

    @property
    def filtered(self) -> int:
        return self.filtered_coverage + self.filtered_panel

    def balanced(self) -> bool:
        return self.kept + self.rejected + self.filtered == self.rows


def _parse_float(text: str, missing: Sequence[str]) -> float | None:
    text = text.strip()
    if text in missing:
        return None
    value = float(text)
    if not np.isfinite(value):
        raise ValueError("non-finite temperature")
    return value


def _parse_row(row: list[str], index: Mapping[str, int], fmt: FileFormat) -> StationRecord:
    station = row[index["station_id"]].strip()
    if not station:
        raise ValueError("missing station id")
    try:
        date = dt.datetime.strptime(row[index["date"]].strip(), fmt.date_format).date()
    except ValueError:
        raise ValueError("invalid date") from None
    temps = {}
    for name in ("tmin", "tmax", "tavg"):
        temps[name] = _parse_float(row[index[name]], fmt.missing) if name in index else None
    tmin, tmax, tavg = temps["tmin"], temps["tmax"], temps["tavg"]
    if tmin is not None and tmax is not None and tmin > tmax:
        raise ValueError("tmin above tmax")
    if tavg is None:
        if tmin is None or tmax is None:
            raise ValueError("no temperature")
        tavg = (tmin + tmax) / 2.0
    elif (tmin is not None and tavg < tmin) or (tmax is not None and tavg > tmax):
        raise ValueError("tavg outside [tmin, tmax]")
    return StationRecord(station, date, tmin, tmax, tavg)


def parse_station_file(path: str | Path, fmt: FileFormat | None = None) -> ParseResult:
    """Parse one delimited station file.

    Malformed rows are returned in ``rejects`` with the 1-based file line
    number and a reason. Raises IngestError if the file cannot be read, the
    header lacks a mapped column, or more than half the rows are rejected.
    """
    fmt = fmt or FileFormat()
    path = Path(path)
    unknown = set(fmt.columns) - set(FIELDS)
    if unknown:
        raise IngestError(f"unknown fields in column map: {sorted(unknown)}")
    for required in ("station_id", "date"):
        if required not in fmt.columns:
            raise IngestError(f"column map lacks required field {required!r}")
    if "tavg" not in fmt.columns and not {"tmin", "tmax"} <= set(fmt.columns):
        raise IngestError("column map needs tavg or both tmin and tmax")
    try:
        handle = path.open(newline="", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot read station file {path}: {exc.strerror}") from exc

    records, rejects = [], []
    n_rows = 0
    with handle:
        reader = csv.reader(handle, delimiter=fmt.delimiter)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestError(f"{path} is empty") from None
        index = {}
        for name, column in fmt.columns.items():
            if column not in header:
                raise IngestError(f"{path}: header lacks column {column!r} (found {header})")
            index[name] = header.index(column)
        for row in reader:
            if not row or all(not cell.strip() for cell in row):
                continue
            n_rows += 1
            line = reader.line_num
            if len(row) != len(header):
                rejects.append(RejectedRow(line, "wrong field count", fmt.delimiter.join(row)))
                continue
            try:
                records.append(_parse_row(row, index, fmt))
            except ValueError as exc:
                rejects.append(RejectedRow(line, str(exc), fmt.delimiter.join(row)))

    if n_rows and len(rejects) > MAX_REJECT_FRACTION * n_rows:
        raise IngestError(
            f"{path}: {len(rejects)} of {n_rows} rows rejected "
            f"(first: line {rejects[0].line}, {rejects[0].reason})"
        )
    if rejects:
        logger.warning("%s: rejected %d of %d rows", path, len(rejects), n_rows)
    return ParseResult(records, rejects, n_rows)


def write_rejects(groups: Iterable[tuple[str, Iterable[RejectedRow]]], path: str | Path) -> None:
    """Write rejected rows of one or more files as source,line,reason,raw."""
    with Path(path).open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["source", "line", "reason", "raw"])
        for source, rejects in groups:
            for r in rejects:
                writer.writerow([source, r.line, r.reason, r.raw])


def _daily_means(records: Iterable[StationRecord]) -> dict[tuple[str, dt.date], tuple[float, int]]:
    """Collapse duplicate (station, date) rows to their mean; order independent."""
    grouped: dict[tuple[str, dt.date], list[float]] = defaultdict(list)
    for rec in records:
        grouped[(rec.station_id, rec.date)].append(rec.tavg)
    return {key: (fmean(vals), len(vals)) for key, vals in grouped.items()}


def build_station_month_units(
    records: Iterable[StationRecord], coverage: float = 0.8
) -> list[StationMonthUnit]:
    """Monthly means of daily tavg for months with enough days reported.

    A month is kept when the number of distinct days with data is at least
    ``coverage`` times the number of days in that month.
    """
    by_month: dict[tuple[str, int, int], list[tuple[float, int]]] = defaultdict(list)
    for (station, date), (value, count) in _daily_means(records).items():
        by_month[(station, date.year, date.month)].append((value, count))

    units = []
    omitted = 0
    for (station, year, month), days in sorted(by_month.items()):
        n_days = len(days)
        if n_days < coverage * calendar.monthrange(year, month)[1]:
            omitted += 1
            continue
        units.append(
            StationMonthUnit(
                station, year, month,
                value=fmean(v for v, _ in days),
                n_days=n_days,
                n_records=sum(c for _, c in days),
            )
        )
    if omitted:
        logger.info("omitted %d station-months below %.0f%% coverage", omitted, 100 * coverage)
    return units


def select_balanced_panel(units: Sequence[StationMonthUnit], spec: PanelSpec) -> PanelSelection:
    """Keep the station-month units present in every year of ``spec``."""
    years = spec.years
    in_range = [u for u in units if spec.start_year <= u.year <= spec.end_year]
    if not in_range:
        raise DataError(f"no station-month units within {spec.start_year}-{spec.end_year}")
    present: dict[tuple[str, int], set[int]] = defaultdict(set)
    for u in in_range:
        present[(u.station_id, u.month)].add(u.year)
    stations = sorted({u.station_id for u in units})

    n_years = len(years)
    if spec.rule == "strict":
        keep_station = {
            s for s in stations
            if all(len(present.get((s, m), ())) == n_years for m in range(1, 13))
        }
        keep_pair = {(s, m) for s in keep_station for m in range(1, 13)}
    else:
        keep_pair = {key for key, yrs in present.items() if len(yrs) == n_years}
        keep_station = {s for s, _ in keep_pair}

    if not keep_pair:
        missing = {
            s: 12 * n_years - sum(len(present.get((s, m), ())) for m in range(1, 13))
            for s in stations
        }
        worst = sorted(missing.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
        named = ", ".join(f"{s} ({k} missing)" for s, k in worst)
        raise PanelError(
            f"no station is complete over {spec.start_year}-{spec.end_year} "
            f"under rule {spec.rule!r}; worst-missing stations: {named}"
        )

    used = sorted(
        (u for u in in_range if (u.station_id, u.month) in keep_pair),
        key=lambda u: (u.year, u.station_id, u.month),
    )
    by_year: dict[int, list[float]] = defaultdict(list)
    for u in used:
        by_year[u.year].append(u.value)
    samples = {y: AnnualSample(y, np.array(by_year[y])) for y in years}
    return PanelSelection(tuple(sorted(keep_station)), samples, len(keep_pair), used)


def assemble_daily_annual_samples(
    records: Iterable[StationRecord], spec: PanelSpec
) -> dict[int, AnnualSample]:
    """One sample of daily tavg values per year for a single station.

    Years with fewer than ``spec.coverage`` of their days reported are dropped.
    """
    daily = _daily_means(records)
    stations = {s for s, _ in daily}
    if len(stations) != 1:
        raise DataError(f"daily mode needs exactly one station, got {len(stations)}")
    by_year: dict[int, list[tuple[dt.date, float]]] = defaultdict(list)
    for (_, date), (value, _) in daily.items():
        if spec.start_year <= date.year <= spec.end_year:
            by_year[date.year].append((date, value))

    samples = {}
    for year in spec.years:
        days = sorted(by_year.get(year, ()))
        if len(days) < spec.coverage * (366 if calendar.isleap(year) else 365):
            logger.warning("dropping %d: %d days reported", year, len(days))
            continue
        samples[year] = AnnualSample(year, np.array([v for _, v in days]))
    if not samples:
        raise DataError(f"no year in {spec.start_year}-{spec.end_year} meets coverage")
    return samples


def build_samples(
    parsed: Sequence[ParseResult], spec: PanelSpec
) -> tuple[dict[int, AnnualSample], IngestReport]:
    """Assemble annual samples from parsed files and account for every row."""
    records = [r for p in parsed for r in p.records]
    report = IngestReport(
        rows=sum(p.n_rows for p in parsed),
        rejected=sum(len(p.rejects) for p in parsed),
    )
    if spec.mode == SINGLE_STATION:
        samples = assemble_daily_annual_samples(records, spec)
        kept_years = set(samples)
        report.kept = sum(1 for r in records if r.date.year in kept_years)
        report.filtered_coverage = sum(
            1 for r in records
            if spec.start_year <= r.date.year <= spec.end_year and r.date.year not in kept_years
        )
        report.filtered_panel = len(records) - report.kept - report.filtered_coverage
        return samples, report

    units = build_station_month_units(records, spec.coverage)
    selection = select_balanced_panel(units, spec)
    in_units = sum(u.n_records for u in units)
    report.kept = sum(u.n_records for u in selection.used_units)
    report.filtered_coverage = len(records) - in_units
    report.filtered_panel = in_units - report.kept
    logger.info(
        "balanced panel: %d stations, %d units per year",
        len(selection.stations), selection.units_per_year,
    )
    return selection.samples, report
