"""End-to-end analysis of one region, optionally against a reference region,
and export of the results as delimited tables."""
from __future__ import annotations

import csv
import dataclasses
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .distributions import (
    CHARACTERISTICS, MIN_YEARS, QUANTILE_LEVELS, CharacteristicSeries,
    characteristic_series, quantile_series, read_matrix,
)
from .errors import DataError
from .ingest import AnnualSample
from .regression import TrendResult, WaldResult, multi_trend_wald, spacing_test, trend_test
from .unitroot import AdfResult, adf_test
from .warming import (
    DEFAULT_LEVEL, DEFAULT_TAUS, MIN_LATE_YEARS, AccelerationResult, AmplificationResult,
    DominanceResult, TypologyVerdict, acceleration_test, amplification_test,
    classify_typology, dominance_test,
)

logger = logging.getLogger(__name__)

# Quantile groups of the co-trending tables, by tau range.
COTREND_GROUPS = {
    "all": lambda tau: True,
    "lower": lambda tau: tau <= 0.30,
    "medium": lambda tau: 0.40 <= tau <= 0.60,
    "upper": lambda tau: tau >= 0.70,
    "lower-medium": lambda tau: tau <= 0.60,
    "medium-upper": lambda tau: tau >= 0.40,
    "lower-upper": lambda tau: tau <= 0.30 or tau >= 0.70,
}
SPACINGS = (("q50-q05", "q50", "q05"), ("q95-q50", "q95", "q50"), ("q95-q05", "q95", "q05"))


def tau_label(tau: float) -> str:
    return f"q{round(tau * 100):02d}"


@dataclass
class Dataset:
    """Characteristic series of one region, with the raw samples if available."""

    name: str
    characteristics: dict[str, CharacteristicSeries]
    samples: dict[int, AnnualSample] | None = None

    @classmethod
    def from_samples(cls, name: str, samples: Mapping[int, AnnualSample]) -> "Dataset":
        return cls(name, characteristic_series(samples), dict(samples))

    @classmethod
    def from_matrix(cls, name: str, path) -> "Dataset":
        return cls(name, read_matrix(path))

    @property
    def years(self) -> np.ndarray:
        return next(iter(self.characteristics.values())).years

    def quantile(self, tau: float) -> CharacteristicSeries:
        label = tau_label(tau)
        if label in self.characteristics and math.isclose(QUANTILE_LEVELS.get(label, -1), tau):
            return self.characteristics[label]
        if self.samples is None:
            raise DataError(f"{self.name}: quantile {tau} needs the raw annual samples")
        return quantile_series(self.samples, tau, name=label)


@dataclass
class PeriodReport:
    start: int
    end: int
    trends: dict[str, TrendResult]
    adf: dict[str, AdfResult | str]
    acceleration: dict[str, AccelerationResult]
    cotrend: dict[str, WaldResult]
    spacings: dict[str, TrendResult]
    typology: TypologyVerdict
    amplification_inner: dict[str, AmplificationResult]
    amplification_outer: dict[str, AmplificationResult] = field(default_factory=dict)
    dominance: DominanceResult | None = None

    @property
    def label(self) -> str:
        return f"{self.start}-{self.end}"


@dataclass
class Report:
    region: str
    reference: str | None
    level: float
    taus: tuple[float, ...]
    split_year: int | None
    inference: str
    periods: list[PeriodReport]


def _period_slice(dataset: Dataset, start: int, end: int, ids) -> dict[str, CharacteristicSeries]:
    out = {}
    for cid in ids:
        s = dataset.characteristics[cid].between(start, end)
        if len(s) < MIN_YEARS:
            raise DataError(
                f"{dataset.name}: period {start}-{end} has {len(s)} years, need {MIN_YEARS}"
            )
        if s.years[0] != start or s.years[-1] != end or s.gaps:
            raise DataError(f"{dataset.name}: data do not cover {start}-{end} without gaps")
        out[cid] = s
    return out


def run_pipeline(
    dataset: Dataset,
    periods: Sequence[tuple[int, int]],
    taus: Sequence[float] = DEFAULT_TAUS,
    level: float = DEFAULT_LEVEL,
    split_year: int | None = None,
    reference: Dataset | None = None,
    bandwidth: int | None = None,
    inference: str = "fixed-b",
    acceleration_mode: str = "full",
    adf_regression: str = "c",
) -> Report:
    """Run every test family for each period.

    Acceleration is computed for periods that contain ``split_year`` with
    at least ten later years. Outer amplification and dominance need a
    ``reference`` region covering the same periods.
    """
    if not periods:
        raise DataError("no analysis period given")
    taus = tuple(float(t) for t in taus)
    missing = [c for c in ("mean", "iqr", "q05", "q50", "q95") if c not in dataset.characteristics]
    if missing:
        raise DataError(f"{dataset.name}: missing characteristics {missing}")
    kw = dict(bandwidth=bandwidth, inference=inference)
    quant_all = {tau: dataset.quantile(tau) for tau in taus}
    ref_quant = {tau: reference.quantile(tau) for tau in taus} if reference else {}

    reports = []
    for start, end in periods:
        if start >= end:
            raise DataError(f"invalid period {start}-{end}")
        ids = [c for c in CHARACTERISTICS if c in dataset.characteristics]
        chars = _period_slice(dataset, start, end, ids)
        qs = [q.between(start, end) for q in quant_all.values()]
        qlabels = [tau_label(t) for t in taus]

        trends = {cid: trend_test(s, **kw) for cid, s in chars.items()}
        qtrends = {lab: trend_test(q, **kw) for lab, q in zip(qlabels, qs)}
        trends.update({k: v for k, v in qtrends.items() if k not in trends})

        adf = {}
        for cid, s in chars.items():
            try:
                adf[cid] = adf_test(s, regression=adf_regression)
            except (ValueError, np.linalg.LinAlgError, ZeroDivisionError) as exc:
                adf[cid] = f"not computed: {exc}"

        accel = {}
        if split_year is not None and start < split_year <= end - MIN_LATE_YEARS + 1:
            for cid, s in chars.items():
                accel[cid] = acceleration_test(s, split_year, bandwidth, acceleration_mode)

        cotrend = {}
        for group, member in COTREND_GROUPS.items():
            members = [q for tau, q in zip(taus, qs) if member(tau)]
            if len(members) >= 2:
                cotrend[group] = multi_trend_wald(members, label=group, **kw)

        spacings = {name: spacing_test(chars[hi], chars[lo], **kw) for name, hi, lo in SPACINGS}
        spacings["iqr"] = trend_test(chars["iqr"], **kw)

        typology = classify_typology(list(qtrends.values()), cotrend, spacings, level)

        inner = {lab: amplification_test(q, chars["mean"], "inner", bandwidth)
                 for lab, q in zip(qlabels, qs)}
        outer, dominance = {}, None
        if reference is not None:
            ref_mean = _period_slice(reference, start, end, ["mean"])["mean"]
            outer = {lab: amplification_test(q, ref_mean, "outer", bandwidth)
                     for lab, q in zip(qlabels, qs)}
            ref_qs = [ref_quant[t].between(start, end) for t in taus]
            dominance = dominance_test(qs, ref_qs, taus, level, **kw)

        reports.append(PeriodReport(start, end, trends, adf, accel, cotrend, spacings,
                                    typology, inner, outer, dominance))
        logger.info("%s %d-%d: %s", dataset.name, start, end, typology.label)
    return Report(dataset.name, reference.name if reference else None, level, taus,
                  split_year, inference, reports)


# ---------------------------------------------------------------- export

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return str(x)


def _write(path: Path, header, rows) -> None:
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _jsonable(obj):
    if dataclasses.is_dataclass(obj):
        return {f.name: _jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return str(obj)
    return obj


def report_to_dict(report: Report) -> dict:
    return _jsonable(report)


def write_report(report: Report, outdir: str | Path) -> list[Path]:
    """Write the result tables of one region; returns the files written.

    trend_acceleration.csv  characteristic, then beta/p per period, then
                            acceleration t/p per period where computed
    cotrending_<period>.csv panel, hypothesis, statistic, p_value
    amplification.csv       quantile, inner slope/p per period, outer slope/p
    dominance.csv           quantile, beta/t/p per period (with a reference)
    typology.csv            period, label, low_confidence, reason, evidence
    adf.csv                 period, characteristic, statistic, lags, p, crit, reject
    results.json            every result object
    """
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    P = report.periods

    ids = list(P[0].trends)
    header = ["characteristic"]
    for p in P:
        header += [f"beta[{p.label}]", f"p[{p.label}]"]
    accel_periods = [p for p in P if p.acceleration]
    for p in accel_periods:
        header += [f"accel_t[{p.label}|{report.split_year}]", f"accel_p[{p.label}|{report.split_year}]"]
    rows = []
    for cid in ids:
        row = [cid]
        for p in P:
            r = p.trends[cid]
            row += [r.beta, r.p_value]
        for p in accel_periods:
            a = p.acceleration.get(cid)
            row += [a.t_diff, a.p_one_sided] if a else [None, None]
        rows.append(row)
    _write(out / "trend_acceleration.csv", header, rows)
    written.append(out / "trend_acceleration.csv")

    for p in P:
        rows = [["joint", g, w.statistic, w.p_value] for g, w in p.cotrend.items()]
        rows += [["spacing", k, r.beta, r.p_value] for k, r in p.spacings.items()]
        path = out / f"cotrending_{p.label}.csv"
        _write(path, ["panel", "hypothesis", "statistic", "p_value"], rows)
        written.append(path)

    qlabels = [tau_label(t) for t in report.taus]
    header = ["quantile"]
    for kind in ("inner", "outer"):
        for p in P:
            if getattr(p, f"amplification_{kind}"):
                header += [f"{kind}[{p.label}]", f"{kind}_p[{p.label}]"]
    rows = []
    for q in qlabels:
        row = [q]
        for kind in ("inner", "outer"):
            for p in P:
                amp = getattr(p, f"amplification_{kind}")
                if amp:
                    row += [amp[q].slope_on_mean, amp[q].p_one_sided]
        rows.append(row)
    _write(out / "amplification.csv", header, rows)
    written.append(out / "amplification.csv")

    dom = [(p.label, p.dominance) for p in P if p.dominance is not None]
    if dom:
        written.append(write_dominance(dom, out / "dominance.csv"))

    rows = []
    for p in P:
        ty = p.typology
        rows.append([p.label, ty.label, ty.low_confidence, ty.reason, ty.level,
                     p.cotrend["all"].statistic, p.cotrend["all"].p_value,
                     p.spacings["iqr"].beta, p.spacings["iqr"].p_value,
                     p.spacings["q95-q05"].beta, p.spacings["q95-q05"].p_value])
    _write(out / "typology.csv",
           ["period", "label", "low_confidence", "reason", "level", "wald_all", "wald_all_p",
            "iqr_beta", "iqr_p", "q95-q05_beta", "q95-q05_p"], rows)
    written.append(out / "typology.csv")

    rows = []
    for p in P:
        for cid, a in p.adf.items():
            if isinstance(a, AdfResult):
                rows.append([p.label, cid, a.statistic, a.lags, a.p_value, a.critical_5pct,
                             a.rejects_unit_root])
            else:
                rows.append([p.label, cid, None, None, None, None, a])
    _write(out / "adf.csv", ["period", "characteristic", "statistic", "lags", "p_value",
                             "critical_5pct", "rejects_unit_root"], rows)
    written.append(out / "adf.csv")

    path = out / "results.json"
    path.write_text(json.dumps(report_to_dict(report), indent=1, sort_keys=True) + "\n")
    written.append(path)
    return written


def write_dominance(results: Sequence[tuple[str, DominanceResult]], path: Path) -> Path:
    """Quantile rows with beta, t and p per period, then one verdict row per period."""
    header = ["quantile"]
    for label, _ in results:
        header += [f"beta[{label}]", f"t[{label}]", f"p[{label}]"]
    first = results[0][1]
    rows = []
    for i, r0 in enumerate(first.rows):
        row = [tau_label(r0.tau)]
        for _, d in results:
            r = d.rows[i]
            row += [r.beta, r.t_stat, r.p_value]
        rows.append(row)
    for label, d in results:
        rows.append([f"verdict[{label}]", d.verdict, " ".join(map(tau_label, d.a_taus)),
                     " ".join(map(tau_label, d.b_taus))])
    _write(Path(path), header, rows)
    return Path(path)


def summary_rows(report: Report) -> list[list]:
    """One row per period: type, and the characteristics flagged by each test."""
    lv = report.level
    rows = []
    for p in report.periods:
        accel = [c for c, a in p.acceleration.items() if a.p_one_sided < lv]
        inner = [q for q, a in p.amplification_inner.items() if a.p_one_sided < lv]
        outer = [q for q, a in p.amplification_outer.items() if a.p_one_sided < lv]
        dom = [tau_label(t) for t in p.dominance.a_taus] if p.dominance else []
        rows.append([report.region, p.label, p.typology.label, " ".join(accel),
                     " ".join(inner), " ".join(outer), " ".join(dom)])
    return rows


SUMMARY_HEADER = ["region", "period", "type", "acceleration", "amplification_inner",
                  "amplification_outer", "dominance"]


def write_summary(reports: Sequence[Report], path: str | Path) -> Path:
    path = Path(path)
    _write(path, SUMMARY_HEADER, [row for r in reports for row in summary_rows(r)])
    return path
