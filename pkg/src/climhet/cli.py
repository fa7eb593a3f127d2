"""climhet command line: ingest, analyze, compare, simulate, report.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 failed
simulation check.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time

import numpy as np

from . import __version__
from .config import CONFIG_ENV, RegionConfig, RunConfig, apply_overrides, load_config
from .distributions import CHARACTERISTICS, read_samples, write_matrix, write_samples
from .errors import ConfigError, DataError
from .ingest import build_samples, parse_station_file, write_rejects
from .pipeline import Dataset, run_pipeline, write_dominance, write_report, write_summary
from .simulate import DgpSpec, rate_check_beta, rate_check_tstat, rejection_rate
from .warming import dominance_test

logger = logging.getLogger("climhet")

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_SIMULATION = 0, 2, 3, 4
SUITES = ("beta", "tstat", "size", "all")


class SimulationFailure(Exception):
    pass


# ------------------------------------------------------------------ data

def ingest_region(cfg: RunConfig, region: RegionConfig):
    fmt = region.file_format()
    parsed = [parse_station_file(path, fmt) for path in region.paths]
    samples, report = build_samples(parsed, cfg.panel_spec(region))
    return parsed, samples, report


def load_dataset(cfg: RunConfig, name: str) -> Dataset:
    region = cfg.regions[name]
    if region.raw:
        _, samples, _ = ingest_region(cfg, region)
        return Dataset.from_samples(name, samples)
    dataset = Dataset.from_matrix(name, region.characteristics)
    if region.samples is not None:
        dataset.samples = read_samples(region.samples)
    return dataset


# -------------------------------------------------------------- commands

def cmd_ingest(cfg: RunConfig, args) -> int:
    cfg.validate()
    names = [cfg.region] if cfg.region else [n for n, r in cfg.regions.items() if r.raw]
    if not names:
        raise ConfigError("no region with raw station files to ingest")
    for name in names:
        region = cfg.regions[name]
        if not region.raw:
            raise ConfigError(f"region {name} has no raw station files")
        parsed, samples, report = ingest_region(cfg, region)
        out = cfg.out / name
        out.mkdir(parents=True, exist_ok=True)
        write_matrix(Dataset.from_samples(name, samples).characteristics, out / "characteristics.csv")
        write_samples(samples, out / "samples.csv")
        write_rejects(((path.name, p.rejects) for path, p in zip(region.paths, parsed)),
                      out / "rejects.csv")
        accounting = dict(rows=report.rows, rejected=report.rejected,
                          filtered_coverage=report.filtered_coverage,
                          filtered_panel=report.filtered_panel, kept=report.kept,
                          years=len(samples), units_per_year=int(next(iter(samples.values())).n))
        (out / "ingest.json").write_text(json.dumps(accounting, indent=1, sort_keys=True) + "\n")
        print(f"{name}: {report.rows} rows, {report.rejected} rejected, {report.filtered} filtered, "
              f"{report.kept} kept; {len(samples)} years -> {out}")
    return EXIT_OK


def cmd_analyze(cfg: RunConfig, args) -> int:
    cfg.validate()
    reference = load_dataset(cfg, cfg.reference) if cfg.reference else None
    reports = []
    for name in cfg.analysis_regions():
        dataset = load_dataset(cfg, name)
        ref = reference if reference is not None and reference.name != name else None
        report = run_pipeline(
            dataset, cfg.periods, cfg.taus, cfg.level, cfg.split_year, ref,
            cfg.bandwidth, cfg.inference, cfg.acceleration_mode, cfg.adf_regression,
        )
        write_report(report, cfg.out / name)
        reports.append(report)
        for p in report.periods:
            print(f"{name} {p.label}: {p.typology.label}"
                  + (" (low confidence)" if p.typology.low_confidence else ""))
    write_summary(reports, cfg.out / "summary.csv")
    return EXIT_OK


def cmd_compare(cfg: RunConfig, args) -> int:
    cfg.validate()
    if cfg.compare:
        a, b = cfg.compare
    elif cfg.region and cfg.reference:
        a, b = cfg.region, cfg.reference
    else:
        raise ConfigError("compare needs 'compare: {a, b}' or both 'region' and 'reference'")
    da, db = load_dataset(cfg, a), load_dataset(cfg, b)
    qa = {tau: da.quantile(tau) for tau in cfg.taus}
    qb = {tau: db.quantile(tau) for tau in cfg.taus}
    results = []
    for start, end in cfg.periods:
        la = [qa[t].between(start, end) for t in cfg.taus]
        lb = [qb[t].between(start, end) for t in cfg.taus]
        for s in la + lb:
            if len(s) == 0 or s.years[0] != start or s.years[-1] != end or s.gaps:
                raise DataError(f"{s.id}: data do not cover {start}-{end} without gaps")
        res = dominance_test(la, lb, cfg.taus, cfg.level, cfg.bandwidth, cfg.inference)
        results.append((f"{start}-{end}", res))
        print(f"{a} vs {b} {start}-{end}: {res.verdict}")
    out = cfg.out / f"compare_{a}_vs_{b}"
    out.mkdir(parents=True, exist_ok=True)
    write_dominance(results, out / "dominance.csv")
    return EXIT_OK


def _simulation_rows(suite: str, reps: int, seed: int):
    lengths = (100, 400, 1600)
    if suite in ("beta", "all"):
        for spec in (DgpSpec("iid", 100, seed=seed), DgpSpec("random-walk", 100, seed=seed),
                     DgpSpec("polynomial", 100, seed=seed, coefficients=(0.01,))):
            r = rate_check_beta(spec, lengths, reps)
            yield ["beta", r.kind, r.exponent, r.target, r.target - r.tolerance,
                   r.target + r.tolerance, r.passed, _medians(r)]
    if suite in ("tstat", "all"):
        for spec in (DgpSpec("random-walk", 100, seed=seed),
                     DgpSpec("near-unit-root", 100, seed=seed, c=5.0),
                     DgpSpec("local-level", 100, seed=seed, q=1.0),
                     DgpSpec("fractional", 100, seed=seed, d=0.8),
                     DgpSpec("iid", 100, seed=seed)):
            r = rate_check_tstat(spec, lengths, reps)
            yield ["tstat", r.kind, r.exponent, r.target, r.target - r.tolerance,
                   r.target + r.tolerance, r.passed, _medians(r) + f" bw={r.bandwidth}"]
    if suite in ("size", "all"):
        n = max(reps, 2000)
        rate = rejection_rate(DgpSpec("iid", 70, seed=seed), n, 0.05)
        yield ["size", "iid", rate, 0.05, 0.03, 0.07, 0.03 <= rate <= 0.07, f"T=70 reps={n}"]


def _medians(r) -> str:
    return " ".join(f"T={T}:{m:.6g}" for T, m in zip(r.lengths, r.medians))


def cmd_simulate(cfg: RunConfig, args) -> int:
    cfg.validate(need_data=False)
    if args.reps < 200:
        raise ConfigError("--reps must be at least 200")
    cfg.out.mkdir(parents=True, exist_ok=True)
    rows = []
    for row in _simulation_rows(args.suite, args.reps, cfg.seed):
        rows.append(row)
        print(f"{'PASS' if row[6] else 'FAIL'} {row[0]:5s} {row[1]:15s} value={row[2]:.4f} "
              f"band=[{row[4]:.3f}, {row[5]:.3f}]")
    path = cfg.out / "rate_checks.csv"
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["check", "kind", "value", "target", "lower", "upper", "passed", "detail"])
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    failed = [r for r in rows if not r[6]]
    if failed:
        raise SimulationFailure(f"{len(failed)} of {len(rows)} checks failed; see {path}")
    return EXIT_OK


def cmd_report(cfg: RunConfig, args) -> int:
    cfg.validate(need_data=False)
    names = cfg.analysis_regions() if cfg.regions else []
    if not names:
        raise ConfigError("no regions configured")
    results = {}
    for name in names:
        path = cfg.out / name / "results.json"
        if not path.exists():
            raise DataError(f"no analysis results for {name} at {path}; run 'climhet analyze' first")
        results[name] = json.loads(path.read_text())
    columns, cells, bars = [], {}, []
    for name, res in results.items():
        for p in res["periods"]:
            label = f"{name}:{p['start']}-{p['end']}"
            columns.append(label)
            for cid, tr in p["trends"].items():
                cells[cid, label] = tr["beta"]
                significant = tr["p_value"] < res["level"]
                bars.append([name, f"{p['start']}-{p['end']}", cid, tr["beta"], tr["p_value"], significant])
    ids = [c for c in CHARACTERISTICS if any((c, col) in cells for col in columns)]
    ids += sorted({c for c, _ in cells} - set(ids))
    cfg.out.mkdir(parents=True, exist_ok=True)
    with (cfg.out / "heatmap.csv").open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["characteristic", *columns])
        for cid in ids:
            writer.writerow([cid, *(_cell(cells.get((cid, col))) for col in columns)])
    with (cfg.out / "bars.csv").open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["region", "period", "characteristic", "beta", "p_value", "significant"])
        for row in bars:
            writer.writerow([_cell(v) for v in row])
    print(f"heatmap {len(ids)}x{len(columns)} -> {cfg.out / 'heatmap.csv'}")
    return EXIT_OK


def _cell(v) -> str:
    if v is None:
        return ""
    return repr(float(v)) if isinstance(v, (float, int)) and not isinstance(v, bool) else str(v)


# ---------------------------------------------------------------- parser

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help=f"YAML run config (default: ${CONFIG_ENV})")
    common.add_argument("--period", action="append", dest="periods", metavar="START-END",
                        help="analysis period, repeatable")
    common.add_argument("--split-year", type=int, help="first year of the late segment")
    common.add_argument("--level", type=float, help="significance level")
    common.add_argument("--bandwidth", type=int, help="HAC bandwidth override")
    common.add_argument("--seed", type=int, help="master seed for simulations")
    common.add_argument("--out", help="output directory")
    common.add_argument("--region", help="restrict to one configured region")
    common.add_argument("--reference", help="reference region")
    common.add_argument("--inference", choices=("fixed-b", "normal"))
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="climhet", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", parents=[common], help="station files -> characteristic matrix")
    sub.add_parser("analyze", parents=[common], help="run all tests, write result tables")
    sub.add_parser("compare", parents=[common], help="warming dominance of region A over B")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo rate and size checks")
    sim.add_argument("--suite", choices=SUITES, default="all")
    sim.add_argument("--reps", type=int, default=500)
    sub.add_parser("report", parents=[common], help="heatmap and bar tables from analyze output")
    return parser


COMMANDS = {"ingest": cmd_ingest, "analyze": cmd_analyze, "compare": cmd_compare,
            "simulate": cmd_simulate, "report": cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    started = time.perf_counter()
    try:
        cfg = load_config(args.config)
        cfg = apply_overrides(
            cfg, periods=args.periods, split_year=args.split_year, level=args.level,
            bandwidth=args.bandwidth, seed=args.seed, out=args.out, region=args.region,
            reference=args.reference, inference=args.inference,
        )
        code = COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"climhet: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"climhet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SimulationFailure as exc:
        print(f"climhet: simulation check failed: {exc}", file=sys.stderr)
        return EXIT_SIMULATION
    except (ValueError, np.linalg.LinAlgError) as exc:
        print(f"climhet: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    logger.info("%s finished in %.1f s", args.command, time.perf_counter() - started)
    return code


if __name__ == "__main__":
    sys.exit(main())
