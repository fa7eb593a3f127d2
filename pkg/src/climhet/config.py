"""Run configuration: YAML file, environment default, command-line overrides.

A minimal config::

    start_year: 1950
    end_year: 2019
    periods: ["1950-2019", "1950-1984", "1985-2019"]
    split_year: 1985
    regions:
      spain:
        paths: [data/aemet_daily.csv]
        columns: {station_id: indicativo, date: fecha, tmin: tmin, tmax: tmax, tavg: tmed}
      europe:
        characteristics: data/europe_characteristics.csv
    region: spain
    reference: europe

Values given on the command line win over the file, which wins over the
defaults of :class:`RunConfig`.
"""
from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

import yaml

from .errors import ConfigError
from .ingest import CROSS_SECTIONAL, FIELDS, MODES, PANEL_RULES, FileFormat, PanelSpec
from .regression import INFERENCE
from .warming import ACCELERATION_MODES, DEFAULT_LEVEL, DEFAULT_TAUS

CONFIG_ENV = "CLIMHET_CONFIG"


@dataclass
class RegionConfig:
    """Where one region's data come from.

    Either raw station files (``paths`` with their layout) or a ready
    characteristic matrix (``characteristics``), optionally with a long-format
    ``samples`` file for quantiles off the standard grid.
    """

    name: str
    paths: list[Path] = field(default_factory=list)
    delimiter: str = ","
    columns: dict[str, str] = field(default_factory=lambda: {f: f for f in FIELDS})
    date_format: str = "%Y-%m-%d"
    mode: str = CROSS_SECTIONAL
    coverage: float = 0.8
    panel_rule: str = "strict"
    characteristics: Path | None = None
    samples: Path | None = None

    @property
    def raw(self) -> bool:
        return bool(self.paths)

    def file_format(self) -> FileFormat:
        return FileFormat(self.delimiter, dict(self.columns), self.date_format)


def parse_period(text) -> tuple[int, int]:
    if isinstance(text, (list, tuple)) and len(text) == 2:
        start, end = text
    else:
        parts = str(text).replace("–", "-").split("-")
        if len(parts) != 2:
            raise ConfigError(f"period {text!r} is not of the form START-END")
        start, end = parts
    try:
        start, end = int(start), int(end)
    except ValueError:
        raise ConfigError(f"period {text!r} is not of the form START-END") from None
    if start >= end:
        raise ConfigError(f"period {text!r} ends before it starts")
    return start, end


@dataclass
class RunConfig:
    regions: dict[str, RegionConfig] = field(default_factory=dict)
    region: str | None = None
    reference: str | None = None
    compare: tuple[str, str] | None = None
    start_year: int | None = None
    end_year: int | None = None
    periods: list[tuple[int, int]] = field(default_factory=list)
    split_year: int | None = None
    taus: tuple[float, ...] = DEFAULT_TAUS
    level: float = DEFAULT_LEVEL
    bandwidth: int | None = None
    inference: str = "fixed-b"
    acceleration_mode: str = "full"
    adf_regression: str = "c"
    out: Path = Path("climhet-out")
    seed: int = 20220710
    base: Path = Path(".")

    def panel_spec(self, region: RegionConfig) -> PanelSpec:
        start, end = self.data_range()
        try:
            return PanelSpec(start, end, region.mode, region.coverage, region.panel_rule)
        except ValueError as exc:
            raise ConfigError(f"region {region.name}: {exc}") from None

    def data_range(self) -> tuple[int, int]:
        start = self.start_year if self.start_year is not None else min(p[0] for p in self.periods)
        end = self.end_year if self.end_year is not None else max(p[1] for p in self.periods)
        return start, end

    def analysis_regions(self) -> list[str]:
        """The analyzed regions: ``region`` if set, else every configured region."""
        if self.region:
            return [self.region]
        return [name for name in self.regions if name != self.reference] or list(self.regions)

    def validate(self, need_data: bool = True) -> "RunConfig":
        if not 0 < self.level < 1:
            raise ConfigError(f"level must be in (0, 1), got {self.level}")
        if self.bandwidth is not None and self.bandwidth < 0:
            raise ConfigError("bandwidth must be non-negative")
        if self.inference not in INFERENCE:
            raise ConfigError(f"inference must be one of {INFERENCE}")
        if self.acceleration_mode not in ACCELERATION_MODES:
            raise ConfigError(f"acceleration_mode must be one of {ACCELERATION_MODES}")
        if self.adf_regression not in ("c", "ct"):
            raise ConfigError("adf_regression must be 'c' or 'ct'")
        if not self.taus or any(not 0 < t < 1 for t in self.taus) or \
                any(b <= a for a, b in zip(self.taus, self.taus[1:])):
            raise ConfigError("taus must be strictly increasing values in (0, 1)")
        if not need_data:
            return self
        if not self.regions:
            raise ConfigError("no regions configured")
        for name in (self.region, self.reference, *(self.compare or ())):
            if name is not None and name not in self.regions:
                raise ConfigError(f"region {name!r} is not configured (have {sorted(self.regions)})")
        if not self.periods:
            if self.start_year is None or self.end_year is None:
                raise ConfigError("give periods or start_year and end_year")
            self.periods = [(self.start_year, self.end_year)]
        start, end = self.data_range()
        for p in self.periods:
            if p[0] < start or p[1] > end:
                raise ConfigError(f"period {p[0]}-{p[1]} outside the data range {start}-{end}")
        for r in self.regions.values():
            if r.mode not in MODES:
                raise ConfigError(f"region {r.name}: unknown mode {r.mode!r}")
            if r.panel_rule not in PANEL_RULES:
                raise ConfigError(f"region {r.name}: unknown panel_rule {r.panel_rule!r}")
            if not r.raw and r.characteristics is None:
                raise ConfigError(f"region {r.name}: give 'paths' or 'characteristics'")
            for path in [*r.paths, r.characteristics, r.samples]:
                if path is not None and not path.exists():
                    raise ConfigError(f"region {r.name}: file not found: {path}")
        return self


_REGION_KEYS = {f.name for f in dataclasses.fields(RegionConfig)} - {"name"}
_RUN_KEYS = {f.name for f in dataclasses.fields(RunConfig)} - {"regions", "base"}


def _region(name: str, raw: Mapping[str, Any], base: Path) -> RegionConfig:
    if not isinstance(raw, Mapping):
        raise ConfigError(f"region {name!r} must be a mapping")
    unknown = set(raw) - _REGION_KEYS - {"path"}
    if unknown:
        raise ConfigError(f"region {name!r}: unknown keys {sorted(unknown)}")
    kw = dict(raw)
    paths = kw.pop("paths", None) or kw.pop("path", None) or []
    if isinstance(paths, (str, os.PathLike)):
        paths = [paths]
    kw["paths"] = [base / p for p in paths]
    for key in ("characteristics", "samples"):
        if kw.get(key) is not None:
            kw[key] = base / kw[key]
    if "columns" in kw:
        columns = dict(kw["columns"])
        unknown = set(columns) - set(FIELDS)
        if unknown:
            raise ConfigError(f"region {name!r}: unknown column fields {sorted(unknown)}")
        kw["columns"] = columns
    return RegionConfig(name=name, **kw)


def from_mapping(data: Mapping[str, Any], base: Path = Path(".")) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be a mapping at top level")
    unknown = set(data) - _RUN_KEYS - {"regions"}
    if unknown:
        raise ConfigError(f"unknown config keys {sorted(unknown)}")
    kw = {k: v for k, v in data.items() if k != "regions"}
    regions = {str(n): _region(str(n), r, base) for n, r in (data.get("regions") or {}).items()}
    if "periods" in kw:
        kw["periods"] = [parse_period(p) for p in kw["periods"] or []]
    if "taus" in kw:
        kw["taus"] = tuple(float(t) for t in kw["taus"])
    if kw.get("compare") is not None:
        cmp = kw["compare"]
        if isinstance(cmp, Mapping):
            cmp = (cmp.get("a"), cmp.get("b"))
        if len(cmp) != 2 or None in cmp:
            raise ConfigError("compare needs two regions, a and b")
        kw["compare"] = (str(cmp[0]), str(cmp[1]))
    if "out" in kw:
        kw["out"] = base / kw["out"]
    try:
        return RunConfig(regions=regions, base=base, **kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | Path | None) -> RunConfig:
    """Read a YAML config; ``None`` falls back to $CLIMHET_CONFIG, then defaults.

    Relative paths inside the file resolve against the file's directory.
    """
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return RunConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    try:
        data = yaml.safe_load(text) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return from_mapping(data, path.parent)


def apply_overrides(cfg: RunConfig, **overrides) -> RunConfig:
    """Replace fields with the command-line values that were actually given."""
    given = {k: v for k, v in overrides.items() if v is not None}
    if "periods" in given:
        given["periods"] = [parse_period(p) for p in given["periods"]]
    if "out" in given:
        given["out"] = Path(given["out"])
    return dataclasses.replace(cfg, **given)
