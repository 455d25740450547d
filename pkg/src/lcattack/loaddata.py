"""Regional demand and temperature panels: ingestion, resampling, screening."""

from __future__ import annotations

import csv
import datetime as dt
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (DegenerateRange, EmptyInput, IncompatibleResolution, MalformedInput,
                     MalformedRow, NonUniformStep, ValidationError, WindowMismatch)

# Longest run of missing interior samples that is filled by interpolation.
MAX_FILL_STEPS = 2
TEMP_EPS_C = 0.1
TEMP_BOUNDS_C = (-7.22, 33.9)


@dataclass(frozen=True)
class Schema:
    timestamp: str = "timestamp"
    region: str = "region"
    value: str = "value"
    # Optional informational column; timestamps are kept as wall-clock.
    utc_offset: str | None = None


@dataclass(frozen=True)
class LoadPanel:
    regions: tuple[str, ...]
    timestamps: np.ndarray
    values: np.ndarray
    resolution: int
    unit: str = "MW"

    def __post_init__(self):
        regions = tuple(str(r) for r in self.regions)
        ts = np.asarray(self.timestamps, dtype="datetime64[s]").copy()
        vals = np.array(self.values, dtype=float)
        if not regions:
            raise ValidationError("panel needs at least one region")
        if len(set(regions)) != len(regions):
            raise ValidationError("duplicate region identifiers")
        if vals.shape != (len(regions), len(ts)):
            raise ValidationError(f"values shape {vals.shape} does not match regions x timestamps")
        if np.isnan(vals).any():
            raise ValidationError("panel values contain NaN")
        if self.unit == "MW" and (vals < 0).any():
            raise ValidationError("demand must be non-negative")
        if len(ts) > 1:
            steps = np.diff(ts).astype(np.int64)
            if (steps != int(self.resolution)).any():
                raise NonUniformStep("timestamps must advance by exactly the resolution")
        ts.flags.writeable = False
        vals.flags.writeable = False
        object.__setattr__(self, "regions", regions)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "resolution", int(self.resolution))

    @property
    def n(self) -> int:
        return len(self.regions)

    @property
    def m(self) -> int:
        return len(self.timestamps)

    def region(self, name: str) -> np.ndarray:
        return self.values[self.regions.index(name)]

    def select(self, start=None, end=None, regions: Sequence[str] | None = None) -> "LoadPanel":
        """Sub-panel with ``start <= t < end`` and an optional region subset."""
        mask = np.ones(self.m, dtype=bool)
        if start is not None:
            mask &= self.timestamps >= np.datetime64(start, "s")
        if end is not None:
            mask &= self.timestamps < np.datetime64(end, "s")
        regs = tuple(regions) if regions is not None else self.regions
        rows = [self.regions.index(r) for r in regs]
        return LoadPanel(regs, self.timestamps[mask], self.values[rows][:, mask], self.resolution, self.unit)

    def equals(self, other: "LoadPanel") -> bool:
        return (self.regions == other.regions and self.resolution == other.resolution
                and self.unit == other.unit
                and np.array_equal(self.timestamps, other.timestamps)
                and np.array_equal(self.values, other.values))


@dataclass(frozen=True)
class TemperatureSeries:
    timestamps: np.ndarray
    celsius: np.ndarray
    bounds: tuple[float, float] = field(default=TEMP_BOUNDS_C)

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype="datetime64[s]")
        c = np.asarray(self.celsius, dtype=float)
        if ts.shape != c.shape:
            raise ValidationError("timestamps and temperatures differ in length")
        if not self.bounds[0] < self.bounds[1]:
            raise ValidationError("temperature bounds must satisfy min < max")
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "celsius", c)

    def normalized(self) -> np.ndarray:
        lo, hi = self.bounds
        return np.clip((self.celsius - lo) / (hi - lo), 0.0, 1.0)

    @property
    def resolution(self) -> int:
        return int(np.diff(self.timestamps).astype(np.int64)[0]) if len(self.timestamps) > 1 else 0


# -- ingestion -----------------------------------------------------------

def parse_timestamp(text: str) -> np.datetime64:
    """ISO-8601 to wall-clock seconds; any UTC offset is dropped."""
    text = text.strip()
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    stamp = dt.datetime.fromisoformat(text).replace(tzinfo=None)
    return np.datetime64(stamp, "s")


def _read_long(path: str | Path, schema: Schema, allow_negative: bool):
    path = Path(path)
    if not path.is_file():
        raise MalformedInput(f"no such input file: {path}")
    samples: dict[tuple[np.datetime64, str], list[float]] = defaultdict(list)
    regions: list[str] = []
    seen: set[str] = set()
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyInput(f"{path} is empty")
        header = [h.strip() for h in header]
        cols = {}
        for key in ("timestamp", "region", "value"):
            name = getattr(schema, key)
            if name not in header:
                raise MalformedRow(1, f"missing column {name!r}")
            cols[key] = header.index(name)
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise MalformedRow(line, f"expected {len(header)} fields, got {len(row)}")
            try:
                stamp = parse_timestamp(row[cols["timestamp"]])
            except ValueError as exc:
                raise MalformedRow(line, f"bad timestamp {row[cols['timestamp']]!r}") from exc
            region = row[cols["region"]].strip()
            if not region:
                raise MalformedRow(line, "empty region")
            try:
                value = float(row[cols["value"]])
            except ValueError as exc:
                raise MalformedRow(line, f"bad value {row[cols['value']]!r}") from exc
            if not np.isfinite(value) or (value < 0 and not allow_negative):
                raise MalformedRow(line, f"invalid value {value}")
            if region not in seen:
                seen.add(region)
                regions.append(region)
            # repeated wall-clock instants (DST fall-back) are averaged
            samples[(stamp, region)].append(value)
    if not samples:
        raise EmptyInput(f"{path} has no data rows")
    return regions, samples


def _infer_step(stamps: np.ndarray) -> int:
    diffs = np.diff(stamps).astype(np.int64)
    if len(diffs) == 0:
        raise NonUniformStep("cannot infer a time step from a single instant")
    vals, counts = np.unique(diffs, return_counts=True)
    return int(vals[np.argmax(counts)])


def _fill(series: np.ndarray, label: str, max_fill: int) -> np.ndarray:
    missing = np.isnan(series)
    if not missing.any():
        return series
    if missing[0] or missing[-1]:
        raise NonUniformStep(f"{label}: missing samples at the edge of the record")
    edges = np.diff(np.r_[0, missing.astype(np.int8), 0])
    for s, e in zip(np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)):
        if e - s > max_fill:
            raise NonUniformStep(f"{label}: gap of {e - s} samples exceeds {max_fill}")
    idx = np.arange(len(series))
    out = series.copy()
    out[missing] = np.interp(idx[missing], idx[~missing], series[~missing])
    return out


def _grid(regions, samples, resolution, gap_policy, label):
    stamps = np.array(sorted({k[0] for k in samples}), dtype="datetime64[s]")
    step = int(resolution) if resolution else _infer_step(stamps)
    offsets = (stamps - stamps[0]).astype(np.int64)
    if (offsets % step).any():
        raise NonUniformStep(f"{label}: timestamps off the {step} s grid")
    m = int(offsets[-1] // step) + 1
    grid = stamps[0] + np.arange(m) * np.timedelta64(step, "s")
    values = np.full((len(regions), m), np.nan)
    pos = {r: i for i, r in enumerate(regions)}
    for (stamp, region), vals in samples.items():
        values[pos[region], int((stamp - stamps[0]).astype(np.int64) // step)] = float(np.mean(vals))
    max_fill = MAX_FILL_STEPS if gap_policy == "linear" else 0
    for i, r in enumerate(regions):
        values[i] = _fill(values[i], f"{label} region {r}", max_fill)
    return grid, values, step


def ingest_csv(path: str | Path, schema: Schema | None = None, gap_policy: str = "linear",
               resolution: int | None = None) -> LoadPanel:
    """Read a long-format demand CSV (timestamp, region, value) into a panel.

    Interior gaps of up to two samples are linearly interpolated when
    ``gap_policy`` is ``"linear"``; anything else raises NonUniformStep.
    """
    if gap_policy not in ("linear", "error"):
        raise ValidationError(f"unknown gap policy {gap_policy!r}")
    schema = schema or Schema()
    regions, samples = _read_long(path, schema, allow_negative=False)
    grid, values, step = _grid(regions, samples, resolution, gap_policy, str(path))
    return LoadPanel(tuple(regions), grid, values, step)


def ingest_temperature_csv(path: str | Path, schema: Schema | None = None, region: str | None = None,
                           gap_policy: str = "linear") -> TemperatureSeries:
    schema = schema or Schema()
    regions, samples = _read_long(path, schema, allow_negative=True)
    if region is None:
        region = regions[0]
    if region not in regions:
        raise MalformedInput(f"{path}: no temperature series for {region!r}")
    samples = {k: v for k, v in samples.items() if k[1] == region}
    grid, values, _ = _grid([region], samples, None, gap_policy, str(path))
    return TemperatureSeries(grid, values[0])


def _stamp_text(stamp: np.datetime64) -> str:
    return str(np.datetime64(stamp, "s"))


def write_panel_csv(panel: LoadPanel, path: str | Path) -> None:
    """Wide format: timestamp column then one column per region."""
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", *panel.regions])
        for k, stamp in enumerate(panel.timestamps):
            w.writerow([_stamp_text(stamp), *(repr(float(v)) for v in panel.values[:, k])])


def read_panel_csv(path: str | Path, unit: str = "MW") -> LoadPanel:
    path = Path(path)
    if not path.is_file():
        raise MalformedInput(f"no such panel file: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or len(header) < 2:
            raise EmptyInput(f"{path} has no panel header")
        stamps, rows = [], []
        for row in reader:
            if not row:
                continue
            try:
                stamps.append(parse_timestamp(row[0]))
                rows.append([float(v) for v in row[1:]])
            except ValueError as exc:
                raise MalformedRow(reader.line_num, str(exc)) from exc
    if not stamps:
        raise EmptyInput(f"{path} has no data rows")
    ts = np.array(stamps, dtype="datetime64[s]")
    res = _infer_step(ts) if len(ts) > 1 else 0
    return LoadPanel(tuple(header[1:]), ts, np.array(rows).T, res, unit)


def write_long_csv(panel: LoadPanel, path: str | Path, schema: Schema | None = None) -> None:
    schema = schema or Schema()
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([schema.timestamp, schema.region, schema.value])
        for k, stamp in enumerate(panel.timestamps):
            for i, region in enumerate(panel.regions):
                w.writerow([_stamp_text(stamp), region, repr(float(panel.values[i, k]))])


# -- transforms ----------------------------------------------------------

def resample(panel: LoadPanel, target: int) -> LoadPanel:
    """Block means over ``target // resolution`` consecutive samples.

    Only downsampling to an integer multiple is allowed; a trailing partial
    block is dropped.
    """
    target = int(target)
    if target < panel.resolution or target % panel.resolution:
        raise IncompatibleResolution(
            f"cannot resample {panel.resolution} s to {target} s (need an integer multiple)")
    k = target // panel.resolution
    m_out = panel.m // k
    vals = panel.values[:, :m_out * k].reshape(panel.n, m_out, k).mean(axis=2)
    return LoadPanel(panel.regions, panel.timestamps[:m_out * k:k], vals, target, panel.unit)


def normalize_minmax(panel: LoadPanel, mode: str = "per-region") -> LoadPanel:
    v = panel.values
    if mode == "per-region":
        lo = v.min(axis=1, keepdims=True)
        hi = v.max(axis=1, keepdims=True)
    elif mode == "global":
        lo = np.full((panel.n, 1), v.min())
        hi = np.full((panel.n, 1), v.max())
    else:
        raise ValidationError(f"unknown normalization mode {mode!r}")
    span = hi - lo
    if (span <= 0).any():
        bad = [panel.regions[i] for i in np.flatnonzero(span[:, 0] <= 0)]
        raise DegenerateRange(f"constant series cannot be normalized: {', '.join(bad)}")
    return LoadPanel(panel.regions, panel.timestamps, (v - lo) / span, panel.resolution, "unitless")


# -- daily views ---------------------------------------------------------

def _full_days(timestamps: np.ndarray, resolution: int):
    if 86400 % resolution:
        raise IncompatibleResolution(f"{resolution} s does not divide a day")
    per_day = 86400 // resolution
    days = timestamps.astype("datetime64[D]")
    out = []
    for day in np.unique(days):
        pos = np.flatnonzero(days == day)
        if len(pos) == per_day:
            out.append((day, pos))
    return out, per_day


def daily_matrix(panel: LoadPanel, region: str, weekdays_only: bool = False):
    """Day x time-of-day grid for one region (complete days only).

    Returns ``(days, matrix)`` with ``matrix[d, s]`` the sample at slot ``s``.
    """
    series = panel.region(region)
    days, per_day = _full_days(panel.timestamps, panel.resolution)
    if weekdays_only:
        days = [(d, p) for d, p in days if d.astype(dt.date).weekday() < 5]
    if not days:
        return np.array([], dtype="datetime64[D]"), np.empty((0, per_day))
    return (np.array([d for d, _ in days], dtype="datetime64[D]"),
            np.vstack([series[p] for _, p in days]))


def hourly_percentiles(panel: LoadPanel, region: str, percentiles: Iterable[float] = (5, 25, 50, 75, 95),
                       weekdays_only: bool = False) -> np.ndarray:
    """Percentiles of demand at each time-of-day slot: shape (slots, len(percentiles))."""
    _, mat = daily_matrix(panel, region, weekdays_only)
    if not len(mat):
        raise EmptyInput("no complete days to summarize")
    return np.percentile(mat, list(percentiles), axis=0).T


@dataclass(frozen=True)
class DayScore:
    day: dt.date
    score: float


def _by_day(ts: TemperatureSeries) -> dict[tuple[int, int], tuple[dt.date, np.ndarray]]:
    days = ts.timestamps.astype("datetime64[D]")
    out = {}
    for day in np.unique(days):
        d = day.astype(dt.date)
        out[(d.month, d.day)] = (d, ts.celsius[days == day])
    return out


def temperature_similarity(a: TemperatureSeries, b: TemperatureSeries, eps: float = TEMP_EPS_C) -> list[DayScore]:
    """Rank calendar days by mean absolute percentage difference of ``b`` from ``a``.

    Days are paired by month and day, so two years of the same window compare
    directly. The denominator is ``max(|a|, eps)``. Ties keep calendar order.
    """
    if a.resolution != b.resolution:
        raise WindowMismatch("temperature series differ in resolution")
    da, db = _by_day(a), _by_day(b)
    if set(da) != set(db):
        raise WindowMismatch("temperature series cover different calendar days")
    scores = []
    for key in sorted(da):
        day, va = da[key]
        vb = db[key][1]
        if len(va) != len(vb):
            raise WindowMismatch(f"{day}: unequal sample counts")
        pct = np.abs(va - vb) / np.maximum(np.abs(va), eps) * 100.0
        scores.append(DayScore(day, float(pct.mean())))
    return sorted(scores, key=lambda s: s.score)


def rank_fraction(ranked: Sequence[DayScore], day: dt.date) -> float:
    """Fraction of days whose score is at or below ``day``'s (1-based rank / count)."""
    for k, s in enumerate(ranked):
        if s.day == day:
            return (k + 1) / len(ranked)
    raise KeyError(day)
