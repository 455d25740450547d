"""Seeded synthetic NYISO-style zone demand for demos and end-to-end tests.

Real zone feeds are not bundled. The generator produces two comparable years
(a normal one and a depressed one) on the same calendar window at 5-minute
resolution, with a few planted features so the preselection has something
definite to find on each scripted day.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .grid.mapping import NYISO_ZONES

# Long-run mean demand per zone (MW); the ratio mapping divides by these.
REFERENCE_MW = {
    "WEST": 1750.0, "GENESE": 1000.0, "CENTRL": 1700.0, "NORTH": 600.0, "MHK VL": 850.0,
    "CAPITL": 1250.0, "HUD VL": 1100.0, "MILLWD": 330.0, "DUNWOD": 690.0, "N.Y.C.": 6000.0,
    "LONGIL": 2300.0,
}

# Hand-set zone-to-reference ratios for the two single-instant case fixtures.
_CASE_RATIOS = {
    2019: (1.02, 1.03, 1.01, 0.98, 1.00, 1.02, 1.00, 1.04, 1.03, 1.06, 0.97),
    2020: (0.84, 0.83, 0.85, 0.90, 0.86, 0.87, 0.82, 0.80, 0.79, 0.74, 0.83),
}


def case_snapshot(year: int) -> dict[str, float]:
    """Zone MW at one instant for the heavy (2019) or light (2020) fixture."""
    return {z: REFERENCE_MW[z] * r for z, r in zip(NYISO_ZONES, _CASE_RATIOS[year])}


@dataclass(frozen=True)
class DayPlan:
    """Planted features for one calendar day (month, day)."""

    ld_peak_hour: float
    zone: str
    trough_hour: float
    bump: float


# Light-year demand is depressed around ld_peak_hour (largest LD there) and
# one zone is bumped around trough_hour (its share, hence -LIID, peaks there).
DAY_PLANS = {
    (4, 9): DayPlan(8.0, "DUNWOD", 19.5, 0.40),
    (4, 10): DayPlan(8.0, "NORTH", 8.6, 0.45),
    (4, 11): DayPlan(13.0, "CAPITL", 13.6, 0.12),
    (4, 12): DayPlan(10.0, "GENESE", 10.5, 0.07),
}

START_DAY = (4, 6)
N_DAYS = 9
STEP_S = 300
HEAVY_LEVEL = 1.0
LIGHT_LEVEL = 0.86


def _bump(h: np.ndarray, center: float, width: float) -> np.ndarray:
    return np.exp(-0.5 * ((h - center) / width) ** 2)


def _daily_shape(h: np.ndarray, lag: float, evening: float = 0.16) -> np.ndarray:
    h = h - lag
    return (0.86 + 0.10 * _bump(h, 8.0, 2.0) + evening * _bump(h, 18.5, 2.5)
            - 0.14 * _bump(h, 3.5, 2.5))


def _timestamps(year: int) -> np.ndarray:
    start = np.datetime64(f"{year}-{START_DAY[0]:02d}-{START_DAY[1]:02d}T00:00:00", "s")
    return start + np.arange(N_DAYS * 86400 // STEP_S) * np.timedelta64(STEP_S, "s")


def zone_panel(year: int, light: bool, seed: int = 7) -> tuple[np.ndarray, np.ndarray]:
    """(timestamps, values[zone x time]) in MW for one synthetic year."""
    ts = _timestamps(year)
    hours = (ts - ts.astype("datetime64[D]")).astype(np.int64) / 3600.0
    days = ts.astype("datetime64[D]")
    weekday = ((days.astype(np.int64) + 3) % 7)  # 0 = Monday
    rng = np.random.default_rng([seed, year])
    out = np.empty((len(NYISO_ZONES), len(ts)))
    plan_scale = np.ones(len(ts))
    bumps = {z: np.zeros(len(ts)) for z in NYISO_ZONES}
    if light:
        for day in np.unique(days):
            md = tuple(int(v) for v in str(day)[5:10].split("-"))
            plan = DAY_PLANS.get(md)
            if plan is None:
                continue
            sel = days == day
            plan_scale[sel] -= 0.12 * _bump(hours[sel], plan.ld_peak_hour, 2.0)
            bumps[plan.zone][sel] += plan.bump * _bump(hours[sel], plan.trough_hour, 0.75)
    level = LIGHT_LEVEL if light else HEAVY_LEVEL
    for i, zone in enumerate(NYISO_ZONES):
        # zones differ in timing and evening weight so the panel is not rank one
        lag = 0.5 * (i % 4)
        evening = 0.16 + 0.12 * ((7 * i) % 11 / 10.0 - 0.5)
        shape = _daily_shape(hours, lag, evening) * np.where(weekday >= 5, 0.93, 1.0)
        noise = 1.0 + 0.0015 * rng.standard_normal(len(ts))
        out[i] = REFERENCE_MW[zone] * level * shape * plan_scale * (1.0 + bumps[zone]) * noise
    return ts, out


def temperature_series(year: int, seed: int = 7) -> tuple[np.ndarray, np.ndarray]:
    ts = _timestamps(year)
    hours = (ts - ts.astype("datetime64[D]")).astype(np.int64) / 3600.0
    day_idx = ((ts - ts[0]).astype(np.int64) // 86400).astype(float)
    rng = np.random.default_rng([seed, year, 1])
    day_mean = 9.0 + 0.4 * day_idx + rng.normal(0.0, 2.0, N_DAYS)[day_idx.astype(int)]
    celsius = day_mean + 5.0 * np.sin(2 * np.pi * (hours - 9.0) / 24.0) + rng.normal(0.0, 0.3, len(ts))
    return ts, celsius


def _write_long(path: Path, ts: np.ndarray, regions, values: np.ndarray, skip: set[int] = frozenset()) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["timestamp", "region", "value"])
        for k, stamp in enumerate(ts):
            if k in skip:
                continue
            for i, region in enumerate(regions):
                w.writerow([str(stamp), region, f"{values[i, k]:.3f}" if values.ndim == 2 else f"{values[k]:.2f}"])


def write_sample(directory: str | Path, seed: int = 7) -> Path:
    """Write both years' zone and temperature CSVs plus a ready-to-run config."""
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    for year, light in ((2019, False), (2020, True)):
        ts, vals = zone_panel(year, light, seed)
        # one dropped interior sample exercises gap interpolation on ingest
        _write_long(d / f"load_{year}.csv", ts, NYISO_ZONES, vals, skip={1001} if year == 2019 else set())
        ts, temp = temperature_series(year, seed)
        with (d / f"temperature_{year}.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["timestamp", "region", "value"])
            for k, stamp in enumerate(ts):
                w.writerow([str(stamp), "NYC", f"{temp[k]:.2f}"])
    with (d / "reference_mw.json").open("w") as fh:
        json.dump(REFERENCE_MW, fh, indent=2)
        fh.write("\n")
    config = {
        "years": {
            "2019": {"loads": "load_2019.csv", "temperature": "temperature_2019.csv"},
            "2020": {"loads": "load_2020.csv", "temperature": "temperature_2020.csv"},
        },
        "compare": ["2019", "2020"],
        "reference_mw": "reference_mw.json",
        "days": ["04-09", "04-10", "04-11", "04-12"],
        "dmd": [
            {"name": "zones", "layout": "regions", "resolution": 3600, "rank": "auto"},
            {"name": "nyc_profile", "layout": "daily-profile", "region": "N.Y.C.", "resolution": 3600,
             "rank": "auto"},
        ],
        "preselect": {"quantile": 0.9, "resolution": 300},
        "simulation": {"duration": 300.0, "step": 0.005, "attack_time": 200.0, "attack_duration": 5.0,
                       "trace_stride": 20},
        "standards": ["NYISO", "NERC"],
        "output": "out",
    }
    path = d / "config.json"
    path.write_text(json.dumps(config, indent=2) + "\n")
    return path
