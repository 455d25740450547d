"""Batch pipeline: ingest -> dmd -> preselect -> simulate -> report.

Every command takes a JSON config path. Paths inside the config are resolved
relative to the config file. Outputs land under ``output`` in ``panels/``,
``dmd/``, ``preselect/``, ``traces/`` and ``report.json``.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import __version__
from .attack import AttackScenario, PreselectionReport, load_scenario, preselect
from .dmd import build_snapshot_pair, dmd, mode_report, save_result
from .dynamics import SimConfig, disconnect_events, simulate
from .errors import LcaError, LengthMismatch, MalformedInput, MissingZone, NothingToReport, ValidationError
from .grid import NYISO_ZONES, ieee14_fixture, load_model, map_zone_loads, power_flow
from .loaddata import (LoadPanel, daily_matrix, ingest_csv, ingest_temperature_csv, normalize_minmax, resample,
                       temperature_similarity, write_panel_csv)
from .protection import SCHEMES, STANDARDS, evaluate, load_overrides
from .sample import write_sample

_DAY = re.compile(r"^\d{2}-\d{2}$")
_CLOCK = re.compile(r"^\d{2}:\d{2}$")


@dataclass(frozen=True)
class YearInput:
    loads: Path
    temperature: Path | None = None


@dataclass(frozen=True)
class DmdAnalysis:
    """``regions``: one row per region, one snapshot per sample.
    ``daily-profile``: one row per time-of-day slot of ``region``, one snapshot per day."""

    name: str = "zones"
    layout: str = "regions"
    resolution: int = 3600
    rank: int | str = "auto"
    normalize: bool = True
    region: str | None = None


@dataclass(frozen=True)
class RunConfig:
    root: Path
    years: dict[str, YearInput]
    compare: tuple[str, str]
    output: Path
    days: tuple[str, ...] = ()
    reference: dict[str, float] | None = None
    model: Path | None = None
    mapping: str = "ratio"
    dmd: tuple[DmdAnalysis, ...] = ()
    quantile: float = 0.9
    preselect_resolution: int = 300
    duration: float = 300.0
    step: float = 0.005
    attack_time: float = 200.0
    attack_duration: float = 5.0
    trace_stride: int = 20
    governor: bool = False
    ufls: str | None = None
    standards: tuple[str, ...] = ("NYISO",)
    standards_file: Path | None = None
    dwell: float = 10.0
    scenarios: tuple[dict, ...] = ()
    jobs: int = 1
    seed: int | None = None


def _need_file(root: Path, value, what: str) -> Path:
    if not isinstance(value, str) or not value:
        raise ValidationError(f"{what} must be a file path")
    p = (root / value).resolve()
    if not p.is_file():
        raise MalformedInput(f"{what} not found: {p}")
    return p


def load_config(path: str | Path, args: argparse.Namespace | None = None) -> RunConfig:
    """Parse and fully validate a run config; touches nothing on disk."""
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except OSError as exc:
        raise MalformedInput(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise ValidationError("config must be a JSON object")
    root = path.resolve().parent

    years = {}
    for name, spec in (raw.get("years") or {}).items():
        if not isinstance(spec, dict):
            raise ValidationError(f"year {name}: expected an object")
        temp = spec.get("temperature")
        years[str(name)] = YearInput(_need_file(root, spec.get("loads"), f"year {name} loads"),
                                     _need_file(root, temp, f"year {name} temperature") if temp else None)
    if not years:
        raise ValidationError("config lists no input years")
    compare = tuple(str(y) for y in raw.get("compare", list(years)[:2]))
    if len(compare) != 2 or any(y not in years for y in compare) or compare[0] == compare[1]:
        raise ValidationError(f"compare must name two distinct configured years, got {list(compare)}")

    ref = raw.get("reference_mw")
    if isinstance(ref, str):
        ref_path = _need_file(root, ref, "reference_mw")
        try:
            ref = json.loads(ref_path.read_text())
        except json.JSONDecodeError as exc:
            raise MalformedInput(f"{ref_path}: {exc}") from exc
    if ref is not None:
        if not isinstance(ref, dict):
            raise ValidationError("reference_mw must map zone codes to MW")
        ref = {str(k): float(v) for k, v in ref.items()}

    dmd_cfg = raw.get("dmd", {})
    if isinstance(dmd_cfg, dict):
        dmd_cfg = [dmd_cfg]
    try:
        analyses = tuple(DmdAnalysis(**d) for d in dmd_cfg)
    except TypeError as exc:
        raise ValidationError(f"bad dmd analysis: {exc}") from exc
    pre_cfg = raw.get("preselect", {})
    sim_cfg = raw.get("simulation", {})
    cfg = RunConfig(
        root=root, years=years, compare=compare, reference=ref,
        output=(root / raw.get("output", "out")).resolve(),
        days=tuple(raw.get("days", ())),
        model=_need_file(root, raw["model"], "model") if raw.get("model") else None,
        mapping=raw.get("mapping", "ratio"),
        dmd=analyses,
        quantile=float(pre_cfg.get("quantile", 0.9)),
        preselect_resolution=int(pre_cfg.get("resolution", 300)),
        duration=float(sim_cfg.get("duration", 300.0)),
        step=float(sim_cfg.get("step", 0.005)),
        attack_time=float(sim_cfg.get("attack_time", 200.0)),
        attack_duration=float(sim_cfg.get("attack_duration", 5.0)),
        trace_stride=int(sim_cfg.get("trace_stride", 20)),
        governor=bool(sim_cfg.get("governor", False)),
        ufls=sim_cfg.get("ufls"),
        standards=tuple(raw.get("standards", ("NYISO",))),
        standards_file=_need_file(root, raw["standards_file"], "standards_file") if raw.get("standards_file") else None,
        dwell=float(raw.get("overfrequency_dwell", 10.0)),
        scenarios=tuple(raw.get("scenarios", ())),
        jobs=int(raw.get("jobs", 1)),
        seed=raw.get("seed"),
    )
    if args is not None:
        over = {}
        for flag, key in (("duration", "duration"), ("step", "step"), ("jobs", "jobs"), ("seed", "seed")):
            v = getattr(args, flag, None)
            if v is not None:
                over[key] = v
        if getattr(args, "rank", None) is not None:
            over["dmd"] = tuple(replace(a, rank=args.rank) for a in cfg.dmd)
        if getattr(args, "standard", None):
            over["standards"] = tuple(args.standard)
        if getattr(args, "output", None):
            over["output"] = Path(args.output).resolve()
        cfg = replace(cfg, **over)
    _validate(cfg)
    return cfg


def _validate(cfg: RunConfig) -> None:
    if cfg.duration <= 0 or cfg.step <= 0:
        raise ValidationError("duration and step must be positive")
    if cfg.step > 0.01:
        raise ValidationError("integration step must not exceed 0.01 s")
    if cfg.attack_time < 0 or cfg.attack_time + cfg.attack_duration > cfg.duration or cfg.attack_duration <= 0:
        raise ValidationError("attack must start and end inside the simulated window")
    if cfg.trace_stride < 1 or cfg.jobs < 1:
        raise ValidationError("trace_stride and jobs must be at least 1")
    if cfg.mapping not in ("ratio", "share"):
        raise ValidationError(f"unknown mapping mode {cfg.mapping!r}")
    names = [a.name for a in cfg.dmd]
    if len(set(names)) != len(names):
        raise ValidationError("dmd analysis names must be unique")
    for a in cfg.dmd:
        if a.layout not in ("regions", "daily-profile"):
            raise ValidationError(f"dmd {a.name}: unknown layout {a.layout!r}")
        if a.layout == "daily-profile" and not a.region:
            raise ValidationError(f"dmd {a.name}: daily-profile needs a region")
        if a.rank != "auto" and (isinstance(a.rank, bool) or not isinstance(a.rank, int) or a.rank < 1):
            raise ValidationError(f"dmd {a.name}: rank must be 'auto' or a positive integer, got {a.rank!r}")
    if not 0 <= cfg.quantile <= 1:
        raise ValidationError("preselect quantile must lie in [0, 1]")
    for d in cfg.days:
        if not isinstance(d, str) or not _DAY.match(d):
            raise ValidationError(f"days must be MM-DD strings, got {d!r}")
    standards, schemes = _protection_tables(cfg)
    unknown = [s for s in cfg.standards if s not in standards]
    if unknown or not cfg.standards:
        raise ValidationError(f"unknown standards {unknown}; choose from {sorted(standards)}")
    if cfg.ufls is not None and cfg.ufls not in schemes:
        raise ValidationError(f"unknown UFLS scheme {cfg.ufls!r}")
    if cfg.reference is not None:
        absent = [z for z in NYISO_ZONES if cfg.reference.get(z, 0) <= 0]
        if absent:
            raise MissingZone(f"reference_mw lacks positive values for {absent}")
    model = _model(cfg)
    for entry in cfg.scenarios:
        _scenario_entry(cfg, entry).validate_against(model)


def _protection_tables(cfg: RunConfig):
    if cfg.standards_file is None:
        return STANDARDS, SCHEMES
    return load_overrides(cfg.standards_file)


def _scenario_entry(cfg: RunConfig, entry: dict) -> AttackScenario:
    if not isinstance(entry, dict) or "file" not in entry:
        raise ValidationError("each scenario entry needs a 'file'")
    for key, pat in (("day", _DAY), ("time", _CLOCK)):
        if not isinstance(entry.get(key), str) or not pat.match(entry[key]):
            raise ValidationError(f"scenario entry needs '{key}' in the right format")
    sc = load_scenario(_need_file(cfg.root, entry["file"], "scenario"))
    if sc.window[1] > cfg.duration:
        raise ValidationError(f"scenario {sc.label} window exceeds the simulated duration")
    return sc


def _model(cfg: RunConfig):
    return load_model(cfg.model) if cfg.model else ieee14_fixture()


# -- data access ---------------------------------------------------------

@lru_cache(maxsize=8)
def _ingest(path: Path, mtime_ns: int, size: int) -> LoadPanel:
    return ingest_csv(path)


def _panel(cfg: RunConfig, year: str) -> LoadPanel:
    path = cfg.years[year].loads
    st = path.stat()
    return _ingest(path, st.st_mtime_ns, st.st_size)


def _zone_matrix(panel: LoadPanel) -> np.ndarray:
    missing = [z for z in NYISO_ZONES if z not in panel.regions]
    if missing:
        raise MissingZone(f"load panel lacks zones {missing}")
    return np.vstack([panel.region(z) for z in NYISO_ZONES])


def _reference(cfg: RunConfig) -> dict[str, float]:
    if cfg.reference is not None:
        return cfg.reference
    # pooled mean over both compared years keeps one common base
    pooled = np.hstack([_zone_matrix(_panel(cfg, y)) for y in cfg.compare])
    return {z: float(v) for z, v in zip(NYISO_ZONES, pooled.mean(axis=1))}


def _day_mask(panel: LoadPanel, day: str) -> np.ndarray:
    md = np.array([str(t)[5:10] for t in panel.timestamps.astype("datetime64[D]")])
    return md == day


def _clock(ts: np.ndarray) -> list[str]:
    return [str(t)[11:16] for t in ts]


def _write_json(path: Path, payload) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(payload, indent=2) + "\n")


# -- commands ------------------------------------------------------------

def cmd_ingest(cfg: RunConfig) -> dict:
    out = cfg.output / "panels"
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for year in cfg.years:
        panel = _panel(cfg, year)
        write_panel_csv(panel, out / f"{year}.csv")
        norm = normalize_minmax(panel)
        write_panel_csv(norm, out / f"{year}_normalized.csv")
        hourly = resample(norm, 3600)
        with (out / f"{year}_heatmap.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["region", "day", *(f"h{h:02d}" for h in range(24))])
            for region in hourly.regions:
                days, mat = daily_matrix(hourly, region)
                for d, row in zip(days, mat):
                    w.writerow([region, str(d), *(repr(float(v)) for v in row)])
        summary[year] = {"regions": list(panel.regions), "samples": panel.m, "resolution_s": panel.resolution,
                         "start": str(panel.timestamps[0]), "end": str(panel.timestamps[-1])}
    a, b = (cfg.years[y].temperature for y in cfg.compare)
    if a is not None and b is not None:
        ranked = temperature_similarity(ingest_temperature_csv(a), ingest_temperature_csv(b))
        with (out / "temperature_similarity.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["rank", "day", "avg_pct_difference"])
            for k, s in enumerate(ranked, 1):
                w.writerow([k, s.day.isoformat()[5:], repr(s.score)])
        summary["temperature_similarity"] = [{"day": s.day.isoformat()[5:], "score": s.score} for s in ranked]
    _write_json(out / "summary.json", summary)
    return summary


def _dmd_input(cfg: RunConfig, year: str, a: DmdAnalysis) -> tuple[np.ndarray, float, list[str]]:
    panel = resample(_panel(cfg, year), a.resolution)
    if a.normalize:
        panel = normalize_minmax(panel)
    if a.layout == "regions":
        return panel.values, float(panel.resolution), list(panel.regions)
    if a.region not in panel.regions:
        raise MissingZone(f"dmd {a.name}: no region {a.region!r} in {year}")
    _, mat = daily_matrix(panel, a.region)
    rows = [str(np.timedelta64(k * a.resolution, "s").astype("timedelta64[m]")) for k in range(mat.shape[1])]
    return mat.T, 86400.0, rows


def cmd_dmd(cfg: RunConfig) -> dict:
    out = cfg.output / "dmd"
    out.mkdir(parents=True, exist_ok=True)
    summary = {}
    for a in cfg.dmd:
        for year in cfg.years:
            data, dt, rows = _dmd_input(cfg, year, a)
            res = dmd(build_snapshot_pair(data), a.rank)
            stem = f"{a.name}_{year}"
            save_result(res, out / f"{stem}.json", dt=dt)
            modes = mode_report(res, dt)
            with (out / f"{stem}_modes.csv").open("w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(["order", "mode", "eig_re", "eig_im", "frequency_hz", "period_h", "growth_per_s", "energy"])
                for k, m in enumerate(modes, 1):
                    period = repr(1 / abs(m.frequency) / 3600) if m.frequency else ""
                    w.writerow([k, m.index, repr(m.eigenvalue.real), repr(m.eigenvalue.imag), repr(m.frequency),
                                period, repr(m.growth), repr(m.energy)])
            summary[stem] = {"layout": a.layout, "rank": res.r, "rows": rows, "snapshots": data.shape[1],
                             "dt_s": dt, "top_modes": [m.to_dict() for m in modes[:6]]}
    _write_json(out / "summary.json", summary)
    return summary


def _bus_loads(cfg: RunConfig, model, year: str, ref: dict[str, float]):
    panel = _panel(cfg, year)
    if cfg.preselect_resolution != panel.resolution:
        panel = resample(panel, cfg.preselect_resolution)
    base = np.array([model.load_at(model.zones[z]).p for z in NYISO_ZONES])
    scale = base / np.array([ref[z] for z in NYISO_ZONES])
    return panel, scale[:, None] * _zone_matrix(panel)


def _preselection(cfg: RunConfig) -> dict[str, PreselectionReport]:
    model = _model(cfg)
    ref = _reference(cfg)
    buses = [model.zones[z] for z in NYISO_ZONES]
    (pa, la), (pb, lb) = (_bus_loads(cfg, model, y, ref) for y in cfg.compare)
    reports = {}
    for day in cfg.days:
        ma, mb = _day_mask(pa, day), _day_mask(pb, day)
        if not ma.any() or not mb.any():
            raise ValidationError(f"day {day} missing from one of the compared years")
        ta, tb = _clock(pa.timestamps[ma]), _clock(pb.timestamps[mb])
        if ta != tb:
            raise LengthMismatch(f"day {day}: the two years do not share a time-of-day grid")
        # loads are already per-unit on the model base (base_a = base_b = 1)
        reports[day] = preselect(la[:, ma], lb[:, mb], buses, ta, q=cfg.quantile, label=day)
    return reports


def cmd_preselect(cfg: RunConfig) -> dict:
    reports = _preselection(cfg)
    out = cfg.output / "preselect"
    out.mkdir(parents=True, exist_ok=True)
    for rep in reports.values():
        rep.write(out)
    return {d: r.to_dict() for d, r in reports.items()}


@dataclass(frozen=True)
class _Case:
    label: str
    year: str
    day: str
    time: str
    snapshot: dict
    scenario: AttackScenario


def _snapshot(cfg: RunConfig, year: str, day: str, clock: str) -> dict[str, float]:
    panel = _panel(cfg, year)
    stamps = _clock(panel.timestamps)
    mask = _day_mask(panel, day)
    hits = [k for k in np.flatnonzero(mask) if stamps[k] == clock]
    if not hits:
        raise ValidationError(f"no {year} sample at {day} {clock}")
    mat = _zone_matrix(panel)
    return {z: float(mat[i, hits[0]]) for i, z in enumerate(NYISO_ZONES)}


def _cases(cfg: RunConfig) -> list[_Case]:
    plans = []
    if cfg.scenarios:
        for entry in cfg.scenarios:
            plans.append((entry["day"], entry["time"], _scenario_entry(cfg, entry)))
    else:
        for day, rep in _preselection(cfg).items():
            if not rep.target.aligned:
                continue
            t = rep.target
            events = disconnect_events([t.bus], cfg.attack_time, cfg.attack_duration)
            sc = AttackScenario((t.bus,), tuple(events), (0.0, cfg.duration), label=day)
            plans.append((day, rep.times[t.time], sc))
    model = _model(cfg)
    cases = []
    for day, clock, sc in plans:
        sc.validate_against(model)
        for year in cfg.compare:
            cases.append(_Case(f"{sc.label}_{year}", year, day, clock, _snapshot(cfg, year, day, clock), sc))
    return cases


def _clock_start(clock: str, offset: float) -> str:
    minutes = int(clock[:2]) * 60 + int(clock[3:]) - int(round(offset / 60))
    minutes %= 24 * 60
    return f"{minutes // 60:02d}:{minutes % 60:02d}"


def _run_case(cfg: RunConfig, case: _Case) -> dict:
    model = _model(cfg)
    ref = _reference(cfg)
    mapped = map_zone_loads(model, case.snapshot, mode=cfg.mapping, reference=ref)
    pf = power_flow(mapped)
    standards, schemes = _protection_tables(cfg)
    sim = SimConfig(duration=cfg.duration, step=cfg.step, governor=cfg.governor,
                    ufls=schemes[cfg.ufls] if cfg.ufls else None)
    trace = simulate(mapped, pf, case.scenario.events, sim)
    out = cfg.output / "traces" / case.label
    out.mkdir(parents=True, exist_ok=True)
    trace.write_csv(out / "trace.csv", cfg.trace_stride)
    total = mapped.total_load()
    summary = {
        "label": case.label, "year": case.year, "day": case.day,
        "attack_clock": case.time, "window_clock_start": _clock_start(case.time, case.scenario.events[0].time
                                                                     if case.scenario.events else 0.0),
        "scenario": case.scenario.to_dict(),
        "total_load_pu": total,
        "target_load_share": sum(mapped.load_at(b).p for b in case.scenario.buses
                                 if mapped.load_at(b) is not None) / total,
        "trace": trace.summary(),
        "standards": {s: evaluate(trace, standards[s], cfg.dwell).to_dict() for s in cfg.standards},
    }
    _write_json(out / "summary.json", summary)
    return summary


def cmd_simulate(cfg: RunConfig) -> dict:
    cases = _cases(cfg)
    (cfg.output / "traces").mkdir(parents=True, exist_ok=True)
    if cfg.jobs > 1 and len(cases) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(_run_case, [cfg] * len(cases), cases))
    else:
        results = [_run_case(cfg, c) for c in cases]
    return {r["label"]: r for r in results}


def _read_json(path: Path):
    try:
        return json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc


def cmd_report(cfg: RunConfig) -> dict:
    tdir = cfg.output / "traces"
    summaries = sorted(tdir.glob("*/summary.json")) if tdir.is_dir() else []
    if not summaries:
        raise NothingToReport(f"no simulation summaries under {tdir}")
    sims = [_read_json(p) for p in summaries]
    pre = {p.stem: _read_json(p) for p in sorted((cfg.output / "preselect").glob("*.json"))}
    days = {}
    for day in sorted(set(pre) | {s["day"] for s in sims}):
        entry = dict(pre.get(day, {"label": day, "verdict": "scenario"}))
        entry["simulations"] = {}
        days[day] = entry
    for s in sims:
        days[s["day"]]["simulations"][s["year"]] = {
            "label": s["label"],
            "buses": s["scenario"]["buses"],
            "attack_clock": s["attack_clock"],
            "target_load_share": s["target_load_share"],
            "peak_frequency_hz": s["trace"]["peak_frequency_hz"],
            "min_frequency_hz": s["trace"]["min_frequency_hz"],
            "diverged": s["trace"]["diverged"],
            "standards": {k: {"classification": v["classification"], "excursions": len(v["excursions"]),
                              "time_over_s": v["time_over_s"], "time_under_s": v["time_under_s"],
                              "advisories": v["advisories"]}
                          for k, v in s["standards"].items()},
        }
    report = {"version": __version__, "compare": list(cfg.compare), "standards": list(cfg.standards),
              "days": list(days.values())}
    for name in ("panels", "dmd"):
        p = cfg.output / name / "summary.json"
        if p.is_file():
            report[name] = _read_json(p)
    _write_json(cfg.output / "report.json", report)
    with (cfg.output / "report_peaks.csv").open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["label", "year", "day", "buses", "peak_hz", "min_hz", *(f"{s}_class" for s in cfg.standards)])
        for s in sims:
            w.writerow([s["label"], s["year"], s["day"], " ".join(map(str, s["scenario"]["buses"])),
                        repr(s["trace"]["peak_frequency_hz"]), repr(s["trace"]["min_frequency_hz"]),
                        *(s["standards"][k]["classification"] for k in cfg.standards)])
    return report


def cmd_run(cfg: RunConfig) -> dict:
    cmd_ingest(cfg)
    cmd_dmd(cfg)
    cmd_preselect(cfg)
    cmd_simulate(cfg)
    return cmd_report(cfg)


COMMANDS = {"ingest": cmd_ingest, "dmd": cmd_dmd, "preselect": cmd_preselect,
            "simulate": cmd_simulate, "report": cmd_report, "run": cmd_run}


def _rank(text: str):
    return text if text == "auto" else int(text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lcattack", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=f"{name} step" if name != "run" else "whole pipeline")
        p.add_argument("config", help="JSON run config")
        p.add_argument("--duration", type=float, help="simulated seconds")
        p.add_argument("--step", type=float, help="integration step in seconds (at most 0.01)")
        p.add_argument("--standard", action="append", help="repeatable; replaces the config list")
        p.add_argument("--rank", type=_rank, help="DMD rank for every analysis: 'auto' or an integer")
        p.add_argument("--seed", type=int, help="recorded in the config; the pipeline itself draws no randoms")
        p.add_argument("--jobs", type=int, help="worker processes for simulate")
        p.add_argument("--output", help="output directory (overrides config)")
    p = sub.add_parser("make-sample", help="write the synthetic sample inputs and config")
    p.add_argument("directory")
    p.add_argument("--seed", type=int, default=7)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "make-sample":
            path = write_sample(args.directory, seed=args.seed)
            print(path)
            return 0
        cfg = load_config(args.config, args)
        result = COMMANDS[args.command](cfg)
    except LcaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    if args.command in ("preselect", "run", "report"):
        verdicts = result["days"] if "days" in result else list(result.values())
        for d in verdicts:
            print(f"{d.get('label')}: {d.get('verdict')}")
    print(f"{args.command}: ok -> {cfg.output}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
