"""Bundled fixtures and the NYISO zone to load-bus mapping."""

from __future__ import annotations

import csv
import json
from importlib import resources
from pathlib import Path
from typing import Mapping

from ..errors import AllZonesZero, MalformedInput, MissingZone, ValidationError
from .model import GridModel, Load

NYISO_ZONES = ("WEST", "GENESE", "CENTRL", "NORTH", "MHK VL", "CAPITL",
               "HUD VL", "MILLWD", "DUNWOD", "N.Y.C.", "LONGIL")


def ieee14_fixture() -> GridModel:
    """IEEE 14-bus case with classical machine data and the 11 zone buses."""
    text = resources.files("lcattack.data").joinpath("ieee14.json").read_text()
    return GridModel.from_dict(json.loads(text))


def map_zone_loads(model: GridModel, zone_snapshot: Mapping[str, float], mode: str = "share",
                   reference: Mapping[str, float] | None = None) -> GridModel:
    """Place zone demand on the model's zone buses.

    ``share`` mode: each zone bus carries ``zone / sum(zones) * S_target`` where
    ``S_target`` is the model's current active load on the zone buses, so the
    system total is preserved.

    ``ratio`` mode: each zone bus carries its current load times
    ``zone / reference[zone]``, with ``reference`` the zone's historical mean
    demand. The system total then follows the zone data.

    In both modes reactive load is scaled with active load, keeping each bus's
    power factor.
    """
    if not model.zones:
        raise ValidationError("model has no zone mapping")
    missing = [z for z in model.zones if z not in zone_snapshot]
    if missing:
        raise MissingZone(f"snapshot lacks zones: {', '.join(missing)}")
    values = {z: float(zone_snapshot[z]) for z in model.zones}
    if any(v < 0 for v in values.values()):
        raise ValidationError("zone demand must be non-negative")

    base = {z: model.load_at(b) or Load(b, 0.0, 0.0) for z, b in model.zones.items()}
    if mode == "share":
        total = sum(values.values())
        if total <= 0:
            raise AllZonesZero("all zone demands are zero")
        s_target = sum(ld.p for ld in base.values())
        new_p = {z: values[z] / total * s_target for z in model.zones}
    elif mode == "ratio":
        if reference is None:
            raise ValidationError("ratio mapping needs reference zone averages")
        absent = [z for z in model.zones if not reference.get(z)]
        if absent:
            raise MissingZone(f"reference lacks positive averages for: {', '.join(absent)}")
        new_p = {z: base[z].p * values[z] / float(reference[z]) for z in model.zones}
    else:
        raise ValidationError(f"unknown mapping mode {mode!r}")

    zone_buses = set(model.zones.values())
    loads = [ld for ld in model.loads if ld.bus not in zone_buses]
    for z, bus in model.zones.items():
        b = base[z]
        q = b.q / b.p * new_p[z] if b.p else 0.0
        loads.append(Load(bus, new_p[z], q))
    order = model.bus_index
    loads.sort(key=lambda ld: order[ld.bus])
    return model.with_loads(loads)


def read_zone_snapshot(path: str | Path) -> dict[str, float]:
    """Read a one-row CSV keyed by zone code."""
    path = Path(path)
    if not path.exists():
        raise MalformedInput(f"no such snapshot file: {path}")
    with path.open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) != 1:
        raise MalformedInput(f"{path}: expected exactly one data row, found {len(rows)}")
    try:
        return {k.strip(): float(v) for k, v in rows[0].items() if k and k.strip() in NYISO_ZONES}
    except ValueError as exc:
        raise MalformedInput(f"{path}: {exc}") from exc
