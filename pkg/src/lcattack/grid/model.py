"""Static grid description and its file formats.

A :class:`GridModel` is immutable. Operations that change loads return a new
model (see :func:`lcattack.grid.mapping.map_zone_loads`).

Per-unit conventions: branch and load quantities are on the system base
(``base_mva``). Generator dynamic data (``h``, ``xd_prime``, ``d``) are on the
machine's own rating ``mva``; use the ``*_sys`` helpers to convert.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable

from ..errors import MalformedInput, ValidationError

BUS_TYPES = ("slack", "PV", "PQ")


@dataclass(frozen=True)
class Bus:
    id: int
    type: str
    base_kv: float = 0.0
    shunt_g: float = 0.0
    shunt_b: float = 0.0
    name: str = ""


@dataclass(frozen=True)
class Branch:
    from_bus: int
    to_bus: int
    r: float
    x: float
    b: float = 0.0
    # Fixed off-nominal ratio on the from side; no tap control.
    tap: float = 1.0


@dataclass(frozen=True)
class Generator:
    bus: int
    p: float
    v_set: float = 1.0
    h: float = 4.0
    xd_prime: float = 0.25
    d: float = 2.0
    mva: float = 100.0

    def h_sys(self, base_mva: float) -> float:
        return self.h * self.mva / base_mva

    def d_sys(self, base_mva: float) -> float:
        return self.d * self.mva / base_mva

    def xd_sys(self, base_mva: float) -> float:
        return self.xd_prime * base_mva / self.mva


@dataclass(frozen=True)
class Load:
    bus: int
    p: float
    q: float = 0.0


@dataclass(frozen=True)
class GridModel:
    buses: tuple[Bus, ...]
    branches: tuple[Branch, ...]
    generators: tuple[Generator, ...]
    loads: tuple[Load, ...]
    base_mva: float = 100.0
    # zone code -> bus id, in mapping order
    zones: dict[str, int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(self.buses))
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "generators", tuple(self.generators))
        object.__setattr__(self, "loads", tuple(self.loads))
        self.validate()

    def validate(self) -> None:
        ids = [b.id for b in self.buses]
        if len(set(ids)) != len(ids):
            raise ValidationError("duplicate bus ids")
        for b in self.buses:
            if b.type not in BUS_TYPES:
                raise ValidationError(f"bus {b.id}: unknown type {b.type!r}")
        n_slack = sum(b.type == "slack" for b in self.buses)
        if n_slack != 1:
            raise ValidationError(f"expected exactly one slack bus, found {n_slack}")
        known = set(ids)
        for br in self.branches:
            if br.from_bus not in known or br.to_bus not in known:
                raise ValidationError(f"branch {br.from_bus}-{br.to_bus} references unknown bus")
        for g in self.generators:
            if g.bus not in known:
                raise ValidationError(f"generator at unknown bus {g.bus}")
            if g.h <= 0 or g.xd_prime <= 0 or g.mva <= 0:
                raise ValidationError(f"generator at bus {g.bus}: H, x'd and rating must be positive")
        for ld in self.loads:
            if ld.bus not in known:
                raise ValidationError(f"load at unknown bus {ld.bus}")
        for zone, bus in self.zones.items():
            if bus not in known:
                raise ValidationError(f"zone {zone} mapped to unknown bus {bus}")

    @property
    def bus_ids(self) -> list[int]:
        return [b.id for b in self.buses]

    @property
    def bus_index(self) -> dict[int, int]:
        return {b.id: i for i, b in enumerate(self.buses)}

    @property
    def slack_bus(self) -> int:
        return next(b.id for b in self.buses if b.type == "slack")

    def bus(self, bus_id: int) -> Bus:
        for b in self.buses:
            if b.id == bus_id:
                return b
        raise KeyError(bus_id)

    def load_at(self, bus_id: int) -> Load | None:
        found = [ld for ld in self.loads if ld.bus == bus_id]
        if not found:
            return None
        return Load(bus_id, sum(ld.p for ld in found), sum(ld.q for ld in found))

    def total_load(self) -> float:
        return sum(ld.p for ld in self.loads)

    def with_loads(self, loads: Iterable[Load]) -> "GridModel":
        return replace(self, loads=tuple(loads))

    def with_generators(self, generators: Iterable[Generator]) -> "GridModel":
        return replace(self, generators=tuple(generators))

    # -- serialization -------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "base_mva": self.base_mva,
            "buses": [asdict(b) for b in self.buses],
            "branches": [asdict(b) for b in self.branches],
            "generators": [asdict(g) for g in self.generators],
            "loads": [asdict(ld) for ld in self.loads],
            "zones": dict(self.zones),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GridModel":
        try:
            return cls(
                buses=[Bus(**b) for b in data["buses"]],
                branches=[Branch(**b) for b in data["branches"]],
                generators=[Generator(**g) for g in data["generators"]],
                loads=[Load(**ld) for ld in data.get("loads", [])],
                base_mva=float(data.get("base_mva", 100.0)),
                zones={str(k): int(v) for k, v in data.get("zones", {}).items()},
                name=data.get("name", ""),
            )
        except (KeyError, TypeError) as exc:
            raise MalformedInput(f"grid description: {exc}") from exc


def load_model(path: str | Path) -> GridModel:
    """Read a grid from a JSON fixture or an IEEE common-format case file."""
    path = Path(path)
    if not path.exists():
        raise MalformedInput(f"no such grid file: {path}")
    text = path.read_text()
    if text.lstrip().startswith("{"):
        return GridModel.from_dict(json.loads(text))
    return parse_cdf(text)


def save_model(model: GridModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model.to_dict(), indent=2) + "\n")


_CDF_TYPES = {0: "PQ", 1: "PQ", 2: "PV", 3: "slack"}


def parse_cdf(text: str, **machine_defaults) -> GridModel:
    """Parse an IEEE common data format case.

    The format carries no machine dynamic data; every generator gets the
    :class:`Generator` defaults (overridable through ``machine_defaults``)
    rated at the case MVA base.
    """
    lines = text.splitlines()
    if not lines:
        raise MalformedInput("empty case file")
    try:
        base_mva = float(lines[0][31:37])
    except ValueError:
        base_mva = 100.0
    buses, loads, gens, branches = [], [], [], []
    section = None
    for lineno, line in enumerate(lines[1:], start=2):
        head = line.strip()
        if head.startswith("BUS DATA FOLLOWS"):
            section = "bus"
            continue
        if head.startswith("BRANCH DATA FOLLOWS"):
            section = "branch"
            continue
        if head.startswith("-999") or head.startswith("-9"):
            section = None
            continue
        if section is None or not head:
            continue
        try:
            if section == "bus":
                num = int(line[:4])
                name = line[5:17].strip()
                tok = line[18:].split()
                kind = _CDF_TYPES[int(tok[2])]
                load_p, load_q = float(tok[5]), float(tok[6])
                gen_p = float(tok[7])
                base_kv, v_des = float(tok[9]), float(tok[10])
                g_sh, b_sh = float(tok[13]), float(tok[14])
                buses.append(Bus(num, kind, base_kv, g_sh, b_sh, name))
                if load_p or load_q:
                    loads.append(Load(num, load_p / base_mva, load_q / base_mva))
                if kind in ("PV", "slack"):
                    v_set = v_des if v_des > 0 else float(tok[3])
                    gens.append(Generator(num, gen_p / base_mva, v_set, mva=base_mva, **machine_defaults))
            else:
                tok = line.split()
                ratio = float(tok[14]) if len(tok) > 14 else 0.0
                branches.append(Branch(int(tok[0]), int(tok[1]), float(tok[6]), float(tok[7]),
                                       float(tok[8]), ratio if ratio else 1.0))
        except (IndexError, ValueError, KeyError) as exc:
            raise MalformedInput(f"case line {lineno}: {exc}") from exc
    return GridModel(buses, branches, gens, loads, base_mva)
