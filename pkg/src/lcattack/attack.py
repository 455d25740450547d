"""Load-changing attack formalism and the LD/LIID target preselection."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .dynamics import LoadEvent
from .errors import DimensionMismatch, LengthMismatch, MalformedInput, ValidationError, ZeroTotalLoad

NO_ALIGNED_TARGET = "NoAlignedTarget"
ALIGNED = "aligned"

_THREAT_CHOICES = {
    "knowledge": ("oblivious", "semi-oblivious"),
    "access": ("non-possession",),
    "specificity": ("targeted", "non-targeted"),
    "resources": ("class I", "class II"),
    "frequency": ("iterative", "one-shot"),
    "reproducibility": ("one-time", "multiple-times"),
    "level": ("L1", "L2"),
}


@dataclass(frozen=True)
class ThreatModel:
    knowledge: str = "semi-oblivious"
    access: str = "non-possession"
    specificity: str = "targeted"
    resources: str = "class II"
    frequency: str = "iterative"
    reproducibility: str = "multiple-times"
    level: str = "L1"
    assets: tuple[str, ...] = ("IoT-connected high-wattage loads",)
    technique: str = "modify control logic or wireless compromise"
    premise: str = "cyber: integrity"

    def __post_init__(self):
        for name, allowed in _THREAT_CHOICES.items():
            if getattr(self, name) not in allowed:
                raise ValidationError(f"threat {name} must be one of {allowed}, got {getattr(self, name)!r}")
        object.__setattr__(self, "assets", tuple(self.assets))

    def to_dict(self) -> dict:
        d = dict(self.__dict__)
        d["assets"] = list(self.assets)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ThreatModel":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValidationError(f"unknown threat fields: {sorted(extra)}")
        return cls(**d)


# -- discrete-time plant -------------------------------------------------

@dataclass(frozen=True)
class LtiPlant:
    """``x+ = G x + B u``, ``y = C x + e``, nominal control ``u = H_ctl y``."""

    G: np.ndarray
    B: np.ndarray
    C: np.ndarray
    H_ctl: np.ndarray | None = None
    noise: Callable[[int], np.ndarray] | None = None

    def __post_init__(self):
        G, B, C = (np.atleast_2d(np.asarray(a, dtype=float)) for a in (self.G, self.B, self.C))
        n = G.shape[0]
        if G.shape != (n, n) or B.shape[0] != n or C.shape[1] != n:
            raise DimensionMismatch(f"inconsistent plant shapes G{G.shape} B{B.shape} C{C.shape}")
        object.__setattr__(self, "G", G)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        if self.H_ctl is not None:
            H = np.atleast_2d(np.asarray(self.H_ctl, dtype=float))
            if H.shape != (B.shape[1], C.shape[0]):
                raise DimensionMismatch(f"control law must be {B.shape[1]}x{C.shape[0]}, got {H.shape}")
            object.__setattr__(self, "H_ctl", H)

    @property
    def n(self) -> int:
        return self.G.shape[0]

    @property
    def l(self) -> int:
        return self.B.shape[1]

    def e(self, k: int) -> np.ndarray:
        if self.noise is None:
            return np.zeros(self.C.shape[0])
        return np.asarray(self.noise(k), dtype=float)


def uniform_noise(bound: float, size: int, seed: int = 0) -> Callable[[int], np.ndarray]:
    """Bounded uniform output noise, reproducible per step index."""
    def draw(k: int) -> np.ndarray:
        return np.random.default_rng([seed, k]).uniform(-bound, bound, size)
    return draw


def lti_step(plant: LtiPlant, x, u, k: int = 0) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float)
    u = np.asarray(u, dtype=float)
    if x.shape != (plant.n,) or u.shape != (plant.l,):
        raise DimensionMismatch(f"state {x.shape} / input {u.shape} do not fit the plant")
    return plant.G @ x + plant.B @ u, plant.C @ x + plant.e(k)


def attack_controls(u, du) -> np.ndarray:
    u = np.asarray(u, dtype=float)
    du = np.asarray(du, dtype=float)
    if u.shape != du.shape:
        raise DimensionMismatch(f"control {u.shape} and alteration {du.shape} differ")
    return u + du


def run_plant(plant: LtiPlant, x0, steps: int, u=None, alterations: dict[int, np.ndarray] | None = None):
    """Roll the plant forward; returns state (steps+1 x n) and output (steps x p) histories.

    Controls come from ``u`` (steps x l) when given, else from the feedback
    law ``H_ctl y``. ``alterations`` maps step index to a control offset.
    """
    x = np.asarray(x0, dtype=float)
    xs, ys = [x], []
    alterations = alterations or {}
    for k in range(steps):
        y = plant.C @ x + plant.e(k)
        if u is not None:
            uk = np.asarray(u[k], dtype=float)
        elif plant.H_ctl is not None:
            uk = plant.H_ctl @ y
        else:
            uk = np.zeros(plant.l)
        if k in alterations:
            uk = attack_controls(uk, alterations[k])
        x, _ = lti_step(plant, x, uk, k)
        xs.append(x)
        ys.append(y)
    return np.array(xs), np.array(ys)


# -- balance and preselection -------------------------------------------

def total_demand(unaltered: Sequence[float], altered: Sequence[float] = (), losses: float = 0.0) -> float:
    """Generation needed to serve untouched loads, altered loads and losses."""
    return float(np.sum(unaltered) + np.sum(altered) + losses)


def compute_ld(tl_a, tl_b) -> np.ndarray:
    a = np.asarray(tl_a, dtype=float)
    b = np.asarray(tl_b, dtype=float)
    if a.shape != b.shape:
        raise LengthMismatch(f"total-load series differ in length: {a.shape} vs {b.shape}")
    return a - b


def compute_liid(loads_a, loads_b) -> np.ndarray:
    """Per-bus share difference, ``L_A/TL_A - L_B/TL_B`` column by column."""
    a = np.asarray(loads_a, dtype=float)
    b = np.asarray(loads_b, dtype=float)
    if a.shape != b.shape or a.ndim != 2:
        raise LengthMismatch(f"load matrices differ in shape: {a.shape} vs {b.shape}")
    ta, tb = a.sum(axis=0), b.sum(axis=0)
    if (ta <= 0).any() or (tb <= 0).any():
        raise ZeroTotalLoad("a time column has non-positive total load")
    return a / ta - b / tb


@dataclass(frozen=True)
class TargetSelection:
    verdict: str
    bus: int | None = None
    start: int | None = None
    end: int | None = None
    time: int | None = None
    liid_min: float = 0.0
    ld_threshold: float = 0.0

    @property
    def aligned(self) -> bool:
        return self.verdict == ALIGNED


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    edges = np.diff(np.r_[0, mask.astype(np.int8), 0])
    return list(zip(np.flatnonzero(edges == 1).tolist(), (np.flatnonzero(edges == -1) - 1).tolist()))


def select_target(ld, liid, q: float = 0.9, buses: Sequence[int] | None = None, tol: float = 0.1) -> TargetSelection:
    """Bus and window where the deepest LIID trough meets high LD.

    High-LD samples are those at or above the ``q`` quantile of LD. The
    deepest LIID value over the whole day (ties: lowest bus id, then earliest
    sample) must fall inside a contiguous high-LD run; otherwise the verdict
    is NoAlignedTarget. The window grows from that sample while LIID on the
    chosen bus stays within ``tol`` of the minimum. Indices are inclusive.
    """
    ld = np.asarray(ld, dtype=float)
    liid = np.asarray(liid, dtype=float)
    if liid.ndim != 2 or liid.shape[1] != ld.shape[0]:
        raise LengthMismatch(f"LIID {liid.shape} does not align with LD {ld.shape}")
    if not 0 <= q <= 1:
        raise ValidationError("quantile must lie in [0, 1]")
    ids = list(range(liid.shape[0])) if buses is None else list(buses)
    if len(ids) != liid.shape[0]:
        raise LengthMismatch("bus list does not match LIID rows")
    threshold = float(np.quantile(ld, q))
    high = ld >= threshold
    lo = float(liid.min())
    if lo >= 0:
        return TargetSelection(NO_ALIGNED_TARGET, liid_min=lo, ld_threshold=threshold)
    rows, cols = np.nonzero(liid == lo)
    row, t = min(zip(rows.tolist(), cols.tolist()), key=lambda rc: (ids[rc[0]], rc[1]))
    if not high[t]:
        return TargetSelection(NO_ALIGNED_TARGET, liid_min=lo, ld_threshold=threshold)
    near = np.abs(liid[row] - lo) <= tol * abs(lo)
    start, end = next((s, e) for s, e in _runs(near) if s <= t <= e)
    return TargetSelection(ALIGNED, ids[row], start, end, t, lo, threshold)


@dataclass
class PreselectionReport:
    label: str
    times: list[str]
    buses: list[int]
    ld: np.ndarray
    liid: np.ndarray
    target: TargetSelection
    q: float = 0.9

    @property
    def peak_ld(self) -> tuple[float, str]:
        k = int(np.argmax(self.ld))
        return float(self.ld[k]), self.times[k]

    @property
    def min_liid(self) -> tuple[float, int, str]:
        flat = int(np.argmin(self.liid))
        i, k = divmod(flat, self.liid.shape[1])
        return float(self.liid[i, k]), self.buses[i], self.times[k]

    def to_dict(self) -> dict:
        t = self.target
        ld_val, ld_time = self.peak_ld
        lv, lb, lt = self.min_liid
        rec = None
        if t.aligned:
            rec = {"buses": [t.bus], "start": self.times[t.start], "end": self.times[t.end],
                   "start_index": t.start, "end_index": t.end, "trough_time": self.times[t.time]}
        return {
            "label": self.label,
            "verdict": t.verdict,
            "quantile": self.q,
            "ld_threshold": t.ld_threshold,
            "peak_ld": {"value": ld_val, "time": ld_time},
            "min_liid": {"value": lv, "bus": lb, "time": lt},
            "recommendation": rec,
        }

    def write(self, directory: str | Path) -> None:
        d = Path(directory)
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{self.label}.json").write_text(json.dumps(self.to_dict(), indent=2) + "\n")
        with (d / f"{self.label}_ld.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", "ld"])
            for k, tm in enumerate(self.times):
                w.writerow([tm, repr(float(self.ld[k]))])
        with (d / f"{self.label}_liid.csv").open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["time", *(f"bus{b}" for b in self.buses)])
            for k, tm in enumerate(self.times):
                w.writerow([tm, *(repr(float(v)) for v in self.liid[:, k])])


def preselect(loads_a, loads_b, buses: Sequence[int], times: Sequence[str], base_a: float = 1.0,
              base_b: float | None = None, q: float = 0.9, label: str = "day") -> PreselectionReport:
    """LD and LIID from bus-level loads of two years, then target selection.

    Loads are divided by each year's own base to get per-unit totals. LIID is
    unaffected by the bases.
    """
    base_b = base_a if base_b is None else base_b
    if base_a <= 0 or base_b <= 0:
        raise ValidationError("per-unit bases must be positive")
    a = np.asarray(loads_a, dtype=float) / base_a
    b = np.asarray(loads_b, dtype=float) / base_b
    if a.shape != b.shape:
        raise LengthMismatch(f"year panels differ in shape: {a.shape} vs {b.shape}")
    if a.shape != (len(buses), len(times)):
        raise LengthMismatch("load matrix does not match bus and time labels")
    ld = compute_ld(a.sum(axis=0), b.sum(axis=0))
    liid = compute_liid(a, b)
    return PreselectionReport(label, list(times), list(buses), ld, liid, select_target(ld, liid, q, buses), q)


# -- scenarios -----------------------------------------------------------

@dataclass(frozen=True)
class AttackScenario:
    buses: tuple[int, ...]
    events: tuple[LoadEvent, ...]
    window: tuple[float, float]
    threat: ThreatModel = field(default_factory=ThreatModel)
    label: str = "attack"

    def __post_init__(self):
        object.__setattr__(self, "buses", tuple(int(b) for b in self.buses))
        object.__setattr__(self, "events", tuple(self.events))
        start, end = (float(v) for v in self.window)
        if not end > start:
            raise ValidationError("scenario window must have end > start")
        object.__setattr__(self, "window", (start, end))
        for ev in self.events:
            if not start <= ev.time <= end or (ev.restore is not None and ev.restore > end):
                raise ValidationError(f"event at {ev.time} s falls outside the window {self.window}")
            if ev.bus not in self.buses:
                raise ValidationError(f"event targets bus {ev.bus}, which is not listed as compromised")

    def validate_against(self, model) -> None:
        ids = set(model.bus_ids)
        unknown = [b for b in self.buses if b not in ids]
        if unknown:
            raise ValidationError(f"scenario references unknown buses {unknown}")

    def to_dict(self) -> dict:
        return {"label": self.label, "buses": list(self.buses), "window": list(self.window),
                "events": [e.to_dict() for e in self.events], "threat": self.threat.to_dict()}

    @classmethod
    def from_dict(cls, d: dict) -> "AttackScenario":
        try:
            return cls(
                buses=tuple(d["buses"]),
                events=tuple(LoadEvent.from_dict(e) for e in d.get("events", [])),
                window=tuple(d["window"]),
                threat=ThreatModel.from_dict(d.get("threat", {})),
                label=d.get("label", "attack"),
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"bad scenario: {exc}") from exc


def load_scenario(path: str | Path) -> AttackScenario:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc
    return AttackScenario.from_dict(data)
