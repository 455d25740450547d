"""Frequency standards, excursion reports, UFLS staging and NYISO advisories."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import MalformedInput, ValidationError


@dataclass(frozen=True)
class FrequencyStandard:
    name: str
    under: float
    over: float

    def __post_init__(self):
        if not self.under < 60.0 < self.over:
            raise ValidationError(f"{self.name}: need under < 60 < over")


NERC = FrequencyStandard("NERC", 59.50, 62.20)
ERCOT = FrequencyStandard("ERCOT", 59.30, 61.80)
NYISO = FrequencyStandard("NYISO", 59.90, 60.10)
STANDARDS = {s.name: s for s in (NERC, ERCOT, NYISO)}


@dataclass(frozen=True)
class UflsScheme:
    """Staged under-frequency load shedding; each stage is latched once fired."""

    name: str
    stages: tuple[tuple[float, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple((float(f), float(s)) for f, s in self.stages))
        triggers = [f for f, _ in self.stages]
        if any(b >= a for a, b in zip(triggers, triggers[1:])):
            raise ValidationError("UFLS triggers must be strictly decreasing")
        if any(not 0 < s < 1 for _, s in self.stages):
            raise ValidationError("UFLS shed fractions must lie in (0, 1)")

    def initial_state(self) -> tuple[bool, ...]:
        return (True,) * len(self.stages)

    def step(self, f: float, armed: tuple[bool, ...]) -> tuple[float, tuple[bool, ...]]:
        return apply_ufls(self, f, armed)

    @property
    def max_shed(self) -> float:
        return sum(s for _, s in self.stages)


NYISO_UFLS = UflsScheme("NYISO", ((59.5, 0.07), (59.3, 0.07), (59.1, 0.07), (58.9, 0.07)))
ERCOT_UFLS = UflsScheme("ERCOT", ((59.3, 0.05), (58.9, 0.10), (58.5, 0.10)))
SCHEMES = {s.name: s for s in (NYISO_UFLS, ERCOT_UFLS)}


def apply_ufls(scheme: UflsScheme, f: float, armed: Sequence[bool]) -> tuple[float, tuple[bool, ...]]:
    """Fire every armed stage whose trigger ``f`` has reached.

    Returns the summed fraction of the current system load to shed now and the
    new arming state. Fired stages never re-arm.
    """
    if len(armed) != len(scheme.stages):
        raise ValidationError("arming state does not match the scheme")
    shed = 0.0
    new = list(armed)
    for k, (trigger, frac) in enumerate(scheme.stages):
        if new[k] and f <= trigger:
            new[k] = False
            shed += frac
    return shed, tuple(new)


@dataclass(frozen=True)
class FrequencySeries:
    """Minimal trace stand-in: sample times and system frequency in Hz."""

    time: np.ndarray
    frequency: np.ndarray


@dataclass(frozen=True)
class Excursion:
    direction: str
    start: float
    end: float
    extremum: float
    duration: float
    samples: int


@dataclass
class ViolationReport:
    standard: str
    under: float
    over: float
    excursions: list[Excursion] = field(default_factory=list)
    time_over: float = 0.0
    time_under: float = 0.0
    classification: str = "normal"
    advisories: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "standard": self.standard,
            "limits_hz": {"under": self.under, "over": self.over},
            "excursions": [e.__dict__ for e in self.excursions],
            "time_over_s": self.time_over,
            "time_under_s": self.time_under,
            "classification": self.classification,
            "advisories": list(self.advisories),
        }


def _runs(mask: np.ndarray) -> list[tuple[int, int]]:
    """Inclusive (start, end) index pairs of contiguous True runs."""
    if not mask.any():
        return []
    edges = np.diff(np.r_[0, mask.astype(np.int8), 0])
    starts = np.flatnonzero(edges == 1)
    ends = np.flatnonzero(edges == -1) - 1
    return list(zip(starts.tolist(), ends.tolist()))


def _sample_step(time: np.ndarray) -> float:
    return float(time[1] - time[0]) if len(time) > 1 else 0.0


def check_thresholds(trace, std: FrequencyStandard = NYISO) -> ViolationReport:
    time = np.asarray(trace.time, dtype=float)
    f = np.asarray(trace.frequency, dtype=float)
    dt = _sample_step(time)
    found = []
    for direction, mask in (("over", f > std.over), ("under", f < std.under)):
        for s, e in _runs(mask):
            seg = f[s:e + 1]
            ext = float(seg.max() if direction == "over" else seg.min())
            n = e - s + 1
            found.append(Excursion(direction, float(time[s]), float(time[e]), ext, n * dt, n))
    found.sort(key=lambda x: x.start)
    report = ViolationReport(std.name, std.under, std.over, found)
    report.time_over = sum(x.duration for x in found if x.direction == "over")
    report.time_under = sum(x.duration for x in found if x.direction == "under")
    if found:
        report.classification = "major disturbance" if std.name == "NYISO" else "violation"
    return report


NYISO_OVERFREQUENCY_ACTIONS = (
    "Request over-generating suppliers to return generation to schedule",
    "Reduce dispatchable generation to minimum operating limits",
    "Request internal generators to run in manual mode below minimum dispatchable levels",
    "Schedule variable load or storage to absorb the surplus",
    "Reduce or cancel transactions contributing to the imbalance",
    "Declare a major emergency and de-commit internal generators until the violation clears",
)


def overfrequency_actions(trace, std: FrequencyStandard = NYISO, dwell: float = 10.0) -> list[str]:
    """Advisory log for sustained over-frequency (report only).

    Emitted when one contiguous run above ``std.over`` lasts at least
    ``dwell`` seconds.
    """
    time = np.asarray(trace.time, dtype=float)
    f = np.asarray(trace.frequency, dtype=float)
    dt = _sample_step(time)
    for s, e in _runs(f > std.over):
        if (e - s + 1) * dt >= dwell - 1e-9:
            return list(NYISO_OVERFREQUENCY_ACTIONS)
    return []


def evaluate(trace, std: FrequencyStandard = NYISO, dwell: float = 10.0) -> ViolationReport:
    """Threshold report plus advisories; sustained over-frequency is a major emergency."""
    report = check_thresholds(trace, std)
    report.advisories = overfrequency_actions(trace, std, dwell)
    if report.advisories:
        report.classification = "major emergency"
    return report


def load_overrides(path: str | Path) -> tuple[dict[str, FrequencyStandard], dict[str, UflsScheme]]:
    """Built-in standards and schemes updated from a JSON file.

    Format: ``{"standards": {"NAME": {"under": .., "over": ..}},
    "ufls": {"NAME": [[trigger_hz, fraction], ...]}}``.
    """
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc
    standards = dict(STANDARDS)
    schemes = dict(SCHEMES)
    for name, d in data.get("standards", {}).items():
        standards[name] = FrequencyStandard(name, float(d["under"]), float(d["over"]))
    for name, stages in data.get("ufls", {}).items():
        schemes[name] = UflsScheme(name, tuple(tuple(s) for s in stages))
    return standards, schemes
