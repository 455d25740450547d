"""Multi-machine swing simulation with the classical generator model.

Generators are constant EMFs behind transient reactance, loads are constant
admittances taken from the power-flow voltages, and the network is
Kron-reduced to the generator internal nodes. Load events swap admittances
and re-reduce the network. Integration is fixed-step RK4.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from ._kernel import LEFT_BAND, REACHED, integrate_segment
from .errors import Diverged, EventOutsideWindow, UnstableInitialization, ValidationError
from .grid.model import GridModel
from .grid.network import kron_reduce, ybus
from .grid.powerflow import PowerFlowSolution

F_NOMINAL = 60.0
OMEGA_S = 2 * math.pi * F_NOMINAL
VALID_BAND = (0.9, 1.1)


@dataclass(frozen=True)
class MachineState:
    delta: float
    omega: float
    e: float

    def __post_init__(self):
        if self.e <= 0:
            raise ValidationError("internal EMF must be positive")


@dataclass(frozen=True)
class LoadEvent:
    """Change the load at ``bus`` at ``time`` seconds into the run.

    Give either an absolute ``p`` (and optionally ``q``) in pu, or a
    ``scale`` factor on the load in force at that instant. ``scale=0``
    disconnects the load. With ``restore`` set, the admittance held just
    before the event is put back at that time.
    """

    time: float
    bus: int
    p: float | None = None
    q: float | None = None
    scale: float | None = None
    restore: float | None = None

    def __post_init__(self):
        if (self.p is None) == (self.scale is None):
            raise ValidationError("LoadEvent needs exactly one of p or scale")
        if self.scale is not None and self.scale < 0:
            raise ValidationError("LoadEvent scale must be non-negative")
        if self.restore is not None and self.restore <= self.time:
            raise ValidationError("LoadEvent restore time must follow the event time")

    def to_dict(self) -> dict:
        return {k: v for k, v in self.__dict__.items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "LoadEvent":
        return cls(**{k: d[k] for k in ("time", "bus", "p", "q", "scale", "restore") if k in d})


@dataclass(frozen=True)
class SimConfig:
    duration: float = 300.0
    step: float = 0.005
    governor: bool = False
    droop: float = 0.05
    governor_tc: float = 0.5
    # UflsScheme or None; stages fire on system frequency and shed load
    # proportionally at every load bus
    ufls: object = None
    strict: bool = True

    def __post_init__(self):
        if self.duration <= 0 or self.step <= 0:
            raise ValidationError("duration and step must be positive")
        if self.step > 0.01:
            raise ValidationError("integration step must not exceed 10 ms")


@dataclass
class SimulationTrace:
    time: np.ndarray
    delta: np.ndarray
    omega: np.ndarray
    pe: np.ndarray
    pm: np.ndarray
    h: np.ndarray
    machines: tuple[int, ...]
    events: list[tuple[float, str]] = field(default_factory=list)
    diverged: bool = False
    shed: np.ndarray | None = None

    @property
    def machine_frequency(self) -> np.ndarray:
        return self.omega / (2 * math.pi)

    @property
    def frequency(self) -> np.ndarray:
        return system_frequency(self)

    @property
    def step(self) -> float:
        return float(self.time[1] - self.time[0]) if len(self.time) > 1 else 0.0

    def summary(self) -> dict:
        f = self.frequency
        return {
            "samples": int(len(self.time)),
            "duration": float(self.time[-1]),
            "peak_frequency_hz": float(f.max()),
            "peak_time_s": float(self.time[int(f.argmax())]),
            "min_frequency_hz": float(f.min()),
            "min_time_s": float(self.time[int(f.argmin())]),
            "diverged": self.diverged,
            "events": [[t, d] for t, d in self.events],
        }

    def write_csv(self, path: str | Path, stride: int = 1) -> None:
        fm = self.machine_frequency
        f = self.frequency
        header = ["time"]
        for g in self.machines:
            header += [f"f_g{g}", f"delta_g{g}", f"pe_g{g}"]
        header.append("f_system")
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for k in range(0, len(self.time), stride):
                row = [repr(float(self.time[k]))]
                for i in range(len(self.machines)):
                    row += [repr(float(fm[k, i])), repr(float(self.delta[k, i])), repr(float(self.pe[k, i]))]
                row.append(repr(float(f[k])))
                w.writerow(row)


def system_frequency(trace: SimulationTrace) -> np.ndarray:
    """Inertia-weighted mean machine speed in Hz (centre of inertia)."""
    h = np.asarray(trace.h, dtype=float)
    return (trace.omega @ h) / h.sum() / (2 * math.pi)


def electrical_power(delta: Sequence[float], e: Sequence[float], y_red: np.ndarray) -> np.ndarray:
    """P_e_i = sum_j E_i E_j (G_ij cos(d_i - d_j) + B_ij sin(d_i - d_j))."""
    delta = np.asarray(delta, dtype=float)
    e = np.asarray(e, dtype=float)
    diff = delta[:, None] - delta[None, :]
    return e * ((y_red.real * np.cos(diff) + y_red.imag * np.sin(diff)) @ e)


class SwingSystem:
    """Initialized classical-model network ready for integration."""

    def __init__(self, model: GridModel, pf: PowerFlowSolution):
        self.model = model
        self.pf = pf
        base = model.base_mva
        idx = model.bus_index
        gens = model.generators
        n, g = len(model.buses), len(gens)
        self.n_bus = n
        self.machines = tuple(gen.bus for gen in gens)
        self.h = np.array([gen.h_sys(base) for gen in gens])
        self.d = np.array([gen.d_sys(base) for gen in gens])
        self.gov_gain = np.array([gen.mva / base for gen in gens])
        xd = np.array([gen.xd_sys(base) for gen in gens])

        V = pf.voltage
        self.v_bus = V
        self.y_load = np.zeros(n, dtype=complex)
        for ld in model.loads:
            self.y_load[idx[ld.bus]] += complex(ld.p, -ld.q) / abs(V[idx[ld.bus]]) ** 2

        y_net = np.zeros((n + g, n + g), dtype=complex)
        y_net[:n, :n] = ybus(model)
        for k, gen in enumerate(gens):
            b = idx[gen.bus]
            y = 1.0 / (1j * xd[k])
            y_net[b, b] += y
            y_net[n + k, n + k] += y
            y_net[b, n + k] -= y
            y_net[n + k, b] -= y
        self._y_net = y_net

        v_term = np.array([V[idx[gen.bus]] for gen in gens])
        i_gen = np.conj(pf.s_gen / v_term)
        e_int = v_term + 1j * xd * i_gen
        self.e = np.abs(e_int)
        self.delta0 = np.angle(e_int)
        self.y_red = self.reduce(self.y_load)
        pe0 = electrical_power(self.delta0, self.e, self.y_red)
        mismatch = np.max(np.abs(pe0 - pf.s_gen.real), initial=0.0)
        if mismatch > 1e-8:
            raise UnstableInitialization(f"initial electrical power mismatch {mismatch:.3e} pu")
        self.pm0 = pe0

    def reduce(self, y_load: np.ndarray) -> np.ndarray:
        Y = self._y_net.copy()
        Y[np.arange(self.n_bus), np.arange(self.n_bus)] += y_load
        keep = range(self.n_bus, Y.shape[0])
        return kron_reduce(Y, keep)

    @property
    def states0(self) -> list[MachineState]:
        return [MachineState(float(d), OMEGA_S, float(e)) for d, e in zip(self.delta0, self.e)]

    def derivatives(self, delta, omega, pm, y_red) -> tuple[np.ndarray, np.ndarray]:
        pe = electrical_power(delta, self.e, y_red)
        dw = OMEGA_S * (pm - pe - self.d * (omega - OMEGA_S) / OMEGA_S) / (2 * self.h)
        return omega - OMEGA_S, dw


def init_dynamics(model: GridModel, pf: PowerFlowSolution) -> SwingSystem:
    return SwingSystem(model, pf)


def _event_load(system: SwingSystem, ev: LoadEvent, current: complex) -> complex:
    i = system.model.bus_index[ev.bus]
    if ev.scale is not None:
        return current * ev.scale
    q = ev.q
    if q is None:
        ld = system.model.load_at(ev.bus)
        q = ld.q / ld.p * ev.p if ld is not None and ld.p else 0.0
    return complex(ev.p, -q) / abs(system.v_bus[i]) ** 2


def simulate(model: GridModel, pf: PowerFlowSolution, events: Sequence[LoadEvent] = (),
             cfg: SimConfig | None = None, system: SwingSystem | None = None) -> SimulationTrace:
    """Integrate the swing equations over ``cfg.duration`` seconds.

    Events take effect at the first grid instant at or after their time.
    Raises :class:`Diverged` (carrying the partial trace) when any machine
    speed leaves 0.9..1.1 of synchronous speed, unless ``cfg.strict`` is off,
    in which case the truncated trace is returned with ``diverged`` set.
    """
    cfg = cfg or SimConfig()
    system = system or SwingSystem(model, pf)
    idx = model.bus_index
    dt = cfg.step
    n_steps = int(round(cfg.duration / dt))

    # (step index, restores first, event index, kind)
    actions = []
    for j, ev in enumerate(events):
        if ev.bus not in idx:
            raise ValidationError(f"event references unknown bus {ev.bus}")
        for when, kind in ((ev.time, "apply"), (ev.restore, "restore")):
            if when is None:
                continue
            if when < 0 or when > cfg.duration + 1e-9:
                raise EventOutsideWindow(f"event at {when} s outside 0..{cfg.duration} s")
            actions.append((min(math.ceil(when / dt - 1e-9), n_steps), 0 if kind == "restore" else 1, j, kind))
    actions.sort()

    ng = len(system.machines)
    times = np.arange(n_steps + 1) * dt
    delta_out = np.empty((n_steps + 1, ng))
    omega_out = np.empty((n_steps + 1, ng))
    pe_out = np.empty((n_steps + 1, ng))
    pm_out = np.empty((n_steps + 1, ng))
    shed_out = np.zeros(n_steps + 1)

    y_load = system.y_load.copy()
    y_red = system.y_red
    saved: dict[int, complex] = {}
    log: list[tuple[float, str]] = []
    lo, hi = VALID_BAND[0] * OMEGA_S, VALID_BAND[1] * OMEGA_S
    x = np.concatenate([system.delta0, np.full(ng, OMEGA_S), system.pm0])
    pm_ref = system.pm0.copy()
    gov_k = system.gov_gain / cfg.droop
    h_w = system.h / system.h.sum()
    two_h = 2 * system.h

    ufls = cfg.ufls
    armed = ufls.initial_state() if ufls is not None else None
    shed_total = 0.0

    a = 0
    k = 0
    status = REACHED
    while True:
        t = float(times[k])
        changed = False
        while a < len(actions) and actions[a][0] <= k:
            _, _, j, kind = actions[a]
            ev = events[j]
            i = idx[ev.bus]
            if kind == "apply":
                saved[j] = y_load[i]
                y_load[i] = _event_load(system, ev, y_load[i])
                log.append((t, f"bus {ev.bus} load set to {_describe(ev)}"))
            else:
                y_load[i] = saved.pop(j)
                log.append((t, f"bus {ev.bus} load restored"))
            changed = True
            a += 1
        if armed is not None:
            f_now = float(h_w @ x[ng:2 * ng]) / (2 * math.pi)
            frac, armed = ufls.step(f_now, armed)
            if frac > 0:
                y_load *= 1.0 - frac
                for sv in saved:
                    saved[sv] *= 1.0 - frac
                shed_total = 1.0 - (1.0 - shed_total) * (1.0 - frac)
                log.append((t, f"UFLS shed {frac:.4g} of load at {f_now:.4f} Hz"))
                changed = True
        if changed:
            y_red = system.reduce(y_load)
        stop_f = -math.inf
        if armed is not None and any(armed):
            stop_f = max(trig for (trig, _), on in zip(ufls.stages, armed) if on)

        k_next = actions[a][0] if a < len(actions) else n_steps
        k_end, status = integrate_segment(
            x, k, k_next, dt, system.e, np.ascontiguousarray(y_red.real), np.ascontiguousarray(y_red.imag),
            two_h, system.d, pm_ref, gov_k, cfg.governor_tc, cfg.governor, OMEGA_S, h_w, lo, hi, stop_f,
            delta_out, omega_out, pe_out, pm_out)
        shed_out[k:k_end + 1] = shed_total
        k = k_end
        if status == LEFT_BAND:
            break
        if k == n_steps and status == REACHED and a >= len(actions):
            break

    diverged = status == LEFT_BAND
    sl = slice(0, k + 1)
    trace = SimulationTrace(
        time=times[sl], delta=delta_out[sl], omega=omega_out[sl], pe=pe_out[sl],
        pm=pm_out[sl], h=system.h.copy(), machines=system.machines, events=log,
        diverged=diverged, shed=shed_out[sl],
    )
    if diverged:
        trace.events.append((float(times[k]), "machine speed left the validity band"))
        if cfg.strict:
            raise Diverged(f"machine speed left the validity band at t={times[k]:.3f} s", trace)
    return trace


def _describe(ev: LoadEvent) -> str:
    if ev.scale is not None:
        return f"x{ev.scale:g}"
    return f"{ev.p:g} pu"


def disconnect_events(buses: Sequence[int], start: float, duration: float | None = 5.0) -> list[LoadEvent]:
    """Drop whole loads at ``start`` and put them back ``duration`` seconds later."""
    restore = None if duration is None else start + duration
    return [LoadEvent(start, b, scale=0.0, restore=restore) for b in buses]


def save_summary(trace: SimulationTrace, path: str | Path) -> None:
    Path(path).write_text(json.dumps(trace.summary(), indent=2) + "\n")
