"""Newton-Raphson AC power flow in polar coordinates."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import Diverged, IslandedBus
from .model import GridModel
from .network import ybus


@dataclass(frozen=True)
class PowerFlowSolution:
    bus_ids: tuple[int, ...]
    vm: np.ndarray
    va: np.ndarray
    # complex power entering each branch at its from and to ends
    s_from: np.ndarray
    s_to: np.ndarray
    slack_injection: complex
    # complex output of each generator, in model.generators order
    s_gen: np.ndarray
    iterations: int
    max_mismatch: float

    @property
    def voltage(self) -> np.ndarray:
        return self.vm * np.exp(1j * self.va)

    def losses(self) -> float:
        return float(np.sum(self.s_from.real + self.s_to.real))


def _check_connected(model: GridModel, Y: np.ndarray) -> None:
    _, labels = connected_components(csr_matrix(np.abs(Y) > 0), directed=False)
    slack = labels[model.bus_index[model.slack_bus]]
    for i, bus in enumerate(model.buses):
        if labels[i] != slack:
            raise IslandedBus(f"bus {bus.id} is not connected to the slack bus")


def scheduled_injection(model: GridModel) -> np.ndarray:
    idx = model.bus_index
    s = np.zeros(len(model.buses), dtype=complex)
    for g in model.generators:
        s[idx[g.bus]] += g.p
    for ld in model.loads:
        s[idx[ld.bus]] -= complex(ld.p, ld.q)
    return s


def power_flow(model: GridModel, tol: float = 1e-8, max_iter: int = 20) -> PowerFlowSolution:
    Y = ybus(model)
    _check_connected(model, Y)
    idx = model.bus_index
    n = len(model.buses)
    types = [b.type for b in model.buses]
    pv = [i for i, t in enumerate(types) if t == "PV"]
    pq = [i for i, t in enumerate(types) if t == "PQ"]
    pvpq = pv + pq

    vm = np.ones(n)
    va = np.zeros(n)
    for g in model.generators:
        i = idx[g.bus]
        if types[i] != "PQ":
            vm[i] = g.v_set
    s_spec = scheduled_injection(model)

    def mismatch(V):
        s = V * np.conj(Y @ V) - s_spec
        return np.r_[s.real[pvpq], s.imag[pq]]

    V = vm * np.exp(1j * va)
    F = mismatch(V)
    it = 0
    while np.max(np.abs(F), initial=0.0) > tol:
        if it >= max_iter:
            raise Diverged(f"power flow did not converge in {max_iter} iterations "
                           f"(mismatch {np.max(np.abs(F)):.3e})")
        I = Y @ V
        Vn = V / np.abs(V)
        dS_dVa = 1j * np.diag(V) @ np.conj(np.diag(I) - Y @ np.diag(V))
        dS_dVm = np.diag(V) @ np.conj(Y @ np.diag(Vn)) + np.conj(np.diag(I)) @ np.diag(Vn)
        J = np.block([
            [dS_dVa.real[np.ix_(pvpq, pvpq)], dS_dVm.real[np.ix_(pvpq, pq)]],
            [dS_dVa.imag[np.ix_(pq, pvpq)], dS_dVm.imag[np.ix_(pq, pq)]],
        ])
        dx = np.linalg.solve(J, -F)
        va[pvpq] += dx[:len(pvpq)]
        vm[pq] += dx[len(pvpq):]
        V = vm * np.exp(1j * va)
        F = mismatch(V)
        it += 1
        if not np.all(np.isfinite(F)):
            raise Diverged("power flow produced non-finite voltages")

    s_bus = V * np.conj(Y @ V)
    s_from, s_to = _branch_flows(model, V)
    s_gen = _generator_outputs(model, s_bus)
    return PowerFlowSolution(
        bus_ids=tuple(model.bus_ids), vm=np.abs(V), va=np.angle(V),
        s_from=s_from, s_to=s_to, slack_injection=complex(s_bus[idx[model.slack_bus]]),
        s_gen=s_gen, iterations=it, max_mismatch=float(np.max(np.abs(F), initial=0.0)),
    )


def _branch_flows(model: GridModel, V: np.ndarray):
    idx = model.bus_index
    s_from = np.zeros(len(model.branches), dtype=complex)
    s_to = np.zeros(len(model.branches), dtype=complex)
    for k, br in enumerate(model.branches):
        ys = 1.0 / complex(br.r, br.x)
        ych = 0.5j * br.b
        vf, vt = V[idx[br.from_bus]], V[idx[br.to_bus]]
        i_f = (ys + ych) / br.tap**2 * vf - ys / br.tap * vt
        i_t = (ys + ych) * vt - ys / br.tap * vf
        s_from[k] = vf * np.conj(i_f)
        s_to[k] = vt * np.conj(i_t)
    return s_from, s_to


def _generator_outputs(model: GridModel, s_bus: np.ndarray) -> np.ndarray:
    """Split each bus's required generation among its machines.

    Active power follows the dispatch except at the slack bus, which absorbs
    the balance; reactive power is shared equally.
    """
    idx = model.bus_index
    out = np.zeros(len(model.generators), dtype=complex)
    slack = model.slack_bus
    for bus_id in {g.bus for g in model.generators}:
        members = [k for k, g in enumerate(model.generators) if g.bus == bus_id]
        ld = model.load_at(bus_id)
        need = s_bus[idx[bus_id]] + (complex(ld.p, ld.q) if ld else 0)
        q_each = need.imag / len(members)
        if bus_id == slack:
            fixed = sum(model.generators[k].p for k in members[1:])
            out[members[0]] = complex(need.real - fixed, q_each)
            for k in members[1:]:
                out[k] = complex(model.generators[k].p, q_each)
        else:
            for k in members:
                out[k] = complex(model.generators[k].p, q_each)
    return out
