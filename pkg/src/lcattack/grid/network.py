"""Admittance matrices and Kron reduction."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from ..errors import SingularEliminationBlock, ZeroImpedanceBranch
from .model import GridModel

# Condition number above which the eliminated block is treated as singular.
_SINGULAR_COND = 1e13


def ybus(model: GridModel) -> np.ndarray:
    """Bus admittance matrix in the order of ``model.buses``.

    Lines use the pi model with half the charging susceptance at each end.
    A fixed tap ``t`` sits on the from side: ``Yff = (ys + jb/2)/t**2``,
    ``Yft = Ytf = -ys/t``.
    """
    idx = model.bus_index
    n = len(model.buses)
    Y = np.zeros((n, n), dtype=complex)
    for br in model.branches:
        if br.r == 0 and br.x == 0:
            raise ZeroImpedanceBranch(f"branch {br.from_bus}-{br.to_bus} has zero impedance")
        ys = 1.0 / complex(br.r, br.x)
        ych = 0.5j * br.b
        t = br.tap
        f, k = idx[br.from_bus], idx[br.to_bus]
        Y[f, f] += (ys + ych) / t**2
        Y[k, k] += ys + ych
        Y[f, k] -= ys / t
        Y[k, f] -= ys / t
    for i, bus in enumerate(model.buses):
        Y[i, i] += complex(bus.shunt_g, bus.shunt_b)
    return Y


def kron_reduce(Y: np.ndarray, keep: Sequence[int]) -> np.ndarray:
    """Eliminate every node not in ``keep``: ``Ykk - Yke Yee^-1 Yek``.

    ``keep`` holds matrix positions; the result follows its order.
    """
    Y = np.asarray(Y, dtype=complex)
    keep = list(keep)
    elim = [i for i in range(Y.shape[0]) if i not in set(keep)]
    Ykk = Y[np.ix_(keep, keep)]
    if not elim:
        return Ykk.copy()
    Yee = Y[np.ix_(elim, elim)]
    if not np.all(np.isfinite(Yee)) or np.linalg.cond(Yee) > _SINGULAR_COND:
        raise SingularEliminationBlock("eliminated sub-block is singular")
    return Ykk - Y[np.ix_(keep, elim)] @ np.linalg.solve(Yee, Y[np.ix_(elim, keep)])
