"""Exact truncated dynamic mode decomposition of regional demand panels."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import BadModeIndex, DegenerateData, MalformedInput, RankDeficient, TooFewSnapshots, ZeroEigenvalue

RANK_TOL = 1e-12
ENERGY_KEEP = 0.999


@dataclass(frozen=True)
class SnapshotPair:
    X: np.ndarray
    Xp: np.ndarray

    def __post_init__(self):
        if self.X.shape != self.Xp.shape:
            raise ValueError("X and Xp must share a shape")


def build_snapshot_pair(panel) -> SnapshotPair:
    """Accepts a LoadPanel or a bare ``n x m`` array."""
    data = np.asarray(getattr(panel, "values", panel), dtype=float)
    if data.ndim != 2 or data.shape[1] < 3:
        raise TooFewSnapshots(f"need at least 3 snapshots, got {data.shape[-1] if data.ndim else 0}")
    return SnapshotPair(data[:, :-1].copy(), data[:, 1:].copy())


@dataclass(frozen=True)
class DmdResult:
    r: int
    U: np.ndarray
    Sigma: np.ndarray
    V: np.ndarray
    Atilde: np.ndarray
    eigenvalues: np.ndarray
    W: np.ndarray
    Phi: np.ndarray
    amplitudes: np.ndarray

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "U": _enc(self.U, False), "Sigma": _enc(self.Sigma, False), "V": _enc(self.V, False),
            "Atilde": _enc(self.Atilde, False), "eigenvalues": _enc(self.eigenvalues, True),
            "W": _enc(self.W, True), "Phi": _enc(self.Phi, True), "amplitudes": _enc(self.amplitudes, True),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DmdResult":
        try:
            return cls(
                r=int(d["r"]), U=_dec(d["U"], False), Sigma=_dec(d["Sigma"], False),
                V=_dec(d["V"], False), Atilde=_dec(d["Atilde"], False),
                eigenvalues=_dec(d["eigenvalues"], True), W=_dec(d["W"], True),
                Phi=_dec(d["Phi"], True), amplitudes=_dec(d["amplitudes"], True),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedInput(f"bad DMD record: {exc}") from exc


def _enc(a: np.ndarray, complex_: bool):
    a = np.asarray(a)
    if complex_:
        # real-valued spectra still go out as [re, im] pairs
        return np.stack([a.real, np.imag(a)], axis=-1).tolist()
    return a.real.tolist()


def _dec(obj, complex_: bool) -> np.ndarray:
    a = np.asarray(obj, dtype=float)
    if complex_:
        return a[..., 0] + 1j * a[..., 1]
    return a


def numeric_rank(sigma: np.ndarray) -> int:
    if sigma.size == 0 or sigma[0] == 0:
        return 0
    return int(np.count_nonzero(sigma / sigma[0] > RANK_TOL))


def auto_rank(sigma: np.ndarray, keep: float = ENERGY_KEEP) -> int:
    """Smallest r whose leading singular values hold ``keep`` of the squared energy."""
    energy = np.cumsum(sigma ** 2) / np.sum(sigma ** 2)
    r = int(np.searchsorted(energy, keep - 1e-15) + 1)
    return min(r, len(sigma), numeric_rank(sigma))


def dmd(pair: SnapshotPair, r: int | str = "auto") -> DmdResult:
    X, Xp = pair.X, pair.Xp
    if not np.any(X) or not np.isfinite(X).all():
        raise DegenerateData("snapshot matrix is zero or non-finite")
    U, s, Vh = np.linalg.svd(X, full_matrices=False)
    rank = numeric_rank(s)
    if rank == 0:
        raise DegenerateData("snapshot matrix is numerically zero")
    if r == "auto" or r is None:
        r = auto_rank(s)
    else:
        r = int(r)
        if r < 1:
            raise RankDeficient(f"rank must be positive, got {r}")
        if r > rank:
            raise RankDeficient(f"requested rank {r} exceeds numeric rank {rank}")
    U, s, V = U[:, :r], s[:r], Vh[:r].conj().T
    # Xp V S^-1 is shared by the reduced operator and the exact modes
    B = Xp @ V / s
    Atilde = U.conj().T @ B
    lam, W = np.linalg.eig(Atilde)
    lam, W = lam.astype(complex), W.astype(complex)
    Phi = B @ W
    b = np.linalg.lstsq(Phi, X[:, 0].astype(complex), rcond=None)[0]
    return DmdResult(r, U, s, V, Atilde, lam, W, Phi, b)


def _mode_indices(result: DmdResult, modes) -> list[int]:
    idx = list(range(result.r)) if modes is None else [int(j) for j in modes]
    bad = [j for j in idx if not 0 <= j < result.r]
    if bad:
        raise BadModeIndex(f"mode indices {bad} outside 0..{result.r - 1}")
    return idx


def reconstruct(result: DmdResult, modes: Iterable[int] | None = None, steps: Sequence[int] | int = 1) -> np.ndarray:
    """Real part of the sum over ``modes`` of ``Phi_j b_j lambda_j**k``.

    ``steps`` is either a count (``range(steps)``) or an explicit sequence.
    """
    idx = _mode_indices(result, modes)
    ks = np.arange(steps) if np.isscalar(steps) else np.asarray(steps)
    n = result.Phi.shape[0]
    if not idx:
        return np.zeros((n, len(ks)))
    lam = result.eigenvalues[idx]
    dyn = result.amplitudes[idx, None] * lam[:, None] ** ks[None, :]
    return (result.Phi[:, idx] @ dyn).real


@dataclass(frozen=True)
class ModeInfo:
    index: int
    eigenvalue: complex
    frequency: float
    growth: float
    energy: float
    zero_eigenvalue: bool = False

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "eigenvalue": [self.eigenvalue.real, self.eigenvalue.imag],
            "frequency_hz": self.frequency,
            "period_s": (1.0 / abs(self.frequency)) if self.frequency else None,
            "growth_per_s": None if math.isinf(self.growth) else self.growth,
            "energy": self.energy,
            "zero_eigenvalue": self.zero_eigenvalue,
        }


def mode_report(result: DmdResult, dt: float, strict: bool = False) -> list[ModeInfo]:
    """Continuous-time view of each mode, ordered by energy then frequency.

    A zero eigenvalue has no logarithm; it is reported with growth ``-inf`` and
    ``zero_eigenvalue`` set, or raises ZeroEigenvalue when ``strict``.
    """
    if not dt > 0:
        raise ValueError("dt must be positive")
    out = []
    for j, lam in enumerate(result.eigenvalues):
        energy = float(abs(result.amplitudes[j]) * np.linalg.norm(result.Phi[:, j]))
        if lam == 0:
            if strict:
                raise ZeroEigenvalue(f"mode {j} has a zero eigenvalue")
            out.append(ModeInfo(j, 0j, 0.0, -math.inf, energy, True))
            continue
        w = np.log(complex(lam)) / dt
        out.append(ModeInfo(j, complex(lam), float(w.imag / (2 * np.pi)), float(w.real), energy))
    # energies compared to 10 significant digits so conjugate pairs tie exactly
    out.sort(key=lambda m: (-float(f"{m.energy:.10g}"), abs(m.frequency), m.frequency, m.index))
    return out


def save_result(result: DmdResult, path: str | Path, dt: float | None = None) -> None:
    payload = result.to_dict()
    if dt is not None:
        payload["dt_s"] = dt
        payload["modes"] = [m.to_dict() for m in mode_report(result, dt)]
    Path(path).write_text(json.dumps(payload, indent=1) + "\n")


def load_result(path: str | Path) -> DmdResult:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise MalformedInput(f"{path}: {exc}") from exc
    return DmdResult.from_dict(data)
