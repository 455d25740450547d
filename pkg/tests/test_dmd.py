from __future__ import annotations

import math

import numpy as np
import pytest

from lcattack.dmd import (SnapshotPair, auto_rank, build_snapshot_pair, dmd, load_result, mode_report, reconstruct,
                          save_result)
from lcattack.errors import BadModeIndex, DegenerateData, RankDeficient, TooFewSnapshots, ZeroEigenvalue


def _linear_snapshots(A, x0, m):
    cols = [np.asarray(x0, dtype=float)]
    for _ in range(m - 1):
        cols.append(A @ cols[-1])
    return np.column_stack(cols)


def test_snapshot_pair_shift():
    data = np.array([[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]])
    pair = build_snapshot_pair(data)
    assert pair.X.tolist() == [[1, 2], [4, 5]]
    assert pair.Xp.tolist() == [[2, 3], [5, 6]]


@pytest.mark.parametrize("m", [1, 2])
def test_too_few_snapshots(m):
    with pytest.raises(TooFewSnapshots):
        build_snapshot_pair(np.ones((3, m)))


def test_identity_dynamics():
    rng = np.random.default_rng(0)
    X = rng.standard_normal((4, 6))
    res = dmd(SnapshotPair(X, X.copy()), 4)
    assert np.allclose(res.eigenvalues, 1.0, atol=1e-9)


def test_diagonal_spectrum_and_reconstruction():
    rng = np.random.default_rng(1)
    data = _linear_snapshots(np.diag([0.9, 0.5]), rng.uniform(0.5, 2, 2), 12)
    res = dmd(build_snapshot_pair(data), 2)
    assert np.allclose(np.sort(res.eigenvalues.real), [0.5, 0.9], atol=1e-8)
    rec = reconstruct(res, None, data.shape[1])
    assert np.linalg.norm(rec - data) / np.linalg.norm(data) <= 1e-8


def test_zero_data():
    with pytest.raises(DegenerateData):
        dmd(SnapshotPair(np.zeros((3, 4)), np.zeros((3, 4))))


def test_rank_deficient_request():
    rng = np.random.default_rng(2)
    data = _linear_snapshots(np.diag([0.9, 0.5, 0.1]), [1.0, 1.0, 0.0], 10)
    # third coordinate never excited: numeric rank 2
    with pytest.raises(RankDeficient):
        dmd(build_snapshot_pair(data), 3)
    with pytest.raises(RankDeficient):
        dmd(build_snapshot_pair(rng.standard_normal((3, 8))), 0)


def test_result_invariants():
    rng = np.random.default_rng(5)
    data = rng.standard_normal((6, 40))
    res = dmd(build_snapshot_pair(data), 5)
    assert np.all(res.Sigma > 0) and np.all(np.diff(res.Sigma) <= 0)
    assert np.allclose(res.U.conj().T @ res.U, np.eye(5), atol=1e-10)
    for k in range(res.r):
        w = res.W[:, k]
        assert np.linalg.norm(res.Atilde @ w - res.eigenvalues[k] * w) <= 1e-9 * np.linalg.norm(w)


def test_auto_rank_energy():
    s = np.array([10.0, 1.0, 0.1, 0.001])
    # 100 / 101.01 < 0.999; adding 1 reaches > 0.999
    assert auto_rank(s) == 2
    assert auto_rank(np.array([1.0, 0.0])) == 1


def test_auto_rank_capped_by_shape():
    rng = np.random.default_rng(6)
    res = dmd(build_snapshot_pair(rng.standard_normal((3, 20))), "auto")
    assert 1 <= res.r <= 3


def test_reconstruct_first_snapshot_and_empty():
    rng = np.random.default_rng(7)
    data = _linear_snapshots(np.array([[0.8, 0.2], [-0.2, 0.8]]), [1.0, 0.5], 15)
    res = dmd(build_snapshot_pair(data), 2)
    first = reconstruct(res, None, [0])[:, 0]
    resid = np.linalg.norm(res.Phi @ res.amplitudes - data[:, 0])
    assert np.linalg.norm(first - data[:, 0]) <= resid + 1e-12
    assert np.all(reconstruct(res, [], 5) == 0.0)
    with pytest.raises(BadModeIndex):
        reconstruct(res, [2], 3)


def test_mode_report_unit_values():
    rng = np.random.default_rng(8)
    theta = 2 * np.pi / 24
    rot = np.array([[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]])
    A = np.zeros((3, 3))
    A[:2, :2] = rot
    A[2, 2] = 1.0
    data = _linear_snapshots(A, rng.uniform(0.5, 1.5, 3), 60)
    modes = mode_report(dmd(build_snapshot_pair(data), 3), 3600.0)
    freqs = sorted(abs(m.frequency) for m in modes)
    assert freqs[0] == pytest.approx(0.0, abs=1e-12)
    assert freqs[1] == pytest.approx(1 / 86400, rel=1e-9)
    steady = [m for m in modes if abs(m.frequency) < 1e-12][0]
    assert steady.growth == pytest.approx(0.0, abs=1e-12)
    # conjugate pairs tie on energy and are then ordered by signed frequency
    energies = [float(f"{m.energy:.10g}") for m in modes]
    assert energies == sorted(energies, reverse=True)
    pair = [m for m in modes if abs(m.frequency) > 0]
    assert pair[0].frequency < 0 < pair[1].frequency


def test_mode_report_zero_eigenvalue():
    data = np.array([[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]])
    # x1 -> x2 -> 0: a nilpotent map
    res = dmd(build_snapshot_pair(data), 2)
    report = mode_report(res, 1.0)
    assert all(m.zero_eigenvalue and m.growth == -math.inf for m in report)
    assert report[0].to_dict()["growth_per_s"] is None
    with pytest.raises(ZeroEigenvalue):
        mode_report(res, 1.0, strict=True)


def test_planted_daily_oscillation_matches_fft():
    hours = np.arange(24 * 30)
    rng = np.random.default_rng(9)
    weights = rng.uniform(0.5, 1.5, 6)
    phases = rng.uniform(0, 2 * np.pi, 6)
    signal = np.exp(-hours / 2000.0)
    data = np.array([w * signal * np.cos(2 * np.pi * hours / 24 + p) for w, p in zip(weights, phases)])
    modes = mode_report(dmd(build_snapshot_pair(data), "auto"), 3600.0)
    top = abs(modes[0].frequency)
    spec = np.abs(np.fft.rfft(data[0]))
    fft_peak = np.fft.rfftfreq(len(hours), d=3600.0)[np.argmax(spec[1:]) + 1]
    assert top == pytest.approx(fft_peak, rel=0.02)
    assert modes[0].growth == pytest.approx(-1 / (2000 * 3600), rel=1e-6)


def test_json_roundtrip(tmp_path):
    rng = np.random.default_rng(10)
    res = dmd(build_snapshot_pair(rng.standard_normal((4, 12))), 3)
    save_result(res, tmp_path / "r.json", dt=60.0)
    back = load_result(tmp_path / "r.json")
    for name in ("U", "Sigma", "V", "Atilde", "eigenvalues", "W", "Phi", "amplitudes"):
        assert np.array_equal(getattr(back, name), getattr(res, name)), name
    assert back.r == 3


def test_json_roundtrip_real_spectrum(tmp_path):
    data = _linear_snapshots(np.diag([0.9, 0.5, 0.2]), [1.0, 2.0, 3.0], 10)
    res = dmd(build_snapshot_pair(data), 3)
    save_result(res, tmp_path / "r.json")
    back = load_result(tmp_path / "r.json")
    assert back.eigenvalues.shape == (3,)
    assert np.allclose(np.sort(back.eigenvalues.real), [0.2, 0.5, 0.9], atol=1e-10)
