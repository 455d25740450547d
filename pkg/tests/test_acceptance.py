"""Acceptance criteria, one test each. Every test prints a PASS/FAIL line."""

from __future__ import annotations

import json
import math
import time

import numpy as np
import pytest

from lcattack.attack import NO_ALIGNED_TARGET, compute_ld, compute_liid, select_target
from lcattack.cli import main
from lcattack.dmd import build_snapshot_pair, dmd
from lcattack.dynamics import LoadEvent, SimConfig, disconnect_events, simulate
from lcattack.grid import Branch, Bus, Generator, GridModel, Load, ieee14_fixture, map_zone_loads, power_flow
from lcattack.protection import ERCOT_UFLS, NYISO, NYISO_UFLS, apply_ufls, check_thresholds, evaluate
from lcattack.sample import REFERENCE_MW, case_snapshot


@pytest.fixture
def verdict(capsys):
    def emit(n: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[acceptance {n:2d}] {'PASS' if ok else 'FAIL'}  {title}: {detail}")
        assert ok, detail
    return emit


def case_model(year: int):
    m = map_zone_loads(ieee14_fixture(), case_snapshot(year), mode="ratio", reference=REFERENCE_MW)
    return m, power_flow(m)


def attack_run(year: int, bus: int):
    m, pf = case_model(year)
    tr = simulate(m, pf, disconnect_events([bus], 200.0, 5.0), SimConfig(duration=300.0, step=0.005))
    return m.load_at(bus).p / m.total_load(), tr


def test_01_dmd_spectrum_recovery(verdict):
    t0 = time.perf_counter()
    lam = np.array([0.99, 0.95, 0.9, 0.97 * np.exp(0.3j), 0.97 * np.exp(-0.3j),
                    0.93 * np.exp(1.1j), 0.93 * np.exp(-1.1j)])
    rng = np.random.default_rng(11)
    Q, _ = np.linalg.qr(rng.standard_normal((7, 7)))
    P = Q + 0.2 * rng.standard_normal((7, 7))
    D = np.diag([0.99, 0.95, 0.9, 0.0, 0.0, 0.0, 0.0])
    for k, (rho, th) in zip((3, 5), ((0.97, 0.3), (0.93, 1.1))):
        D[k:k + 2, k:k + 2] = rho * np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
    A = P @ D @ np.linalg.inv(P)
    cols = [rng.standard_normal(7)]
    for _ in range(129):
        cols.append(A @ cols[-1])
    res = dmd(build_snapshot_pair(np.column_stack(cols)), 7)
    err = max(max(np.min(np.abs(res.eigenvalues - l)) for l in lam),
              max(np.min(np.abs(lam - l)) for l in res.eigenvalues))
    elapsed = time.perf_counter() - t0
    verdict(1, "DMD spectrum recovery", err <= 1e-8 and elapsed < 1.0,
            f"max eigenvalue error {err:.2e}, {elapsed:.3f} s")


def test_02_eckart_young(verdict):
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(5):
        data = rng.uniform(0, 1, (11, 40)) + np.outer(rng.uniform(1, 2, 11), np.sin(np.arange(40) / 4))
        pair = build_snapshot_pair(data)
        s = np.linalg.svd(pair.X, compute_uv=False)
        for r in range(1, 6):
            res = dmd(pair, r)
            err = np.linalg.norm(pair.X - (res.U * res.Sigma) @ res.V.conj().T)
            want = math.sqrt(float(np.sum(s[r:] ** 2)))
            worst = max(worst, abs(err - want) / want)
    verdict(2, "Eckart-Young optimality", worst <= 1e-10, f"worst relative gap {worst:.2e}")


def test_03_power_flow(verdict):
    model = ieee14_fixture()
    t0 = time.perf_counter()
    sol = power_flow(model)
    elapsed = time.perf_counter() - t0
    two = GridModel([Bus(1, "slack"), Bus(2, "PV")], [Branch(1, 2, 0.0, 0.1)],
                    [Generator(1, 0.0, 1.0), Generator(2, 0.0, 1.0)], [Load(2, 1.0, 0.0)])
    # lossless line, |V| = 1 at both ends: P = sin(theta_1 - theta_2) / x
    angle_err = abs(power_flow(two).va[1] + math.asin(1.0 * 0.1))
    ok = sol.iterations <= 10 and sol.max_mismatch <= 1e-8 and angle_err <= 1e-10 and elapsed < 0.1
    verdict(3, "Power flow", ok, f"{sol.iterations} iterations, mismatch {sol.max_mismatch:.1e} pu, "
                                 f"two-bus angle error {angle_err:.1e} rad, {elapsed * 1e3:.1f} ms")


def test_04_equilibrium(verdict):
    m, pf = case_model(2020)
    tr = simulate(m, pf, [], SimConfig(duration=300.0, step=0.005))
    dev = float(np.max(np.abs(tr.frequency - 60.0)))
    verdict(4, "Equilibrium persistence", dev <= 1e-6, f"max |f - 60| = {dev:.2e} Hz over 300 s")


def test_05_rocof(verdict):
    worst = 0.0
    for h in (2.0, 4.0, 6.0):
        for dp in (0.05, -0.05, 0.1, -0.1):
            m = GridModel([Bus(1, "slack")], [], [Generator(1, 1.0, 1.0, h=h, xd_prime=1e-3, d=0.0)],
                          [Load(1, 1.0, 0.0)])
            tr = simulate(m, power_flow(m), [LoadEvent(0.0, 1, p=1.0 - dp, q=0.0)], SimConfig(duration=0.01))
            rocof = (tr.frequency[-1] - tr.frequency[0]) / 0.01
            want = 60.0 * dp / (2 * h)
            worst = max(worst, abs(rocof - want) / abs(want))
    verdict(5, "ROCOF oracle", worst <= 0.005, f"worst relative error {worst:.2e}")


def test_06_severity_sweep(verdict):
    t0 = time.perf_counter()
    m, pf = case_model(2020)
    peaks = []
    for frac in np.arange(0.05, 0.401, 0.05):
        events = [LoadEvent(200.0, ld.bus, scale=1.0 - frac, restore=205.0) for ld in m.loads]
        tr = simulate(m, pf, events, SimConfig(duration=300.0))
        peaks.append(float(np.max(np.abs(tr.frequency - 60.0))))
    elapsed = time.perf_counter() - t0
    mono = all(b >= a for a, b in zip(peaks, peaks[1:]))
    verdict(6, "Monotone severity sweep", mono and elapsed < 30.0,
            f"peaks {[round(p, 3) for p in peaks]} Hz, {elapsed:.1f} s")


def test_07_bus9_band(verdict):
    share, tr = attack_run(2020, 9)
    peak = float(tr.frequency.max())
    crossed = any(e.direction == "over" for e in check_thresholds(tr, NYISO).excursions)
    ok = 0.08 <= share <= 0.12 and 60.1 <= peak <= 61.5 and crossed
    verdict(7, "Bus 9 band (2020 fixture)", ok, f"share {share:.3f}, peak {peak:.3f} Hz, NYISO crossed {crossed}")


def test_08_bus3_band(verdict):
    parts, ok = [], True
    for year in (2019, 2020):
        share, tr = attack_run(year, 3)
        peak = float(tr.frequency.max())
        cls = evaluate(tr, NYISO).classification
        ok &= 0.36 <= share <= 0.37 and 62.0 <= peak <= 66.0 and cls == "major emergency"
        parts.append(f"{year}: share {share:.3f}, peak {peak:.2f} Hz, {cls}")
    verdict(8, "Bus 3 band (both fixtures)", ok, "; ".join(parts))


def test_09_ld_liid_oracle(verdict):
    rng = np.random.default_rng(9)
    worst = worst_sum = 0.0
    for _ in range(20):
        a = rng.uniform(0.1, 3.0, (5, 10))
        b = rng.uniform(0.1, 3.0, (5, 10))
        ld = compute_ld(a.sum(axis=0), b.sum(axis=0))
        liid = compute_liid(a, b)
        for t in range(10):
            ta = tb = 0.0
            for i in range(5):
                ta += a[i, t]
                tb += b[i, t]
            worst = max(worst, abs(ld[t] - (ta - tb)))
            for i in range(5):
                worst = max(worst, abs(liid[i, t] - (a[i, t] / ta - b[i, t] / tb)))
        worst_sum = max(worst_sum, float(np.max(np.abs(liid.sum(axis=0)))))
    verdict(9, "LD/LIID oracle equivalence", worst <= 1e-12 and worst_sum <= 1e-12,
            f"max oracle gap {worst:.1e}, max LIID column sum {worst_sum:.1e}")


def _planted(trough_at, ld_peak_at):
    liid = np.zeros((4, 48))
    liid[2, trough_at - 2:trough_at + 3] = [-0.01, -0.19, -0.2, -0.185, -0.02]
    liid[0] = -liid.sum(axis=0)
    ld = np.full(48, 0.1)
    ld[ld_peak_at - 2:ld_peak_at + 3] = 1.0
    return ld, liid


def test_10_target_selection(verdict):
    buses = [3, 5, 9, 14]
    sel = select_target(*_planted(30, 30), q=0.9, buses=buses)
    planted = (sel.bus, sel.start, sel.end) == (9, 29, 31)
    disjoint = select_target(*_planted(10, 30), q=0.9, buses=buses)
    ok = planted and disjoint.verdict == NO_ALIGNED_TARGET
    verdict(10, "Target selection", ok, f"planted -> bus {sel.bus} window {sel.start}..{sel.end}; "
                                        f"disjoint -> {disjoint.verdict}")


def _fire(scheme, freqs):
    armed, fired = scheme.initial_state(), []
    for f in freqs:
        frac, armed = apply_ufls(scheme, float(f), armed)
        if frac:
            fired.append((float(f), round(frac, 12)))
    return fired


def test_11_ufls(verdict):
    ramp = np.round(np.arange(60.0, 58.7999, -0.001), 3)
    nyiso = _fire(NYISO_UFLS, ramp)
    ercot = _fire(ERCOT_UFLS, np.round(np.arange(60.0, 58.3999, -0.001), 3))
    m, pf = case_model(2020)
    events = [LoadEvent(10.0, ld.bus, scale=1.3) for ld in m.loads]
    off = simulate(m, pf, events, SimConfig(duration=60.0, strict=False)).frequency.min()
    on = simulate(m, pf, events, SimConfig(duration=60.0, strict=False, ufls=NYISO_UFLS)).frequency.min()
    ok = (nyiso == [(59.5, 0.07), (59.3, 0.07), (59.1, 0.07), (58.9, 0.07)]
          and ercot == [(59.3, 0.05), (58.9, 0.1), (58.5, 0.1)] and on >= off)
    verdict(11, "UFLS staging", ok, f"NYISO {nyiso}; ERCOT {ercot}; nadir off {off:.3f} Hz, on {on:.3f} Hz")


def test_12_pipeline_determinism(verdict, tmp_path):
    t0 = time.perf_counter()
    assert main(["make-sample", str(tmp_path / "sample")]) == 0
    cfg = str(tmp_path / "sample" / "config.json")
    codes = [main(["run", cfg, "--output", str(tmp_path / out)]) for out in ("a", "b")]
    elapsed = time.perf_counter() - t0
    a = (tmp_path / "a" / "report.json").read_bytes()
    b = (tmp_path / "b" / "report.json").read_bytes()
    days = [d["verdict"] for d in json.loads(a)["days"]]
    ok = codes == [0, 0] and a == b and elapsed < 120.0
    verdict(12, "End-to-end determinism", ok, f"exit codes {codes}, identical {a == b}, "
                                              f"verdicts {days}, {elapsed:.1f} s")
