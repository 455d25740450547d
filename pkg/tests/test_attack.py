from __future__ import annotations

import json

import numpy as np
import pytest

from lcattack.attack import (ALIGNED, NO_ALIGNED_TARGET, AttackScenario, LtiPlant, ThreatModel, attack_controls,
                             compute_ld, compute_liid, load_scenario, lti_step, preselect, run_plant, select_target,
                             total_demand, uniform_noise)
from lcattack.dynamics import LoadEvent
from lcattack.errors import DimensionMismatch, LengthMismatch, MalformedInput, ValidationError, ZeroTotalLoad
from lcattack.grid import ieee14_fixture, power_flow


def test_threat_defaults_and_roundtrip():
    t = ThreatModel()
    assert t.level == "L1" and t.knowledge == "semi-oblivious"
    assert ThreatModel.from_dict(t.to_dict()) == t
    assert ThreatModel.from_dict({"knowledge": "oblivious"}).knowledge == "oblivious"


def test_threat_rejects_unknown_values():
    with pytest.raises(ValidationError):
        ThreatModel(knowledge="omniscient")
    with pytest.raises(ValidationError):
        ThreatModel.from_dict({"budget": 3})


def test_plant_shapes():
    with pytest.raises(DimensionMismatch):
        LtiPlant(np.eye(2), np.ones((3, 1)), np.eye(2))
    with pytest.raises(DimensionMismatch):
        LtiPlant(np.eye(2), np.ones((2, 1)), np.eye(2), H_ctl=np.ones((2, 2)))
    p = LtiPlant(np.eye(2), np.ones((2, 1)), np.eye(2))
    with pytest.raises(DimensionMismatch):
        lti_step(p, [1.0, 2.0], [1.0, 2.0])


def test_lti_step_example():
    p = LtiPlant([[1.0, 1.0], [0.0, 1.0]], [[0.0], [1.0]], [[1.0, 0.0]])
    x1, y0 = lti_step(p, [1.0, 2.0], [0.5])
    assert x1.tolist() == [3.0, 2.5]
    assert y0.tolist() == [1.0]


def test_run_plant_matches_loop():
    rng = np.random.default_rng(0)
    G = rng.uniform(-0.4, 0.4, (3, 3))
    B = rng.standard_normal((3, 2))
    C = rng.standard_normal((2, 3))
    H = rng.uniform(-0.2, 0.2, (2, 2))
    plant = LtiPlant(G, B, C, H_ctl=H, noise=uniform_noise(0.01, 2, seed=3))
    x0 = rng.standard_normal(3)
    xs, ys = run_plant(plant, x0, 10)
    x = x0.copy()
    for k in range(10):
        y = C @ x + plant.e(k)
        assert np.allclose(ys[k], y, atol=1e-14)
        x = G @ x + B @ (H @ y)
        assert np.allclose(xs[k + 1], x, atol=1e-14)


def test_noise_bounded_and_reproducible():
    draw = uniform_noise(0.05, 4, seed=1)
    vals = np.array([draw(k) for k in range(200)])
    assert np.all(np.abs(vals) <= 0.05)
    assert np.array_equal(draw(17), uniform_noise(0.05, 4, seed=1)(17))


def test_attack_controls_add():
    assert attack_controls([1.0, 2.0], [0.5, -2.0]).tolist() == [1.5, 0.0]
    with pytest.raises(DimensionMismatch):
        attack_controls([1.0], [1.0, 2.0])


def test_alteration_output_deviation():
    rng = np.random.default_rng(1)
    G = rng.uniform(-0.5, 0.5, (3, 3))
    B = rng.standard_normal((3, 2))
    C = rng.standard_normal((2, 3))
    plant = LtiPlant(G, B, C)
    x0 = rng.standard_normal(3)
    u = rng.standard_normal((4, 2))
    du = np.array([0.3, -0.7])
    _, base = run_plant(plant, x0, 4, u=u)
    _, hit = run_plant(plant, x0, 4, u=u, alterations={1: du})
    # one step later the output shifts by C B du, and linearity carries it on
    assert np.allclose(hit[1], base[1])
    assert np.allclose(hit[2] - base[2], C @ B @ du, atol=1e-12)
    assert np.allclose(hit[3] - base[3], C @ G @ B @ du, atol=1e-12)


def test_superposition_restore():
    # with G = I the state keeps the offset; an opposite alteration removes it
    plant = LtiPlant(np.eye(2), np.eye(2), np.eye(2))
    x0 = np.array([1.0, -1.0])
    u = np.zeros((5, 2))
    du = np.array([0.2, 0.4])
    xs, _ = run_plant(plant, x0, 5, u=u, alterations={1: du, 3: -du})
    assert np.allclose(xs[2], x0 + du) and np.allclose(xs[4], x0)


def test_total_demand():
    assert total_demand([1.0, 2.0], [0.5], 0.1) == pytest.approx(3.6)
    assert total_demand([]) == 0.0


def test_total_demand_balances_power_flow():
    m = ieee14_fixture()
    pf = power_flow(m)
    gen = float(np.sum(pf.s_gen.real))
    shunt = sum(b.shunt_g * pf.vm[m.bus_index[b.id]] ** 2 for b in m.buses)
    need = total_demand([ld.p for ld in m.loads], losses=pf.losses() + shunt)
    assert gen == pytest.approx(need, abs=1e-8)


def test_ld_liid_examples():
    assert compute_ld([3.0, 2.0], [1.0, 2.5]).tolist() == [2.0, -0.5]
    a = np.array([[1.0, 3.0], [3.0, 1.0]])
    b = np.array([[2.0, 2.0], [2.0, 2.0]])
    assert np.allclose(compute_liid(a, b), [[-0.25, 0.25], [0.25, -0.25]])
    with pytest.raises(LengthMismatch):
        compute_ld([1.0], [1.0, 2.0])
    with pytest.raises(LengthMismatch):
        compute_liid(a, b[:, :1])
    with pytest.raises(ZeroTotalLoad):
        compute_liid(np.zeros((2, 2)), b)


def test_ld_liid_loop_oracle():
    rng = np.random.default_rng(4)
    a = rng.uniform(0.1, 2.0, (5, 10))
    b = rng.uniform(0.1, 2.0, (5, 10))
    ld = compute_ld(a.sum(0), b.sum(0))
    liid = compute_liid(a, b)
    for t in range(10):
        ta = sum(a[i, t] for i in range(5))
        tb = sum(b[i, t] for i in range(5))
        assert abs(ld[t] - (ta - tb)) <= 1e-12
        for i in range(5):
            assert abs(liid[i, t] - (a[i, t] / ta - b[i, t] / tb)) <= 1e-12


def _planted(trough_at, ld_peak_at, n=4, m=48):
    liid = np.zeros((n, m))
    liid[1, trough_at - 2:trough_at + 3] = [-0.02, -0.095, -0.1, -0.093, -0.03]
    liid[0] = -liid.sum(axis=0)
    ld = np.zeros(m)
    ld[ld_peak_at - 3:ld_peak_at + 4] = 1.0
    return ld, liid


def test_select_target_planted():
    ld, liid = _planted(20, 20)
    sel = select_target(ld, liid, q=0.9, buses=[2, 5, 7, 9])
    assert sel.verdict == ALIGNED and sel.aligned
    assert (sel.bus, sel.start, sel.end, sel.time) == (5, 19, 21, 20)
    assert sel.liid_min == -0.1


def test_select_target_disjoint():
    ld, liid = _planted(10, 35)
    sel = select_target(ld, liid, q=0.9)
    assert sel.verdict == NO_ALIGNED_TARGET and sel.bus is None


def test_select_target_nonnegative_liid():
    sel = select_target(np.arange(5.0), np.zeros((2, 5)))
    assert sel.verdict == NO_ALIGNED_TARGET


def test_select_target_tie_break():
    liid = np.zeros((3, 6))
    liid[2, 1] = liid[0, 4] = liid[2, 0] = -0.5
    ld = np.ones(6)
    # bus ids reversed so row 2 carries the lowest id
    sel = select_target(ld, liid, buses=[30, 20, 10])
    assert (sel.bus, sel.time, sel.start, sel.end) == (10, 0, 0, 1)


def test_select_target_validation():
    with pytest.raises(LengthMismatch):
        select_target(np.ones(4), np.zeros((2, 5)))
    with pytest.raises(ValidationError):
        select_target(np.ones(4), np.zeros((2, 4)), q=1.5)


def test_preselect_scale_invariance():
    rng = np.random.default_rng(5)
    a = rng.uniform(0.5, 1.5, (4, 24))
    b = rng.uniform(0.5, 1.5, (4, 24))
    times = [f"{h:02d}:00" for h in range(24)]
    r1 = preselect(a, b, [1, 2, 3, 4], times, base_a=100.0, base_b=100.0)
    r2 = preselect(a * 3.0, b * 0.5, [1, 2, 3, 4], times, base_a=300.0, base_b=50.0)
    assert np.allclose(r1.ld, r2.ld, atol=1e-12) and np.allclose(r1.liid, r2.liid, atol=1e-12)
    t1, t2 = r1.target, r2.target
    assert (t1.verdict, t1.bus, t1.start, t1.end, t1.time) == (t2.verdict, t2.bus, t2.start, t2.end, t2.time)
    assert t1.ld_threshold == pytest.approx(t2.ld_threshold, abs=1e-15)
    assert np.allclose(r1.liid.sum(axis=0), 0.0, atol=1e-12)


def test_preselection_report_files(tmp_path):
    ld, liid = _planted(20, 20)
    base = np.full((4, 48), 10.0)
    a = base * (1 + ld / 10)
    b = base.copy()
    times = [f"{k // 2:02d}:{30 * (k % 2):02d}" for k in range(48)]
    rep = preselect(a, b, [1, 2, 3, 4], times, label="x")
    rep.write(tmp_path)
    d = json.loads((tmp_path / "x.json").read_text())
    assert d["verdict"] in (ALIGNED, NO_ALIGNED_TARGET)
    rows = (tmp_path / "x_liid.csv").read_text().splitlines()
    assert rows[0] == "time,bus1,bus2,bus3,bus4" and len(rows) == 49
    for line in rows[1:]:
        assert abs(sum(float(v) for v in line.split(",")[1:])) <= 1e-12
    assert len((tmp_path / "x_ld.csv").read_text().splitlines()) == 49


def test_preselection_recommendation():
    times = [f"t{k}" for k in range(48)]
    ld, liid = _planted(20, 20)
    b = np.full((4, 48), 0.25)
    a = (liid + b) * (1 + ld)
    rep = preselect(a, b, [1, 2, 3, 4], times, q=0.9)
    rec = rep.to_dict()["recommendation"]
    assert rep.target.aligned
    assert rec["buses"] == [2] and rec["trough_time"] == "t20"
    assert rec["start"] == "t19" and rec["end"] == "t21"


def test_preselect_validation():
    with pytest.raises(ValidationError):
        preselect(np.ones((2, 3)), np.ones((2, 3)), [1, 2], ["a", "b", "c"], base_a=0.0)
    with pytest.raises(LengthMismatch):
        preselect(np.ones((2, 3)), np.ones((2, 4)), [1, 2], ["a", "b", "c"])
    with pytest.raises(LengthMismatch):
        preselect(np.ones((2, 3)), np.ones((2, 3)), [1, 2, 3], ["a", "b", "c"])


def test_scenario_roundtrip(tmp_path):
    sc = AttackScenario((9,), (LoadEvent(200.0, 9, scale=0.0, restore=205.0),), (199.0, 206.0), label="b9")
    path = tmp_path / "s.json"
    path.write_text(json.dumps(sc.to_dict()))
    assert load_scenario(path) == sc
    sc.validate_against(ieee14_fixture())


def test_scenario_validation(tmp_path):
    with pytest.raises(ValidationError):
        AttackScenario((9,), (), (5.0, 5.0))
    with pytest.raises(ValidationError):
        AttackScenario((9,), (LoadEvent(10.0, 9, scale=0.0),), (0.0, 5.0))
    with pytest.raises(ValidationError):
        AttackScenario((9,), (LoadEvent(1.0, 9, scale=0.0, restore=8.0),), (0.0, 5.0))
    with pytest.raises(ValidationError):
        AttackScenario((9,), (LoadEvent(1.0, 3, scale=0.0),), (0.0, 5.0))
    with pytest.raises(ValidationError):
        AttackScenario((99,), (), (0.0, 5.0)).validate_against(ieee14_fixture())
    with pytest.raises(ValidationError):
        AttackScenario.from_dict({"buses": [9]})
    (tmp_path / "bad.json").write_text("{not json")
    with pytest.raises(MalformedInput):
        load_scenario(tmp_path / "bad.json")
