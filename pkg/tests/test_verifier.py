import json
import math

import numpy as np
import pytest

import oracles
from walklab import generate
from walklab import verifier as vf


@pytest.fixture(scope="module")
def sg4():
    return generate("sg", 4)


@pytest.fixture(scope="module")
def sg5():
    return generate("sg", 5)


@pytest.fixture(scope="module")
def path():
    return generate("path", 401)


def test_lower_envelope_holds_and_is_tight():
    lhs = [0.9, 0.5, 0.1, 0.02]
    feat = [1, 2, 3, 5]
    c, C = vf.fit_lower_envelope(lhs, feat)
    assert c == 0.9
    margins = [math.log(a) - (math.log(c) - C * f) for a, f in zip(lhs, feat)]
    assert min(margins) == pytest.approx(0, abs=1e-12)
    assert all(m >= -1e-12 for m in margins)


def test_upper_envelope():
    C, c = vf.fit_upper_envelope([0.5, 0.1, 0.0], [1, 2, 3])
    assert C == 1.0
    assert c == pytest.approx(min(-math.log(0.5), -math.log(0.1) / 2))


def test_polynomial_envelope_recovers_shape():
    rng = np.random.default_rng(0)
    feat = rng.uniform(1, 5, 40)
    r = rng.uniform(1, 8, 40)
    lhs = 2.0 * r ** -1.5 * np.exp(-0.7 * feat)
    c, C, D = vf.fit_polynomial_envelope(lhs, feat, np.log(r))
    rhs = c * r ** -D * np.exp(-C * feat)
    assert np.all(np.log(lhs) - np.log(rhs) >= -1e-9)
    assert C <= 0.7 + 1e-6


def test_geometric_grid():
    grid = vf.geometric_grid(4, 61, 40)
    assert grid[0] == 4 and grid[-1] == 61
    assert grid == sorted(set(grid))
    assert vf.geometric_grid(5, 3, 10) == []


def test_exit_bounds_sg5(sg5):
    upper, lower = vf.verify_exit_bounds(sg5, 0, [4, 8, 12])
    assert upper.passed and lower.passed
    assert upper.params["R"] == [4, 8, 12]
    assert min(r["log_margin"] for r in lower.rows) == pytest.approx(0, abs=1e-9)
    assert all(r["n"] > r["R"] for r in lower.rows)
    assert all(v > 0 for v in lower.fitted.values())
    # nu = 1 rows: the lower bound collapses to a constant, P is near 1
    tail = [r for r in lower.rows if r["nu"] == 1]
    assert all(r["lhs"] > 0.5 for r in tail)


def test_exit_lower_stability(sg4, sg5):
    _, a = vf.verify_exit_bounds(sg4, 0, [4, 8, 12])
    _, b = vf.verify_exit_bounds(sg5, 0, [4, 8, 12])
    verdict, ratio = vf.stability(a, b)
    assert verdict == "pass" and ratio <= 2
    assert a.params["R"] == [4, 8]  # R = 12 would reach the corners of sg(4)


def test_exit_lower_stability_path():
    _, a = vf.verify_exit_bounds(generate("path", 201), 100, [4, 8, 12])
    _, b = vf.verify_exit_bounds(generate("path", 401), 200, [4, 8, 12])
    assert vf.stability(a, b)[0] == "pass"


def test_mark_unstable(sg5):
    _, lower = vf.verify_exit_bounds(sg5, 0, [4, 8])
    fake = vf.VerificationReport("exit-lower", {}, {}, [], {"C": lower.fitted["C"] * 3}, "pass")
    vf.mark_unstable(lower, fake)
    assert lower.verdict == "unstable"


def test_empty_sweep():
    g = generate("path", 21)
    with pytest.raises(vf.EmptySweepError):
        vf.verify_exit_bounds(g, 10, [8])


def test_hitting_chain_path(path):
    reps = vf.verify_hitting_chain(path, 200, r_values=(1, 2, 3))
    assert set(reps) == {"p1", "lptt", "p2", "lhg"}
    assert all(r.passed for r in reps.values())
    assert reps["p1"].fitted["c"] >= 0.25
    assert math.isfinite(reps["lhg"].fitted["C"])


def test_lptt_excludes_ball_and_matches_closed_form(path):
    reps = vf.verify_hitting_chain(path, 200, r_values=(3,))
    row = reps["lptt"].rows[0]
    assert row["lhs"] < 1
    # the minimum sits on the closure boundary, at distance 4r, gambler's ruin
    assert row["lhs"] == pytest.approx(oracles.gambler_ruin(15 - 12, 15 - 2), abs=1e-9)


def test_heat_kernel_bounds_sg(sg4, sg5):
    a = vf.verify_heat_kernel_bounds(sg4, 0)
    b = vf.verify_heat_kernel_bounds(sg5, 0)
    for t in ("vsr", "dle", "ndle", "tsge", "tle", "cle"):
        assert b[t].passed, t
    assert vf.stability(a["tsge"], b["tsge"])[0] == "pass"


def test_tsge_collapses_to_ndle_shape(sg5):
    rep = vf.verify_heat_kernel_bounds(sg5, 0, theorems=("tsge",))["tsge"]
    ones = [r for r in rep.rows if r["l"] == 1]
    c, C = rep.fitted["c"], rep.fitted["C"]
    assert ones
    for r in ones:
        assert r["rhs"] == pytest.approx(c * math.exp(-C))


def test_not_vsr_gate():
    box = generate("box2d", 41)
    with pytest.raises(vf.NotVSRError):
        vf.verify_heat_kernel_bounds(box, 20 * 41 + 20, theorems=("tsge",), vsr_threshold=0.5)


def test_time_comparison(path):
    rep = vf.verify_time_comparison(path, [(200, 4), (200, 8)])
    assert rep.passed
    assert rep.fitted["C_T"] == pytest.approx(4)


def test_report_json_roundtrip(sg5):
    rep = vf.vsr_report(sg5, 0, [1, 2, 4])
    rep.fitted["weird"] = math.inf
    d = json.loads(rep.to_json())
    assert d["theorem"] == "vsr" and d["verdict"] == "pass"
    assert d["fitted"]["weird"] == "inf"
    assert set(d["graph"]) == {"file", "hash", "vertices", "edges"}
    assert all({"lhs", "rhs", "log_margin"} <= set(r) for r in d["rows"])


def test_reports_deterministic(sg4):
    a = vf.verify_exit_bounds(sg4, 0, [4, 8])[1].to_json()
    b = vf.verify_exit_bounds(generate("sg", 4), 0, [4, 8])[1].to_json()
    assert a == b
