import csv
import json
import math
import shutil
from pathlib import Path

import pytest

import oracles
from walklab import generate
from walklab.cli import main
from walklab.graph import ball, dumps_graph, load_graph

GOLDEN = Path(__file__).parent / "golden"


@pytest.fixture
def workdir(tmp_path, monkeypatch):
    for name in ("path201.edges", "sg5.edges", "malformed.edges"):
        shutil.copy(GOLDEN / name, tmp_path / name)
    monkeypatch.chdir(tmp_path)
    return tmp_path


def _approx_equal(a, b, rel=1e-9):
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(_approx_equal(a[k], b[k], rel) for k in a)
    if isinstance(a, list):
        return len(a) == len(b) and all(_approx_equal(x, y, rel) for x, y in zip(a, b))
    if isinstance(a, float) or isinstance(b, float):
        return math.isclose(a, b, rel_tol=rel, abs_tol=1e-300)
    return a == b


def test_golden_graph_files_match_generator():
    assert (GOLDEN / "path201.edges").read_text() == dumps_graph(generate("path", 201))
    assert (GOLDEN / "sg5.edges").read_text() == dumps_graph(generate("sg", 5))


def test_golden_exit_dist_matches_fraction_oracle():
    g = generate("path", 201)
    region = set(ball(g, 100, 4).ids.tolist())
    ref = oracles.fraction_exit_cdf([(a, b) for a, b, _ in g.edges()], g.n, 100, region, 200)
    with open(GOLDEN / "exit_dist_path.csv", newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 200
    for row in rows:
        assert float(row["P_lt_n"]) == pytest.approx(float(ref[int(row["n"])]), abs=1e-12)


def test_exit_dist_contract(workdir, capsys):
    code = main(["exit-dist", "--graph", "path201.edges", "--x", "100", "--R", "4", "--nmax", "200",
                 "--out", "e.csv"])
    assert code == 0
    raw = (workdir / "e.csv").read_bytes()
    assert b"\r" not in raw
    assert raw == (GOLDEN / "exit_dist_path.csv").read_bytes()
    lines = raw.decode().splitlines()
    assert lines[0] == "n,P_lt_n" and len(lines) == 201


def test_verify_contract(workdir, capsys):
    code = main(["verify", "--theorem", "exit-lower", "--graph", "sg5.edges", "--x", "0", "--out", "r.json"])
    assert code == 0
    got = json.loads((workdir / "r.json").read_text())
    want = json.loads((GOLDEN / "verify_exit_lower_sg5.json").read_text())
    assert got["verdict"] == "pass"
    assert {"theorem", "graph", "params", "rows", "fitted", "verdict"} <= set(got)
    assert got["graph"]["hash"] == load_graph(workdir / "sg5.edges").digest()
    assert _approx_equal(got, want)


def test_malformed_line(workdir, capsys):
    code = main(["mean-exit", "--graph", "malformed.edges", "--R", "2"])
    assert code == 1
    err = capsys.readouterr().err
    assert err == (GOLDEN / "malformed.stderr").read_text()
    assert "line 4" in err


def test_failed_verdict_exit_two(workdir, capsys):
    main(["generate", "box2d", "41", "--out", "box.edges"])
    code = main(["verify", "--theorem", "vsr", "--graph", "box.edges", "--x", "840",
                 "--vsr-threshold", "0.5", "--out", "v.json"])
    assert code == 2
    assert json.loads((workdir / "v.json").read_text())["verdict"] == "fail"


def test_usage_errors(workdir, capsys):
    assert main(["frobnicate"]) == 1
    assert main(["exit-dist", "--graph", "path201.edges", "--nmax", "5"]) == 1
    assert main(["heat", "--graph", "nope.edges", "--y", "1", "--n", "1"]) == 1
    assert main(["mean-exit", "--graph", "path201.edges", "--x", "999", "--R", "2"]) == 1


def test_interior_guard_and_force(workdir, capsys):
    args = ["mean-exit", "--graph", "path201.edges", "--x", "2", "--R", "5"]
    assert main(args) == 1
    assert main(args + ["--force"]) == 0


def test_other_subcommands(workdir, capsys):
    p = ["--graph", "path201.edges", "--x", "100"]
    assert main(["heat", *p, "--y", "101", "--n", "1,2"]) == 0
    out = capsys.readouterr().out.splitlines()
    assert out[0] == "x,y,n,p_n,p_tilde_n" and out[1] == "100,101,1,0.25,0.25"
    assert main(["mean-exit", *p, "--R", "3,5"]) == 0
    rows = [ln.split(",") for ln in capsys.readouterr().out.splitlines()[1:]]
    assert [float(r[2]) for r in rows] == pytest.approx([9, 25], abs=1e-9)
    assert main(["resistance", *p, "--r", "1", "--R", "4"]) == 0
    assert capsys.readouterr().out.splitlines()[1].startswith("100,1,4,2.0")
    assert main(["harnack", *p, "--R", "2"]) == 0
    assert float(capsys.readouterr().out.splitlines()[1].split(",")[2]) == pytest.approx(5 / 3)
    assert main(["vsr", *p, "--r", "3", "--format", "json"]) == 0
    assert json.loads(capsys.readouterr().out)[0]["value"] == pytest.approx(0.5)
    assert main(["green", *p, "--R", "1"]) == 0
    assert capsys.readouterr().out.splitlines()[1] == "100,100,0.5"
    assert main(["scales", *p, "--y", "104", "--n", "400", "--R", "4"]) == 0
    row = capsys.readouterr().out.splitlines()[1].split(",")
    assert row[5] == "4"
    assert main(["fit-beta", *p, "--R", "64"]) == 0
    beta = float(capsys.readouterr().out.splitlines()[1].split(",")[1])
    assert beta == pytest.approx(2, abs=0.02)


def test_exit_dist_monte_carlo(workdir, capsys):
    base = ["exit-dist", "--graph", "path201.edges", "--x", "100", "--R", "2", "--nmax", "10", "--mc", "2000"]
    assert main(base) == 1
    assert main(base + ["--seed", "9"]) == 0
    first = capsys.readouterr().out
    assert main(base + ["--seed", "9"]) == 0
    assert capsys.readouterr().out == first
    assert first.splitlines()[0] == "n,P_lt_n,P_lt_n_mc"


def test_generate_joined(workdir, capsys):
    assert main(["generate", "joined", "--parts", "path:50,star:4", "--out", "j.edges"]) == 0
    assert load_graph(workdir / "j.edges").n == 54
    assert main(["generate", "sg", "99"]) == 1
