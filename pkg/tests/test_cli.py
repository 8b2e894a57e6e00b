import json

import pytest
from click.testing import CliRunner

from percolab.cli import main

TRIANGLE = """vertex a
vertex b
vertex c
edge ab a b 0.5
edge bc b c 0.5
edge ca c a 0.5
mark a b c
"""


@pytest.fixture
def runner():
    return CliRunner()


def test_check_dv8_exact(runner):
    res = runner.invoke(main, ["check", "dv8", "--graph", "family:cycle:3,p=0.5",
                               "--method", "exact"])
    assert res.exit_code == 0, res.output
    rep = json.loads(res.output)[0]
    assert rep["verdict"] == "holds"
    assert abs(rep["slack"] - 1.703125) < 1e-9
    assert set(rep) == {"check_id", "graph", "method", "lhs", "rhs", "slack",
                        "verdict", "tolerance", "sigma", "samples", "seed",
                        "runtime_ms", "note"}


def test_check_arms23(runner):
    res = runner.invoke(main, ["check", "arms23", "--graph",
                               "family:parallel:3,q=0.5", "--method", "exact"])
    assert res.exit_code == 0, res.output


def test_check_reads_graph_file(runner, tmp_path):
    f = tmp_path / "tri.graph"
    f.write_text(TRIANGLE)
    res = runner.invoke(main, ["check", "dv8", "--graph", str(f)])
    assert res.exit_code == 0, res.output


def test_malformed_file_exits_2(runner, tmp_path):
    f = tmp_path / "bad.graph"
    f.write_text("vertex a\nvertex b\nedge ab a b 2.0\nmark a b\n")
    res = runner.invoke(main, ["check", "dv8", "--graph", str(f)])
    assert res.exit_code == 2
    res2 = runner.invoke(main, ["check", "dv8", "--graph", str(tmp_path / "no.graph")])
    assert res2.exit_code == 2


def test_size_guard_exits_3(runner):
    res = runner.invoke(main, ["check", "dv8", "--graph", "family:grid:5,5,p=0.5",
                               "--method", "exact"])
    assert res.exit_code == 3


def test_hypothesis_error_exits_2(runner):
    res = runner.invoke(main, ["check", "planar_dv2", "--graph",
                               "family:complete:4,p=0.5"])
    assert res.exit_code == 2


def test_unknown_check_exits_2(runner):
    res = runner.invoke(main, ["check", "wat", "--graph", "family:cycle:3,p=0.5"])
    assert res.exit_code == 2


def test_mc_without_seed_exits_2(runner):
    res = runner.invoke(main, ["check", "dv8", "--graph", "family:cycle:3,p=0.5",
                               "--method", "mc", "--samples", "1000"])
    assert res.exit_code == 2


def test_estimate_exact(runner):
    res = runner.invoke(main, ["estimate", "--graph", "family:cycle:3,p=0.5",
                               "--event", "a,b,c", "--method", "exact"])
    assert res.exit_code == 0
    assert json.loads(res.output)["probability"] == 0.5


def test_estimate_path_series(runner):
    res = runner.invoke(main, ["estimate", "--graph", "family:path:2,p=0.3",
                               "--event", "a,b"])
    assert abs(json.loads(res.output)["probability"] - 0.09) < 1e-12


def test_estimate_mc_deterministic(runner):
    args = ["estimate", "--graph", "family:cycle:3,p=0.5", "--event", "a,b",
            "--method", "mc", "--samples", "50000", "--seed", "42"]
    out1 = runner.invoke(main, args).output
    out2 = runner.invoke(main, args).output
    assert out1 == out2


def test_estimate_lambda(runner):
    res = runner.invoke(main, ["estimate", "--graph", "family:parallel:3,q=0.5",
                               "--event", "npaths(a,b,2)", "--lambda", "2"])
    data = json.loads(res.output)
    assert data["probability"] == pytest.approx(0.5, abs=1e-9)
    assert data["implied_lambda"] > 0


def test_check_csv_matches_json(runner):
    argsj = ["check", "q2", "--graph", "family:cycle:3,p=0.5", "--out", "json"]
    argsc = ["check", "q2", "--graph", "family:cycle:3,p=0.5", "--out", "csv"]
    js = json.loads(runner.invoke(main, argsj).output)[0]
    csv_out = runner.invoke(main, argsc).output.splitlines()
    import csv as csvmod
    row = next(csvmod.DictReader(csv_out))
    assert float(row["lhs"]) == js["lhs"]
    assert float(row["rhs"]) == js["rhs"]
    assert row["verdict"] == js["verdict"]


def test_corpus_filtered_run(runner, tmp_path):
    res = runner.invoke(main, ["corpus", "run", "--filter", "q2*", "--quiet",
                               "--out", str(tmp_path / "r")])
    assert res.exit_code == 0, res.output
    files = sorted((tmp_path / "r").glob("*.json"))
    assert files
    rows = json.loads(files[0].read_text())
    assert rows[0]["verdict"] == "holds"


def test_corpus_filter_selects_only_matches(runner):
    res = runner.invoke(main, ["corpus", "run", "--filter", "frac1", "--quiet"])
    assert res.exit_code == 0
    assert "checks: 8" in res.output


def test_corpus_list(runner):
    res = runner.invoke(main, ["corpus", "list"])
    assert res.exit_code == 0
    assert "hk_tree" in res.output and "zipper_cases_strongbk" in res.output


def test_scan_via_cli(runner):
    res = runner.invoke(main, ["check", "logconcave", "--graph",
                               "family:parallel:4,q=0.5", "--nmax", "4"])
    assert res.exit_code == 0, res.output
    reps = json.loads(res.output)
    assert all(r["verdict"] == "holds" for r in reps)
