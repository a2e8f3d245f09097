import json
import math

import numpy as np
import pytest

from symmcal import Grid, RegionMask, ScalarField
from symmcal.checks import CheckResult, make_result
from symmcal.cli import main
from symmcal.grid import save_field, save_mask
from symmcal.report import (
    SuiteConfig,
    VerificationReport,
    emit_csv,
    read_csv_tallies,
)


def test_check_result_invariant():
    ok = make_result("x", 1.0, 2.0, 0.5, 0.1)
    assert ok.passed
    bad = make_result("x", 1.0, 2.0, -0.5, 0.1)
    assert not bad.passed
    with pytest.raises(ValueError):
        CheckResult("x", 1.0, 2.0, -0.5, 0.1, passed=True)


def test_check_result_unjudged_inf_tol():
    res = make_result("x", 1.0, 2.0, -5.0, math.inf)
    assert res.passed  # reported but not judged


def test_report_roundtrip_and_summary():
    checks = [
        make_result("b", 1.0, 1.0, 0.0, 1e-12, seed=3),
        make_result("a", 2.0, 1.0, -1.0, 0.1, seed=3),
    ]
    rep = VerificationReport(config={"suite": "x", "seed": 3}, checks=checks, wall_time=1.5)
    assert [c.name for c in rep.checks] == ["a", "b"]  # order-stable by name
    assert rep.n_fail == 1
    back = VerificationReport.from_json(rep.to_json())
    assert back.to_dict()["checks"] == rep.to_dict()["checks"]
    # tampered summary is rejected
    d = rep.to_dict()
    d["summary"]["pass"] = 99
    with pytest.raises(ValueError):
        VerificationReport.from_dict(d)


def test_emit_csv_header_and_roundtrip(tmp_path):
    rep = VerificationReport(config={}, checks=[
        make_result("a", 1.0, 2.0, 1.0, 0.1),
        make_result("b", 1.0, 2.0, -1.0, 0.1),
        make_result("c", 0.0, 0.0, 0.0, 0.0),
    ])
    path = tmp_path / "out.csv"
    emit_csv(rep, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "name,lhs,rhs,slack,tol,pass"
    assert len(lines) == 4
    tallies = read_csv_tallies(path)
    assert tallies == {"total": 3, "pass": 2, "fail": 1}


def test_emit_csv_empty_report(tmp_path):
    rep = VerificationReport(config={})
    path = tmp_path / "empty.csv"
    emit_csv(rep, path)
    assert path.read_text().strip().splitlines() == ["name,lhs,rhs,slack,tol,pass"]


def test_suite_config_validation():
    with pytest.raises(ValueError):
        SuiteConfig(suite="bogus")
    with pytest.raises(ValueError):
        SuiteConfig(suite="pde", trials=0)


# --- CLI ---------------------------------------------------------------------

def test_cli_rearrange_field(tmp_path):
    g = Grid((4,), (1.0,))
    src = tmp_path / "f.json"
    dst = tmp_path / "fstar.json"
    save_field(ScalarField(g, [0.0, 3.0, 1.0, 2.0]), src)
    assert main(["rearrange", "--in", str(src), "--out", str(dst)]) == 0
    out = json.loads(dst.read_text())
    assert out["values"] == [1.0, 3.0, 2.0, 0.0]


def test_cli_rearrange_mask(tmp_path):
    g = Grid((4, 4), (1.0, 1.0))
    members = np.zeros((4, 4), bool)
    members[0, 0] = members[3, 3] = True
    src = tmp_path / "A.json"
    dst = tmp_path / "Astar.json"
    save_mask(RegionMask(g, members), src)
    assert main(["rearrange", "--mask", "--in", str(src), "--out", str(dst)]) == 0
    out = json.loads(dst.read_text())
    assert sum(out["members"]) == 2


def test_cli_perimeter(tmp_path, capsys):
    g = Grid((64, 64), (2.4 / 64, 2.4 / 64))
    X, Y = g.meshgrid()
    src = tmp_path / "disk.json"
    save_mask(RegionMask(g, X**2 + Y**2 < 1.0), src)
    assert main(["perimeter", "--in", str(src), "--method", "minkowski", "--delta", "4h"]) == 0
    est = json.loads(capsys.readouterr().out)
    assert est["method"] == "minkowski"
    assert est["value"] == pytest.approx(2 * math.pi, rel=0.25)


def test_cli_poisson_and_eigen(tmp_path, capsys):
    m = 24
    h = 1.0 / (m + 1)
    g = Grid((m + 2,) * 2, (h, h))
    X, Y = g.meshgrid()
    member = (np.abs(X) < m * h / 2) & (np.abs(Y) < m * h / 2)
    fsrc = tmp_path / "f.json"
    omsrc = tmp_path / "om.json"
    usrc = tmp_path / "u.json"
    save_field(ScalarField(g, np.where(member, 1.0, 0.0)), fsrc)
    save_mask(RegionMask(g, member), omsrc)
    assert main(["poisson", "--f", str(fsrc), "--omega", str(omsrc), "--out", str(usrc)]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["residual_norm"] <= 1e-10
    assert main(["eigen", "--omega", str(omsrc)]) == 0
    eig = json.loads(capsys.readouterr().out)
    assert eig["lambda1"] > 0


def test_cli_manifold_rearrange(tmp_path):
    gfile = tmp_path / "g.json"
    infile = tmp_path / "vals.json"
    outfile = tmp_path / "out.json"
    gfile.write_text(json.dumps({
        "r_edges": [0.0, 1.0, 2.0, 3.0],
        "phi": [1.0, 1.0, 1.0],
        "sigma_measure": 1.0,
    }))
    infile.write_text(json.dumps([0.5, 2.0, 1.0]))
    assert main(["manifold", "rearrange", "--grid", str(gfile),
                 "--in", str(infile), "--out", str(outfile)]) == 0
    out = np.asarray(json.loads(outfile.read_text())).ravel()
    assert out.tolist() == [2.0, 1.0, 0.5]


def test_cli_verify_small_suite_deterministic(tmp_path):
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    args = ["verify", "--suite", "rearrangement", "--size", "12", "--trials", "2",
            "--seed", "5", "--out"]
    assert main(args + [str(out1)]) == 0
    assert main(args + [str(out2)]) == 0
    d1 = json.loads(out1.read_text())
    d2 = json.loads(out2.read_text())
    d1["wall_time"] = d2["wall_time"] = 0.0
    assert json.dumps(d1, sort_keys=True) == json.dumps(d2, sort_keys=True)


def test_cli_verify_csv_output(tmp_path):
    out = tmp_path / "r.csv"
    assert main(["verify", "--suite", "rearrangement", "--size", "12", "--trials", "1",
                 "--seed", "1", "--format", "csv", "--out", str(out)]) == 0
    tallies = read_csv_tallies(out)
    assert tallies["fail"] == 0 and tallies["total"] > 0


def test_cli_unknown_suite_usage_error():
    with pytest.raises(SystemExit) as exc:
        main(["verify", "--suite", "nonsense"])
    assert exc.value.code == 2


def test_cli_unreadable_input_is_io_error(tmp_path):
    missing = tmp_path / "nope.json"
    assert main(["rearrange", "--in", str(missing), "--out", str(tmp_path / "o.json")]) == 2


def test_cli_tol_scale_loosens(tmp_path):
    # a huge tol-scale cannot turn passing checks into failures
    out = tmp_path / "r.json"
    code = main(["verify", "--suite", "rearrangement", "--size", "12", "--trials", "1",
                 "--seed", "2", "--tol-scale", "1000", "--out", str(out)])
    assert code == 0
