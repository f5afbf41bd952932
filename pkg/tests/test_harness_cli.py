"""Harness commands and the CLI surface: reports, determinism, exit codes,
config round-trips, output files."""

import json
import os
import subprocess
import sys

import numpy as np
import pytest

from finslerhom import harness
from finslerhom.cli import main
from finslerhom.report import CurvatureReport, RunConfig


def small_cfg(**over):
    cfg = RunConfig.from_dict({
        "space": {"case": 1, "n": 1},
        "metric": {"blocks": [1.0, 1.0], "v": "m0",
                   "phi": {"family": "randers", "eps": 0.05}},
        "scan": {"flag_samples": 300, "refine_iters": 10, "tol": 1e-8,
                 "s_rays": 120},
        "seed": 5,
    })
    for k, v in over.items():
        setattr(cfg, k, v)
    return cfg


def test_config_roundtrip():
    cfg = small_cfg()
    again = RunConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
    assert again.to_dict() == cfg.to_dict()


def test_verify_case_su2_passes():
    rep = harness.cmd_verify_case(small_cfg())
    assert rep.all_passed, rep.to_text()
    assert rep.s_curvature["max_abs"] < 1e-10
    assert rep.flag_scan["min"] > 0


def test_verify_case_report_deterministic():
    r1 = harness.cmd_verify_case(small_cfg())
    r2 = harness.cmd_verify_case(small_cfg())
    d1, d2 = r1.to_dict(), r2.to_dict()
    for d in (d1, d2):
        d.pop("timestamp")
        d.pop("wall_time_s")
    assert json.dumps(d1) == json.dumps(d2)


def test_verify_case_negative_control_su3_u1():
    cfg = small_cfg()
    cfg.space.case = 6
    cfg.space.k, cfg.space.l = 1, -1
    cfg.metric.blocks = [1.0, 0.7, 1.3, 0.9]
    cfg.negative_control = True
    rep = harness.cmd_verify_case(cfg)
    # structure is sound, positivity must NOT be claimed: the scan finds the
    # zero flag through v
    assert not rep.checks["positive_flag_curvature"]["passed"]
    assert rep.flag_scan["min"] < 1e-6
    assert rep.checks["kvcl"]["passed"]
    assert rep.checks["vanishing_s_curvature"]["passed"]


def test_verify_case_rejects_without_flag():
    cfg = small_cfg()
    cfg.space.case = 6
    cfg.space.k, cfg.space.l = 1, -1
    with pytest.raises(harness.StructuralRejection):
        harness.cmd_verify_case(cfg)


def test_verify_case_rejects_case7_in_su3():
    cfg = small_cfg()
    cfg.space.case = 7
    cfg.space.torus = [[1, -1, 0], [1, 0, -1]]
    cfg.negative_control = True
    with pytest.raises(harness.StructuralRejection):
        harness.cmd_verify_case(cfg)


def test_catalog_command_shape():
    rows = harness.cmd_catalog()
    assert len(rows) == 10
    assert rows[8]["id"] == 9
    assert "f4" in rows[8]["pair"]
    assert not rows[8]["admissible"]
    json.dumps(rows)  # schema-valid document


def test_scan_outputs(tmp_path):
    cfg = small_cfg(out=str(tmp_path))
    rep = harness.cmd_scan(cfg)
    for name in ("report.json", "report.txt", "flag_minima.csv",
                 "s_curvature.csv", "flag_curvature.png", "s_curvature.png"):
        assert (tmp_path / name).exists(), name
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["case"] == rep.case
    # every reported number reproducible from the echoed config
    cfg2 = RunConfig.from_dict(data["config"])
    rep2 = harness.cmd_scan(cfg2)
    assert rep2.flag_scan["min"] == rep.flag_scan["min"]


def test_crosscheck_residuals_small():
    cfg = RunConfig()
    cfg.oracle.enable = ["commuting_pair"]
    res = harness.cmd_crosscheck(cfg)
    assert set(res) == {"zero_flag_su3_u1", "zero_flag_u3_t2"}
    assert all(v < 1e-6 for v in res.values())


def test_cli_catalog_exit_zero(capsys):
    assert main(["catalog"]) == 0
    out = capsys.readouterr().out
    assert "S^{2n+1} = SU(n+1)/SU(n)" in out


def test_cli_verify_case_json(capsys, tmp_path):
    code = main(["verify-case", "--case", "1", "--n", "1", "--samples", "200",
                 "--seed", "3", "--json"])
    out = capsys.readouterr().out
    assert code == 0
    rep = json.loads(out)
    assert rep["checks"]["positive_flag_curvature"]["passed"]


def test_cli_exit_codes(capsys):
    # inadmissible without the explicit flag: structural/config error
    code = main(["verify-case", "--case", "6", "--k", "1", "--l", "-1",
                 "--samples", "200"])
    capsys.readouterr()
    assert code == 2
    # with the flag: runs, fails the positivity check
    code = main(["verify-case", "--case", "6", "--k", "1", "--l", "-1",
                 "--samples", "200", "--negative-control"])
    capsys.readouterr()
    assert code == 1


def test_cli_config_file(tmp_path, capsys):
    cfg_path = tmp_path / "run.json"
    cfg_path.write_text(json.dumps(small_cfg().to_dict()))
    code = main(["verify-case", "--config", str(cfg_path)])
    capsys.readouterr()
    assert code == 0


def test_cli_entrypoint_subprocess():
    out = subprocess.run([sys.executable, "-m", "finslerhom", "catalog", "--json"],
                         capture_output=True, text=True)
    assert out.returncode == 0
    rows = json.loads(out.stdout)
    assert len(rows) == 10


def test_report_text_rendering():
    rep = CurvatureReport(case="X")
    rep.add_check("alpha", True, detail=1.0)
    rep.add_check("beta", False, note="why")
    rep.s_curvature = {"max_abs": 1e-12, "rays": 10}
    rep.flag_scan = {"min": 0.5, "note": "n"}
    rep.finalize(0.1)
    text = rep.to_text()
    assert "[PASS] alpha" in text and "[FAIL] beta" in text
    assert not rep.all_passed
