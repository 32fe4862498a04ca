import json
import subprocess
import sys

import numpy as np
import pytest

from cfjsac import baselines, cli, scenario, sweep
from cfjsac.scenario import ScenarioConfig
from cfjsac.sweep import SweepReport, TradeoffPoint

CFG = ScenarioConfig(n_antennas=3, seed=42, alpha=0.5)


def test_db_conversion():
    assert sweep.to_db(100.0) == pytest.approx(20.0)
    assert sweep.to_db(0.0) == sweep.SENTINEL_DB
    assert sweep.from_db(sweep.SENTINEL_DB) == 0.0
    assert sweep.from_db(sweep.to_db(3.7)) == pytest.approx(3.7, rel=1e-14)
    pt = TradeoffPoint.from_linear(0.5, 2.0, 0.0)
    assert abs(pt.snr_c_db - 10 * np.log10(2.0)) <= 1e-12
    assert pt.snr_s_db == sweep.SENTINEL_DB


def test_alpha_grid_and_parsing():
    assert sweep.alpha_grid(3) == [1.0, 0.5, 0.0]
    assert sweep.alpha_grid([0.2, 0.9, 0.2]) == [0.9, 0.2]
    for bad in (1, [], [1.5]):
        with pytest.raises(ValueError):
            sweep.alpha_grid(bad)
    assert sweep.parse_alphas("11") == 11
    assert sweep.parse_alphas("1,0.5,0") == [1.0, 0.5, 0.0]
    assert sweep.parse_seed_range("3..5") == [3, 4, 5]
    assert sweep.parse_seed_range("1,9") == [1, 9]
    with pytest.raises(ValueError):
        sweep.parse_seed_range("5..3")


def test_two_point_sweep_is_mrt(tmp_path):
    report = sweep.run_sweep(CFG, 2, out_dir=tmp_path)
    s = scenario.generate(CFG)
    top, bottom = report.points
    assert (top.alpha, bottom.alpha) == (1.0, 0.0)
    mc, ms = baselines.mrt_comm(s), baselines.mrt_sense(s)
    assert abs(top.snr_c_db - sweep.to_db(mc.snr_c)) <= 1e-6
    assert abs(top.snr_s_db - sweep.to_db(mc.snr_s)) <= 1e-6
    assert abs(bottom.snr_c_db - sweep.to_db(ms.snr_c)) <= 1e-6
    assert abs(bottom.snr_s_db - sweep.to_db(ms.snr_s)) <= 1e-6
    lines = (tmp_path / "region.csv").read_text().splitlines()
    assert lines[0] == "snr_c_db,snr_s_db" and len(lines) == 3


def test_csv_artifacts(tmp_path):
    report = sweep.run_sweep(CFG, 21, out_dir=tmp_path, diagnostics=True)
    back = sweep.read_points_csv(tmp_path / "region.csv")
    assert len(back) == 21
    for (c, s_), pt in zip(back, report.points):
        assert c == pytest.approx(pt.snr_c, rel=1e-5)
        assert s_ == pytest.approx(pt.snr_s, rel=1e-5)
    base = (tmp_path / "baselines.csv").read_text().splitlines()
    assert base[0] == "name,snr_c_db,snr_s_db"
    assert [row.split(",")[0] for row in base[1:]] == \
        ["mrt_comm", "mrt_sense", "zero_forcing", "standalone", "standalone_literal"]
    diag = json.loads((tmp_path / "diagnostics.json").read_text())
    assert len(diag) == 21 and all(d["rank_certificate"]["rank"] == 1 for d in diag)
    assert b"\r" not in (tmp_path / "points.csv").read_bytes()


def test_empty_baselines_give_header_only(tmp_path):
    report = sweep.run_sweep(CFG, 2)
    empty = SweepReport(report.config, report.points, (), report.certificates)
    sweep.emit_csv(empty, tmp_path)
    assert (tmp_path / "baselines.csv").read_text() == "name,snr_c_db,snr_s_db\n"


def test_frontier_points_drop_duplicates():
    pts = [TradeoffPoint.from_linear(a, 1.0, 2.0) for a in (1.0, 0.5)]
    pts.append(TradeoffPoint.from_linear(0.0, 0.5, 3.0))
    report = SweepReport(CFG, tuple(pts), (), {})
    assert [p.alpha for p in report.frontier_points()] == [1.0, 0.0]


def test_sweep_is_byte_identical(tmp_path):
    sweep.run_sweep(CFG, 11, out_dir=tmp_path / "a")
    sweep.run_sweep(CFG, 11, out_dir=tmp_path / "b", workers=2)
    for name in ("region", "points", "baselines"):
        assert (tmp_path / "a" / f"{name}.csv").read_bytes() == (tmp_path / "b" / f"{name}.csv").read_bytes()


@pytest.mark.parametrize("seed", [42, 7, 1234])
def test_frontier_shape_and_dominance(seed):
    report = sweep.run_sweep(CFG.replace(seed=seed), 41)
    assert report.certificates["all_rank_one"]
    assert sweep.monotonicity_violations(report.points) == []
    for b in report.baselines:
        assert sweep.dominated_by_frontier(b.snr_c, b.snr_s, report.points), b.name
        if b.name == "standalone":
            lit = (b.extra["snr_c_literal"], b.extra["snr_s_literal"])
            assert sweep.dominated_by_frontier(*lit, report.points)


def test_dominance_helper():
    pts = [TradeoffPoint.from_linear(1.0, 4.0, 0.0), TradeoffPoint.from_linear(0.0, 0.0, 4.0)]
    assert sweep.dominated_by_frontier(2.0, 2.0, pts)
    assert not sweep.dominated_by_frontier(2.5, 2.5, pts)
    assert sweep.monotonicity_violations(pts[::-1]) == [1]


def test_verify_default_passes():
    report = sweep.run_verify(CFG)
    assert report.passed
    names = {c.name for c in report.checks}
    assert names == {"duality_gap", "complementarity", "feasibility", "rank",
                     "oracle_agreement", "endpoint_comm", "endpoint_sense"}


def test_verify_rank_tolerance_below_floor_fails():
    report = sweep.run_verify(CFG, tau_rank=1e-15)
    assert not report.passed
    assert {c.name for c in report.failed} == {"rank"}


@pytest.mark.slow
def test_verify_seed_batch():
    report = sweep.run_verify(CFG, sweep.parse_seed_range("1..100"))
    assert report.seed_summary() == (100, 100)


def test_cli_solve(capsys):
    assert cli.main(["solve", "--alpha", "0.3"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["config"]["alpha"] == 0.3
    assert rec["diagnostics"]["rank_certificate"]["rank"] == 1
    assert rec["objective"] == pytest.approx(rec["diagnostics"]["primal_value"], rel=1e-10)


def test_cli_config_and_channels(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"n_antennas": 2, "seed": 3, "alpha": 1.0}))
    ch = tmp_path / "ch.csv"
    scenario.save_channels_csv(scenario.generate(ScenarioConfig(n_antennas=2, seed=3)), ch)
    assert cli.main(["solve", "--config", str(cfg)]) == 0
    a = json.loads(capsys.readouterr().out)
    assert cli.main(["solve", "--config", str(cfg), "--channels", str(ch)]) == 0
    b = json.loads(capsys.readouterr().out)
    assert a["objective"] == b["objective"]


def test_cli_baselines(capsys):
    assert cli.main(["baselines"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[0] == "name,snr_c_db,snr_s_db,objective"
    assert len(rows) == 6


def test_cli_sweep_and_errors(tmp_path, capsys):
    assert cli.main(["sweep", "--alphas", "5", "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "region.csv").read_text().splitlines()) == 6
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"n_antennas": 0}))
    assert cli.main(["solve", "--config", str(bad)]) == 2
    assert cli.main(["solve", "--config", str(tmp_path / "missing.json")]) == 2
    assert "error" in capsys.readouterr().err


def test_cli_verify_exit_codes(capsys):
    assert cli.main(["verify", "--seeds", "1..2"]) == 0
    assert "2/2 seeds pass" in capsys.readouterr().out
    assert cli.main(["verify", "--tau-rank", "1e-15"]) == 1
    out = capsys.readouterr().out
    assert "FAIL" in out and "failed certificate: rank" in out


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "cfjsac", "solve", "--alpha", "1"],
                         capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["diagnostics"]["null_dim"] >= 1
