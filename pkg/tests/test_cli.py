import json

import pytest

from arealaw.cli import main, validate_config, ConfigError


def write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


HH = {"family": "HubbardHolstein", "N": 2, "cutoff": 4}
ROBUST = {
    "experiment": "robustness_scan",
    "model": {"family": "HubbardHolstein", "N": 3, "cutoff": 3},
    "grid": {"cutoff": [1, 2, 3], "t": [1.0, 4.0], "l": 0, "s": [1]},
    "seed": 3,
}


def test_empty_grid_is_a_config_error(tmp_path, capsys):
    cfg = dict(ROBUST, grid={"cutoff": []})
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 2
    assert "grid/cutoff" in capsys.readouterr().err


def test_unknown_field_rejected():
    with pytest.raises(ConfigError, match="<root>"):
        validate_config({"experiment": "tail_scan", "model": HH, "bogus": 1})


def test_missing_file_exit_code(tmp_path):
    assert main(["run", "--config", str(tmp_path / "nope.json")]) == 2


def test_size_cap_exit_code(tmp_path):
    cfg = {"experiment": "mean_abs_check", "model": {"family": "U1LGT", "N": 8, "cutoff": 8}}
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path)]) == 2


def test_csv_deterministic_across_runs_and_threads(tmp_path):
    path = write(tmp_path, ROBUST)
    outs = []
    for i, threads in enumerate((1, 1, 2)):
        out = tmp_path / f"o{i}"
        assert main(["run", "--config", path, "--out", str(out), "--threads", str(threads)]) == 0
        outs.append((out / "robustness_scan.csv").read_bytes())
    assert outs[0] == outs[1] == outs[2]
    header = outs[0].decode().splitlines()[0].split(",")
    assert header[:2] == ["cutoff_in", "t"] and header[-1] == "flag"


def test_summary_and_report(tmp_path, capsys):
    out = tmp_path / "o"
    cfg = {"experiment": "mean_abs_check", "model": HH}
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(out)]) == 0
    summary = json.loads((out / "mean_abs_check.summary.json").read_text())
    assert summary["passed"] and summary["invariants"]["mean_abs_within_bound"]
    assert main(["report", "--out", str(out)]) == 0
    assert "mean_abs_check" in (out / "report.md").read_text()


def test_report_without_results(tmp_path):
    assert main(["report", "--out", str(tmp_path)]) == 2


def test_audit_passes_for_hubbard_holstein(tmp_path):
    cfg = {"experiment": "tail_scan", "model": HH, "grid": {"cutoff": [2, 3, 4]}}
    assert main(["audit", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "assumption_audit.csv").exists()


def test_audit_flags_rogue_field(tmp_path):
    model = {"family": "U1LGT", "N": 3, "cutoff": 3, "couplings": {"rogue_field": 0.5}}
    cfg = {"experiment": "assumption_audit", "model": model, "grid": {"cutoff": [2, 3]}}
    assert main(["audit", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 1
    s = json.loads((tmp_path / "o" / "assumption_audit.summary.json").read_text())
    assert s["invariants"]["split_conditions"] is False


def test_hh_tail_scan_passes(tmp_path):
    cfg = {"experiment": "tail_scan", "model": HH, "grid": {"cutoff_ref": 10, "cutoff": [1, 2, 3, 4, 5, 6]}}
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 0


def test_agsp_scan_runs(tmp_path):
    cfg = {
        "experiment": "agsp_scan",
        "model": {"family": "HubbardHolstein", "N": 3, "cutoff": 2},
        "grid": {"cutoff": [1], "degree": [1, 2, 4], "l": 0, "s": [2]},
    }
    assert main(["run", "--config", write(tmp_path, cfg), "--out", str(tmp_path / "o")]) == 0


def test_shipped_configs_validate():
    from pathlib import Path

    from arealaw.cli import load_config

    configs = sorted((Path(__file__).parent.parent / "configs").glob("*.json"))
    assert configs
    for p in configs:
        load_config(p)
