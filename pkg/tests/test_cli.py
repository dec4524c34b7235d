import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from tmspin.cli import ConfigError, load_config, main, normalize_config

ROOT = Path(__file__).resolve().parents[1]
CONFIG = ROOT / "configs" / "v_alpha_4h.json"


def write(tmp_path, cfg, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def base_cfg():
    return json.loads(CONFIG.read_text())


def run(tmp_path, cfg, command, *extra):
    path = write(tmp_path, cfg)
    out = tmp_path / "out"
    return main(["--config", str(path), "--out", str(out), *extra, command]), out


def read_csv(path):
    lines = path.read_text().split("\n")
    assert lines[-1] == "" and "\r" not in path.read_text()
    return lines[0].split(","), [l.split(",") for l in lines[1:-1]]


def test_shipped_config_loads():
    cfg = load_config(CONFIG)
    assert cfg["model"]["k"] == 0.3 and cfg["model"]["nuclear_spin"] == 2.5
    assert cfg["targets"]["g_par"] == 1.748


def test_unknown_and_missing_keys():
    cfg = base_cfg()
    cfg["model"]["lambda"] = 1
    with pytest.raises(ConfigError, match="unknown key"):
        normalize_config(cfg)
    cfg = base_cfg()
    cfg["extras"] = {}
    with pytest.raises(ConfigError, match="unknown section"):
        normalize_config(cfg)
    cfg = base_cfg()
    del cfg["model"]["g_n"]
    with pytest.raises(ConfigError, match="g_n"):
        normalize_config(cfg)
    cfg = base_cfg()
    cfg["model"]["k"] = 2.0
    with pytest.raises(ConfigError):
        normalize_config(cfg)


def test_dump_config_round_trip(tmp_path, capsys):
    assert main(["--config", str(CONFIG), "--dump-config"]) == 0
    dumped = capsys.readouterr().out
    again = normalize_config(json.loads(dumped))
    assert again == load_config(CONFIG)


def test_sweep_minimal(tmp_path, capsys):
    cfg = base_cfg()
    cfg["sweep"] = {"n_points": 2}
    code, out = run(tmp_path, cfg, "sweep")
    assert code == 0
    header, rows = read_csv(out / "sweep.csv")
    assert header == ["B_T"] + [f"level_{i:02d}" for i in range(12)]
    assert len(rows) == 2
    assert "12 levels" in capsys.readouterr().err


def test_bad_range_exits_nonzero(tmp_path, capsys):
    cfg = base_cfg()
    cfg["sweep"] = {"b_min_mT": 10, "b_max_mT": 0}
    code, _ = run(tmp_path, cfg, "sweep")
    assert code != 0
    assert "error" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    code = main(["--config", str(CONFIG), "--out", str(blocker / "sub"), "sweep"])
    assert code != 0


def test_transitions_header_and_drives(tmp_path):
    for drive in ("Bpar", "Bperp", "Ez"):
        cfg = base_cfg()
        cfg["transitions"] = {"drive": drive, "n_points": 2, "b_min_mT": 20, "b_max_mT": 100}
        code, out = run(tmp_path, cfg, "transitions")
        assert code == 0
        header, rows = read_csv(out / "transitions.csv")
        assert header == ["i", "f", "freq_Hz", "rabi_Hz", "drive", "B_T"]
        assert rows and all(r[4] == drive for r in rows)
    cfg["transitions"]["drive"] = "Bz"
    assert run(tmp_path, cfg, "transitions")[0] != 0


def test_matrixmap_files(tmp_path):
    code, out = run(tmp_path, base_cfg(), "matrixmap")
    assert code == 0
    for name in ("matrixmap_hf_off.csv", "matrixmap_hf_on.csv"):
        header, rows = read_csv(out / name)
        assert header == ["i", "j", "drive", "abs_Hz"] and len(rows) == 24 * 24
    _, rows = read_csv(out / "matrixmap_hf_off.csv")
    grid = np.zeros((24, 24))
    for i, j, _, v in rows:
        grid[int(i), int(j)] = float(v)
    # second doublet x nucleus block (states 12..23): no parallel-drive coupling without hyperfine
    assert np.triu(grid[12:, 12:], 1).max() <= 1e-10 * grid.max()


def test_fit_outputs(tmp_path, capsys):
    cfg = base_cfg()
    cfg["fit"] = {"k_values": [0.3], "eta_min": -0.44, "eta_max": -0.36, "eta_step": 0.04,
                  "lambda_min_meV": 14, "lambda_max_meV": 16, "lambda_step_meV": 1}
    code, out = run(tmp_path, cfg, "fit")
    assert code == 0
    header, rows = read_csv(out / "fit.csv")
    assert header[-1] == "match_all" and len(rows) == 9
    summary = json.loads((out / "fit_summary.json").read_text())
    assert summary[0]["n_consistent"] > 0
    # empty outcome still exits 0
    cfg["targets"]["g_par"] = 3.5
    code, _ = run(tmp_path, cfg, "fit")
    assert code == 0 and "no overlap" in capsys.readouterr().err
    del cfg["targets"]
    assert run(tmp_path, cfg, "fit")[0] != 0


def test_effective_outputs(tmp_path, capsys):
    cfg = base_cfg()
    cfg["effective"] = {"n_points": 3}
    code, out = run(tmp_path, cfg, "effective")
    assert code == 0
    ep = json.loads((out / "effective.json").read_text())
    assert set(ep) >= {"irrep", "a_par_Hz", "a_perp_Hz", "g_par", "g_perp", "residual_Hz"}
    assert ep["irrep"] == "Gamma4"
    assert abs(ep["a_par_Hz"] / ep["a_perp_Hz"] + 63 / 332) <= 0.2 * 63 / 332
    header, rows = read_csv(out / "effective_comparison.csv")
    assert len(header) == 25 and len(rows) == 3
    cfg["effective"] = {"n_points": 2, "doublet": 2}
    run(tmp_path, cfg, "effective")
    ep = json.loads((out / "effective.json").read_text())
    assert ep["irrep"] == "Gamma56" and ep["g_perp"] == 0
    cfg["model"]["a_hf_MHz"] = 0
    cfg["effective"] = {"n_points": 2}
    run(tmp_path, cfg, "effective")
    ep = json.loads((out / "effective.json").read_text())
    assert ep["a_par_Hz"] == 0 and ep["a_perp_Hz"] == 0
    assert "vanish" in capsys.readouterr().err


def test_effective_calibration(tmp_path, capsys):
    cfg = base_cfg()
    cfg["model"]["a_hf_MHz"] = 100
    cfg["effective"] = {"n_points": 2, "calibrate_a_perp_MHz": 332}
    code, out = run(tmp_path, cfg, "effective")
    assert code == 0
    assert abs(json.loads((out / "effective.json").read_text())["a_perp_Hz"] - 332e6) <= 0.332e6
    assert "calibrated A = 474694" in capsys.readouterr().err


def test_wavefunction(tmp_path, capsys):
    cfg = base_cfg()
    cfg["wavefunction"] = {"n_theta": 5, "n_phi": 8}
    code, out = run(tmp_path, cfg, "wavefunction")
    assert code == 0
    header, rows = read_csv(out / "wavefunction.csv")
    assert header == ["theta", "phi", "density", "phase"] and len(rows) == 40
    err = capsys.readouterr().err
    assert "Gamma4" in err and "winding" in err
    cfg["wavefunction"] = {"orbital_coeffs": [[0, 0], [0, 0], [1, 0], [0, 0], [0, 0]]}
    run(tmp_path, cfg, "wavefunction")
    assert "winding 0" in capsys.readouterr().err


def test_threads_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("TMSPIN_THREADS", "nope")
    assert main(["--config", str(CONFIG), "--out", str(tmp_path), "sweep"]) != 0


def test_module_entry_point(tmp_path):
    r = subprocess.run(
        [sys.executable, "-m", "tmspin", "--config", str(CONFIG), "--out", str(tmp_path), "wavefunction"],
        capture_output=True, text=True,
    )
    assert r.returncode == 0 and r.stdout == "" and "winding" in r.stderr
