import json
import math

import pytest

from atomnoise.cli import main as cli_main
from atomnoise.engine import (
    CSV_BASE_COLUMNS,
    ConfigError,
    run_scan,
    validate_config,
)
from atomnoise.presets import PRESETS, preset_configs


MINIMAL = {"Fg": 0, "Fe": 1, "delta": 0.0, "omega_r": 0.3, "C": 1.0}


def small_grid(count=5, lo=0.0, hi=2.0):
    return {"omega_min": lo, "omega_max": hi, "count": count, "spacing": "linear"}


def test_minimal_config_defaults():
    cfg = validate_config(dict(MINIMAL))
    assert cfg.atom.gamma == 0.01
    assert cfg.atom.b == 1.0
    assert cfg.analysis.basis_name == "xy"
    assert cfg.analysis.quadratures == (0.0, math.pi / 2.0)
    assert cfg.medium.C == 1.0
    assert not cfg.decompose
    assert cfg.grid.count >= 2


def test_validate_from_json_text():
    cfg = validate_config(json.dumps({**MINIMAL, "grid": small_grid()}))
    assert cfg.grid.count == 5


def test_selection_rule_error_named():
    with pytest.raises(ConfigError) as err:
        validate_config({**MINIMAL, "Fe": 2})
    assert any("dipole selection" in e for e in err.value.errors)


def test_negative_C_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config({**MINIMAL, "C": -1.0})
    assert any("medium.C" in e for e in err.value.errors)


def test_unknown_keys_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config({**MINIMAL, "спин": 1, "grid": {"omega_mim": 1.0}})
    messages = "\n".join(err.value.errors)
    assert "unknown key" in messages
    assert "omega_mim" in messages


def test_errors_are_collected_not_first_only():
    with pytest.raises(ConfigError) as err:
        validate_config({"Fg": 0, "Fe": 2, "C": -3.0, "grid": {"count": 1}, "bogus": 1})
    messages = err.value.errors
    assert len(messages) >= 3


def test_small_grid_count_rejected_without_output(tmp_path):
    out = tmp_path / "never.csv"
    with pytest.raises(ConfigError):
        validate_config(
            {**MINIMAL, "grid": {"count": 1}, "outputs": {"csv": str(out)}}
        )
    assert not out.exists()


def test_log_grid_requires_positive_min():
    with pytest.raises(ConfigError) as err:
        validate_config({**MINIMAL, "grid": {"omega_min": 0.0, "spacing": "log"}})
    assert any("log" in e for e in err.value.errors)


def test_duplicate_shorthand_rejected():
    with pytest.raises(ConfigError) as err:
        validate_config({**MINIMAL, "atom": {"Fg": 1, "Fe": 1}})
    assert any("duplicates" in e for e in err.value.errors)


def test_scan_runs_and_writes_csv(tmp_path):
    csv_path = tmp_path / "out.csv"
    cfg = validate_config({**MINIMAL, "grid": small_grid()})
    result = run_scan(cfg, csv_path=csv_path)
    assert result.ok
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == ",".join(CSV_BASE_COLUMNS)
    assert len(lines) == 6
    manifest = json.loads((tmp_path / "out.csv.manifest.json").read_text())
    assert manifest["status"] == "ok"
    assert len(manifest["rows"]) == 5
    assert all(r["status"] == "ok" for r in manifest["rows"])
    assert not list(tmp_path.glob("*.tmp"))


def test_worker_count_does_not_change_bytes(tmp_path):
    cfg_dict = {**MINIMAL, "omega_r": 10.0, "delta": 10.0, "C": 10.0, "grid": small_grid(9, 0.1, 15.0)}
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run_scan(validate_config(dict(cfg_dict)), workers=1, csv_path=a)
    run_scan(validate_config(dict(cfg_dict)), workers=4, csv_path=b)
    assert a.read_bytes() == b.read_bytes()


def test_rerun_is_bit_identical(tmp_path):
    cfg_dict = {**MINIMAL, "grid": small_grid(7)}
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    run_scan(validate_config(dict(cfg_dict)), csv_path=a)
    run_scan(validate_config(dict(cfg_dict)), csv_path=b)
    assert a.read_bytes() == b.read_bytes()


def test_decompose_columns(tmp_path):
    csv_path = tmp_path / "out.csv"
    cfg = validate_config({**MINIMAL, "decompose": True, "grid": small_grid()})
    run_scan(cfg, csv_path=csv_path)
    header = csv_path.read_text().split("\n", 1)[0].split(",")
    assert "s1_phase_semiclassical" in header
    assert "s2_amp_quantum" in header
    assert header[: len(CSV_BASE_COLUMNS)] == CSV_BASE_COLUMNS


def test_extra_quadratures_append_columns(tmp_path):
    csv_path = tmp_path / "out.csv"
    cfg = validate_config(
        {**MINIMAL, "analysis": {"quadratures": [0.0, math.pi / 2, 0.4]}, "grid": small_grid()}
    )
    run_scan(cfg, csv_path=csv_path)
    header = csv_path.read_text().split("\n", 1)[0].split(",")
    assert header[-2:] == ["s1_theta0", "s2_theta0"]


def test_failed_rows_become_nan(tmp_path):
    # Convergence cap too low: the whole sweep fails but still writes rows.
    csv_path = tmp_path / "out.csv"
    cfg = validate_config(
        {
            **MINIMAL,
            "omega_r": 10.0,
            "C": 50.0,
            "doppler": {"width_fwhm": 90.0, "nodes": 8, "max_nodes": 16, "rel_tol": 1e-12},
            "grid": small_grid(3, 0.5, 8.0),
        }
    )
    result = run_scan(cfg, csv_path=csv_path)
    assert not result.ok
    lines = csv_path.read_text().strip().split("\n")
    assert len(lines) == 4
    for line in lines[1:]:
        fields = line.split(",")
        assert fields[1] == "nan"
    manifest = json.loads((tmp_path / "out.csv.manifest.json").read_text())
    assert manifest["status"] == "partial"
    assert all("nodes" in (r["detail"] or "") for r in manifest["rows"])


def test_all_presets_validate():
    for name in PRESETS:
        for label, cfg_dict in preset_configs(name):
            cfg = validate_config(cfg_dict)
            assert cfg.grid.count >= 2, (name, label)


def test_cli_list_presets(capsys):
    assert cli_main(["--list-presets"]) == 0
    out = capsys.readouterr().out
    assert "fig3" in out and "fig8" in out


def test_cli_requires_source(capsys):
    assert cli_main([]) == 1


def test_cli_bad_config_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"Fg": 0, "Fe": 2, "C": 1.0}))
    assert cli_main(["--config", str(bad)]) == 1
    assert "dipole selection" in capsys.readouterr().err


def test_cli_missing_file(capsys):
    assert cli_main(["--config", "/nonexistent/x.json"]) == 1


def test_cli_runs_config(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({**MINIMAL, "grid": small_grid(4)}))
    out = tmp_path / "spectra.csv"
    assert cli_main(["--config", str(cfg), "--out", str(out)]) == 0
    assert out.exists()


def test_cli_partial_failure_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                **MINIMAL,
                "omega_r": 10.0,
                "C": 50.0,
                "doppler": {"width_fwhm": 90.0, "nodes": 8, "max_nodes": 16, "rel_tol": 1e-12},
                "grid": small_grid(3, 0.5, 8.0),
            }
        )
    )
    out = tmp_path / "spectra.csv"
    assert cli_main(["--config", str(cfg), "--out", str(out)]) == 2


def test_workers_env_var(tmp_path, monkeypatch):
    monkeypatch.setenv("ATOMNOISE_WORKERS", "2")
    cfg = validate_config({**MINIMAL, "grid": small_grid(4)})
    result = run_scan(cfg)
    assert result.manifest["workers"] == 2
