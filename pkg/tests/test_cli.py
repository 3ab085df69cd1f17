import json
import os
import subprocess
import sys

import pytest
import yaml

from curvebeam.cli import EXIT_CONFIG, EXIT_IO, EXIT_NUMERIC, EXIT_OK, main

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
CONFIGS = os.path.join(ROOT, "configs")

SCENARIO = {
    "name": "sqrt",
    "beam": {"trajectories": [{"label": "peak", "expr": "1.5*sqrt(x)", "domain": [0.0, 1.0]}]},
    "aperture": {"x_a": 0.1},
    "reflector": {"type": "plane", "slope": -1.0, "intercept": 0.15},
}


@pytest.fixture
def scenario(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text(yaml.safe_dump(SCENARIO))
    return p


def run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    return code, json.loads(capsys.readouterr().out)


def test_predict_writes_report_and_svg(tmp_path, scenario, capsys):
    code, rep = run_json(capsys, ["predict", str(scenario), "--out", str(tmp_path / "o")])
    assert code == EXIT_OK
    assert rep["predictions"][0]["kind"] == "curving"
    assert sorted(os.listdir(tmp_path / "o")) == ["report.json", "scene.svg"]


def test_no_svg_and_tangents(tmp_path, scenario, capsys):
    code, rep = run_json(capsys, ["predict", str(scenario), "--out", str(tmp_path / "o"),
                                  "--no-svg", "--tangents", "12"])
    assert code == EXIT_OK
    assert os.listdir(tmp_path / "o") == ["report.json"]
    assert rep["config"]["resolved"]["j"] == 12


def test_text_output(tmp_path, scenario, capsys):
    assert main(["predict", str(scenario), "--out", str(tmp_path)]) == EXIT_OK
    out = capsys.readouterr().out
    assert out.startswith("sqrt:") and "curving" in out


def test_config_error_exit(tmp_path, capsys):
    p = tmp_path / "bad.yaml"
    p.write_text(yaml.safe_dump({**SCENARIO, "aperture": {"x_a": -1}}))
    assert main(["predict", str(p), "--out", str(tmp_path)]) == EXIT_CONFIG
    assert "aperture.x_a" in capsys.readouterr().err


def test_bad_tangent_override_is_config_error(tmp_path, scenario):
    assert main(["predict", str(scenario), "--out", str(tmp_path), "--tangents", "1"]) == EXIT_CONFIG


def test_missing_config_is_io_error(tmp_path):
    assert main(["predict", str(tmp_path / "missing.yaml")]) == EXIT_IO


def test_unwritable_output_is_io_error(tmp_path, scenario):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["predict", str(scenario), "--out", str(blocker / "sub")]) == EXIT_IO


def test_flat_field_ridge_is_numeric_failure(tmp_path):
    g = tmp_path / "flat.csv"
    g.write_text("x_m,z_m,magnitude\n" + "".join(f"{x},{z},1\n" for z in (0, 0.1) for x in (0, 0.1)))
    assert main(["ridge", str(g)]) == EXIT_NUMERIC


def test_malformed_grid_is_io_error(tmp_path):
    g = tmp_path / "dup.csv"
    g.write_text("x_m,z_m,magnitude\n0,0,1\n0,0,1\n")
    assert main(["ridge", str(g)]) == EXIT_IO


def test_render_then_ridge(tmp_path, capsys):
    out = tmp_path / "r"
    assert main(["render-field", os.path.join(CONFIGS, "airy_main_lobe.yaml"), "--out", str(out)]) == EXIT_OK
    assert {"field.csv", "field.svg"} <= set(os.listdir(out))
    capsys.readouterr()
    code, fit = run_json(capsys, ["ridge", str(out / "field.csv"), "--out", str(out)])
    assert code == EXIT_OK and fit["frame"] == "x_of_z"
    assert (out / "ridge.json").exists()


def test_render_needs_airy_beam(tmp_path, scenario):
    assert main(["render-field", str(scenario), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_compare_expressions(capsys):
    code, m = run_json(capsys, ["compare", "-0.5192*x^2 + 0.1577*x + 0.1418", "-0.5406*x^2 + 0.1635*x + 0.1414",
                                "--domain", "-0.2", "0"])
    assert code == EXIT_OK
    assert m["rmse_m"] == pytest.approx(1.396e-3, abs=5e-6)
    assert m["max_abs_dev_m"] == pytest.approx(2.416e-3, abs=5e-6)


def test_compare_needs_domain_for_unbounded_curves():
    assert main(["compare", "x^2", "x"]) == EXIT_CONFIG
    assert main(["compare", "x^2", "x", "--domain", "1", "0"]) == EXIT_CONFIG


def test_compare_report_against_csv(tmp_path, scenario, capsys):
    main(["predict", str(scenario), "--out", str(tmp_path), "--no-svg"])
    csv = tmp_path / "ref.csv"
    xs = [-0.35 + 0.01 * i for i in range(36)]
    csv.write_text("x_m,z_m\n" + "".join(f"{x!r},{-0.4262 * x * x + 0.1374 * x + 0.1406!r}\n" for x in xs))
    capsys.readouterr()
    code, m = run_json(capsys, ["compare", str(csv), str(tmp_path / "report.json")])
    assert code == EXIT_OK and m["rmse_m"] < 1e-3


def test_plate_command(tmp_path, capsys):
    code, p = run_json(capsys, ["plate", os.path.join(CONFIGS, "sqrt_plate.yaml"), "--out", str(tmp_path)])
    assert code == EXIT_OK
    lines = (tmp_path / "plate.csv").read_text().splitlines()
    assert lines[0] == "x_m,theta_rad,phase_rad,h_m,h_wrapped_m" and len(lines) == 1 + p["samples"]
    assert 0 < p["max_wrapped_thickness_m"] <= p["wavelength_m"] / (p["n_r"] - 1) + 1e-12


def test_plate_needs_block(tmp_path, scenario):
    assert main(["plate", str(scenario), "--out", str(tmp_path)]) == EXIT_CONFIG


def test_presets_list_show(capsys):
    code, lst = run_json(capsys, ["presets", "list"])
    names = [p["name"] for p in lst["presets"]]
    assert code == EXIT_OK and {"fig4a", "fig6a", "exp-v"} <= set(names)
    assert main(["presets", "show", "fig4a"]) == EXIT_OK
    assert "reflector:" in capsys.readouterr().out
    assert main(["presets", "show", "nope"]) == EXIT_CONFIG
    assert main(["presets", "run"]) == EXIT_CONFIG


def test_presets_run_all_parallel_matches_serial(tmp_path, capsys):
    assert main(["presets", "run", "--all", "--no-svg", "--out", str(tmp_path / "a")]) == EXIT_OK
    assert main(["presets", "run", "--all", "--no-svg", "--jobs", "2", "--out", str(tmp_path / "b")]) == EXIT_OK
    for name in os.listdir(tmp_path / "a"):
        assert (tmp_path / "a" / name / "report.json").read_bytes() == \
            (tmp_path / "b" / name / "report.json").read_bytes()


def test_seed_is_accepted_and_harmless(tmp_path, scenario):
    assert main(["predict", str(scenario), "--out", str(tmp_path / "a"), "--seed", "1", "--no-svg"]) == EXIT_OK
    assert main(["predict", str(scenario), "--out", str(tmp_path / "b"), "--seed", "2", "--no-svg"]) == EXIT_OK
    assert (tmp_path / "a" / "report.json").read_bytes() == (tmp_path / "b" / "report.json").read_bytes()


def test_console_script_module_entry(tmp_path):
    r = subprocess.run([sys.executable, "-m", "curvebeam", "presets", "list"], capture_output=True, text=True)
    assert r.returncode == 0 and "fig4a" in r.stdout
    r = subprocess.run([sys.executable, "-m", "curvebeam", "predict"], capture_output=True, text=True)
    assert r.returncode == 2  # argparse usage errors share the config exit code
