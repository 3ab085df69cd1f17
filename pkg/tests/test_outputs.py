import json
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from curvebeam.airy import FieldGrid, axis
from curvebeam.presets import PRESETS, names, preset_config, preset_raw
from curvebeam.report import SCHEMA_VERSION, atomic_write_text, dumps
from curvebeam.runner import run_scenario
from curvebeam.svg import Scene, heatmap_svg, scene_svg

SVG_NS = "{http://www.w3.org/2000/svg}"


def classes(svg_text):
    root = ET.fromstring(svg_text)
    return [el.get("class") for el in root.iter() if el.get("class")]


def fig4a_scene(show=True):
    cfg = preset_config("fig4a")
    res = run_scenario(cfg, write=False)
    p = res.predictions[0]
    return Scene(list(cfg.scenario.beam), [p.reflected.source], res.predictions, cfg.scenario.profile,
                 cfg.scenario.aperture, show_tangents=show)


@pytest.mark.parametrize("name", names())
def test_every_preset_builds_and_runs(name):
    cfg = preset_config(name)
    res = run_scenario(cfg, write=False)
    assert not res.numeric_failure
    assert res.report["scenario"] == name


def test_unknown_preset():
    from curvebeam.errors import ConfigError
    with pytest.raises(ConfigError):
        preset_raw("fig99")


def test_preset_raw_is_a_copy():
    raw = preset_raw("fig4a")
    raw["aperture"]["x_a"] = 5
    assert PRESETS["fig4a"]["aperture"]["x_a"] == 0.1


def test_report_bytes_identical_across_runs(tmp_path):
    a = run_scenario(preset_config("fig6a"), str(tmp_path / "a"))
    b = run_scenario(preset_config("fig6a"), str(tmp_path / "b"))
    for fa, fb in zip(a.files, b.files):
        assert open(fa, "rb").read() == open(fb, "rb").read()


def test_report_contents(tmp_path):
    res = run_scenario(preset_config("fig4a"), str(tmp_path))
    rep = json.loads((tmp_path / "report.json").read_text())
    assert rep["schema_version"] == SCHEMA_VERSION
    assert rep["thresholds"] == {"min_points": 3, "min_quadratic": 0.05, "min_r2": 0.98,
                                 "min_sagitta": 0.002, "require_monotone": True}
    assert rep["config"]["resolved"]["j"] == 30
    assert rep == json.loads(dumps(res.report))


def test_dumps_is_canonical():
    text = dumps({"b": np.float64(1.5), "a": [np.int64(2), (3, 4)], "c": float("nan")})
    assert json.loads(text) == {"a": [2, [3, 4]], "b": 1.5, "c": None}
    assert text == dumps(json.loads(text))
    assert text.index('"a"') < text.index('"b"')
    assert text.endswith("\n")


def test_atomic_write_creates_dirs(tmp_path):
    p = tmp_path / "x" / "y" / "f.txt"
    atomic_write_text(p, "hello")
    assert p.read_text() == "hello"
    assert [f.name for f in p.parent.iterdir()] == ["f.txt"]


def test_scene_svg_layers_and_tangents():
    svg = scene_svg(fig4a_scene())
    c = classes(svg)
    assert c.count("tangent") == 30
    assert c.count("envelope") == 1
    assert {"reflector", "incident", "aperture", "legend"} <= set(c)
    bare = classes(scene_svg(fig4a_scene(show=False)))
    assert "tangent" not in bare and "envelope" in bare


def test_scene_svg_deterministic():
    assert scene_svg(fig4a_scene()) == scene_svg(fig4a_scene())


def test_directional_scene_draws_edge_rays():
    cfg = preset_config("fig6c")
    res = run_scenario(cfg, write=False)
    scene = Scene(list(cfg.scenario.beam), [p.reflected.source for p in res.predictions], res.predictions,
                  cfg.scenario.profile, cfg.scenario.aperture)
    c = classes(scene_svg(scene))
    assert c.count("edge-ray") == 2 and "envelope" not in c


def test_heatmap_deterministic_and_valid():
    x = axis(0.0, 0.01, 0.002)
    z = axis(0.0, 0.02, 0.005)
    g = FieldGrid(x, z, np.outer(np.arange(len(z)), np.ones(len(x))))
    a = heatmap_svg(g, title="t")
    assert a == heatmap_svg(g, title="t")
    root = ET.fromstring(a)
    cells = [el for el in root.iter(f"{SVG_NS}rect")]
    assert len(cells) >= g.size
