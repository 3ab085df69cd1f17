import pytest
import yaml

from curvebeam.config import build_config, load_config
from curvebeam.errors import ConfigError, FieldCSVError

BASE = {
    "beam": {"trajectories": [{"label": "peak", "expr": "1.5*sqrt(x)", "domain": [0.0, 1.0]}]},
    "aperture": {"x_a": 0.1},
    "reflector": {"type": "plane", "slope": -1.0, "intercept": 0.15},
}


def raw(**changes):
    out = yaml.safe_load(yaml.safe_dump(BASE))
    out.update(changes)
    return out


def paths(exc):
    return [p for p, _ in exc.value.issues]


def test_minimal_config_builds():
    cfg = build_config(raw())
    assert cfg.scenario.aperture == 0.1
    assert cfg.scenario.j == 30  # default scales with the aperture
    assert cfg.svg is True and cfg.beam_spec is None


def test_default_tangent_count_scales():
    assert build_config(raw(aperture={"x_a": 0.2})).scenario.j == 60
    assert build_config(raw(aperture={"x_a": 0.001})).scenario.j == 2


def test_negative_aperture_names_field():
    with pytest.raises(ConfigError) as exc:
        build_config(raw(aperture={"x_a": -0.1}))
    assert paths(exc) == ["aperture.x_a"]
    assert "aperture.x_a" in str(exc.value)


def test_all_issues_reported_together():
    with pytest.raises(ConfigError) as exc:
        build_config(raw(aperture={"x_a": 0}, reflector={"type": "plane", "slope": "steep"}, bogus=1,
                         run={"j": 1, "spacing": "angle"}))
    got = set(paths(exc))
    assert {"aperture.x_a", "reflector.slope", "reflector.intercept", "bogus", "run.j", "run.spacing"} <= got


def test_numeric_strings_accepted():
    cfg = build_config(raw(aperture={"x_a": "0.1"}, run={"j": "40"}))
    assert cfg.scenario.aperture == 0.1 and cfg.scenario.j == 40


@pytest.mark.parametrize("bad", [float("nan"), "inf", True, [1], 2.5])
def test_bad_tangent_counts(bad):
    with pytest.raises(ConfigError):
        build_config(raw(run={"j": bad}))


def test_override_wins():
    assert build_config(raw(run={"j": 40}), overrides={"j": 12}).scenario.j == 12
    with pytest.raises(ConfigError) as exc:
        build_config(raw(), overrides={"j": 1})
    assert paths(exc) == ["--tangents"]


def test_beam_must_be_exactly_one_kind():
    both = {"airy": {"frequency": 150e9, "x0": 3.6e-3}, **BASE["beam"]}
    with pytest.raises(ConfigError):
        build_config(raw(beam=both))
    with pytest.raises(ConfigError):
        build_config(raw(beam={}))


def test_airy_beam_block():
    cfg = build_config(raw(beam={"airy": {"frequency": 150e9, "x0": 3.6e-3, "a": 0.1}}))
    assert cfg.beam_spec.a == 0.1
    with pytest.raises(ConfigError) as exc:
        build_config(raw(beam={"airy": {"frequency": 150e9, "x0": 3.6e-3, "a": 1.0}}))
    assert "beam.airy.a" in paths(exc)


def test_plate_block_checks_index():
    with pytest.raises(ConfigError) as exc:
        build_config(raw(plate={"frequency": 150e9, "n_r": 1.0}))
    assert paths(exc) == ["plate.n_r"]


def test_missing_file_is_oserror(tmp_path):
    with pytest.raises(OSError):
        load_config(tmp_path / "nope.yaml")


def test_invalid_yaml(tmp_path):
    p = tmp_path / "bad.yaml"
    p.write_text("beam: [unclosed\n")
    with pytest.raises(ConfigError):
        load_config(p)


def test_relative_tables_resolve_against_config(tmp_path):
    (tmp_path / "wall.csv").write_text("x_m,z_m\n-0.1,0.25\n0.3,-0.15\n")
    cfg_path = tmp_path / "s.yaml"
    cfg_path.write_text(yaml.safe_dump(raw(reflector={"type": "sampled", "path": "wall.csv"})))
    cfg = load_config(cfg_path)
    assert cfg.scenario.profile.z_at(0.0) == pytest.approx(0.15)


def test_broken_table_is_not_a_schema_issue(tmp_path):
    (tmp_path / "wall.csv").write_text("x_m,z_m\n0,1\n0,2\n")
    with pytest.raises(FieldCSVError):
        build_config(raw(reflector={"type": "sampled", "path": "wall.csv"}), str(tmp_path))
    with pytest.raises(OSError):
        build_config(raw(reflector={"type": "sampled", "path": "missing.csv"}), str(tmp_path))


def test_shipped_configs_load():
    for name in ("airy_main_lobe", "sqrt_plate", "cylinder", "measured_beam_alt"):
        load_config(f"configs/{name}.yaml")
