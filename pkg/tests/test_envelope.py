import math

import numpy as np
import pytest

from curvebeam.beams import BeamSpec, TrajectorySet, airy_lobe_trajectory, generic_trajectory, lobe_edges
from curvebeam.envelope import (CURVING, DIRECTIONAL, EMPTY, ERROR, Scenario, Thresholds, angle_between,
                                classify, envelope_sagitta, fan_width, forward_points, lobe_summary,
                                predict, predict_reflected, reconstruct)
from curvebeam.errors import ContractError, DegenerateFitError
from curvebeam.geometry import PolyCurve
from curvebeam.reflection import reflect_family
from curvebeam.reflectors import CircularArc, PlanarSegment
from curvebeam.tangents import decompose

PLANE = PlanarSegment(-1.0, 0.150)
SQRT = generic_trajectory("1.5*sqrt(x)", (0.0, 1.0))


def scenario(profile, j=30, beam=(SQRT,), **kw):
    return Scenario(TrajectorySet(beam), 0.1, profile, j, **kw)


def test_infinite_plane_is_curving():
    (p,) = predict(scenario(PLANE))
    assert p.kind == CURVING
    assert p.envelope.descending() == pytest.approx((-0.4262, 0.1374, 0.1406), abs=0.02)
    assert p.diagnostics["reflected"] == 30
    assert p.diagnostics["forward_points"] >= 3


def test_short_segment_is_directional():
    (p,) = predict(scenario(PLANE.with_extent((0.001, 0.015))))
    assert p.kind == DIRECTIONAL
    assert p.edge_rays is not None and len(p.edge_rays) == 2
    assert p.envelope is None


def test_literal_rules_without_sagitta():
    # with the sagitta rule off, the short segment passes the four base rules
    (p,) = predict(scenario(PLANE.with_extent((0.001, 0.015)), thresholds=Thresholds(min_sagitta=0.0)))
    assert p.kind == CURVING
    assert p.diagnostics["sagitta"] < 2e-3


def test_two_rays_directional_by_count():
    fam = decompose(SQRT, 0.1, 2)
    rf = reflect_family(fam, PLANE)
    cls = classify(rf)
    assert cls.kind == DIRECTIONAL and "forward" in cls.reason


def test_thresholds_validation_and_echo():
    with pytest.raises(ContractError):
        Thresholds(min_points=2)
    with pytest.raises(ContractError):
        Thresholds(min_r2=1.5)
    assert Thresholds().as_dict() == {"min_points": 3, "min_r2": 0.98, "min_quadratic": 0.05,
                                      "require_monotone": True, "min_sagitta": 2e-3}


def test_quadratic_threshold_forces_directional():
    (p,) = predict(scenario(PLANE, thresholds=Thresholds(min_quadratic=10.0)))
    assert p.kind == DIRECTIONAL and "|a2|" in p.diagnostics["reason"]


def test_forward_points_are_forward():
    from curvebeam.geometry import intersect_lines
    rf = reflect_family(decompose(SQRT, 0.1, 30), CircularArc((0.025, 0.150), 0.040))
    pts, _ = forward_points(rf)
    rays = list(rf)
    want = []
    for a, b in zip(rays, rays[1:]):
        t = intersect_lines(a.origin, a.dir, b.origin, b.dir)
        if t is not None and t[0] > 0 and t[1] > 0:
            want.append((a.origin.x + t[0] * a.dir.dx, a.origin.z + t[0] * a.dir.dz))
    assert np.allclose(pts, np.array(want).reshape(-1, 2))


def test_reconstruct_needs_points():
    rf = reflect_family(decompose(SQRT, 0.1, 3), PLANE.with_extent((0.0, 0.001)))
    with pytest.raises(DegenerateFitError):
        reconstruct(rf)


def test_empty_reflection():
    (p,) = predict(scenario(PLANE.with_extent((5.0, 6.0))))
    assert p.kind == EMPTY
    assert p.diagnostics["dropped"] == 30


def test_failure_stays_local():
    bad = generic_trajectory("1.5*sqrt(x)", (0.5, 1.0), label="bad")
    preds = predict(scenario(PLANE, beam=(SQRT, bad)))
    assert preds[0].kind == CURVING
    assert preds[1].kind == ERROR and preds[1].error


def test_set_equals_singletons():
    spec = BeamSpec(150e9, 3.6e-3, 0.1)
    lobe = airy_lobe_trajectory(spec, 1)
    left, right = lobe_edges(lobe, 3.6e-3)
    plane = PLANE.with_extent((-0.02, 0.065))
    together = predict(Scenario(TrajectorySet((left, lobe, right)), 0.2, plane, 60))
    for t, p in zip((left, lobe, right), together):
        (alone,) = predict(Scenario(TrajectorySet((t,)), 0.2, plane, 60))
        assert alone.kind == p.kind
        assert alone.diagnostics == p.diagnostics
        if p.envelope is not None:
            assert alone.envelope.coeffs == p.envelope.coeffs


def test_empty_set():
    assert predict(Scenario(TrajectorySet(()), 0.1, PLANE)) == []


@pytest.mark.parametrize("j", [30, 100, 300])
def test_curving_verdict_stable_in_j(j):
    (p,) = predict(scenario(PLANE, j=j))
    assert p.kind == CURVING


def test_directional_fan_geometry():
    (p,) = predict(scenario(CircularArc((0.025, 0.150), 0.040)))
    assert p.kind == DIRECTIONAL
    a, b = p.edge_rays
    assert p.spread_angle == pytest.approx(angle_between(a.dir, b.dir))
    ds = np.linspace(max(0.0, p.apex_distance or 0.0) + 1e-3, 0.5, 50)
    assert np.all(np.diff(p.width(ds)) > 0)
    assert math.hypot(*p.mean_direction) == pytest.approx(1.0)


def test_fan_width_of_parallel_rays_is_constant():
    rf = reflect_family(decompose(SQRT, 0.1, 30), PLANE)
    a = rf.rays[0]

    class R:
        def __init__(self, o, d):
            self.origin, self.dir = o, d
    pair = (R((0.0, 0.0), a.dir), R((0.01, 0.0), a.dir))
    w = fan_width(pair, a.dir.unit(), np.array([0.0, 1.0, 5.0]))
    assert np.ptp(w) < 1e-12


def test_lobe_summary_requires_directions():
    (p,) = predict(scenario(PLANE.with_extent((5.0, 6.0))))
    with pytest.raises(ContractError):
        lobe_summary(p, p)


def test_sagitta():
    line = PolyCurve((1.0, 2.0), (0.0, 1.0))
    assert envelope_sagitta(line) == pytest.approx(0.0, abs=1e-15)
    para = PolyCurve((0.0, 0.0, 1.0), (0.0, 1.0))
    assert envelope_sagitta(para) == pytest.approx(0.25)


def test_scenario_validation():
    with pytest.raises(ContractError):
        Scenario(TrajectorySet(()), 0.0, PLANE)
    with pytest.raises(ContractError):
        Scenario(TrajectorySet(()), 0.1, PLANE, j=1)
    with pytest.raises(ContractError):
        Scenario(TrajectorySet(()), 0.1, PLANE, degree=5)


def test_predict_reflected_degree_three():
    rf = reflect_family(decompose(SQRT, 0.1, 30), PLANE)
    p = predict_reflected(rf, "cubic", degree=3)
    assert p.kind == CURVING and p.envelope.degree == 3
