import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvebeam.errors import ContractError, DegenerateFitError
from curvebeam.geometry import (Direction2, Point2, PolyCurve, Ray, fit_polynomial, intersect_lines,
                                is_unit, poly_residual_rms, reflect_direction)

angle = st.floats(0, 2 * math.pi, allow_nan=False)


def unit(theta):
    return Direction2(math.cos(theta), math.sin(theta))


@pytest.mark.parametrize("t, n, want", [
    ((0, 1), (0, -1), (0, -1)),
    ((0, 1), (-1 / math.sqrt(2), -1 / math.sqrt(2)), (-1, 0)),
    ((1, 0), (0, 1), (1, 0)),
])
def test_reflect_examples(t, n, want):
    r = reflect_direction(Direction2(*t), Direction2(*n))
    assert r == pytest.approx(want, abs=1e-15)


def test_reflect_rejects_non_unit_normal():
    with pytest.raises(ContractError):
        reflect_direction(Direction2(0, 1), Direction2(0, 2))


@settings(max_examples=200)
@given(st.floats(0.01, 10), angle, angle)
def test_reflect_laws(scale, a, b):
    t = Direction2(scale * math.cos(a), scale * math.sin(a))
    n = unit(b)
    r = reflect_direction(t, n)
    assert math.hypot(*r) == pytest.approx(math.hypot(*t), rel=1e-12)
    assert t.dot(n) == pytest.approx(-r.dot(n), abs=1e-12 * scale)
    back = reflect_direction(r, n)
    assert back == pytest.approx(tuple(t), abs=1e-12 * scale)
    flipped = reflect_direction(t, Direction2(-n.dx, -n.dz))
    assert flipped == pytest.approx(tuple(r), abs=1e-12 * scale)


def test_direction_helpers():
    d = Direction2(3.0, 4.0)
    assert d.norm == 5.0
    assert is_unit(d.unit())
    assert not is_unit(d)
    assert d.slope == pytest.approx(4 / 3)
    assert math.isinf(Direction2(0.0, 1.0).slope)


def test_ray_rejects_zero_direction():
    with pytest.raises(ContractError):
        Ray(Point2(0, 0), Direction2(0, 0))
    r = Ray(Point2(1, 2), Direction2(0, 1))
    assert r.at(3.0) == (1.0, 5.0)


def test_intersect_lines_tangents_of_parabola():
    # tangents to z = x^2 at p meet at ((p1+p2)/2, p1*p2)
    p1, p2 = 0.1, 0.2
    o1, d1 = (p1, p1 ** 2), (1.0, 2 * p1)
    o2, d2 = (p2, p2 ** 2), (1.0, 2 * p2)
    t1, t2 = intersect_lines(o1, d1, o2, d2)
    assert o1[0] + t1 * d1[0] == pytest.approx(0.15)
    assert o1[1] + t1 * d1[1] == pytest.approx(0.02)
    assert o2[0] + t2 * d2[0] == pytest.approx(0.15)


def test_intersect_parallel_is_none():
    assert intersect_lines((0, 0), (1, 1), (0, 1), (2, 2)) is None


def test_fit_interpolates_three_points():
    c = fit_polynomial([(0, 0), (1, 1), (2, 4)], 2)
    assert c.coeffs == pytest.approx((0, 0, 1), abs=1e-12)
    assert c.domain == (0.0, 2.0)


def test_fit_line():
    c = fit_polynomial([(0, 0), (1, 1), (2, 2)], 1)
    assert c.coeffs == pytest.approx((0, 1), abs=1e-12)


def test_fit_noisy_sqrt_against_lstsq_oracle():
    rng = np.random.default_rng(3)
    x = np.linspace(0.01, 0.1, 50)
    z = 1.5 * np.sqrt(x) + rng.uniform(-1e-4, 1e-4, x.size)
    fit = fit_polynomial(np.column_stack([x, z]), 2)
    oracle = np.linalg.lstsq(np.vander(x, 3, increasing=True), z, rcond=None)[0]
    assert fit.coeffs == pytest.approx(oracle, rel=1e-8, abs=1e-10)
    # a quadratic cannot follow sqrt to 2e-4 (model misfit ~3 mm); the noise
    # contribution relative to the noiseless fit does stay below 2e-4
    clean = np.linalg.lstsq(np.vander(x, 3, increasing=True), 1.5 * np.sqrt(x), rcond=None)[0]
    assert np.sqrt(np.mean((fit(x) - np.polyval(clean[::-1], x)) ** 2)) <= 2e-4


def test_fit_degenerate_and_contract_errors():
    with pytest.raises(DegenerateFitError):
        fit_polynomial([(1, 0), (1, 1), (1, 2)], 1)
    with pytest.raises(ContractError):
        fit_polynomial([(0, 0), (1, 1)], 2)
    with pytest.raises(ContractError):
        fit_polynomial([(0, 0), (1, 1), (2, 2), (3, 3), (4, 4)], 4)


@settings(max_examples=60)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.floats(-3, 3))
def test_fit_extra_point_on_curve_is_noop(coeffs, x_new):
    xs = [-1.0, 0.5, 2.0]
    pts = [(x, float(np.polyval(coeffs[::-1], x))) for x in xs]
    base = fit_polynomial(pts, 2)
    more = fit_polynomial(pts + [(x_new, float(np.polyval(coeffs[::-1], x_new)))], 2)
    assert more.coeffs == pytest.approx(base.coeffs, abs=1e-10 * (1 + max(map(abs, coeffs))))


def test_polycurve_eval_and_derivative():
    p = PolyCurve((0, 0, 1), (0, 3))
    assert p(2.0) == 4.0
    assert p.derivative().coeffs == (0.0, 2.0)
    vals, outside = p.eval_flagged(np.array([1.0, 4.0]))
    assert outside.tolist() == [False, True]
    assert vals.tolist() == [1.0, 16.0]
    assert p.descending() == (1.0, 0.0, 0.0)


def test_polycurve_reference_example():
    # 0.1406 + 0.01374 - 0.004262
    p = PolyCurve((0.1406, 0.1374, -0.4262), (0.02, 0.14))
    assert p(0.1) == pytest.approx(0.150078, abs=1e-12)


def test_polycurve_validation_and_str():
    with pytest.raises(ContractError):
        PolyCurve((1.0,), (1.0, 0.0))
    with pytest.raises(ContractError):
        PolyCurve((), (0.0, 1.0))
    assert str(PolyCurve((1, -2, 3), (0, 1))) == "+3.0000*x^2 -2.0000*x +1.0000"
    assert "z^2" in str(PolyCurve((0, 0, 1), (0, 1), "x_of_z"))


def test_residual_rms_frames():
    pts = [(z * z, z) for z in np.linspace(0, 1, 5)]
    fit = fit_polynomial(pts, 2, frame="x_of_z")
    assert fit.coeffs == pytest.approx((0, 0, 1), abs=1e-12)
    assert poly_residual_rms(fit, pts) < 1e-12
