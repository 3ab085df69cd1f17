import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curvebeam.errors import ContractError
from curvebeam.geometry import PolyCurve
from curvebeam.metrics import ComparisonDomain, compare, max_abs_dev, overlap_domain, rmse

coef = st.floats(-1, 1, allow_nan=False)
quad = st.tuples(coef, coef, coef).map(lambda c: PolyCurve(c, (-0.3, 0.3)))


def test_identical_and_offset():
    p = PolyCurve((0.1, 0.2, -0.5), (-0.2, 0.1))
    d = ComparisonDomain(-0.2, 0.1)
    assert rmse(p, p, d) == 0.0
    q = PolyCurve((0.102, 0.2, -0.5), (-0.2, 0.1))
    assert rmse(p, q, d) == pytest.approx(2e-3, abs=1e-15)
    assert max_abs_dev(p, q, d) == pytest.approx(2e-3, abs=1e-15)


def test_reference_simulation_pair():
    pred = PolyCurve((0.1414, 0.1635, -0.5406), (-0.2, 0.0))
    fem = PolyCurve((0.1418, 0.1577, -0.5192), (-0.2, 0.0))
    d = ComparisonDomain(-0.2, 0.0)
    # 1.4 mm RMSE and 2.4 mm maximum over x in [-0.2, 0]
    assert rmse(fem, pred, d) == pytest.approx(1.4e-3, abs=5e-5)
    assert max_abs_dev(fem, pred, d) == pytest.approx(2.4e-3, abs=5e-5)


def test_domain_validation():
    for lo, hi, n in [(0, 0, 10), (1, 0, 10), (0, 1, 1), (0, float("inf"), 5)]:
        with pytest.raises(ContractError):
            ComparisonDomain(lo, hi, n)
    a = PolyCurve((0,), (0, 1))
    b = PolyCurve((0,), (2, 3))
    with pytest.raises(ContractError):
        overlap_domain(a, b)
    d = overlap_domain(PolyCurve((0,), (0, 2)), PolyCurve((0,), (1, 3)))
    assert (d.lo, d.hi) == (1, 2)


@settings(max_examples=100)
@given(quad, quad)
def test_rmse_bounded_by_max_and_symmetric(a, b):
    d = ComparisonDomain(-0.3, 0.3)
    assert rmse(a, b, d) <= max_abs_dev(a, b, d) + 1e-15
    assert rmse(a, b, d) == rmse(b, a, d)


def test_doubling_samples_is_stable():
    pred = PolyCurve((0.1414, 0.1635, -0.5406), (-0.2, 0.0))
    fem = PolyCurve((0.1418, 0.1577, -0.5192), (-0.2, 0.0))
    r1 = rmse(fem, pred, ComparisonDomain(-0.2, 0.0, 256))
    r2 = rmse(fem, pred, ComparisonDomain(-0.2, 0.0, 512))
    assert abs(r1 - r2) <= 1e-6


def test_compare_dict():
    p = PolyCurve((0.0, 1.0), (0, 1))
    out = compare(p, p, ComparisonDomain(0, 1, 3))
    assert out == {"domain": {"x_min": 0, "x_max": 1, "n": 3}, "rmse_m": 0.0, "max_abs_dev_m": 0.0}
    assert np.isfinite(out["rmse_m"])
