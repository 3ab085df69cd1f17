import math

import numpy as np
import pytest

from curvebeam.beams import generic_trajectory
from curvebeam.errors import ContractError
from curvebeam.plate import PlateSpec, design_phase_profile, phase_to_thickness
from curvebeam.tangents import decompose

LAM = 2e-3


def test_zero_phase_zero_thickness():
    assert phase_to_thickness(PlateSpec(LAM, 1.6, [0.0], [0.0])).tolist() == [0.0]


def test_full_wave_thickness():
    h = phase_to_thickness(PlateSpec(LAM, 1.6, [0.0], [2 * math.pi]))
    assert h[0] == pytest.approx(LAM / 0.6, rel=1e-12)
    assert h[0] == pytest.approx(3.333e-3, abs=1e-6)


def test_thickness_scales_inversely_with_index_contrast():
    ph = np.linspace(0, 10, 7)
    a = phase_to_thickness(PlateSpec(LAM, 1.6, ph, ph))
    b = phase_to_thickness(PlateSpec(LAM, 1.3, ph, ph))
    assert np.allclose(b, 2 * a, rtol=1e-12)


def test_wrapped_thickness_stays_below_one_wave():
    ph = np.linspace(-20, 20, 101)
    hw = phase_to_thickness(PlateSpec(LAM, 1.6, ph, ph), wrap=True)
    assert hw.min() >= 0 and hw.max() < LAM / 0.6


@pytest.mark.parametrize("n_r", [1.0, 0.5, float("nan")])
def test_index_must_exceed_one(n_r):
    with pytest.raises(ContractError):
        PlateSpec(LAM, n_r, [0.0], [0.0])


def test_shape_mismatch():
    with pytest.raises(ContractError):
        PlateSpec(LAM, 1.6, [0.0, 1.0], [0.0])


def test_parabola_phase_closed_form():
    tr = generic_trajectory("z^2", (0.0, 2.0), "par", "x_of_z")
    prof = design_phase_profile(tr, 0.05, 150e9, 2001)
    # tangent at contact z_c meets z = 0 at l = -z_c^2, with dx/dz = 2 z_c
    zc = np.sqrt(-prof.x)
    # near l = 0 a 1e-14 launch error becomes ~1e-7 in sqrt(-l)
    assert np.allclose(np.tan(prof.theta), 2 * zc, atol=1e-6)
    s = 2 * zc / np.sqrt(1 + 4 * zc ** 2)
    want = -prof.k * (np.concatenate(([0.0], np.cumsum(0.5 * (s[1:] + s[:-1]) * np.diff(prof.x)))))
    assert np.allclose(prof.phase, want - want[-1], atol=1e-9)


def test_sqrt_phase_follows_launch_angles():
    tr = generic_trajectory("1.5*sqrt(x)", (0.0, 1.0), "peak")
    prof = design_phase_profile(tr, 0.1, 150e9, 2001)
    assert prof.phase[-1] == 0.0
    assert np.all(np.diff(prof.phase) < 0)
    # dphi/dx = -k sin(theta), checked by central differences
    # away from x = 0, where the launch angle turns fastest
    d = np.gradient(prof.phase, prof.x)[1:-1]
    inner = prof.x[1:-1] <= -0.01
    assert np.allclose(d[inner], -prof.k * np.sin(prof.theta[1:-1][inner]), rtol=1e-4)


def test_launch_angles_match_tangent_family():
    tr = generic_trajectory("1.5*sqrt(x)", (0.0, 1.0), "peak")
    fam = decompose(tr, 0.1, 30)
    prof = design_phase_profile(tr, 0.1, 150e9, 501)
    for t in fam.rays:
        want = math.atan2(t.dir.dx, t.dir.dz)
        assert np.interp(t.launch_x, prof.x, prof.theta) == pytest.approx(want, abs=1e-5)


def test_bad_arguments():
    tr = generic_trajectory("1.5*sqrt(x)", (0.0, 1.0), "peak")
    with pytest.raises(ContractError):
        design_phase_profile(tr, 0.0, 150e9)
    with pytest.raises(ContractError):
        design_phase_profile(tr, 0.1, 150e9, 1)
