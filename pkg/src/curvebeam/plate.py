"""Phase-plate design: aperture phase from the tangent family, and the
phase-to-thickness conversion for a dielectric plate."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .beams import ConvexTrajectory, wavenumber
from .errors import ContractError
from .tangents import LAUNCH_TOL, _tangency_limit, start_contact


@dataclass(frozen=True, eq=False)
class PlateSpec:
    wavelength: float
    n_r: float
    x: np.ndarray
    phase: np.ndarray

    def __post_init__(self):
        if not self.wavelength > 0:
            raise ContractError(f"wavelength must be positive, got {self.wavelength!r}")
        if not self.n_r > 1:
            raise ContractError(f"refractive index must exceed 1, got {self.n_r!r}")
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        ph = np.atleast_1d(np.asarray(self.phase, dtype=float))
        if x.shape != ph.shape:
            raise ContractError("plate x and phase arrays differ in shape")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "phase", ph)


@dataclass(frozen=True, eq=False)
class PhaseProfile:
    x: np.ndarray       # aperture coordinate, ascending, in [-x_a, 0]
    theta: np.ndarray   # launch angle from +z toward +x, radians
    phase: np.ndarray   # radians, phase(0) = 0
    k: float


def phase_to_thickness(plate: PlateSpec, wrap: bool = False) -> np.ndarray:
    """h = phi * lambda / (2 pi (n_r - 1)); with ``wrap`` phi is first taken mod 2 pi."""
    ph = np.mod(plate.phase, 2 * math.pi) if wrap else plate.phase
    return ph * plate.wavelength / (2 * math.pi * (plate.n_r - 1.0))


def _invert_launch(traj, targets, c0, c1, iters=200):
    # launch_x is monotone in the contact coordinate between c0 and c1
    lo = np.full(targets.shape, c0, dtype=float)
    hi = np.full(targets.shape, c1, dtype=float)
    sign = 1.0 if float(traj.launch_x(c1)) > float(traj.launch_x(c0)) else -1.0
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        above = sign * (np.asarray(traj.launch_x(mid), dtype=float) - targets) > 0
        hi = np.where(above, mid, hi)
        lo = np.where(above, lo, mid)
        if np.max(np.abs(hi - lo)) <= 1e-14 * max(1.0, abs(c1 - c0)):
            break
    return 0.5 * (lo + hi)


def design_phase_profile(traj: ConvexTrajectory, x_a: float, f: float, n: int = 201) -> PhaseProfile:
    """Aperture phase that launches the tangent family of ``traj``.

    Each aperture point x gets the direction of the tangent that leaves it
    and touches the trajectory; the phase is -k * integral of sin(theta)
    from 0, by the trapezoid rule.
    """
    if not x_a > 0:
        raise ContractError(f"aperture must be positive, got {x_a!r}")
    if n < 2:
        raise ContractError("need at least 2 aperture samples")
    k = wavenumber(f)
    xs = np.linspace(-x_a, 0.0, n)
    c0 = start_contact(traj)
    c1, exhausted = _tangency_limit(traj, x_a, c0)
    l0 = float(traj.launch_x(c0))
    if exhausted or l0 < -LAUNCH_TOL:
        lim = float(traj.launch_x(c1))
        raise ContractError(f"aperture [{-x_a}, 0] outside the tangency range "
                            f"[{lim:.6g}, {l0:.6g}] of {traj.label!r}")
    contacts = _invert_launch(traj, xs, c0, c1)
    dx, dz = traj.direction(contacts)
    theta = np.arctan2(dx, dz)
    s = np.sin(theta)
    # integrate from x = 0 (last sample) toward -x_a
    seg = 0.5 * (s[1:] + s[:-1]) * np.diff(xs)
    cum = np.concatenate(([0.0], np.cumsum(seg)))
    phase = -k * (cum - cum[-1])
    return PhaseProfile(xs, theta, phase, k)
