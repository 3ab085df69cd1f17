"""Aperture-bounded tangent decomposition of a trajectory and its inverse.

A trajectory is replaced by ``j`` tangent rays launched from the transmitter
aperture x in [-x_a, 0] at z = 0.  The slope/intercept pairs of those rays
are a sampled Legendre transform of the curve; intersecting neighbouring
rays recovers the curve as their envelope.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beams import ConvexTrajectory
from .errors import ContractError, DomainExhaustedError, NonMonotoneSlopeError
from .geometry import Direction2, Point2, PolyCurve, fit_polynomial, intersect_lines

LAUNCH_TOL = 1e-9
BISECT_TOL = 1e-9


@dataclass(frozen=True)
class TangentRay:
    index: int
    slope: float
    intercept: float
    contact: Point2
    dir: Direction2
    launch_x: float

    @property
    def origin(self) -> Point2:
        """Launch point on the aperture plane z = 0."""
        return Point2(self.launch_x, 0.0)

    @property
    def vertical(self) -> bool:
        return math.isinf(self.slope)


@dataclass(frozen=True)
class TangentFamily:
    rays: tuple
    source_label: str
    aperture: float
    x_start: float
    x_max: float
    exhausted: bool = False
    spacing: str = "x"

    @property
    def j_count(self) -> int:
        return len(self.rays)

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)

    def __getitem__(self, i):
        return self.rays[i]


@dataclass(frozen=True)
class EnvelopeEstimate:
    """Fitted envelope plus the raw neighbour-intersection points."""

    curve: Optional[PolyCurve]
    points: np.ndarray
    parallel_pairs: int

    @property
    def no_envelope(self) -> bool:
        return self.curve is None


def _bisect(fn, a, b, tol, max_iter=200):
    fa = fn(a)
    for _ in range(max_iter):
        if abs(b - a) <= tol:
            break
        m = 0.5 * (a + b)
        fm = fn(m)
        if fm == 0:
            return m
        if (fm > 0) == (fa > 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def start_contact(traj: ConvexTrajectory) -> float:
    """First contact coordinate: the curve's crossing of the z-axis.

    Falls back to the contact whose tangent launches from the aperture edge
    x = 0 when the curve never reaches x = 0.
    """
    lo, hi = traj.domain
    if lo <= 0.0 <= hi and float(traj.z(0.0)) >= 0.0 and float(traj.launch_x(0.0)) <= LAUNCH_TOL:
        return 0.0
    launch_lo = float(traj.launch_x(lo))
    if launch_lo <= LAUNCH_TOL:
        return lo
    launch_hi = float(traj.launch_x(hi))
    if launch_hi > LAUNCH_TOL:
        raise ContractError(f"no tangent of {traj.label!r} launches from inside the aperture")
    return _bisect(lambda x: float(traj.launch_x(x)), lo, hi, BISECT_TOL)


def _tangency_limit(traj: ConvexTrajectory, x_a: float, x_start: Optional[float] = None):
    if not x_a > 0:
        raise ContractError(f"aperture must be positive, got {x_a!r}")
    if x_start is None:
        x_start = start_contact(traj)
    lo, hi = traj.domain
    l0 = float(traj.launch_x(x_start))
    if l0 < -x_a - LAUNCH_TOL:
        raise ContractError(f"first tangent of {traj.label!r} launches at {l0:.6g} m, outside aperture {x_a}")
    # walk away from x_start toward whichever end launches further out
    ends = [e for e in (lo, hi) if e != x_start]
    far = min(ends, key=lambda e: float(traj.launch_x(e)))
    g = lambda x: float(traj.launch_x(x)) + x_a
    if g(far) > 0:
        return far, True
    return _bisect(g, x_start, far, BISECT_TOL), False


def tangency_limit(traj: ConvexTrajectory, x_a: float, strict: bool = False) -> float:
    """Contact coordinate whose tangent launches from the aperture edge -x_a.

    When the domain ends before that tangent exists the domain endpoint is
    returned with a warning, or :class:`DomainExhaustedError` is raised if
    ``strict``.
    """
    x_max, exhausted = _tangency_limit(traj, x_a)
    if exhausted:
        msg = f"domain of {traj.label!r} exhausted before aperture edge; using x={x_max:.6g}"
        if strict:
            raise DomainExhaustedError(msg)
        warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return x_max


def _contacts(traj, x_start, x_max, j, spacing):
    if spacing == "x":
        return np.linspace(x_start, x_max, j)
    if spacing == "slope":
        th0, th1 = float(traj.angle(x_start)), float(traj.angle(x_max))
        out = []
        for th in np.linspace(th0, th1, j):
            if th == th0:
                out.append(x_start)
            elif th == th1:
                out.append(x_max)
            else:
                out.append(_bisect(lambda x: float(traj.angle(x)) - th, x_start, x_max, 1e-13))
        return np.asarray(out)
    raise ContractError(f"unknown spacing {spacing!r}")


def decompose(traj: ConvexTrajectory, x_a: float, j: int, spacing: str = "x") -> TangentFamily:
    """Sample ``j`` tangents between the z-axis crossing and the aperture limit."""
    if j < 2:
        raise ContractError(f"need at least 2 tangents, got j={j}")
    x_start = start_contact(traj)
    x_max, exhausted = _tangency_limit(traj, x_a, x_start)
    if exhausted:
        warnings.warn(f"domain of {traj.label!r} exhausted before aperture edge", RuntimeWarning, stacklevel=2)
    xs = _contacts(traj, x_start, x_max, j, spacing)
    h = abs(x_max - x_start) / (64 * j) if not traj.analytic else None
    zs = np.asarray(traj.z(xs), dtype=float)
    m = np.asarray(traj.slope_at(xs, h), dtype=float)
    dx, dz = traj.direction(xs, h)
    theta = np.arctan2(dz, dx)
    steps = np.diff(theta)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise NonMonotoneSlopeError(f"tangent slopes of {traj.label!r} are not strictly monotone")
    launch = np.asarray(traj.launch_x(xs, h), dtype=float)
    rays = []
    for i in range(j):
        if math.isinf(m[i]):
            psi = math.nan
        else:
            psi = float(zs[i] - m[i] * xs[i])
        rays.append(TangentRay(
            index=i, slope=float(m[i]), intercept=psi,
            contact=Point2(float(xs[i]), float(zs[i])),
            dir=Direction2(float(dx[i]), float(dz[i])),
            launch_x=float(launch[i]),
        ))
    return TangentFamily(tuple(rays), traj.label, float(x_a), float(x_start), float(x_max),
                         exhausted, spacing)


def legendre_value(traj: ConvexTrajectory, m: float) -> float:
    """Convex conjugate m*x(m) - F(x(m)), inverting the slope by bisection."""
    lo, hi = traj.domain
    s_lo, s_hi = float(traj.slope_at(lo)), float(traj.slope_at(hi))
    if not min(s_lo, s_hi) <= m <= max(s_lo, s_hi):
        raise ContractError(f"slope {m!r} outside [{min(s_lo, s_hi)!r}, {max(s_lo, s_hi)!r}]")
    sign = 1.0 if s_hi > s_lo else -1.0

    def g(x):
        s = float(traj.slope_at(x))
        return sign * (s - m)

    a, b = lo, hi
    for _ in range(400):
        if b - a <= 1e-12 * max(1.0, abs(a)):
            break
        mid = 0.5 * (a + b)
        if g(mid) < 0:
            a = mid
        else:
            b = mid
    x = 0.5 * (a + b)
    return m * x - float(traj.z(x))


def neighbour_intersections(origins, dirs, tol: float = 1e-12):
    """Intersections of consecutive lines; returns (points, t_prev, t_next, parallel)."""
    pts, t1s, t2s = [], [], []
    parallel = 0
    for k in range(len(origins) - 1):
        hit = intersect_lines(origins[k], dirs[k], origins[k + 1], dirs[k + 1], tol)
        if hit is None:
            parallel += 1
            continue
        t1, t2 = hit
        pts.append((origins[k][0] + t1 * dirs[k][0], origins[k][1] + t1 * dirs[k][1]))
        t1s.append(t1)
        t2s.append(t2)
    return np.asarray(pts, dtype=float).reshape(-1, 2), np.asarray(t1s), np.asarray(t2s), parallel


def envelope_of_family(family, fit_degree: int = 2, frame: str = "z_of_x") -> EnvelopeEstimate:
    """Envelope of a tangent family from neighbour intersections.

    Accepts a :class:`TangentFamily` or any sequence of objects with
    ``origin``/``dir`` (or ``contact``/``dir``) attributes.
    """
    rays = list(family)
    if len(rays) < 2:
        raise ContractError("need at least 2 rays to form an envelope")
    origins = [getattr(r, "contact", None) or r.origin for r in rays]
    dirs = [r.dir for r in rays]
    pts, _, _, parallel = neighbour_intersections(origins, dirs)
    curve = None
    if len(pts) >= fit_degree + 1:
        curve = fit_polynomial(pts, fit_degree, frame=frame)
    return EnvelopeEstimate(curve, pts, parallel)
