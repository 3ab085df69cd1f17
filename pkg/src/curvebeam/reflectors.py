"""Reflector profiles and ray/profile intersection.

Three variants are supported: straight segments z = slope*x + intercept,
circular arcs, and sampled polylines.  Normals are always oriented against
the incident ray, so the reflecting side never needs to be configured.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from . import kernels
from .errors import ContractError, FieldCSVError
from .geometry import Direction2, Point2, Ray

T_MIN = 1e-9
EDGE_TOL = 1e-12
UNBOUNDED = (-math.inf, math.inf)


def _extent(ext) -> tuple:
    if ext is None:
        return UNBOUNDED
    lo, hi = (float(v) for v in ext)
    if not lo <= hi:
        raise ContractError(f"empty extent {ext!r}")
    return lo, hi


def _in_extent(x, ext) -> bool:
    return ext[0] - EDGE_TOL <= x <= ext[1] + EDGE_TOL


@dataclass(frozen=True)
class SurfaceHit:
    point: Point2
    normal: Direction2
    ray_parameter: float


@dataclass(frozen=True)
class PlanarSegment:
    slope: float
    intercept: float
    x_extent: tuple = UNBOUNDED

    def __post_init__(self):
        if not (math.isfinite(self.slope) and math.isfinite(self.intercept)):
            raise ContractError("planar reflector needs finite slope and intercept")
        object.__setattr__(self, "x_extent", _extent(self.x_extent))

    kind = "plane"

    @property
    def bounded(self) -> bool:
        return all(math.isfinite(v) for v in self.x_extent)

    def z_at(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept

    def with_extent(self, ext) -> "PlanarSegment":
        return PlanarSegment(self.slope, self.intercept, ext)

    def reflect_point(self, p) -> Point2:
        """Mirror image of ``p`` across the supporting line."""
        # line: slope*x - z + intercept = 0
        a, b, c = self.slope, -1.0, self.intercept
        d = (a * p[0] + b * p[1] + c) / (a * a + b * b)
        return Point2(p[0] - 2 * a * d, p[1] - 2 * b * d)


@dataclass(frozen=True)
class CircularArc:
    center: Point2
    radius: float
    x_extent: tuple = UNBOUNDED

    kind = "circle"

    def __post_init__(self):
        if not self.radius > 0:
            raise ContractError(f"radius must be positive, got {self.radius!r}")
        object.__setattr__(self, "center", Point2(float(self.center[0]), float(self.center[1])))
        object.__setattr__(self, "x_extent", _extent(self.x_extent))

    @property
    def bounded(self) -> bool:
        return True

    def with_extent(self, ext) -> "CircularArc":
        return CircularArc(self.center, self.radius, ext)


@dataclass(frozen=True)
class SampledProfile:
    xs: tuple
    zs: tuple
    _x: np.ndarray = field(init=False, repr=False, compare=False)
    _z: np.ndarray = field(init=False, repr=False, compare=False)

    kind = "sampled"

    def __post_init__(self):
        x = np.asarray(self.xs, dtype=float)
        z = np.asarray(self.zs, dtype=float)
        if x.ndim != 1 or x.shape != z.shape or len(x) < 2:
            raise ContractError("sampled profile needs matching 1-D x and z arrays of length >= 2")
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(z))):
            raise ContractError("sampled profile contains non-finite values")
        if not np.all(np.diff(x) > 0):
            raise ContractError("sampled profile x grid must be strictly increasing")
        object.__setattr__(self, "xs", tuple(x.tolist()))
        object.__setattr__(self, "zs", tuple(z.tolist()))
        object.__setattr__(self, "_x", x)
        object.__setattr__(self, "_z", z)

    @property
    def x_extent(self) -> tuple:
        return float(self._x[0]), float(self._x[-1])

    @property
    def bounded(self) -> bool:
        return True

    def _segment(self, x) -> int:
        return int(np.clip(np.searchsorted(self._x, x, side="right") - 1, 0, len(self._x) - 2))

    def z_at(self, x):
        return np.interp(x, self._x, self._z)

    def segment_slope(self, x) -> float:
        k = self._segment(x)
        return float((self._z[k + 1] - self._z[k]) / (self._x[k + 1] - self._x[k]))


ReflectorProfile = Union[PlanarSegment, CircularArc, SampledProfile]


def _oriented(nx, nz, incident) -> Direction2:
    n = math.hypot(nx, nz)
    nx, nz = nx / n, nz / n
    if nx * incident[0] + nz * incident[1] > 0:
        nx, nz = -nx, -nz
    return Direction2(nx, nz)


def _check_ray(ray: Ray):
    if not ray.dir.dz > 0:
        raise ContractError(f"ray direction must point forward (dz > 0), got {tuple(ray.dir)}")


def _hit_plane(p: PlanarSegment, ray: Ray) -> Optional[SurfaceHit]:
    (ox, oz), (dx, dz) = ray.origin, ray.dir
    den = dz - p.slope * dx
    if den == 0.0:
        return None
    t = (p.slope * ox + p.intercept - oz) / den
    if not t > T_MIN:
        return None
    x = ox + t * dx
    if not _in_extent(x, p.x_extent):
        return None
    pt = Point2(x, p.slope * x + p.intercept)
    return SurfaceHit(pt, _oriented(-p.slope, 1.0, ray.dir), t)


def _hit_circle(c: CircularArc, ray: Ray) -> Optional[SurfaceHit]:
    (ox, oz), (dx, dz) = ray.origin, ray.dir
    wx, wz = ox - c.center.x, oz - c.center.z
    A = dx * dx + dz * dz
    B = 2.0 * (wx * dx + wz * dz)
    C = wx * wx + wz * wz - c.radius * c.radius
    disc = B * B - 4 * A * C
    if disc < 0:
        return None
    sq = math.sqrt(disc)
    # stable roots
    q = -0.5 * (B + math.copysign(sq, B))
    roots = sorted((q / A, C / q)) if q != 0.0 else [0.0]
    for t in roots:
        if not t > T_MIN:
            continue
        x, z = ox + t * dx, oz + t * dz
        if not _in_extent(x, c.x_extent):
            continue
        return SurfaceHit(Point2(x, z), _oriented(x - c.center.x, z - c.center.z, ray.dir), t)
    return None


def _hit_sampled(s: SampledProfile, ray: Ray) -> Optional[SurfaceHit]:
    (ox, oz), (dx, dz) = ray.origin, ray.dir
    t = float(kernels.sampled_hits([ox], [oz], [dx], [dz], s._x, s._z, T_MIN)[0])
    if math.isnan(t):
        return None
    # polish against the exact segment the bisection landed in
    x0 = ox + t * dx
    k = s._segment(x0)
    for kk in (k, k - 1, k + 1):
        if not 0 <= kk <= len(s._x) - 2:
            continue
        seg = PlanarSegment(
            (s._z[kk + 1] - s._z[kk]) / (s._x[kk + 1] - s._x[kk]),
            s._z[kk] - (s._z[kk + 1] - s._z[kk]) / (s._x[kk + 1] - s._x[kk]) * s._x[kk],
            (s._x[kk], s._x[kk + 1]),
        )
        h = _hit_plane(seg, ray)
        if h is not None and abs(h.ray_parameter - t) <= 1e-6 * max(1.0, t):
            return h
    x = ox + t * dx
    m = s.segment_slope(x)
    return SurfaceHit(Point2(x, float(s.z_at(x))), _oriented(-m, 1.0, ray.dir), t)


def intersect_ray(profile: ReflectorProfile, ray: Ray) -> Optional[SurfaceHit]:
    """Nearest hit with ray parameter > 1e-9 inside the extent, or None."""
    _check_ray(ray)
    if isinstance(profile, PlanarSegment):
        return _hit_plane(profile, ray)
    if isinstance(profile, CircularArc):
        return _hit_circle(profile, ray)
    if isinstance(profile, SampledProfile):
        return _hit_sampled(profile, ray)
    raise ContractError(f"unsupported profile {type(profile).__name__}")


def surface_normal(profile: ReflectorProfile, x: float, incident, z: Optional[float] = None) -> Direction2:
    """Unit normal at abscissa ``x`` oriented so that n . incident < 0.

    For arcs ``z`` selects the branch; without it the branch facing the
    source (lower half) is used.
    """
    if not _in_extent(x, profile.x_extent):
        raise ContractError(f"x={x!r} outside reflector extent {profile.x_extent!r}")
    if isinstance(profile, PlanarSegment):
        return _oriented(-profile.slope, 1.0, incident)
    if isinstance(profile, SampledProfile):
        return _oriented(-profile.segment_slope(x), 1.0, incident)
    if isinstance(profile, CircularArc):
        dx = x - profile.center.x
        if abs(dx) > profile.radius + EDGE_TOL:
            raise ContractError(f"x={x!r} outside the circle")
        if z is None:
            z = profile.center.z - math.sqrt(max(profile.radius ** 2 - dx * dx, 0.0))
        return _oriented(dx, z - profile.center.z, incident)
    raise ContractError(f"unsupported profile {type(profile).__name__}")


def load_profile_csv(path) -> SampledProfile:
    """Two-column CSV with header ``x_m,z_m``; rows may come in any order."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip() for h in rows[0]] != ["x_m", "z_m"]:
        raise FieldCSVError(f"{path}: expected header 'x_m,z_m'")
    pts = []
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 2:
            raise FieldCSVError(f"{path}: row {i} has {len(row)} fields, expected 2")
        try:
            pts.append((float(row[0]), float(row[1])))
        except ValueError:
            raise FieldCSVError(f"{path}: row {i} is not numeric") from None
    pts.sort()
    xs = [p[0] for p in pts]
    if len(set(xs)) != len(xs):
        raise FieldCSVError(f"{path}: duplicate x values")
    return SampledProfile(tuple(xs), tuple(p[1] for p in pts))
