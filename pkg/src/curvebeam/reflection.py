"""Specular reflection of tangent families off a reflector profile."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .beams import ConvexTrajectory
from .errors import ContractError
from .geometry import Direction2, Point2, PolyCurve, Ray, fit_polynomial, reflect_direction
from .reflectors import PlanarSegment, SurfaceHit, intersect_ray
from .tangents import TangentFamily, TangentRay

BASELINE_SAMPLES = 128


@dataclass(frozen=True)
class ReflectedRay:
    source_index: int
    hit: SurfaceHit
    dir: Direction2
    incident_dir: Direction2

    @property
    def origin(self) -> Point2:
        return self.hit.point

    @property
    def slope(self) -> float:
        """dz/dx of the reflected direction; signed ``inf`` when vertical."""
        return self.dir.slope

    @property
    def vertical(self) -> bool:
        return math.isinf(self.slope)

    @property
    def intercept(self) -> float:
        """z-intercept of the reflected line, NaN for vertical rays."""
        if self.vertical:
            return math.nan
        return self.origin.z - self.slope * self.origin.x


@dataclass(frozen=True)
class ReflectedFamily:
    rays: tuple
    dropped_indices: tuple
    profile: object
    source: TangentFamily

    @property
    def dropped(self) -> int:
        return len(self.dropped_indices)

    @property
    def empty(self) -> bool:
        return not self.rays

    def __len__(self):
        return len(self.rays)

    def __iter__(self):
        return iter(self.rays)


def reflect_tangent(t: TangentRay, profile) -> Optional[ReflectedRay]:
    """Reflect one tangent, launched from its aperture point; None when it misses."""
    hit = intersect_ray(profile, Ray(t.origin, t.dir))
    if hit is None:
        return None
    return ReflectedRay(t.index, hit, reflect_direction(t.dir, hit.normal), t.dir)


def reflect_family(family: TangentFamily, profile) -> ReflectedFamily:
    if len(family) == 0:
        raise ContractError("cannot reflect an empty tangent family")
    rays, dropped = [], []
    for t in family:
        r = reflect_tangent(t, profile)
        if r is None:
            dropped.append(t.index)
        else:
            rays.append(r)
    return ReflectedFamily(tuple(rays), tuple(dropped), profile, family)


def mirror_baseline(traj: ConvexTrajectory, plane, x_range=None, degree: int = 2) -> PolyCurve:
    """Pointwise mirror image of the trajectory across a plane, refit as z(x).

    ``x_range`` limits which trajectory samples are mirrored (defaults to the
    trajectory's domain).
    """
    if not isinstance(plane, PlanarSegment):
        raise ContractError("mirror baseline is only defined for planar reflectors")
    lo, hi = x_range if x_range is not None else traj.domain
    xs = np.linspace(lo, hi, BASELINE_SAMPLES)
    zs = np.asarray(traj.z(xs), dtype=float)
    pts = [plane.reflect_point((x, z)) for x, z in zip(xs, zs)]
    return fit_polynomial(pts, degree, frame="z_of_x")


def mirror_points(points, plane) -> np.ndarray:
    """Reflect an (n, 2) array of points across a planar reflector's line."""
    if not isinstance(plane, PlanarSegment):
        raise ContractError("mirroring is only defined for planar reflectors")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    return np.array([plane.reflect_point(p) for p in pts]).reshape(-1, 2)
