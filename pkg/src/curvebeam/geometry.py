"""Plane-geometry primitives: points, directions, rays, polynomial curves.

Coordinates follow the beam convention used throughout the package: ``x`` is
the transverse axis and ``z`` the propagation axis, both in meters.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ContractError, DegenerateFitError

UNIT_TOL = 1e-12
MAX_DEGREE = 3


class Point2(NamedTuple):
    x: float
    z: float


class Direction2(NamedTuple):
    dx: float
    dz: float

    @property
    def norm(self) -> float:
        return math.hypot(self.dx, self.dz)

    def unit(self) -> "Direction2":
        n = self.norm
        if n == 0.0:
            raise ContractError("zero direction cannot be normalized")
        return Direction2(self.dx / n, self.dz / n)

    def dot(self, other) -> float:
        return self.dx * other[0] + self.dz * other[1]

    @property
    def slope(self) -> float:
        """dz/dx, ``inf`` (signed) for vertical directions."""
        if self.dx == 0.0:
            return math.copysign(math.inf, self.dz)
        return self.dz / self.dx


@dataclass(frozen=True)
class Ray:
    origin: Point2
    dir: Direction2

    def __post_init__(self):
        if self.dir.dx == 0.0 and self.dir.dz == 0.0:
            raise ContractError("ray direction must be nonzero")

    def at(self, t: float) -> Point2:
        return Point2(self.origin.x + t * self.dir.dx, self.origin.z + t * self.dir.dz)


def is_unit(d, tol: float = UNIT_TOL) -> bool:
    return abs(d[0] * d[0] + d[1] * d[1] - 1.0) <= tol


def reflect_direction(t, n) -> Direction2:
    """Mirror ``t`` about the line whose unit normal is ``n``: t - 2(t.n)n."""
    if not is_unit(n):
        raise ContractError(f"normal must be unit length, got |n|^2={n[0]**2 + n[1]**2!r}")
    k = 2.0 * (t[0] * n[0] + t[1] * n[1])
    return Direction2(t[0] - k * n[0], t[1] - k * n[1])


def intersect_lines(p1, d1, p2, d2, tol: float = 1e-12):
    """Parameters ``(t1, t2)`` with p1 + t1 d1 == p2 + t2 d2, or None if parallel.

    ``tol`` applies to the cross product of the normalized directions.
    """
    n1 = math.hypot(d1[0], d1[1])
    n2 = math.hypot(d2[0], d2[1])
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(cross) <= tol * n1 * n2:
        return None
    wx = p2[0] - p1[0]
    wz = p2[1] - p1[1]
    t1 = (wx * d2[1] - wz * d2[0]) / cross
    t2 = (wx * d1[1] - wz * d1[0]) / cross
    return t1, t2


@dataclass(frozen=True)
class PolyCurve:
    """Polynomial curve with ascending coefficients on a closed domain.

    With ``frame == "z_of_x"`` the curve is z = sum c_k x**k and ``domain`` is an
    x-interval.  ``frame == "x_of_z"`` swaps the roles (used for incident beams
    described in the beam frame).
    """

    coeffs: tuple
    domain: tuple
    frame: str = "z_of_x"

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(float(c) for c in self.coeffs))
        lo, hi = (float(v) for v in self.domain)
        if not lo <= hi:
            raise ContractError(f"empty polynomial domain {self.domain!r}")
        object.__setattr__(self, "domain", (lo, hi))
        if len(self.coeffs) == 0:
            raise ContractError("polynomial needs at least one coefficient")
        if self.frame not in ("z_of_x", "x_of_z"):
            raise ContractError(f"unknown frame {self.frame!r}")

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, u):
        # Horner
        u = np.asarray(u, dtype=float)
        acc = np.zeros_like(u) + self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            acc = acc * u + c
        return acc if acc.ndim else float(acc)

    def eval_flagged(self, u):
        """Evaluate and report which arguments fall outside ``domain``."""
        u = np.asarray(u, dtype=float)
        outside = (u < self.domain[0]) | (u > self.domain[1])
        return self(u), outside

    def derivative(self) -> "PolyCurve":
        if self.degree == 0:
            return PolyCurve((0.0,), self.domain, self.frame)
        return PolyCurve(tuple(k * c for k, c in enumerate(self.coeffs) if k), self.domain, self.frame)

    def descending(self) -> tuple:
        return tuple(reversed(self.coeffs))

    def with_domain(self, domain) -> "PolyCurve":
        return PolyCurve(self.coeffs, domain, self.frame)

    def __str__(self):
        var = "x" if self.frame == "z_of_x" else "z"
        terms = []
        for k, c in reversed(list(enumerate(self.coeffs))):
            if k == 0:
                terms.append(f"{c:+.4f}")
            elif k == 1:
                terms.append(f"{c:+.4f}*{var}")
            else:
                terms.append(f"{c:+.4f}*{var}^{k}")
        return " ".join(terms)


def fit_polynomial(points: Sequence, degree: int = 2, *, frame: str = "z_of_x",
                   max_degree: int = MAX_DEGREE, cond_limit: float = 1e12) -> PolyCurve:
    """Least-squares polynomial through ``points`` (sequence of (x, z)).

    The independent variable is mapped onto [-1, 1] before the normal
    equations are formed, and the solution is mapped back.  For
    ``frame == "x_of_z"`` the fit is x = p(z).
    """
    if not 0 <= degree <= max_degree:
        raise ContractError(f"degree {degree} outside [0, {max_degree}]")
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    if frame == "z_of_x":
        u, v = pts[:, 0], pts[:, 1]
    elif frame == "x_of_z":
        u, v = pts[:, 1], pts[:, 0]
    else:
        raise ContractError(f"unknown frame {frame!r}")
    if len(u) < degree + 1:
        raise ContractError(f"need at least {degree + 1} points for degree {degree}, got {len(u)}")
    if not (np.all(np.isfinite(u)) and np.all(np.isfinite(v))):
        raise ContractError("non-finite sample in fit input")
    lo, hi = float(u.min()), float(u.max())
    mid = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    if degree >= 1 and half == 0.0:
        raise DegenerateFitError("all abscissae identical")
    scale = half if half > 0.0 else 1.0
    t = (u - mid) / scale
    A = np.vander(t, degree + 1, increasing=True)
    AtA = A.T @ A
    if np.linalg.cond(AtA) > cond_limit:
        raise DegenerateFitError(f"normal matrix ill-conditioned (cond={np.linalg.cond(AtA):.3g})")
    c_scaled = np.linalg.solve(AtA, A.T @ v)
    c = Polynomial(c_scaled)(Polynomial([-mid / scale, 1.0 / scale])).coef
    c = np.pad(c, (0, degree + 1 - len(c)))
    return PolyCurve(tuple(c), (lo, hi), frame)


def poly_residual_rms(curve: PolyCurve, points) -> float:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    u, v = (pts[:, 0], pts[:, 1]) if curve.frame == "z_of_x" else (pts[:, 1], pts[:, 0])
    return float(np.sqrt(np.mean((curve(u) - v) ** 2)))
