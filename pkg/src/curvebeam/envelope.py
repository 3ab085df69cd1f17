"""Reflected-envelope reconstruction, curving/directional classification and
the end-to-end prediction pipeline."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .beams import TrajectorySet
from .errors import ContractError, CurvebeamError, DegenerateFitError
from .geometry import Direction2, PolyCurve, fit_polynomial, intersect_lines
from .reflection import ReflectedFamily, reflect_family
from .tangents import decompose, neighbour_intersections

CURVING = "curving"
DIRECTIONAL = "directional"
EMPTY = "empty"
ERROR = "error"


@dataclass(frozen=True)
class Thresholds:
    min_points: int = 3
    min_r2: float = 0.98
    min_quadratic: float = 0.05   # |a2| in 1/m
    require_monotone: bool = True
    # an envelope whose bow over its own span is below this is treated as linear
    min_sagitta: float = 2e-3     # m

    def __post_init__(self):
        if self.min_points < 3:
            raise ContractError("min_points must be at least 3 for a quadratic fit")
        if not 0.0 <= self.min_r2 <= 1.0:
            raise ContractError(f"min_r2 must lie in [0, 1], got {self.min_r2!r}")
        if self.min_quadratic < 0:
            raise ContractError("min_quadratic must be non-negative")
        if self.min_sagitta < 0:
            raise ContractError("min_sagitta must be non-negative")

    def as_dict(self) -> dict:
        return {"min_points": self.min_points, "min_r2": self.min_r2,
                "min_quadratic": self.min_quadratic, "require_monotone": self.require_monotone,
                "min_sagitta": self.min_sagitta}


@dataclass(frozen=True)
class Classification:
    kind: str
    points: np.ndarray
    reason: str
    r2: Optional[float] = None
    quadratic: Optional[float] = None
    fit: Optional[PolyCurve] = None
    monotone: Optional[bool] = None
    parallel_pairs: int = 0
    sagitta: Optional[float] = None


@dataclass(frozen=True)
class Prediction:
    label: str
    kind: str
    envelope: Optional[PolyCurve] = None
    points: np.ndarray = field(default_factory=lambda: np.empty((0, 2)))
    edge_rays: Optional[tuple] = None
    mean_direction: Optional[Direction2] = None
    spread_angle: Optional[float] = None
    incident_direction: Optional[Direction2] = None
    diagnostics: dict = field(default_factory=dict)
    reflected: Optional[ReflectedFamily] = field(default=None, repr=False, compare=False)
    error: Optional[str] = None

    @property
    def curving(self) -> bool:
        return self.kind == CURVING

    @property
    def directional(self) -> bool:
        return self.kind == DIRECTIONAL

    def width(self, d):
        """Edge-ray separation at travel distance ``d`` along the mean direction."""
        if self.edge_rays is None:
            raise ContractError(f"prediction {self.label!r} has no edge rays")
        return fan_width(self.edge_rays, self.mean_direction, d)

    @property
    def apex_distance(self) -> Optional[float]:
        if self.edge_rays is None:
            return None
        return fan_apex_distance(self.edge_rays, self.mean_direction)


@dataclass(frozen=True)
class Scenario:
    beam: TrajectorySet
    aperture: float
    profile: object
    j: int = 30
    degree: int = 2
    thresholds: Thresholds = Thresholds()
    spacing: str = "x"

    def __post_init__(self):
        if not self.aperture > 0:
            raise ContractError(f"aperture must be positive, got {self.aperture!r}")
        if self.j < 2:
            raise ContractError(f"j must be at least 2, got {self.j!r}")
        if not 1 <= self.degree <= 3:
            raise ContractError(f"fit degree must be 1..3, got {self.degree!r}")


def _unit_sum(dirs) -> Direction2:
    sx = sum(d[0] / math.hypot(*d) for d in dirs)
    sz = sum(d[1] / math.hypot(*d) for d in dirs)
    return Direction2(sx, sz).unit()


def angle_between(u, v) -> float:
    """Unsigned angle between two directions, in radians."""
    return abs(math.atan2(u[0] * v[1] - u[1] * v[0], u[0] * v[0] + u[1] * v[1]))


def fan_width(edge_rays, mean, d):
    """Distance between two rays measured across ``mean`` at distance ``d``.

    Distance is counted from the midpoint of the rays' origins, along the
    mean direction.
    """
    a, b = edge_rays
    mx = 0.5 * (a.origin[0] + b.origin[0])
    mz = 0.5 * (a.origin[1] + b.origin[1])
    d = np.asarray(d, dtype=float)

    def at(r):
        ux, uz = r.dir.unit()
        along = (r.origin[0] - mx) * mean[0] + (r.origin[1] - mz) * mean[1]
        t = (d - along) / (ux * mean[0] + uz * mean[1])
        return r.origin[0] + t * ux, r.origin[1] + t * uz

    ax, az = at(a)
    bx, bz = at(b)
    w = np.hypot(ax - bx, az - bz)
    return float(w) if w.ndim == 0 else w


def fan_apex_distance(edge_rays, mean) -> Optional[float]:
    """Travel distance (same origin as :func:`fan_width`) at which the edge
    rays cross; negative for a virtual apex behind the reflector, None when
    the rays are parallel."""
    a, b = edge_rays
    hit = intersect_lines(a.origin, a.dir, b.origin, b.dir)
    if hit is None:
        return None
    px = a.origin[0] + hit[0] * a.dir[0]
    pz = a.origin[1] + hit[0] * a.dir[1]
    mx = 0.5 * (a.origin[0] + b.origin[0])
    mz = 0.5 * (a.origin[1] + b.origin[1])
    return float((px - mx) * mean[0] + (pz - mz) * mean[1])


def forward_points(rf: ReflectedFamily):
    """Neighbour intersections lying ahead of both generating rays."""
    rays = list(rf.rays)
    if len(rays) < 2:
        return np.empty((0, 2)), 0
    pts, t1, t2, parallel = neighbour_intersections([r.origin for r in rays], [r.dir for r in rays])
    if len(pts) == 0:
        return pts, parallel
    keep = (t1 > 0) & (t2 > 0)
    return pts[keep], parallel


def _r2(curve: PolyCurve, pts) -> float:
    z = pts[:, 1]
    ss_res = float(np.sum((curve(pts[:, 0]) - z) ** 2))
    ss_tot = float(np.sum((z - z.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res == 0.0 else 0.0
    return 1.0 - ss_res / ss_tot


def envelope_sagitta(curve: PolyCurve, n: int = 257) -> float:
    """Largest vertical gap between the curve and its chord over the domain."""
    lo, hi = curve.domain
    if hi == lo:
        return 0.0
    xs = np.linspace(lo, hi, n)
    zs = curve(xs)
    chord = zs[0] + (zs[-1] - zs[0]) * (xs - lo) / (hi - lo)
    return float(np.max(np.abs(zs - chord)))


def classify(rf: ReflectedFamily, thresholds: Thresholds = Thresholds(), degree: int = 2) -> Classification:
    pts, parallel = forward_points(rf)
    if len(pts) < thresholds.min_points:
        return Classification(DIRECTIONAL, pts, f"{len(pts)} forward intersection points",
                              parallel_pairs=parallel)
    dxs = np.diff(pts[:, 0])
    monotone = bool(np.all(dxs > 0) or np.all(dxs < 0))
    try:
        fit = fit_polynomial(pts, max(degree, 2), frame="z_of_x")
    except DegenerateFitError as exc:
        return Classification(DIRECTIONAL, pts, f"degenerate fit: {exc}", monotone=monotone,
                              parallel_pairs=parallel)
    r2 = _r2(fit, pts)
    a2 = fit.coeffs[2]
    sag = envelope_sagitta(fit)
    common = dict(r2=r2, quadratic=a2, fit=fit, monotone=monotone, parallel_pairs=parallel, sagitta=sag)
    if thresholds.require_monotone and not monotone:
        return Classification(DIRECTIONAL, pts, "intersection x-sequence not monotone", **common)
    if r2 < thresholds.min_r2:
        return Classification(DIRECTIONAL, pts, f"fit R^2 {r2:.4f} below {thresholds.min_r2}", **common)
    if abs(a2) < thresholds.min_quadratic:
        return Classification(DIRECTIONAL, pts, f"|a2| {abs(a2):.4f} below {thresholds.min_quadratic}", **common)
    if sag < thresholds.min_sagitta:
        return Classification(DIRECTIONAL, pts, f"envelope sagitta {sag * 1e3:.3f} mm below "
                              f"{thresholds.min_sagitta * 1e3:.3f} mm", **common)
    return Classification(CURVING, pts, "curving envelope", **common)


def reconstruct(rf: ReflectedFamily, degree: int = 2) -> PolyCurve:
    """Least-squares fit z(x) through the forward neighbour intersections."""
    pts, _ = forward_points(rf)
    if len(pts) < degree + 1:
        raise DegenerateFitError(f"{len(pts)} forward intersection points, need {degree + 1}")
    return fit_polynomial(pts, degree, frame="z_of_x")


def _diagnostics(rf: ReflectedFamily, cls: Classification) -> dict:
    pts = cls.points
    scatter = None
    if cls.fit is not None and len(pts):
        scatter = float(np.sqrt(np.mean((cls.fit(pts[:, 0]) - pts[:, 1]) ** 2)))
    return {
        "reflected": len(rf.rays),
        "dropped": rf.dropped,
        "dropped_indices": list(rf.dropped_indices),
        "forward_points": int(len(pts)),
        "parallel_pairs": cls.parallel_pairs,
        "r2": cls.r2,
        "quadratic": cls.quadratic,
        "monotone": cls.monotone,
        "scatter": scatter,
        "sagitta": cls.sagitta,
        "reason": cls.reason,
    }


def _directional(label, rf, cls, diag) -> Prediction:
    rays = rf.rays
    first, last = rays[0], rays[-1]
    mean = _unit_sum([first.dir, last.dir])
    incident = _unit_sum([first.incident_dir, last.incident_dir])
    spread = angle_between(first.dir, last.dir)
    if len(rays) > 1 and fan_width((first, last), mean, 1.0) < fan_width((first, last), mean, 0.0):
        spread = -spread
    return Prediction(label, DIRECTIONAL, points=cls.points, edge_rays=(first, last),
                      mean_direction=mean, spread_angle=spread, incident_direction=incident,
                      diagnostics=diag, reflected=rf)


def predict_reflected(rf: ReflectedFamily, label: str = "", degree: int = 2,
                      thresholds: Thresholds = Thresholds()) -> Prediction:
    """Classify a reflected family and reconstruct its envelope when curving."""
    if rf.empty:
        return Prediction(label, EMPTY, diagnostics={"reflected": 0, "dropped": rf.dropped,
                                                     "dropped_indices": list(rf.dropped_indices),
                                                     "reason": "no tangent reaches the reflector"},
                          reflected=rf)
    cls = classify(rf, thresholds, degree)
    diag = _diagnostics(rf, cls)
    if cls.kind == DIRECTIONAL:
        return _directional(label, rf, cls, diag)
    try:
        env = reconstruct(rf, degree) if degree != 2 else cls.fit
    except DegenerateFitError as exc:
        diag["reason"] = f"degenerate fit: {exc}"
        return _directional(label, rf, cls, diag)
    incident = _unit_sum([rf.rays[0].incident_dir, rf.rays[-1].incident_dir])
    mean = _unit_sum([rf.rays[0].dir, rf.rays[-1].dir])
    return Prediction(label, CURVING, envelope=env, points=cls.points, incident_direction=incident,
                      mean_direction=mean,
                      edge_rays=(rf.rays[0], rf.rays[-1]), diagnostics=diag, reflected=rf)


def predict_one(traj, s: Scenario) -> Prediction:
    try:
        fam = decompose(traj, s.aperture, s.j, s.spacing)
        rf = reflect_family(fam, s.profile)
        return predict_reflected(rf, traj.label, s.degree, s.thresholds)
    except (CurvebeamError, ValueError, ArithmeticError) as exc:
        return Prediction(traj.label, ERROR, error=f"{type(exc).__name__}: {exc}")


def predict(s: Scenario) -> list:
    """One prediction per trajectory, in input order; failures stay local."""
    return [predict_one(traj, s) for traj in s.beam]


def lobe_summary(left: Prediction, right: Prediction) -> dict:
    """Combine two edge predictions of the same lobe into lobe-level directions."""
    for p in (left, right):
        if p.mean_direction is None or p.incident_direction is None:
            raise ContractError(f"prediction {p.label!r} has no directions")
    mean = _unit_sum([left.mean_direction, right.mean_direction])
    incident = _unit_sum([left.incident_direction, right.incident_direction])
    # outer rays of the lobe: first ray of one edge, last ray of the other
    outer = _outer_pair(left, right)
    return {
        "mean_direction": mean,
        "incident_direction": incident,
        "edge_angle": angle_between(left.mean_direction, right.mean_direction),
        "outer_angle": angle_between(outer[0].dir, outer[1].dir),
        "outer_width": lambda d: fan_width(outer, mean, d),
    }


def _outer_pair(left: Prediction, right: Prediction):
    cands = [(a, b) for a in left.edge_rays for b in right.edge_rays]
    mean = _unit_sum([left.mean_direction, right.mean_direction])
    return max(cands, key=lambda ab: fan_width(ab, mean, 1.0))
