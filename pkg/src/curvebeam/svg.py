"""Deterministic SVG output for reflection scenes and field heatmaps.

Numbers are written with fixed precision and elements in a fixed order so
the same input always yields the same bytes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .envelope import CURVING, DIRECTIONAL
from .reflectors import CircularArc, PlanarSegment, SampledProfile

PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
# viridis anchors
COLORMAP = ((0.0, (68, 1, 84)), (0.25, (59, 82, 139)), (0.5, (33, 145, 140)),
            (0.75, (94, 201, 98)), (1.0, (253, 231, 37)))


def _f(v: float) -> str:
    s = f"{v:.3f}"
    return "0.000" if s == "-0.000" else s


@dataclass
class Scene:
    trajectories: list                    # ConvexTrajectory
    families: list = field(default_factory=list)     # TangentFamily per trajectory
    predictions: list = field(default_factory=list)  # Prediction per trajectory
    profile: object = None
    aperture: Optional[float] = None
    show_tangents: bool = True
    px_per_m: float = 2000.0
    title: str = ""


class _View:
    def __init__(self, lo_x, hi_x, lo_z, hi_z, scale):
        self.lo_x, self.hi_x, self.lo_z, self.hi_z, self.s = lo_x, hi_x, lo_z, hi_z, scale

    @property
    def width(self):
        return (self.hi_x - self.lo_x) * self.s

    @property
    def height(self):
        return (self.hi_z - self.lo_z) * self.s

    @property
    def diag(self):
        return math.hypot(self.hi_x - self.lo_x, self.hi_z - self.lo_z)

    def pt(self, x, z):
        return f"{_f((x - self.lo_x) * self.s)},{_f((self.hi_z - z) * self.s)}"

    def poly(self, xs, zs):
        pts = [self.pt(x, z) for x, z in zip(xs, zs) if math.isfinite(x) and math.isfinite(z)]
        if len(pts) < 2:
            return ""
        return "M" + " L".join(pts)


def _traj_points(traj, fam, n=96):
    if traj.frame == "x_of_z" and traj.x_of_z is not None:
        z_hi = max((r.contact.z for r in fam), default=traj.meta.get("z_domain", (0, 0.3))[1]) if fam else 0.3
        zs = np.linspace(0.0, z_hi, n)
        return np.asarray(traj.x_of_z(zs), dtype=float), zs
    lo, hi = traj.domain
    if fam:
        hi = min(hi, max(r.contact.x for r in fam))
        lo = max(lo, min(r.contact.x for r in fam))
    xs = np.linspace(lo, hi, n)
    return xs, np.asarray(traj.z(xs), dtype=float)


def _bounds(scene: Scene):
    xs, zs = [0.0], [0.0]
    if scene.aperture:
        xs.append(-scene.aperture)
    for i, t in enumerate(scene.trajectories):
        fam = scene.families[i] if i < len(scene.families) else None
        tx, tz = _traj_points(t, fam)
        xs.extend(tx.tolist())
        zs.extend(tz.tolist())
    for p in scene.predictions:
        if p is None:
            continue
        if p.reflected is not None:
            for r in p.reflected.rays:
                xs.append(r.origin.x)
                zs.append(r.origin.z)
        if p.envelope is not None:
            xs.extend(p.envelope.domain)
            zs.extend(np.asarray(p.envelope(np.array(p.envelope.domain))).tolist())
    if isinstance(scene.profile, CircularArc):
        c, r = scene.profile.center, scene.profile.radius
        xs.extend([c.x - r, c.x + r])
        zs.extend([c.z - r, c.z + r])
    elif isinstance(scene.profile, SampledProfile):
        xs.extend(scene.profile.xs)
        zs.extend(scene.profile.zs)
    fin = [(x, z) for x, z in zip(xs, zs) if math.isfinite(x) and math.isfinite(z)]
    lo_x = min(p[0] for p in fin)
    hi_x = max(p[0] for p in fin)
    lo_z = min(p[1] for p in fin)
    hi_z = max(p[1] for p in fin)
    pad = 0.08 * max(hi_x - lo_x, hi_z - lo_z, 1e-3)
    return lo_x - pad, hi_x + pad, lo_z - pad, hi_z + pad


def _plane_segment(p: PlanarSegment, v: _View):
    lo = max(p.x_extent[0], v.lo_x)
    hi = min(p.x_extent[1], v.hi_x)
    if not lo < hi:
        return ""
    return f"M{v.pt(lo, p.slope * lo + p.intercept)} L{v.pt(hi, p.slope * hi + p.intercept)}"


def _ray_path(v: _View, ox, oz, dx, dz, length):
    n = math.hypot(dx, dz)
    return f"M{v.pt(ox, oz)} L{v.pt(ox + length * dx / n, oz + length * dz / n)}"


def scene_svg(scene: Scene) -> str:
    """Layered SVG: reflector, incident trajectories, tangents, reflected output, legend."""
    v = _View(*_bounds(scene), scene.px_per_m)
    L = v.diag * 1.5
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(v.width)}" height="{_f(v.height + 40)}" '
        f'viewBox="0 0 {_f(v.width)} {_f(v.height + 40)}">',
        '<defs><clipPath id="view"><rect x="0" y="0" '
        f'width="{_f(v.width)}" height="{_f(v.height)}"/></clipPath></defs>',
        '<rect x="0" y="0" width="100%" height="100%" fill="#ffffff"/>',
        '<g clip-path="url(#view)" fill="none" stroke-linecap="round">',
    ]
    if scene.aperture:
        out.append(f'<path class="aperture" d="M{v.pt(-scene.aperture, 0.0)} L{v.pt(0.0, 0.0)}" '
                   'stroke="#000000" stroke-width="4"/>')
    prof = scene.profile
    out.append('<g class="reflector" stroke="#444444" stroke-width="3">')
    if isinstance(prof, PlanarSegment):
        d = _plane_segment(prof, v)
        if d:
            out.append(f'<path class="reflector" d="{d}"/>')
    elif isinstance(prof, CircularArc):
        c = prof.center
        out.append(f'<circle class="reflector" cx="{v.pt(c.x, c.z).split(",")[0]}" '
                   f'cy="{v.pt(c.x, c.z).split(",")[1]}" r="{_f(prof.radius * v.s)}"/>')
    elif isinstance(prof, SampledProfile):
        out.append(f'<path class="reflector" d="{v.poly(prof.xs, prof.zs)}"/>')
    out.append("</g>")
    for i, t in enumerate(scene.trajectories):
        color = PALETTE[i % len(PALETTE)]
        fam = scene.families[i] if i < len(scene.families) else None
        pred = scene.predictions[i] if i < len(scene.predictions) else None
        out.append(f'<g class="trajectory-group" data-label="{escape(t.label)}">')
        tx, tz = _traj_points(t, fam)
        out.append(f'<path class="incident" d="{v.poly(tx, tz)}" stroke="{color}" stroke-width="2.5"/>')
        if scene.show_tangents and fam is not None:
            hits = {}
            if pred is not None and pred.reflected is not None:
                hits = {r.source_index: r for r in pred.reflected.rays}
            for r in fam:
                ox, oz = r.origin
                if r.index in hits:
                    h = hits[r.index].origin
                    d = f"M{v.pt(ox, oz)} L{v.pt(h.x, h.z)}"
                else:
                    d = _ray_path(v, ox, oz, r.dir.dx, r.dir.dz, L)
                out.append(f'<path class="tangent" d="{d}" stroke="{color}" stroke-width="0.6" '
                           'stroke-opacity="0.5"/>')
            for k in sorted(hits):
                rr = hits[k]
                out.append(f'<path class="reflected" d="{_ray_path(v, rr.origin.x, rr.origin.z, rr.dir.dx, rr.dir.dz, L)}" '
                           f'stroke="{color}" stroke-width="0.6" stroke-opacity="0.5" stroke-dasharray="4 3"/>')
        if pred is not None and pred.kind == CURVING and pred.envelope is not None:
            xs = np.linspace(*pred.envelope.domain, 96)
            out.append(f'<path class="envelope" d="{v.poly(xs, pred.envelope(xs))}" stroke="{color}" '
                       'stroke-width="3" stroke-dasharray="10 5"/>')
        elif pred is not None and pred.kind == DIRECTIONAL and pred.edge_rays:
            for rr in pred.edge_rays:
                out.append(f'<path class="edge-ray" d="{_ray_path(v, rr.origin.x, rr.origin.z, rr.dir.dx, rr.dir.dz, L)}" '
                           f'stroke="{color}" stroke-width="2.5"/>')
        out.append("</g>")
    out.append("</g>")
    # legend
    y = v.height + 16
    x = 8.0
    out.append('<g class="legend" font-family="sans-serif" font-size="12">')
    if scene.title:
        out.append(f'<text x="{_f(x)}" y="{_f(y)}" fill="#000000">{escape(scene.title)}</text>')
        y += 16
    for i, t in enumerate(scene.trajectories):
        pred = scene.predictions[i] if i < len(scene.predictions) else None
        kind = pred.kind if pred is not None else "incident"
        color = PALETTE[i % len(PALETTE)]
        out.append(f'<rect x="{_f(x)}" y="{_f(y - 9)}" width="10" height="10" fill="{color}"/>')
        out.append(f'<text x="{_f(x + 14)}" y="{_f(y)}" fill="#000000">{escape(t.label)}: {escape(kind)}</text>')
        x += 14 + 8 * (len(t.label) + len(kind) + 4)
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _color(u: float) -> str:
    u = min(max(u, 0.0), 1.0)
    for (a, ca), (b, cb) in zip(COLORMAP, COLORMAP[1:]):
        if u <= b:
            t = (u - a) / (b - a)
            rgb = [round(ca[k] + t * (cb[k] - ca[k])) for k in range(3)]
            return "#%02x%02x%02x" % tuple(rgb)
    return "#%02x%02x%02x" % COLORMAP[-1][1]


def heatmap_svg(grid, px_per_cell: float = 4.0, ridge=None, title: str = "") -> str:
    """Color-mapped raster of a field grid, x to the right and z upward."""
    m = grid.magnitude
    top = float(np.max(m)) if m.size else 1.0
    top = top if top > 0 else 1.0
    nz, nx = m.shape
    w, h = nx * px_per_cell, nz * px_per_cell
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(w)}" height="{_f(h + 24)}" '
        f'viewBox="0 0 {_f(w)} {_f(h + 24)}" shape-rendering="crispEdges">',
        '<g class="heatmap">',
    ]
    for iz in range(nz):
        y = (nz - 1 - iz) * px_per_cell
        for ix in range(nx):
            out.append(f'<rect x="{_f(ix * px_per_cell)}" y="{_f(y)}" width="{_f(px_per_cell)}" '
                       f'height="{_f(px_per_cell)}" fill="{_color(m[iz, ix] / top)}"/>')
    out.append("</g>")
    if ridge:
        dx = grid.dx or 1.0
        dz = grid.dz or 1.0
        pts = [(((p[0] - grid.x[0]) / dx + 0.5) * px_per_cell, (nz - 1 - (p[1] - grid.z[0]) / dz + 0.5) * px_per_cell)
               for p in ridge]
        d = "M" + " L".join(f"{_f(a)},{_f(b)}" for a, b in pts)
        out.append(f'<path class="ridge" d="{d}" fill="none" stroke="#ffffff" stroke-width="1.5" '
                   'stroke-dasharray="4 3"/>')
    if title:
        out.append(f'<text x="4" y="{_f(h + 16)}" font-family="sans-serif" font-size="12">{escape(title)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
