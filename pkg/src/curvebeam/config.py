"""Scenario configuration: YAML loading, validation and object construction.

Every length is in meters and every frequency in Hz; there is no unit
parsing.  Validation collects all problems (as dotted paths) before raising
:class:`ConfigError`.
"""
from __future__ import annotations

import copy
import math
import os
from dataclasses import dataclass, field
from typing import Optional

import yaml

from .beams import (BeamSpec, TrajectorySet, airy_lobe_trajectory, airy_peak_trajectory,
                    generic_trajectory, lobe_edges, parse_poly_curve, sampled_trajectory)
from .envelope import Scenario, Thresholds
from .errors import ConfigError, CurvebeamError, FieldCSVError
from .metrics import DEFAULT_SAMPLES
from .reflectors import CircularArc, PlanarSegment, load_profile_csv

TOP_KEYS = {"name", "description", "beam", "aperture", "reflector", "run", "references", "output",
            "render", "plate"}
TANGENTS_PER_METER = 300  # 30 tangents per 100 mm of aperture


class _Issues:
    def __init__(self):
        self.items = []

    def add(self, path, msg):
        self.items.append((path, msg))

    def raise_if_any(self):
        if self.items:
            raise ConfigError(self.items)


def _num(raw, path, issues, *, positive=False, nonneg=False, integer=False, default=None, required=False,
         lo=None, hi_excl=None):
    if raw is None:
        if required:
            issues.add(path, "is required")
        return default
    v = raw
    if isinstance(v, bool):
        issues.add(path, f"expected a number, got {raw!r}")
        return default
    if isinstance(v, str):
        try:
            v = float(v.strip())
        except ValueError:
            issues.add(path, f"expected a number, got {raw!r}")
            return default
    if not isinstance(v, (int, float)) or not math.isfinite(v):
        issues.add(path, f"expected a finite number, got {raw!r}")
        return default
    if integer:
        if float(v) != int(v):
            issues.add(path, f"expected an integer, got {raw!r}")
            return default
        v = int(v)
    else:
        v = float(v)
    if positive and not v > 0:
        issues.add(path, f"must be > 0, got {raw!r}")
    if nonneg and v < 0:
        issues.add(path, f"must be >= 0, got {raw!r}")
    if lo is not None and v < lo:
        issues.add(path, f"must be >= {lo}, got {raw!r}")
    if hi_excl is not None and not v < hi_excl:
        issues.add(path, f"must be < {hi_excl}, got {raw!r}")
    return v


def _interval(raw, path, issues, required=False):
    if raw is None:
        if required:
            issues.add(path, "is required")
        return None
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        issues.add(path, f"expected [lo, hi], got {raw!r}")
        return None
    a = _num(raw[0], f"{path}[0]", issues)
    b = _num(raw[1], f"{path}[1]", issues)
    if a is None or b is None:
        return None
    if not a <= b:
        issues.add(path, f"empty interval [{a}, {b}]")
        return None
    return (a, b)


def _mapping(raw, path, issues, allowed, required=False):
    if raw is None:
        if required:
            issues.add(path, "is required")
        return None
    if not isinstance(raw, dict):
        issues.add(path, f"expected a mapping, got {type(raw).__name__}")
        return None
    for k in raw:
        if k not in allowed:
            issues.add(f"{path}.{k}", "unknown key")
    return raw


@dataclass
class Reference:
    label: str
    curve: object
    prediction: Optional[str]
    domain: object   # "prediction" | "overlap" | (lo, hi)
    n: int = DEFAULT_SAMPLES
    expr: str = ""


@dataclass
class ScenarioConfig:
    name: str
    scenario: Scenario
    references: list = field(default_factory=list)
    out_dir: Optional[str] = None
    svg: bool = True
    beam_spec: Optional[BeamSpec] = None
    render: Optional[dict] = None
    plate: Optional[dict] = None
    raw: dict = field(default_factory=dict)
    base_dir: str = "."


def _beam(raw, x_a, issues, base_dir):
    b = _mapping(raw, "beam", issues, {"airy", "trajectories"}, required=True)
    if b is None:
        return None, None
    if ("airy" in b) == ("trajectories" in b):
        issues.add("beam", "give exactly one of 'airy' or 'trajectories'")
        return None, None
    if "airy" in b:
        a = _mapping(b["airy"], "beam.airy", issues,
                     {"frequency", "x0", "a", "trajectory", "lobes", "edges", "z_max", "edge_offset"}, required=True)
        if a is None:
            return None, None
        f = _num(a.get("frequency"), "beam.airy.frequency", issues, positive=True, required=True)
        x0 = _num(a.get("x0"), "beam.airy.x0", issues, positive=True, required=True)
        tr = _num(a.get("a"), "beam.airy.a", issues, nonneg=True, hi_excl=1.0, default=0.0)
        z_max = _num(a.get("z_max"), "beam.airy.z_max", issues, positive=True, default=2.0)
        kind = a.get("trajectory", "lobe")
        if kind not in ("lobe", "caustic"):
            issues.add("beam.airy.trajectory", f"expected 'lobe' or 'caustic', got {kind!r}")
        lobes = a.get("lobes", [1])
        if not isinstance(lobes, list) or not lobes or not all(isinstance(v, int) and 1 <= v <= 5 for v in lobes):
            issues.add("beam.airy.lobes", f"expected a list of lobe numbers 1..5, got {lobes!r}")
            lobes = [1]
        edges = a.get("edges", False)
        if not isinstance(edges, bool):
            issues.add("beam.airy.edges", f"expected true/false, got {edges!r}")
        off = _num(a.get("edge_offset"), "beam.airy.edge_offset", issues, nonneg=True)
        if None in (f, x0, tr, z_max) or x_a is None or issues.items:
            return None, None
        spec = BeamSpec(f, x0, tr, x_a)
        trajs = []
        for lobe in lobes:
            t = (airy_lobe_trajectory(spec, lobe, z_max) if kind == "lobe"
                 else airy_peak_trajectory(spec, z_max, label="peak" if len(lobes) == 1 else f"peak{lobe}"))
            if edges:
                trajs.extend(lobe_edges(t, x0 if off is None else off))
            else:
                trajs.append(t)
        return TrajectorySet(tuple(trajs)), spec
    items = b["trajectories"]
    if not isinstance(items, list) or not items:
        issues.add("beam.trajectories", "expected a non-empty list")
        return None, None
    out = []
    for i, t in enumerate(items):
        p = f"beam.trajectories[{i}]"
        m = _mapping(t, p, issues, {"label", "expr", "domain", "table", "frame"}, required=True)
        if m is None:
            continue
        label = str(m.get("label", f"t{i}"))
        dom = _interval(m.get("domain"), f"{p}.domain", issues)
        if ("expr" in m) == ("table" in m):
            issues.add(p, "give exactly one of 'expr' or 'table'")
            continue
        try:
            if "expr" in m:
                if not isinstance(m["expr"], str):
                    issues.add(f"{p}.expr", "expected a string")
                    continue
                out.append(generic_trajectory(m["expr"], dom, label, m.get("frame")))
            else:
                prof = load_profile_csv(os.path.join(base_dir, str(m["table"])))
                out.append(sampled_trajectory(prof.xs, prof.zs, label))
        except (OSError, FieldCSVError):
            raise
        except (CurvebeamError, ValueError) as exc:
            issues.add(p, str(exc))
    if len({t.label for t in out}) != len(out):
        issues.add("beam.trajectories", "labels must be unique")
        return None, None
    return (TrajectorySet(tuple(out)) if out else None), None


def _reflector(raw, issues, base_dir):
    r = _mapping(raw, "reflector", issues, {"type", "slope", "intercept", "x_extent", "center", "radius", "path"},
                 required=True)
    if r is None:
        return None
    kind = r.get("type")
    ext = _interval(r.get("x_extent"), "reflector.x_extent", issues)
    if kind == "plane":
        s = _num(r.get("slope"), "reflector.slope", issues, required=True)
        c = _num(r.get("intercept"), "reflector.intercept", issues, required=True)
        if s is None or c is None:
            return None
        return PlanarSegment(s, c, ext)
    if kind == "circle":
        c = r.get("center")
        rad = _num(r.get("radius"), "reflector.radius", issues, positive=True, required=True)
        if not isinstance(c, (list, tuple)) or len(c) != 2:
            issues.add("reflector.center", f"expected [x, z], got {c!r}")
            return None
        cx = _num(c[0], "reflector.center[0]", issues)
        cz = _num(c[1], "reflector.center[1]", issues)
        if None in (cx, cz, rad) or rad <= 0:
            return None
        return CircularArc((cx, cz), rad, ext)
    if kind == "sampled":
        path = r.get("path")
        if not isinstance(path, str):
            issues.add("reflector.path", "is required for sampled reflectors")
            return None
        # unreadable or malformed tables are I/O failures, not schema issues
        return load_profile_csv(os.path.join(base_dir, path))
    issues.add("reflector.type", f"expected 'plane', 'circle' or 'sampled', got {kind!r}")
    return None


def _thresholds(raw, issues):
    t = _mapping(raw, "run.thresholds", issues,
                 {"min_points", "min_r2", "min_quadratic", "require_monotone", "min_sagitta"})
    d = Thresholds()
    if t is None:
        return d
    mp = _num(t.get("min_points"), "run.thresholds.min_points", issues, integer=True, lo=3, default=d.min_points)
    r2 = _num(t.get("min_r2"), "run.thresholds.min_r2", issues, nonneg=True, default=d.min_r2)
    if r2 is not None and r2 > 1:
        issues.add("run.thresholds.min_r2", f"must be <= 1, got {r2}")
    q = _num(t.get("min_quadratic"), "run.thresholds.min_quadratic", issues, nonneg=True, default=d.min_quadratic)
    sg = _num(t.get("min_sagitta"), "run.thresholds.min_sagitta", issues, nonneg=True, default=d.min_sagitta)
    mono = t.get("require_monotone", d.require_monotone)
    if not isinstance(mono, bool):
        issues.add("run.thresholds.require_monotone", f"expected true/false, got {mono!r}")
        mono = d.require_monotone
    try:
        return Thresholds(mp, r2, q, mono, sg)
    except CurvebeamError:
        return d


def _references(raw, issues):
    if raw is None:
        return []
    if not isinstance(raw, list):
        issues.add("references", "expected a list")
        return []
    out = []
    for i, r in enumerate(raw):
        p = f"references[{i}]"
        m = _mapping(r, p, issues, {"label", "expr", "prediction", "domain", "n"}, required=True)
        if m is None:
            continue
        expr = m.get("expr")
        if not isinstance(expr, str):
            issues.add(f"{p}.expr", "expected a polynomial in x")
            continue
        try:
            curve = parse_poly_curve(expr)
        except (CurvebeamError, ValueError) as exc:
            issues.add(f"{p}.expr", str(exc))
            continue
        dom = m.get("domain", "prediction")
        if dom not in ("prediction", "overlap"):
            dom = _interval(dom, f"{p}.domain", issues)
            if dom is not None and dom[0] == dom[1]:
                issues.add(f"{p}.domain", "empty interval")
        n = _num(m.get("n"), f"{p}.n", issues, integer=True, lo=2, default=DEFAULT_SAMPLES)
        out.append(Reference(str(m.get("label", f"ref{i}")), curve, m.get("prediction"), dom, n, expr))
    return out


def build_config(raw: dict, base_dir: str = ".", overrides: Optional[dict] = None) -> ScenarioConfig:
    """Validate a parsed config mapping and construct the scenario."""
    issues = _Issues()
    if not isinstance(raw, dict):
        raise ConfigError([("", "config must be a mapping")])
    raw = copy.deepcopy(raw)
    for k in raw:
        if k not in TOP_KEYS:
            issues.add(k, "unknown key")
    name = str(raw.get("name", "scenario"))
    ap = _mapping(raw.get("aperture"), "aperture", issues, {"x_a"}, required=True)
    x_a = _num(ap.get("x_a") if ap else None, "aperture.x_a", issues, positive=True, required=ap is not None)
    run = _mapping(raw.get("run"), "run", issues, {"j", "degree", "spacing", "thresholds"}) or {}
    j = _num(run.get("j"), "run.j", issues, integer=True, lo=2)
    degree = _num(run.get("degree"), "run.degree", issues, integer=True, lo=1, default=2)
    if degree is not None and degree > 3:
        issues.add("run.degree", f"must be <= 3, got {degree}")
    spacing = run.get("spacing", "x")
    if spacing not in ("x", "slope"):
        issues.add("run.spacing", f"expected 'x' or 'slope', got {spacing!r}")
    thr = _thresholds(run.get("thresholds"), issues)
    profile = _reflector(raw.get("reflector"), issues, base_dir)
    beam, spec = _beam(raw.get("beam"), x_a, issues, base_dir)
    refs = _references(raw.get("references"), issues)
    out = _mapping(raw.get("output"), "output", issues, {"dir", "svg"}) or {}
    svg = out.get("svg", True)
    if not isinstance(svg, bool):
        issues.add("output.svg", f"expected true/false, got {svg!r}")
    render = _mapping(raw.get("render"), "render", issues, {"x", "z"})
    plate = _mapping(raw.get("plate"), "plate", issues, {"frequency", "n_r", "samples", "wrap"})
    if render is not None:
        for ax in ("x", "z"):
            v = render.get(ax)
            if not isinstance(v, list) or len(v) != 3:
                issues.add(f"render.{ax}", "expected [lo, hi, step]")
                continue
            lo = _num(v[0], f"render.{ax}[0]", issues)
            hi = _num(v[1], f"render.{ax}[1]", issues)
            _num(v[2], f"render.{ax}[2]", issues, positive=True)
            if lo is not None and hi is not None and hi < lo:
                issues.add(f"render.{ax}", "hi must be >= lo")
    if plate is not None:
        _num(plate.get("frequency"), "plate.frequency", issues, positive=True, required=True)
        nr = _num(plate.get("n_r"), "plate.n_r", issues, required=True)
        if nr is not None and not nr > 1:
            issues.add("plate.n_r", f"must be > 1, got {nr}")
        _num(plate.get("samples"), "plate.samples", issues, integer=True, lo=2)
    overrides = overrides or {}
    if overrides.get("j") is not None:
        j = _num(overrides["j"], "--tangents", issues, integer=True, lo=2)
    issues.raise_if_any()
    if j is None:
        j = max(2, int(round(TANGENTS_PER_METER * x_a)))
    scen = Scenario(beam, x_a, profile, j, degree, thr, spacing)
    return ScenarioConfig(name, scen, refs, out.get("dir"), svg, spec, render, plate, raw, base_dir)


def load_config(path, overrides: Optional[dict] = None) -> ScenarioConfig:
    """Read a YAML scenario file; OSError propagates for missing files."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError([("", f"not valid YAML: {exc}")]) from None
    return build_config(raw, os.path.dirname(os.path.abspath(path)), overrides)
