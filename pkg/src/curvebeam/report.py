"""JSON report assembly and atomic file output."""
from __future__ import annotations

import json
import math
import os
import tempfile

import numpy as np

from . import __version__
from .envelope import CURVING, DIRECTIONAL, Prediction

SCHEMA_VERSION = "1.0"
TOOL = "curvebeam"


def atomic_write_text(path, text: str) -> None:
    """Write via a temporary file in the same directory, then rename."""
    path = os.fspath(path)
    d = os.path.dirname(os.path.abspath(path))
    os.makedirs(d, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=".tmp-", dir=d)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def clean(obj):
    """Make ``obj`` JSON-safe: tuples to lists, numpy scalars to floats, non-finite to None."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), indent=2, sort_keys=True, allow_nan=False) + "\n"


def _ray(r) -> dict:
    return {
        "source_index": r.source_index,
        "origin": list(r.origin),
        "direction": list(r.dir),
        "slope": None if r.vertical else r.slope,
        "vertical": r.vertical,
    }


def prediction_dict(p: Prediction) -> dict:
    out = {"label": p.label, "kind": p.kind, "diagnostics": dict(p.diagnostics)}
    if p.error:
        out["error"] = p.error
    if p.kind == CURVING and p.envelope is not None:
        out["envelope"] = {
            "coefficients_descending": list(p.envelope.descending()),
            "x_domain": list(p.envelope.domain),
            "expression": str(p.envelope),
        }
        out["envelope_points"] = p.points.tolist()
    if p.kind == DIRECTIONAL:
        d = np.array([0.0, 0.05, 0.1, 0.2, 0.3])
        out["directional"] = {
            "edge_rays": [_ray(r) for r in p.edge_rays],
            "mean_direction": list(p.mean_direction),
            "incident_direction": list(p.incident_direction),
            "spread_angle_rad": p.spread_angle,
            "apex_distance_m": p.apex_distance,
            "width_m": {f"{v:.2f}": float(w) for v, w in zip(d, p.width(d))},
        }
        out["envelope_points"] = p.points.tolist()
    return out


def build_report(name: str, predictions, metrics, thresholds, config_echo, extra=None) -> dict:
    rep = {
        "schema_version": SCHEMA_VERSION,
        "tool": TOOL,
        "tool_version": __version__,
        "scenario": name,
        "thresholds": thresholds.as_dict(),
        "predictions": [prediction_dict(p) for p in predictions],
        "metrics": metrics,
        "config": config_echo,
    }
    if extra:
        rep.update(extra)
    return clean(rep)
