"""Scenario execution: predictions, reference metrics, report and plot files."""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Optional

from .config import ScenarioConfig
from .envelope import CURVING, predict
from .errors import ContractError
from .metrics import ComparisonDomain, compare, overlap_domain
from .report import atomic_write_text, build_report, dumps
from .svg import Scene, scene_svg


@dataclass
class RunResult:
    report: dict
    predictions: list
    files: list = field(default_factory=list)

    @property
    def numeric_failure(self) -> bool:
        return any(p.kind == "error" for p in self.predictions)


def _pick(preds, label):
    if label is None:
        for p in preds:
            if p.kind == CURVING:
                return p
        return preds[0] if preds else None
    for p in preds:
        if p.label == label:
            return p
    raise ContractError(f"reference names unknown prediction {label!r}")


def reference_metrics(cfg: ScenarioConfig, preds) -> list:
    out = []
    for ref in cfg.references:
        p = _pick(preds, ref.prediction)
        entry = {"reference": ref.label, "expr": ref.expr, "prediction": p.label if p else None}
        if p is None or p.kind != CURVING or p.envelope is None:
            entry["status"] = "no curving envelope to compare"
            out.append(entry)
            continue
        if ref.domain == "prediction":
            dom = ComparisonDomain(*p.envelope.domain, ref.n)
            src = "prediction envelope span"
        elif ref.domain == "overlap":
            dom = overlap_domain(ref.curve, p.envelope, ref.n)
            src = "overlap of fitted domains"
        else:
            dom = ComparisonDomain(ref.domain[0], ref.domain[1], ref.n)
            src = "configured"
        entry.update(compare(ref.curve, p.envelope, dom))
        entry["domain_source"] = src
        entry["status"] = "ok"
        out.append(entry)
    return out


def run_scenario(cfg: ScenarioConfig, out_dir: Optional[str] = None, svg: Optional[bool] = None,
                 write: bool = True) -> RunResult:
    preds = predict(cfg.scenario)
    metrics = reference_metrics(cfg, preds)
    s = cfg.scenario
    echo = dict(cfg.raw)
    echo["resolved"] = {"j": s.j, "aperture": s.aperture, "degree": s.degree, "spacing": s.spacing}
    report = build_report(cfg.name, preds, metrics, s.thresholds, echo)
    res = RunResult(report, preds)
    if not write:
        return res
    out_dir = out_dir or cfg.out_dir or os.path.join(".", "out", cfg.name)
    path = os.path.join(out_dir, "report.json")
    atomic_write_text(path, dumps(report))
    res.files.append(path)
    if svg if svg is not None else cfg.svg:
        fams = [p.reflected.source if p.reflected is not None else None for p in preds]
        scene = Scene(list(s.beam), fams, preds, s.profile, s.aperture, show_tangents=len(preds) == 1,
                      title=cfg.name)
        spath = os.path.join(out_dir, "scene.svg")
        atomic_write_text(spath, scene_svg(scene))
        res.files.append(spath)
    return res
