"""Command-line entry point."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np
import yaml

from . import __version__
from .errors import AiryRangeError, ConfigError, CurvebeamError, DegenerateFitError, FieldCSVError

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_IO = 0, 2, 3, 4


def _emit(args, payload: dict, text_lines):
    from .report import dumps
    if args.format == "json":
        sys.stdout.write(dumps(payload))
    else:
        for line in text_lines:
            print(line)


def _summary_lines(name, report):
    lines = [f"{name}:"]
    for p in report["predictions"]:
        line = f"  {p['label']}: {p['kind']}"
        if "envelope" in p:
            a2, a1, a0 = p["envelope"]["coefficients_descending"]
            line += f"  z = {a2:+.4f} x^2 {a1:+.4f} x {a0:+.4f}"
        elif p.get("error"):
            line += f"  ({p['error']})"
        else:
            line += f"  ({p['diagnostics'].get('reason', '')})"
        lines.append(line)
    for m in report["metrics"]:
        if m.get("status") == "ok":
            d = m["domain"]
            lines.append(f"  vs {m['reference']}: rmse {m['rmse_m'] * 1e3:.2f} mm, "
                         f"max {m['max_abs_dev_m'] * 1e3:.2f} mm on [{d['x_min']:.4f}, {d['x_max']:.4f}]")
        else:
            lines.append(f"  vs {m['reference']}: {m['status']}")
    return lines


def _overrides(args):
    return {"j": getattr(args, "tangents", None)}


def _run_cfg(cfg, args, out_dir):
    from .runner import run_scenario
    res = run_scenario(cfg, out_dir, args.svg)
    _emit(args, res.report, _summary_lines(cfg.name, res.report) + [f"  wrote {f}" for f in res.files])
    return EXIT_NUMERIC if res.numeric_failure else EXIT_OK


def cmd_predict(args):
    from .config import load_config
    cfg = load_config(args.config, _overrides(args))
    out = args.out or cfg.out_dir or os.path.join("out", cfg.name)
    return _run_cfg(cfg, args, out)


def _render_axes(cfg):
    r = cfg.render or {}
    x = r.get("x", [-0.05, 0.05, 0.002])
    z = r.get("z", [0.0, 0.3, 0.005])
    return [float(v) for v in x], [float(v) for v in z]


def cmd_render_field(args):
    from .airy import axis, export_field_csv, extract_ridge, render_field_grid
    from .config import load_config
    from .report import atomic_write_text
    from .svg import heatmap_svg
    cfg = load_config(args.config, _overrides(args))
    if cfg.beam_spec is None:
        raise ConfigError([("beam.airy", "render-field needs an Airy beam block")])
    (x0, x1, dx), (z0, z1, dz) = _render_axes(cfg)
    grid = render_field_grid(cfg.beam_spec, axis(x0, x1, dx), axis(z0, z1, dz))
    out = args.out or cfg.out_dir or os.path.join("out", cfg.name)
    files = [os.path.join(out, "field.csv")]
    export_field_csv(grid, files[0])
    if args.svg:
        pts, _ = extract_ridge(grid)
        files.append(os.path.join(out, "field.svg"))
        atomic_write_text(files[1], heatmap_svg(grid, ridge=pts, title=f"{cfg.name} |E|"))
    payload = {"scenario": cfg.name, "nx": len(grid.x), "nz": len(grid.z), "files": files,
               "max_magnitude": float(grid.magnitude.max())}
    _emit(args, payload, [f"{cfg.name}: {len(grid.z)}x{len(grid.x)} grid"] + [f"  wrote {f}" for f in files])
    return EXIT_OK


def cmd_ridge(args):
    from .airy import extract_ridge, fit_ridge, load_field_csv
    from .report import atomic_write_text, dumps
    from .svg import heatmap_svg
    grid = load_field_csv(args.grid)
    band = tuple(args.band) if args.band else None
    pts, skipped = extract_ridge(grid, band)
    if len(pts) < args.degree + 1:
        raise DegenerateFitError(f"only {len(pts)} ridge points, need {args.degree + 1}")
    fit = fit_ridge(pts, args.degree, args.frame)
    payload = {
        "grid": os.fspath(args.grid),
        "frame": fit.frame,
        "coefficients_descending": list(fit.descending()),
        "domain": list(fit.domain),
        "expression": str(fit),
        "points": [list(p) for p in pts],
        "skipped": [{"z_m": z, "reason": r} for z, r in skipped],
    }
    lines = [f"ridge fit ({fit.frame}): {fit}", f"  {len(pts)} points, {len(skipped)} rows skipped"]
    if args.out:
        atomic_write_text(os.path.join(args.out, "ridge.json"), dumps(payload))
        lines.append(f"  wrote {os.path.join(args.out, 'ridge.json')}")
        if args.svg:
            atomic_write_text(os.path.join(args.out, "ridge.svg"), heatmap_svg(grid, ridge=pts, title="ridge"))
    _emit(args, payload, lines)
    return EXIT_OK


def _curve_arg(spec: str):
    """Polynomial expression, report JSON (first curving envelope) or x_m,z_m CSV."""
    from .beams import parse_poly_curve
    from .geometry import PolyCurve
    from .reflectors import load_profile_csv
    if os.path.exists(spec):
        if spec.endswith(".json"):
            with open(spec, encoding="utf-8") as fh:
                rep = json.load(fh)
            for p in rep.get("predictions", []):
                if "envelope" in p:
                    c = tuple(reversed(p["envelope"]["coefficients_descending"]))
                    return PolyCurve(c, tuple(p["envelope"]["x_domain"]))
            raise ConfigError([(spec, "report has no curving envelope")])
        prof = load_profile_csv(spec)
        return _Sampled(np.asarray(prof.xs), np.asarray(prof.zs))
    return parse_poly_curve(spec)


class _Sampled:
    def __init__(self, xs, zs):
        self.xs, self.zs = xs, zs
        self.domain = (float(xs[0]), float(xs[-1]))

    def __call__(self, x):
        return np.interp(x, self.xs, self.zs)


def cmd_compare(args):
    from .metrics import ComparisonDomain, compare
    ref = _curve_arg(args.ref)
    pred = _curve_arg(args.pred)
    if args.domain:
        lo, hi = args.domain
    else:
        lo = max(ref.domain[0], pred.domain[0])
        hi = min(ref.domain[1], pred.domain[1])
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ConfigError([("--domain", "curves have no finite common domain; pass --domain LO HI")])
    try:
        dom = ComparisonDomain(lo, hi, args.n)
    except CurvebeamError as exc:
        raise ConfigError([("--domain", str(exc))]) from None
    payload = {"reference": args.ref, "prediction": args.pred, **compare(ref, pred, dom)}
    _emit(args, payload, [f"rmse {payload['rmse_m'] * 1e3:.3f} mm, max {payload['max_abs_dev_m'] * 1e3:.3f} mm "
                          f"on [{lo:.4f}, {hi:.4f}] ({args.n} samples)"])
    return EXIT_OK


def cmd_plate(args):
    from .config import load_config
    from .plate import PlateSpec, design_phase_profile, phase_to_thickness
    from .report import atomic_write_text, dumps
    cfg = load_config(args.config, _overrides(args))
    if cfg.plate is None:
        raise ConfigError([("plate", "is required for the plate command")])
    beam = list(cfg.scenario.beam)
    if len(beam) != 1:
        raise ConfigError([("beam", "plate design needs exactly one trajectory")])
    f = float(cfg.plate["frequency"])
    n_r = float(cfg.plate["n_r"])
    n = int(cfg.plate.get("samples", 201))
    prof = design_phase_profile(beam[0], cfg.scenario.aperture, f, n)
    lam = 2 * np.pi / prof.k
    plate = PlateSpec(lam, n_r, prof.x, prof.phase)
    h = phase_to_thickness(plate)
    hw = phase_to_thickness(plate, wrap=True)
    out = args.out or cfg.out_dir or os.path.join("out", cfg.name)
    rows = ["x_m,theta_rad,phase_rad,h_m,h_wrapped_m"]
    rows += [",".join(repr(float(v)) for v in r) for r in zip(prof.x, prof.theta, prof.phase, h, hw)]
    csv_path = os.path.join(out, "plate.csv")
    atomic_write_text(csv_path, "\n".join(rows) + "\n")
    payload = {"scenario": cfg.name, "wavelength_m": lam, "n_r": n_r, "samples": n,
               "phase_range_rad": [float(prof.phase.min()), float(prof.phase.max())],
               "max_thickness_m": float(np.max(np.abs(h))), "max_wrapped_thickness_m": float(hw.max()),
               "files": [csv_path]}
    atomic_write_text(os.path.join(out, "plate.json"), dumps(payload))
    payload["files"].append(os.path.join(out, "plate.json"))
    _emit(args, payload, [f"{cfg.name}: plate for {f / 1e9:g} GHz, n_r={n_r}", f"  wrote {csv_path}"])
    return EXIT_OK


def _run_preset(name, out, svg, j):
    from .presets import preset_config
    from .runner import run_scenario
    cfg = preset_config(name, {"j": j})
    res = run_scenario(cfg, os.path.join(out, name), svg)
    return name, res.report, res.files, res.numeric_failure


def cmd_presets(args):
    from .presets import PRESETS, names, preset_raw
    if args.action == "list":
        payload = {"presets": [{"name": n, "description": PRESETS[n]["description"]} for n in names()]}
        _emit(args, payload, [f"{n:8s} {PRESETS[n]['description']}" for n in names()])
        return EXIT_OK
    if args.action == "show":
        if not args.name:
            raise ConfigError([("name", "presets show needs a preset name")])
        raw = preset_raw(args.name)
        if args.format == "json":
            _emit(args, raw, [])
        else:
            sys.stdout.write(yaml.safe_dump(raw, sort_keys=False))
        return EXIT_OK
    if args.all == bool(args.name):
        raise ConfigError([("name", "give a preset name or --all")])
    todo = names() if args.all else [args.name]
    if not args.all:
        preset_raw(args.name)  # validates the name
    out = args.out or "out"
    if args.jobs > 1 and len(todo) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_run_preset, todo, [out] * len(todo), [args.svg] * len(todo),
                                  [args.tangents] * len(todo)))
    else:
        results = [_run_preset(n, out, args.svg, args.tangents) for n in todo]
    code = EXIT_OK
    payload = {"runs": []}
    lines = []
    for name, rep, files, failed in results:
        payload["runs"].append({"name": name, "report": rep, "files": files})
        lines += _summary_lines(name, rep) + [f"  wrote {f}" for f in files]
        if failed:
            code = EXIT_NUMERIC
    _emit(args, payload if len(results) > 1 else results[0][1], lines)
    return code


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", metavar="DIR", help="output directory")
    common.add_argument("--svg", action=argparse.BooleanOptionalAction, default=True,
                        help="write SVG plots (default: on)")
    common.add_argument("--tangents", type=int, metavar="N", help="override the tangent count j")
    common.add_argument("--seed", type=int, help="reserved; the pipeline is deterministic")
    common.add_argument("--format", choices=("text", "json"), default="text", help="stdout format")

    p = argparse.ArgumentParser(prog="curvebeam", description="Curving-beam reflection by tangent decomposition")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("predict", parents=[common], help="run a scenario config")
    s.add_argument("config")
    s.set_defaults(func=cmd_predict)

    s = sub.add_parser("render-field", parents=[common], help="render an Airy field grid to CSV/SVG")
    s.add_argument("config")
    s.set_defaults(func=cmd_render_field)

    s = sub.add_parser("ridge", parents=[common], help="extract and fit the peak ridge of a field CSV")
    s.add_argument("grid")
    s.add_argument("--band", nargs=2, type=float, metavar=("X_LO", "X_HI"), help="x band searched per row")
    s.add_argument("--degree", type=int, default=2)
    s.add_argument("--frame", choices=("x_of_z", "z_of_x"), default="x_of_z")
    s.set_defaults(func=cmd_ridge)

    s = sub.add_parser("compare", parents=[common], help="RMSE and max deviation between two curves")
    s.add_argument("ref", help="polynomial in x, report JSON or x_m,z_m CSV")
    s.add_argument("pred", help="polynomial in x, report JSON or x_m,z_m CSV")
    s.add_argument("--domain", nargs=2, type=float, metavar=("X_LO", "X_HI"))
    s.add_argument("--n", type=int, default=256)
    s.set_defaults(func=cmd_compare)

    s = sub.add_parser("plate", parents=[common], help="phase-plate thickness map for a trajectory")
    s.add_argument("config")
    s.set_defaults(func=cmd_plate)

    s = sub.add_parser("presets", parents=[common], help="list, show or run the shipped scenarios")
    s.add_argument("action", choices=("list", "show", "run"))
    s.add_argument("name", nargs="?")
    s.add_argument("--all", action="store_true", help="run every preset")
    s.add_argument("--jobs", type=int, default=1, help="parallel workers for --all")
    s.set_defaults(func=cmd_presets)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (FieldCSVError, OSError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (DegenerateFitError, AiryRangeError, ArithmeticError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except CurvebeamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
