"""Finite-energy Airy beam field, field grids and peak-ridge extraction."""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from . import kernels
from .beams import BeamSpec
from .errors import AiryRangeError, ContractError, FieldCSVError
from .geometry import Point2, PolyCurve, fit_polynomial

AIRY_MAX_ABS = 40.0
SPACING_RTOL = 1e-6
CSV_HEADER = ("x_m", "z_m", "magnitude")


def _checked(w):
    w = np.asarray(w, dtype=complex)
    if not np.all(np.isfinite(w)):
        raise AiryRangeError("non-finite Airy argument")
    if np.any(np.abs(w) > AIRY_MAX_ABS):
        raise AiryRangeError(f"|w| exceeds the supported range {AIRY_MAX_ABS}: max |w| = {np.abs(w).max():.4g}")
    return w


def _scalar(out, w):
    # the compiled kernels hand 0-d input back as shape (1,)
    return complex(np.asarray(out).reshape(-1)[0]) if np.ndim(w) == 0 else out


def airy_ai(w):
    """Airy function Ai for real or complex ``w`` with |w| <= 40."""
    wa = _checked(w)
    return _scalar(kernels.airy_ai(wa), w)


def airy_ai_series(w):
    """Maclaurin-series route alone (accurate for moderate |w|)."""
    wa = np.asarray(w, dtype=complex)
    return _scalar(kernels.airy_series(wa), w)


def airy_ai_asymptotic(w):
    """Large-|w| asymptotic route alone."""
    wa = np.asarray(w, dtype=complex)
    if np.any(wa == 0):
        raise AiryRangeError("asymptotic form undefined at w = 0")
    return _scalar(kernels.airy_asymptotic(wa), w)


@dataclass(frozen=True)
class NormalizedCoords:
    xi: float
    s: float

    def __post_init__(self):
        if not (math.isfinite(self.xi) and math.isfinite(self.s)):
            raise ContractError("normalized coordinates must be finite")

    @classmethod
    def from_physical(cls, spec: BeamSpec, x: float, z: float) -> "NormalizedCoords":
        return cls(z / (spec.k * spec.x0 ** 2), x / spec.x0)


def airy_field(xi, s, a: float = 0.0):
    """Finite-energy Airy field at normalized (xi, s); broadcasts over arrays."""
    if not 0.0 <= a < 1.0:
        raise ContractError(f"truncation factor must lie in [0, 1), got {a!r}")
    xi = np.asarray(xi, dtype=float)
    s = np.asarray(s, dtype=float)
    w = s - (xi / 2.0) ** 2 + 1j * a * xi
    phase = a * s - a * xi ** 2 / 2.0 - 1j * xi ** 3 / 12.0 + 1j * a * a * xi / 2.0 + 1j * s * xi / 2.0
    out = airy_ai(w) * np.exp(phase)
    return complex(out) if np.ndim(out) == 0 else out


def field_at(coords: NormalizedCoords, a: float = 0.0) -> complex:
    return airy_field(coords.xi, coords.s, a)


def _uniform_axis(v, name):
    v = np.asarray(v, dtype=float)
    if v.ndim != 1 or len(v) == 0:
        raise ContractError(f"{name} axis must be a non-empty 1-D array")
    if len(v) > 1:
        d = np.diff(v)
        if not np.all(d > 0):
            raise ContractError(f"{name} axis must be strictly increasing")
        if np.max(np.abs(d - d.mean())) > SPACING_RTOL * abs(d.mean()):
            raise ContractError(f"{name} axis must be uniformly spaced")
    return v


@dataclass(frozen=True, eq=False)
class FieldGrid:
    """Magnitude samples on a uniform grid; ``magnitude[iz, ix]``."""

    x: np.ndarray
    z: np.ndarray
    magnitude: np.ndarray
    complex_field: Optional[np.ndarray] = field(default=None, repr=False)
    provenance: str = "rendered"

    def __post_init__(self):
        x = _uniform_axis(self.x, "x")
        z = _uniform_axis(self.z, "z")
        m = np.asarray(self.magnitude, dtype=float)
        if m.shape != (len(z), len(x)):
            raise ContractError(f"magnitude shape {m.shape} does not match axes ({len(z)}, {len(x)})")
        if self.provenance not in ("rendered", "measured"):
            raise ContractError(f"unknown provenance {self.provenance!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "magnitude", m)

    @property
    def size(self) -> int:
        return self.magnitude.size

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0]) if len(self.x) > 1 else 0.0

    @property
    def dz(self) -> float:
        return float(self.z[1] - self.z[0]) if len(self.z) > 1 else 0.0

    def same_as(self, other: "FieldGrid") -> bool:
        return (np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)
                and np.array_equal(self.magnitude, other.magnitude))


def render_field_grid(spec: BeamSpec, x_axis, z_axis, keep_complex: bool = False) -> FieldGrid:
    """|E| of the Airy beam described by ``spec`` on the given axes (meters)."""
    x = np.asarray(x_axis, dtype=float)
    z = np.asarray(z_axis, dtype=float)
    X, Z = np.meshgrid(x, z)
    E = airy_field(Z / (spec.k * spec.x0 ** 2), X / spec.x0, spec.a)
    E = np.asarray(E).reshape(len(z), len(x))
    return FieldGrid(x, z, np.abs(E), E if keep_complex else None, "rendered")


def axis(lo: float, hi: float, step: float) -> np.ndarray:
    """Uniform axis from lo to hi inclusive (hi snapped to the step grid)."""
    if not step > 0 or not hi >= lo:
        raise ContractError(f"bad axis [{lo}, {hi}] step {step}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return lo + step * np.arange(n)


Band = Union[None, tuple, Callable]


def _band_at(band: Band, z: float):
    if band is None:
        return -math.inf, math.inf
    if callable(band):
        return band(z)
    return band


def extract_ridge(grid: FieldGrid, band: Band = None):
    """Per-z peak of the magnitude inside ``band`` with 3-point parabolic refinement.

    ``band`` is None (whole row), a fixed (x_lo, x_hi) pair or a callable
    z -> (x_lo, x_hi).  Returns ``(points, skipped)`` where ``skipped``
    lists (z, reason) for rows without a usable maximum.
    """
    pts, skipped = [], []
    x = grid.x
    for iz, z in enumerate(grid.z):
        lo, hi = _band_at(band, float(z))
        idx = np.nonzero((x >= lo) & (x <= hi))[0]
        if len(idx) == 0:
            skipped.append((float(z), "empty band"))
            continue
        row = grid.magnitude[iz, idx]
        if not np.all(np.isfinite(row)):
            skipped.append((float(z), "non-finite samples"))
            continue
        k = int(np.argmax(row))
        peak = row[k]
        if np.count_nonzero(row == peak) > 1:
            skipped.append((float(z), "no unique maximum"))
            continue
        xk = float(x[idx[k]])
        if 0 < k < len(row) - 1:
            y0, y1, y2 = row[k - 1], row[k], row[k + 1]
            den = y0 - 2 * y1 + y2
            if den < 0:
                xk += 0.5 * (y0 - y2) / den * grid.dx
        pts.append(Point2(xk, float(z)))
    return pts, skipped


def fit_ridge(points, degree: int = 2, frame: str = "x_of_z") -> PolyCurve:
    """Polynomial through ridge points; x(z) by default, as measured beams are."""
    return fit_polynomial([(p[0], p[1]) for p in points], degree, frame=frame)


def _fmt(v: float) -> str:
    return repr(float(v))


def field_csv_text(grid: FieldGrid) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for iz, z in enumerate(grid.z):
        for ix, x in enumerate(grid.x):
            w.writerow((_fmt(x), _fmt(z), _fmt(grid.magnitude[iz, ix])))
    return buf.getvalue()


def export_field_csv(grid: FieldGrid, path) -> None:
    """Write ``x_m,z_m,magnitude`` rows, z outer, atomically."""
    from .report import atomic_write_text
    atomic_write_text(path, field_csv_text(grid))


def _axis_from(values, rows_of, name, path):
    v = np.array(sorted(values))
    if len(v) > 1:
        d = np.diff(v)
        step = float(np.median(d))
        bad = np.nonzero(np.abs(d - step) > SPACING_RTOL * abs(step))[0]
        if len(bad):
            val = v[bad[0] + 1]
            raise FieldCSVError(f"{path}: irregular {name} spacing at {name}={val!r} "
                                f"(rows {', '.join(map(str, rows_of[val][:5]))})")
    return v


def load_field_csv(path, provenance: str = "measured") -> FieldGrid:
    """Read a FieldGrid CSV; row order is irrelevant."""
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise FieldCSVError(f"{path}: empty file")
    if tuple(h.strip() for h in rows[0]) != CSV_HEADER:
        raise FieldCSVError(f"{path}: row 1: expected header {','.join(CSV_HEADER)}, got {','.join(rows[0])}")
    data = {}
    xrows, zrows = {}, {}
    for i, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            raise FieldCSVError(f"{path}: row {i}: expected 3 fields, got {len(row)}")
        try:
            x, z, m = (float(c) for c in row)
        except ValueError:
            raise FieldCSVError(f"{path}: row {i}: non-numeric cell") from None
        if not (math.isfinite(x) and math.isfinite(z) and math.isfinite(m)):
            raise FieldCSVError(f"{path}: row {i}: non-finite value")
        if (x, z) in data:
            raise FieldCSVError(f"{path}: row {i}: duplicate coordinate ({x!r}, {z!r}), first at row {data[(x, z)][1]}")
        data[(x, z)] = (m, i)
        xrows.setdefault(x, []).append(i)
        zrows.setdefault(z, []).append(i)
    if not data:
        raise FieldCSVError(f"{path}: no data rows")
    xs = _axis_from(xrows.keys(), xrows, "x", path)
    zs = _axis_from(zrows.keys(), zrows, "z", path)
    if len(data) != len(xs) * len(zs):
        raise FieldCSVError(f"{path}: incomplete grid, {len(data)} samples for {len(zs)}x{len(xs)} axes")
    xi = {v: k for k, v in enumerate(xs)}
    zi = {v: k for k, v in enumerate(zs)}
    mag = np.empty((len(zs), len(xs)))
    for (x, z), (m, _) in data.items():
        mag[zi[z], xi[x]] = m
    return FieldGrid(xs, zs, mag, None, provenance)
