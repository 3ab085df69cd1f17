"""Incident-beam trajectories.

Trajectories are stored canonically as z = f(x) on an x-interval.  Curves
that are naturally written in the beam frame, x = g(z), keep their original
closure as well so directions can be formed without dividing by a vanishing
dx/dz.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np

from .errors import ContractError, NonMonotoneSlopeError

C_LIGHT = 2.998e8

# Positions (in units of x0) of the first intensity maxima of Ai on the
# negative axis, i.e. the zeros of Ai'.  Lobe 1 is the main lobe.
AIRY_LOBE_PEAKS = (
    -1.0187929716474711,
    -3.2481975821798365,
    -4.8200992111787356,
    -6.1633073556394865,
    -7.3721772550477702,
)


def wavenumber(f: float) -> float:
    """Free-space wavenumber 2*pi*f/c in rad/m."""
    if not f > 0:
        raise ContractError(f"frequency must be positive, got {f!r}")
    return 2.0 * math.pi * f / C_LIGHT


@dataclass(frozen=True)
class BeamSpec:
    frequency: float
    x0: float
    a: float = 0.0
    x_a: float = 0.2

    def __post_init__(self):
        bad = []
        if not self.frequency > 0:
            bad.append(f"frequency={self.frequency!r} must be > 0")
        if not self.x0 > 0:
            bad.append(f"x0={self.x0!r} must be > 0")
        if not 0 <= self.a < 1:
            bad.append(f"a={self.a!r} must satisfy 0 <= a < 1")
        if not self.x_a > 0:
            bad.append(f"x_a={self.x_a!r} must be > 0")
        if bad:
            raise ContractError("invalid BeamSpec: " + "; ".join(bad))

    @property
    def k(self) -> float:
        return wavenumber(self.frequency)

    @property
    def bending_coefficient(self) -> float:
        """Coefficient of z**2 in the parabolic peak trajectory x(z)."""
        return 1.0 / (4.0 * self.k ** 2 * self.x0 ** 3)


def _as_array_fn(fn):
    def wrapped(u):
        return fn(np.asarray(u, dtype=float))
    return wrapped


@dataclass(frozen=True, eq=False)
class ConvexTrajectory:
    """A plane curve with strictly monotone tangent angle on its domain.

    ``z_of_x`` and ``slope`` (dz/dx, may be infinite) are vectorized
    callables.  For beam-frame curves ``x_of_z``/``dxdz`` are also set and
    ``frame`` is ``"x_of_z"``.  ``analytic`` is False when ``slope`` comes
    from finite differences of tabulated data.
    """

    z_of_x: Callable
    slope: Optional[Callable]
    domain: tuple
    label: str = "peak"
    frame: str = "z_of_x"
    x_of_z: Optional[Callable] = None
    dxdz: Optional[Callable] = None
    expr: str = ""
    bend: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        lo, hi = (float(v) for v in self.domain)
        if not lo < hi:
            raise ContractError(f"trajectory domain {self.domain!r} is empty")
        object.__setattr__(self, "domain", (lo, hi))

    @property
    def analytic(self) -> bool:
        return self.slope is not None

    def z(self, x):
        return self.z_of_x(x)

    def slope_at(self, x, h: Optional[float] = None):
        """dz/dx; central differences (step ``h``) when no analytic slope."""
        x = np.asarray(x, dtype=float)
        if self.slope is not None:
            return self.slope(x)
        if h is None:
            h = (self.domain[1] - self.domain[0]) * 1e-6
        lo, hi = self.domain
        xp = np.minimum(x + h, hi)
        xm = np.maximum(x - h, lo)
        return (self.z_of_x(xp) - self.z_of_x(xm)) / (xp - xm)

    def direction(self, x, h: Optional[float] = None):
        """Unit forward tangent (dx, dz) with dz >= 0, as two arrays."""
        x = np.asarray(x, dtype=float)
        if self.dxdz is not None:
            zz = self.z_of_x(x)
            dx = np.asarray(self.dxdz(zz), dtype=float)
            n = np.hypot(dx, 1.0)
            return dx / n, 1.0 / n
        m = np.asarray(self.slope_at(x, h), dtype=float)
        with np.errstate(invalid="ignore", divide="ignore"):
            inv = np.where(np.isinf(m), 0.0, 1.0 / np.where(m == 0, np.inf, m))
        # dx/dz = 1/m; m == 0 is a horizontal tangent travelling with the bend
        horizontal = m == 0
        n = np.hypot(inv, 1.0)
        dx = np.where(horizontal, math.copysign(1.0, self.bend), inv / n)
        dz = np.where(horizontal, 0.0, 1.0 / n)
        return dx, dz

    def launch_x(self, x, h: Optional[float] = None):
        """x where the tangent at contact ``x`` crosses z = 0."""
        x = np.asarray(x, dtype=float)
        dx, dz = self.direction(x, h)
        zz = self.z_of_x(x)
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(dz > 0, x - zz * dx / np.where(dz > 0, dz, 1.0), x)
        return out

    def angle(self, x, h: Optional[float] = None):
        dx, dz = self.direction(x, h)
        return np.arctan2(dz, dx)

    def samples(self, n: int = 64):
        xs = np.linspace(self.domain[0], self.domain[1], n)
        return xs, self.z_of_x(xs)

    def slope_monotone(self, n: int = 64) -> bool:
        """True when the tangent angle is strictly monotone on ``n`` samples."""
        xs = np.linspace(self.domain[0], self.domain[1], n)
        th = self.angle(xs)
        d = np.diff(th)
        return bool(np.all(d > 0) or np.all(d < 0))

    def shifted(self, offset: float, label: Optional[str] = None) -> "ConvexTrajectory":
        """Pure translation by ``offset`` along x."""
        f, s = self.z_of_x, self.slope
        lo, hi = self.domain
        kw = dict(
            z_of_x=lambda x: f(np.asarray(x, dtype=float) - offset),
            slope=None if s is None else (lambda x: s(np.asarray(x, dtype=float) - offset)),
            domain=(lo + offset, hi + offset),
            label=label or self.label,
            meta={**self.meta, "shift": self.meta.get("shift", 0.0) + offset},
        )
        if self.x_of_z is not None:
            g = self.x_of_z
            kw["x_of_z"] = lambda z: g(z) + offset
        return replace(self, **kw)


@dataclass(frozen=True)
class TrajectorySet:
    trajectories: tuple

    def __post_init__(self):
        object.__setattr__(self, "trajectories", tuple(self.trajectories))
        labels = [t.label for t in self.trajectories]
        dupes = sorted({lab for lab in labels if labels.count(lab) > 1})
        if dupes:
            raise ContractError(f"duplicate trajectory labels: {dupes}")

    def __iter__(self):
        return iter(self.trajectories)

    def __len__(self):
        return len(self.trajectories)

    def __getitem__(self, i):
        return self.trajectories[i]


# --- constructors -----------------------------------------------------------

def _check_monotone(traj: ConvexTrajectory) -> ConvexTrajectory:
    if not traj.slope_monotone(64):
        raise NonMonotoneSlopeError(
            f"trajectory {traj.label!r} ({traj.expr or 'table'}) has non-monotone slope on {traj.domain}")
    return traj


def poly_z_of_x(coeffs, domain, label="peak", check=True) -> ConvexTrajectory:
    """z = sum c_k x**k on an x-interval."""
    c = np.asarray(coeffs, dtype=float)
    dc = np.polynomial.polynomial.polyder(c) if len(c) > 1 else np.zeros(1)
    mid = 0.5 * (domain[0] + domain[1])
    bend = float(np.sign(np.polynomial.polynomial.polyval(mid, dc)) or 1.0)
    traj = ConvexTrajectory(
        z_of_x=_as_array_fn(lambda x: np.polynomial.polynomial.polyval(x, c)),
        slope=_as_array_fn(lambda x: np.polynomial.polynomial.polyval(x, dc)),
        domain=tuple(domain), label=label, frame="z_of_x",
        expr=_format_poly(c, "x"), bend=bend,
    )
    return _check_monotone(traj) if check else traj


def sqrt_form(c: float, domain=(0.0, 1.0), label="peak", check=True) -> ConvexTrajectory:
    """z = c*sqrt(x) for x >= 0."""
    if domain[0] < 0:
        raise ContractError("sqrt trajectory requires a domain with x >= 0")

    def z(x):
        return c * np.sqrt(x)

    def s(x):
        with np.errstate(divide="ignore"):
            return np.where(x > 0, 0.5 * c / np.sqrt(np.where(x > 0, x, 1.0)), math.copysign(np.inf, c))

    def x_of_z(zz):
        return (np.asarray(zz, dtype=float) / c) ** 2

    def dxdz(zz):
        return 2.0 * np.asarray(zz, dtype=float) / c ** 2

    traj = ConvexTrajectory(
        z_of_x=_as_array_fn(z), slope=_as_array_fn(s), domain=tuple(domain), label=label,
        frame="z_of_x", x_of_z=x_of_z, dxdz=dxdz, expr=f"{c:g}*sqrt(x)",
        bend=1.0,
    )
    return _check_monotone(traj) if check else traj


def poly_x_of_z(coeffs, z_domain=(0.0, 2.0), label="peak", check=True) -> ConvexTrajectory:
    """Beam-frame curve x = sum c_k z**k on a z-interval where it is monotone."""
    c = np.asarray(coeffs, dtype=float)
    c = np.trim_zeros(c, "b") if np.any(c) else np.zeros(1)
    if len(c) < 2:
        raise ContractError("x(z) must depend on z")
    dc = np.polynomial.polynomial.polyder(c)
    zlo, zhi = (float(v) for v in z_domain)
    if not zlo < zhi:
        raise ContractError(f"empty z-domain {z_domain!r}")
    zz = np.linspace(zlo, zhi, 257)
    deriv = np.polynomial.polynomial.polyval(zz, dc)
    interior = deriv[1:-1]
    if np.all(interior > 0) and np.all(deriv >= 0):
        sigma = 1.0
    elif np.all(interior < 0) and np.all(deriv <= 0):
        sigma = -1.0
    else:
        raise ContractError(f"x(z)={_format_poly(c, 'z')} is not monotone on z in {z_domain}")

    def g(z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=float), c)

    def gp(z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=float), dc)

    xa, xb = float(g(zlo)), float(g(zhi))
    domain = (min(xa, xb), max(xa, xb))
    inv = _make_inverse(c, g, (zlo, zhi), sigma)

    def slope(x):
        d = gp(inv(x))
        with np.errstate(divide="ignore"):
            return np.where(d == 0, np.inf, 1.0 / np.where(d == 0, 1.0, d))

    traj = ConvexTrajectory(
        z_of_x=inv, slope=_as_array_fn(slope), domain=domain, label=label, frame="x_of_z",
        x_of_z=g, dxdz=gp, expr=_format_poly(c, "z"), bend=sigma,
        meta={"z_domain": (zlo, zhi)},
    )
    return _check_monotone(traj) if check else traj


def _make_inverse(c, g, zdom, sigma):
    zlo, zhi = zdom
    if len(c) == 3 and c[2] != 0.0:
        c0, c1, c2 = c

        def inv(x):
            x = np.asarray(x, dtype=float)
            disc = np.maximum(c1 * c1 - 4.0 * c2 * (c0 - x), 0.0)
            root = sigma * np.sqrt(disc)
            den = c1 + root
            with np.errstate(invalid="ignore", divide="ignore"):
                stable = 2.0 * (x - c0) / den
                plain = (-c1 + root) / (2.0 * c2)
            use_stable = (np.sign(c1) == sigma) & (den != 0)
            return np.where(use_stable, stable, plain)
        return inv
    if len(c) == 2:
        return lambda x: (np.asarray(x, dtype=float) - c[0]) / c[1]

    def inv(x):
        x = np.asarray(x, dtype=float)
        a = np.full_like(x, zlo)
        b = np.full_like(x, zhi)
        for _ in range(80):
            m = 0.5 * (a + b)
            below = sigma * (g(m) - x) < 0
            a = np.where(below, m, a)
            b = np.where(below, b, m)
        return 0.5 * (a + b)
    return inv


def sampled_trajectory(xs, zs, label="table", check=True) -> ConvexTrajectory:
    """Tabulated z(x) with cubic-spline interpolation and numeric slopes."""
    from scipy.interpolate import CubicSpline

    xs = np.asarray(xs, dtype=float)
    zs = np.asarray(zs, dtype=float)
    if xs.ndim != 1 or xs.shape != zs.shape or len(xs) < 4:
        raise ContractError("tabulated trajectory needs >= 4 matching (x, z) samples")
    if np.any(np.diff(xs) <= 0):
        raise ContractError("tabulated trajectory x must be strictly increasing")
    spline = CubicSpline(xs, zs)
    mid_slope = float(spline(0.5 * (xs[0] + xs[-1]), 1))
    traj = ConvexTrajectory(
        z_of_x=lambda x: spline(np.asarray(x, dtype=float)), slope=None,
        domain=(float(xs[0]), float(xs[-1])), label=label, frame="z_of_x",
        expr="table", bend=math.copysign(1.0, mid_slope) if mid_slope else 1.0,
    )
    return _check_monotone(traj) if check else traj


def airy_peak_trajectory(spec: BeamSpec, z_max: float = 2.0, label: str = "peak") -> ConvexTrajectory:
    """Parabolic trajectory x(z) = z**2 / (4 k**2 x0**3) for z >= 0."""
    return poly_x_of_z([0.0, 0.0, spec.bending_coefficient], (0.0, z_max), label=label)


def airy_lobe_trajectory(spec: BeamSpec, lobe: int = 1, z_max: float = 2.0,
                         label: Optional[str] = None) -> ConvexTrajectory:
    """Intensity-maximum trajectory of Airy lobe ``lobe`` (1 = main lobe).

    The lobe rides the same parabola as :func:`airy_peak_trajectory`, offset
    transversely by ``x0`` times the lobe's maximum of Ai.
    """
    if not 1 <= lobe <= len(AIRY_LOBE_PEAKS):
        raise ContractError(f"lobe must be in 1..{len(AIRY_LOBE_PEAKS)}")
    offset = spec.x0 * AIRY_LOBE_PEAKS[lobe - 1]
    traj = poly_x_of_z([offset, 0.0, spec.bending_coefficient], (0.0, z_max),
                       label=label or f"lobe{lobe}")
    return replace(traj, meta={**traj.meta, "lobe": lobe, "lobe_offset": offset})


def lobe_edges(traj: ConvexTrajectory, offset: float):
    """Left and right edge trajectories, translated by -offset and +offset in x."""
    if not offset >= 0:
        raise ContractError(f"edge offset must be >= 0, got {offset!r}")
    return (traj.shifted(-offset, f"{traj.label}-left"),
            traj.shifted(offset, f"{traj.label}-right"))


# --- expression grammar -----------------------------------------------------

_UNUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?"
_SQRT_RE = re.compile(rf"^\s*(?:([+-]?{_UNUM})\s*\*\s*)?sqrt\(\s*x\s*\)\s*$")
_TERM_RE = re.compile(rf"^(?P<coef>{_UNUM})?\*?(?:(?P<var>[xz])(?:\^(?P<pow>\d+))?)?$")


def parse_polynomial(expr: str):
    """Parse ``"0.1911*z^2 + 0.1430*z - 0.0256"`` into (variable, ascending coeffs)."""
    s = expr.replace("**", "^").replace(" ", "")
    if not s:
        raise ContractError("empty expression")
    if s[0] not in "+-":
        s = "+" + s
    parts = [p for p in re.split(r"(?<![eE])(?=[+-])", s) if p]
    if any(len(p) < 2 for p in parts):
        raise ContractError(f"cannot parse polynomial {expr!r}")
    var = None
    coeffs = {}
    for part in parts:
        sign = -1.0 if part[0] == "-" else 1.0
        m = _TERM_RE.match(part[1:])
        if not m or (m.group("coef") is None and m.group("var") is None):
            raise ContractError(f"unsupported term {part!r} in {expr!r}")
        coef = float(m.group("coef")) if m.group("coef") else 1.0
        v = m.group("var")
        power = 0
        if v:
            if var is not None and v != var:
                raise ContractError(f"mixed variables in {expr!r}")
            var = v
            power = int(m.group("pow") or 1)
        coeffs[power] = coeffs.get(power, 0.0) + sign * coef
    deg = max(coeffs)
    return var or "x", [coeffs.get(k, 0.0) for k in range(deg + 1)]


def _format_poly(c, var):
    terms = []
    for k in range(len(c) - 1, -1, -1):
        if c[k] == 0 and len(c) > 1:
            continue
        mono = "" if k == 0 else (var if k == 1 else f"{var}^{k}")
        terms.append(f"{c[k]:+g}" + (f"*{mono}" if mono else ""))
    return " ".join(terms).lstrip("+")


def generic_trajectory(expr: str, domain=None, label: str = "peak", frame: Optional[str] = None):
    """Build a trajectory from one of the supported analytic forms.

    Forms: ``c*sqrt(x)``; a polynomial in ``x`` (z of x); a polynomial in
    ``z`` (x of z, beam frame).  ``domain`` is an x-interval for z(x) forms
    and a z-interval for x(z) forms.
    """
    m = _SQRT_RE.match(expr)
    if m:
        c = float(m.group(1)) if m.group(1) else 1.0
        return sqrt_form(c, tuple(domain) if domain is not None else (0.0, 1.0), label=label)
    var, coeffs = parse_polynomial(expr)
    if frame is not None:
        expected = "x" if frame == "z_of_x" else "z"
        if var != expected:
            raise ContractError(f"expression {expr!r} is in {var}, frame {frame!r} expects {expected}")
    if var == "z":
        return poly_x_of_z(coeffs, tuple(domain) if domain is not None else (0.0, 2.0), label=label)
    return poly_z_of_x(coeffs, tuple(domain) if domain is not None else (0.0, 1.0), label=label)


def parse_poly_curve(expr: str, domain=(-math.inf, math.inf)):
    """Parse a reference polynomial into a :class:`PolyCurve`."""
    from .geometry import PolyCurve

    var, coeffs = parse_polynomial(expr)
    return PolyCurve(tuple(coeffs), domain, "z_of_x" if var == "x" else "x_of_z")
