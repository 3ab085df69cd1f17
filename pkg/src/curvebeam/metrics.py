"""Trajectory comparison metrics, measured as vertical gaps at equal x."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .geometry import PolyCurve

DEFAULT_SAMPLES = 256


@dataclass(frozen=True)
class ComparisonDomain:
    lo: float
    hi: float
    n: int = DEFAULT_SAMPLES

    def __post_init__(self):
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise ContractError(f"comparison domain must be finite, got [{self.lo}, {self.hi}]")
        if not self.lo < self.hi:
            raise ContractError(f"empty comparison domain [{self.lo}, {self.hi}]")
        if self.n < 2:
            raise ContractError(f"need at least 2 samples, got n={self.n}")

    def samples(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.n)

    def as_dict(self) -> dict:
        return {"x_min": self.lo, "x_max": self.hi, "n": self.n}


def _gaps(ref, pred, d: ComparisonDomain) -> np.ndarray:
    xs = d.samples()
    return np.asarray(ref(xs), dtype=float) - np.asarray(pred(xs), dtype=float)


def rmse(ref, pred, d: ComparisonDomain) -> float:
    g = _gaps(ref, pred, d)
    return float(np.sqrt(np.mean(g * g)))


def max_abs_dev(ref, pred, d: ComparisonDomain) -> float:
    return float(np.max(np.abs(_gaps(ref, pred, d))))


def overlap_domain(a: PolyCurve, b: PolyCurve, n: int = DEFAULT_SAMPLES) -> ComparisonDomain:
    """Intersection of two curves' fitted domains."""
    lo = max(a.domain[0], b.domain[0])
    hi = min(a.domain[1], b.domain[1])
    return ComparisonDomain(lo, hi, n)


def compare(ref, pred, d: ComparisonDomain) -> dict:
    return {"domain": d.as_dict(), "rmse_m": rmse(ref, pred, d), "max_abs_dev_m": max_abs_dev(ref, pred, d)}
