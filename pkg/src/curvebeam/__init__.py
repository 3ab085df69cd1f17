"""Reflection of curving beams by tangent decomposition."""
__version__ = "0.1.0"

from .beams import BeamSpec, ConvexTrajectory, TrajectorySet, airy_lobe_trajectory, airy_peak_trajectory, generic_trajectory
from .envelope import Prediction, Scenario, Thresholds, predict
from .geometry import Direction2, Point2, PolyCurve, Ray
from .kernels import BACKEND
from .reflectors import CircularArc, PlanarSegment, SampledProfile

__all__ = [
    "BACKEND", "BeamSpec", "CircularArc", "ConvexTrajectory", "Direction2", "PlanarSegment", "Point2",
    "PolyCurve", "Prediction", "Ray", "SampledProfile", "Scenario", "Thresholds", "TrajectorySet",
    "airy_lobe_trajectory", "airy_peak_trajectory", "generic_trajectory", "predict",
]
