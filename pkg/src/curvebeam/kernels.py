"""Backend selection for the hot kernels.

The compiled extension is used when it imports; otherwise the numpy
reference versions are used.  Set ``CURVEBEAM_FORCE_PYTHON=1`` to force the
fallback.
"""
import os

from . import _pykernels

if os.environ.get("CURVEBEAM_FORCE_PYTHON", "") not in ("", "0"):
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

airy_ai = _impl.airy_ai
airy_series = _impl.airy_series
airy_asymptotic = _impl.airy_asymptotic
airy_taylor = _impl.airy_taylor
airy_walk = _impl.airy_walk
sampled_hits = _impl.sampled_hits

__all__ = ["BACKEND", "airy_ai", "airy_series", "airy_asymptotic", "airy_taylor", "airy_walk",
           "sampled_hits"]
