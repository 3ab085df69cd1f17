"""Compare the compiled and numpy kernel backends.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall time per kernel for each backend, the speedup, and
the largest relative disagreement between the two.
"""
import argparse
import timeit

import numpy as np

from curvebeam import _pykernels

try:
    from curvebeam import _ckernels
except ImportError:
    _ckernels = None


def airy_case():
    # the field evaluation region: negative real axis plus a damped strip
    re = np.linspace(-30.0, 10.0, 400)
    im = np.linspace(-1.0, 1.0, 50)
    return (re[None, :] + 1j * im[:, None]).ravel()


def hits_case(n_rays=2000):
    rng = np.random.default_rng(7)
    xs = np.linspace(-0.05, 0.10, 400)
    zs = 0.15 - xs + 0.004 * np.sin(60 * xs)
    ox = rng.uniform(-0.1, 0.0, n_rays)
    oz = np.zeros(n_rays)
    ang = rng.uniform(-0.3, 0.6, n_rays)
    return ox, oz, np.sin(ang), np.cos(ang), xs, zs


def best(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def rel_diff(a, b):
    a, b = np.asarray(a), np.asarray(b)
    ok = np.isfinite(a) & np.isfinite(b)
    if not np.array_equal(np.isfinite(a), np.isfinite(b)):
        return float("inf")
    scale = np.maximum(np.abs(a[ok]), 1e-300)
    return float(np.max(np.abs(a[ok] - b[ok]) / scale)) if ok.any() else 0.0


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)

    w = airy_case()
    hits = hits_case()
    cases = [
        ("airy_ai (20k complex points)", lambda m: m.airy_ai(w)),
        ("sampled_hits (2k rays, 400-pt profile)", lambda m: m.sampled_hits(*hits)),
    ]
    print(f"{'kernel':42s} {'python':>10s} {'cython':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, call in cases:
        t_py = best(lambda: call(_pykernels), args.repeat)
        if _ckernels is None:
            print(f"{name:42s} {t_py * 1e3:8.2f}ms {'n/a':>10s}")
            continue
        t_c = best(lambda: call(_ckernels), args.repeat)
        diff = rel_diff(call(_pykernels), call(_ckernels))
        print(f"{name:42s} {t_py * 1e3:8.2f}ms {t_c * 1e3:8.2f}ms {t_py / t_c:7.1f}x {diff:13.2e}")
    if _ckernels is None:
        print("compiled extension not built; only the numpy backend was timed")


if __name__ == "__main__":
    main()
