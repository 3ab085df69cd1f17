# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels``; same algorithms, scalar loops."""
import numpy as np
cimport numpy as cnp
from libc.math cimport ceil, fabs, hypot, sqrt, M_PI, NAN, INFINITY

cnp.import_array()

cdef extern from "complex.h" nogil:
    double complex csqrt(double complex)
    double complex cexp(double complex)
    double complex ccos(double complex)
    double complex csin(double complex)
    double cabs(double complex)
    double carg(double complex)
    double creal(double complex)
    double cimag(double complex)

DEF MAX_SERIES_TERMS = 250
DEF MAX_ASYM_TERMS = 60
DEF N_U = 122
DEF TAYLOR_TERMS_MAX = 64

cdef double AI0 = 0.355028053887817239260063186004183176
cdef double AIP0 = 0.258819403792806798405183560189203963
cdef double R_ASYM = 7.0
cdef double RE_ZETA_TAYLOR = 3.0
cdef double R_WALK = 4.0
cdef double ANCHOR_SHIFT = 12.0
cdef double TAYLOR_STEP = 0.5
cdef int TAYLOR_TERMS = 40

cdef double U[N_U]
cdef double V[N_U]


cdef double INV_PAIR[TAYLOR_TERMS_MAX]


cdef void _init_coeffs():
    cdef int k
    for k in range(TAYLOR_TERMS_MAX):
        INV_PAIR[k] = 1.0 / ((k + 2) * (k + 1))
    U[0] = 1.0
    V[0] = 1.0
    for k in range(1, N_U):
        U[k] = U[k - 1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k)
        V[k] = -(6.0 * k + 1) / (6.0 * k - 1) * U[k]


_init_coeffs()


cdef inline double _l1(double complex z) nogil:
    return fabs(creal(z)) + fabs(cimag(z))


cdef double complex _series(double complex w) nogil:
    cdef double complex w3 = w * w * w
    cdef double complex t = 1.0, u = w, f = 1.0, g = w
    cdef int k
    for k in range(1, MAX_SERIES_TERMS):
        t = t * w3 * (1.0 / ((3 * k - 1) * (3 * k)))
        u = u * w3 * (1.0 / ((3 * k) * (3 * k + 1)))
        f = f + t
        g = g + u
        if k > 2 and _l1(t) + _l1(u) <= 1e-17 * (_l1(f) + _l1(g)):
            break
    return AI0 * f - AIP0 * g


cdef void _asym_exp(double complex w, double complex* ai, double complex* aip) nogil:
    cdef double complex zeta = (2.0 / 3.0) * w * csqrt(w)
    cdef double complex s = 0, sd = 0, zk = 1
    cdef double prev = INFINITY, mag, sgn
    cdef int k
    for k in range(MAX_ASYM_TERMS):
        mag = U[k] / cabs(zk)
        if mag > prev:
            break
        sgn = -1.0 if k % 2 else 1.0
        s = s + sgn * U[k] / zk
        sd = sd + sgn * V[k] / zk
        prev = mag
        if mag < 1e-17 * cabs(s):
            break
        zk = zk * zeta
    cdef double complex pre = cexp(-zeta) / (2.0 * sqrt(M_PI))
    cdef double complex q = csqrt(csqrt(w))
    ai[0] = pre * s / q
    aip[0] = -pre * q * sd


cdef double complex _asym_osc(double complex w) nogil:
    cdef double complex z = -w
    cdef double complex zeta = (2.0 / 3.0) * z * csqrt(z)
    cdef double complex P = 0, Q = 0, z2k = 1, a, b
    cdef double complex inv2 = 1.0 / (zeta * zeta)
    cdef double prev = INFINITY, mag, sgn
    cdef int k
    for k in range(MAX_ASYM_TERMS):
        sgn = -1.0 if k % 2 else 1.0
        a = sgn * U[2 * k] * z2k
        b = sgn * U[2 * k + 1] * z2k / zeta
        mag = cabs(a) + cabs(b)
        if mag > prev:
            break
        P = P + a
        Q = Q + b
        prev = mag
        if mag < 1e-17 * (cabs(P) + cabs(Q)):
            break
        z2k = z2k * inv2
    cdef double complex ph = zeta - M_PI / 4.0
    return (ccos(ph) * P + csin(ph) * Q) / (sqrt(M_PI) * csqrt(csqrt(z)))


cdef double complex _asymptotic(double complex w) nogil:
    cdef double complex ai, aip
    if fabs(carg(w)) <= 2.0 * M_PI / 3.0:
        _asym_exp(w, &ai, &aip)
        return ai
    return _asym_osc(w)


cdef double complex _walk(double complex cur, double complex y, double complex yp,
                          double complex h, int nsteps) nogil:
    cdef double complex ynew, ypnew, a_nm1, a_n, a_np1, a_np2, hp
    cdef double tiny
    cdef int step, n, quiet
    for step in range(nsteps):
        a_nm1 = y
        a_n = yp
        a_np1 = cur * y * 0.5
        ynew = y + h * yp + h * h * a_np1
        ypnew = yp + 2.0 * h * a_np1
        hp = h * h
        quiet = 0
        for n in range(1, TAYLOR_TERMS):
            a_np2 = (cur * a_n + a_nm1) * INV_PAIR[n]
            ypnew = ypnew + (n + 2) * a_np2 * hp
            hp = hp * h
            ynew = ynew + a_np2 * hp
            a_nm1 = a_n
            a_n = a_np1
            a_np1 = a_np2
            # the recurrence mixes three terms, so stop only after three negligible ones
            tiny = 1e-18 * (_l1(ynew) + _l1(ypnew))
            quiet = quiet + 1 if (n + 2) * _l1(a_np2) * _l1(hp) <= tiny else 0
            if quiet == 3:
                break
        y = ynew
        yp = ypnew
        cur = cur + h
    return y


cdef double complex _taylor(double complex w) nogil:
    cdef double complex y, yp
    _asym_exp(w + ANCHOR_SHIFT, &y, &yp)
    return _walk(w + ANCHOR_SHIFT, y, yp, -TAYLOR_STEP, <int>(ANCHOR_SHIFT / TAYLOR_STEP + 0.5))


cdef double complex _walk0(double complex w) nogil:
    cdef int m = <int>ceil(cabs(w) / TAYLOR_STEP)
    if m < 1:
        m = 1
    return _walk(0.0, AI0, -AIP0, w / m, m)


cdef double complex _airy(double complex w) nogil:
    if cabs(w) > R_ASYM:
        return _asymptotic(w)
    if creal((2.0 / 3.0) * w * csqrt(w)) > RE_ZETA_TAYLOR:
        return _taylor(w)
    if cabs(w) > R_WALK:
        return _walk0(w)
    return _series(w)


def airy_ai(w):
    """Ai on an array of complex arguments."""
    arr = np.ascontiguousarray(np.asarray(w, dtype=np.complex128))
    flat = arr.ravel()
    out = np.empty_like(flat)
    cdef double complex[::1] src = flat
    cdef double complex[::1] dst = out
    cdef Py_ssize_t i, n = flat.shape[0]
    with nogil:
        for i in range(n):
            dst[i] = _airy(src[i])
    return out.reshape(arr.shape)


def airy_series(w):
    arr = np.ascontiguousarray(np.asarray(w, dtype=np.complex128))
    flat = arr.ravel()
    out = np.empty_like(flat)
    cdef double complex[::1] src = flat
    cdef double complex[::1] dst = out
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        dst[i] = _series(src[i])
    return out.reshape(arr.shape)


def airy_asymptotic(w):
    arr = np.ascontiguousarray(np.asarray(w, dtype=np.complex128))
    flat = arr.ravel()
    out = np.empty_like(flat)
    cdef double complex[::1] src = flat
    cdef double complex[::1] dst = out
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        dst[i] = _asymptotic(src[i])
    return out.reshape(arr.shape)


def airy_walk(w):
    arr = np.ascontiguousarray(np.asarray(w, dtype=np.complex128))
    flat = arr.ravel()
    out = np.empty_like(flat)
    cdef double complex[::1] src = flat
    cdef double complex[::1] dst = out
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        dst[i] = _walk0(src[i])
    return out.reshape(arr.shape)


def airy_taylor(w):
    arr = np.ascontiguousarray(np.asarray(w, dtype=np.complex128))
    flat = arr.ravel()
    out = np.empty_like(flat)
    cdef double complex[::1] src = flat
    cdef double complex[::1] dst = out
    cdef Py_ssize_t i
    for i in range(flat.shape[0]):
        dst[i] = _taylor(src[i])
    return out.reshape(arr.shape)


cdef inline double _interp(const double[::1] xs, const double[::1] zs, double x) nogil:
    cdef Py_ssize_t lo = 0, hi = xs.shape[0] - 1, mid
    # largest k with xs[k] <= x, clipped to [0, n-2]
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xs[mid] <= x:
            lo = mid
        else:
            hi = mid
    return zs[lo] + (x - xs[lo]) / (xs[lo + 1] - xs[lo]) * (zs[lo + 1] - zs[lo])


cdef inline double _clip(double x, double lo, double hi) nogil:
    return lo if x < lo else (hi if x > hi else x)


def sampled_hits(ox, oz, dx, dz, xs, zs, double t_min=1e-9, int n_brackets=256,
                 double tol=1e-9, int max_iter=200):
    """Smallest ray parameter t > t_min where each ray meets the polyline, NaN on miss."""
    cdef const double[::1] cox = np.ascontiguousarray(np.atleast_1d(ox), dtype=np.float64)
    cdef const double[::1] coz = np.ascontiguousarray(np.atleast_1d(oz), dtype=np.float64)
    cdef const double[::1] cdx = np.ascontiguousarray(np.atleast_1d(dx), dtype=np.float64)
    cdef const double[::1] cdz = np.ascontiguousarray(np.atleast_1d(dz), dtype=np.float64)
    cdef const double[::1] cxs = np.ascontiguousarray(xs, dtype=np.float64)
    cdef const double[::1] czs = np.ascontiguousarray(zs, dtype=np.float64)
    out = np.full(cox.shape[0], np.nan)
    cdef double[::1] res = out
    cdef Py_ssize_t i, k, n = cox.shape[0]
    cdef double x_lo = cxs[0], x_hi = cxs[cxs.shape[0] - 1]
    cdef double speed, t, ta, tb, lo, hi, a, b, ga, gm, m, tk, gk, tprev, gprev
    cdef int it
    cdef bint found
    with nogil:
        for i in range(n):
            speed = hypot(cdx[i], cdz[i])
            if fabs(cdx[i]) < 1e-15 * speed:
                if x_lo <= cox[i] <= x_hi and cdz[i] != 0.0:
                    t = (_interp(cxs, czs, cox[i]) - coz[i]) / cdz[i]
                    if t > t_min:
                        res[i] = t
                continue
            ta = (x_lo - cox[i]) / cdx[i]
            tb = (x_hi - cox[i]) / cdx[i]
            lo = ta if ta < tb else tb
            if lo < t_min:
                lo = t_min
            hi = tb if ta < tb else ta
            if hi < lo:
                continue
            found = False
            tprev = lo
            gprev = coz[i] + lo * cdz[i] - _interp(cxs, czs, _clip(cox[i] + lo * cdx[i], x_lo, x_hi))
            if gprev == 0.0:
                res[i] = lo
                continue
            for k in range(1, n_brackets + 1):
                tk = lo + (hi - lo) * k / n_brackets
                gk = coz[i] + tk * cdz[i] - _interp(cxs, czs, _clip(cox[i] + tk * cdx[i], x_lo, x_hi))
                if gk == 0.0:
                    res[i] = tk
                    found = True
                    break
                if (gk < 0) != (gprev < 0):
                    a = tprev
                    b = tk
                    ga = gprev
                    for it in range(max_iter):
                        if (b - a) * speed <= tol:
                            break
                        m = 0.5 * (a + b)
                        gm = coz[i] + m * cdz[i] - _interp(cxs, czs, _clip(cox[i] + m * cdx[i], x_lo, x_hi))
                        if gm == 0.0:
                            a = m
                            b = m
                            break
                        if (gm < 0) == (ga < 0):
                            a = m
                            ga = gm
                        else:
                            b = m
                    res[i] = 0.5 * (a + b)
                    found = True
                    break
                tprev = tk
                gprev = gk
    return out
