"""Pure numpy implementations of the hot kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them one for
one.  Both are selected through :mod:`curvebeam.kernels`.
"""
import math

import numpy as np

AI0 = 0.355028053887817239260063186004183176   # Ai(0)
AIP0 = 0.258819403792806798405183560189203963  # -Ai'(0)

R_ASYM = 7.0          # |w| beyond which the asymptotic forms are used
RE_ZETA_TAYLOR = 3.0  # series loses digits once Re(zeta) exceeds this
R_WALK = 4.0         # series cancellation costs digits beyond this; walk out from 0
ANCHOR_SHIFT = 12.0
TAYLOR_STEP = 0.5
TAYLOR_TERMS = 40
MAX_SERIES_TERMS = 250
MAX_ASYM_TERMS = 60


def _u_coeffs(n):
    u = [1.0]
    for k in range(1, n):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216.0 * k))
    return np.array(u)


U = _u_coeffs(2 * MAX_ASYM_TERMS + 2)
V = np.array([1.0] + [-(6 * k + 1) / (6 * k - 1) * U[k] for k in range(1, len(U))])


def airy_series(w):
    """Maclaurin pair: Ai = Ai(0) f(w) - (-Ai'(0)) g(w)."""
    w = np.asarray(w, dtype=complex)
    w3 = w ** 3
    t = np.ones_like(w)
    u = w.copy()
    f = t.copy()
    g = u.copy()
    for k in range(1, MAX_SERIES_TERMS):
        t = t * w3 / ((3 * k - 1) * (3 * k))
        u = u * w3 / ((3 * k) * (3 * k + 1))
        f = f + t
        g = g + u
        if k > 2 and np.all(np.abs(t) + np.abs(u) <= 1e-17 * (np.abs(f) + np.abs(g))):
            break
    return AI0 * f - AIP0 * g


def _asym_exp(w, deriv=False):
    """Exponential-form expansion for |arg w| < pi, truncated at its smallest term."""
    w = np.asarray(w, dtype=complex)
    zeta = (2.0 / 3.0) * w * np.sqrt(w)
    s = np.zeros_like(w)
    sd = np.zeros_like(w)
    active = np.ones(w.shape, dtype=bool)
    prev = np.full(w.shape, np.inf)
    zk = np.ones_like(w)
    for k in range(MAX_ASYM_TERMS):
        mag = U[k] / np.abs(zk)
        grow = mag > prev
        active &= ~grow
        sgn = -1.0 if k % 2 else 1.0
        s = np.where(active, s + sgn * U[k] / zk, s)
        sd = np.where(active, sd + sgn * V[k] / zk, sd)
        prev = np.where(active, mag, prev)
        active &= ~(mag < 1e-17 * np.abs(s))
        if not active.any():
            break
        zk = zk * zeta
    pre = np.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    q = np.sqrt(np.sqrt(w))
    ai = pre * s / q
    if deriv:
        return ai, -pre * q * sd
    return ai


def _asym_osc(w):
    """Oscillatory form, Ai(-z) with z = -w and |arg z| < 2pi/3."""
    z = -np.asarray(w, dtype=complex)
    zeta = (2.0 / 3.0) * z * np.sqrt(z)
    P = np.zeros_like(z)
    Q = np.zeros_like(z)
    active = np.ones(z.shape, dtype=bool)
    prev = np.full(z.shape, np.inf)
    inv2 = 1.0 / (zeta * zeta)
    z2k = np.ones_like(z)
    for k in range(MAX_ASYM_TERMS):
        sgn = -1.0 if k % 2 else 1.0
        a = sgn * U[2 * k] * z2k
        b = sgn * U[2 * k + 1] * z2k / zeta
        mag = np.abs(a) + np.abs(b)
        active &= ~(mag > prev)
        P = np.where(active, P + a, P)
        Q = np.where(active, Q + b, Q)
        prev = np.where(active, mag, prev)
        active &= ~(mag < 1e-17 * (np.abs(P) + np.abs(Q)))
        if not active.any():
            break
        z2k = z2k * inv2
    ph = zeta - math.pi / 4.0
    return (np.cos(ph) * P + np.sin(ph) * Q) / (math.sqrt(math.pi) * np.sqrt(np.sqrt(z)))


def airy_asymptotic(w):
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    exp_form = np.abs(np.angle(w)) <= 2.0 * math.pi / 3.0
    if exp_form.any():
        out[exp_form] = _asym_exp(w[exp_form])
    if (~exp_form).any():
        out[~exp_form] = _asym_osc(w[~exp_form])
    return out


def _walk(cur, y, yp, h, nsteps):
    """Carry (Ai, Ai') along cur + m h by Taylor re-expansion of Ai'' = w Ai."""
    for _ in range(nsteps):
        # Taylor coefficients about cur: a_{n+2} = (cur a_n + a_{n-1}) / ((n+2)(n+1))
        a_nm1, a_n, a_np1 = y, yp, cur * y / 2.0
        ynew = y + h * yp + h * h * a_np1
        ypnew = yp + 2.0 * h * a_np1
        hp = h * h  # h**(n+1) for n = 1
        for n in range(1, TAYLOR_TERMS):
            a_np2 = (cur * a_n + a_nm1) / ((n + 2) * (n + 1))
            ypnew = ypnew + (n + 2) * a_np2 * hp
            hp = hp * h
            ynew = ynew + a_np2 * hp
            a_nm1, a_n, a_np1 = a_n, a_np1, a_np2
        y, yp = ynew, ypnew
        cur = cur + h
    return y


def airy_taylor(w):
    """Ai by Taylor re-expansion, stepping back from w + 12."""
    w = np.asarray(w, dtype=complex)
    cur = w + ANCHOR_SHIFT
    y, yp = _asym_exp(cur, deriv=True)
    nsteps = int(round(ANCHOR_SHIFT / TAYLOR_STEP))
    return _walk(cur, y, yp, -TAYLOR_STEP, nsteps)


def airy_walk(w):
    """Ai by Taylor re-expansion along the segment from 0, where Ai and Ai' are known."""
    w = np.asarray(w, dtype=complex)
    out = np.empty_like(w)
    # group by step count so each batch walks in lockstep
    steps = np.maximum(np.ceil(np.abs(w) / TAYLOR_STEP).astype(int), 1)
    for m in np.unique(steps):
        sel = steps == m
        h = w[sel] / m
        y = np.full(h.shape, AI0, dtype=complex)
        yp = np.full(h.shape, -AIP0, dtype=complex)
        out[sel] = _walk(np.zeros_like(h), y, yp, h, int(m))
    return out


def airy_ai(w):
    """Ai on an array of complex arguments, dispatching between the three routes."""
    w = np.asarray(w, dtype=complex)
    flat = w.ravel()
    out = np.empty_like(flat)
    r = np.abs(flat)
    asym = r > R_ASYM
    zeta_re = ((2.0 / 3.0) * flat * np.sqrt(flat)).real
    tay = ~asym & (zeta_re > RE_ZETA_TAYLOR)
    walk = ~asym & ~tay & (r > R_WALK)
    ser = ~asym & ~tay & ~walk
    if walk.any():
        out[walk] = airy_walk(flat[walk])
    if ser.any():
        out[ser] = airy_series(flat[ser])
    if tay.any():
        out[tay] = airy_taylor(flat[tay])
    if asym.any():
        out[asym] = airy_asymptotic(flat[asym])
    return out.reshape(w.shape)


def _interp(xs, zs, x):
    k = np.clip(np.searchsorted(xs, x, side="right") - 1, 0, len(xs) - 2)
    f = (x - xs[k]) / (xs[k + 1] - xs[k])
    return zs[k] + f * (zs[k + 1] - zs[k])


def sampled_hits(ox, oz, dx, dz, xs, zs, t_min=1e-9, n_brackets=256, tol=1e-9, max_iter=200):
    """Smallest ray parameter t > t_min where each ray meets the polyline, NaN on miss."""
    ox = np.atleast_1d(np.asarray(ox, dtype=float))
    oz = np.atleast_1d(np.asarray(oz, dtype=float))
    dx = np.atleast_1d(np.asarray(dx, dtype=float))
    dz = np.atleast_1d(np.asarray(dz, dtype=float))
    xs = np.asarray(xs, dtype=float)
    zs = np.asarray(zs, dtype=float)
    out = np.full(ox.shape, np.nan)
    x_lo, x_hi = xs[0], xs[-1]
    for i in range(len(ox)):
        speed = math.hypot(dx[i], dz[i])
        if abs(dx[i]) < 1e-15 * speed:
            if x_lo <= ox[i] <= x_hi and dz[i] != 0.0:
                t = (float(_interp(xs, zs, ox[i])) - oz[i]) / dz[i]
                if t > t_min:
                    out[i] = t
            continue
        ta = (x_lo - ox[i]) / dx[i]
        tb = (x_hi - ox[i]) / dx[i]
        lo = max(min(ta, tb), t_min)
        hi = max(ta, tb)
        if hi < lo:
            continue
        ts = np.linspace(lo, hi, n_brackets + 1)
        g = oz[i] + ts * dz[i] - _interp(xs, zs, np.clip(ox[i] + ts * dx[i], x_lo, x_hi))
        zero = np.nonzero(g == 0.0)[0]
        change = np.nonzero(np.signbit(g[:-1]) != np.signbit(g[1:]))[0]
        first_zero = zero[0] if len(zero) else n_brackets + 1
        first_change = change[0] if len(change) else n_brackets + 1
        if first_zero <= first_change and first_zero <= n_brackets:
            out[i] = ts[first_zero]
            continue
        if first_change > n_brackets:
            continue
        a, b = ts[first_change], ts[first_change + 1]
        ga = g[first_change]
        for _ in range(max_iter):
            if (b - a) * speed <= tol:
                break
            m = 0.5 * (a + b)
            gm = oz[i] + m * dz[i] - float(_interp(xs, zs, min(max(ox[i] + m * dx[i], x_lo), x_hi)))
            if gm == 0.0:
                a = b = m
                break
            if (gm < 0) == (ga < 0):
                a, ga = m, gm
            else:
                b = m
        out[i] = 0.5 * (a + b)
    return out
