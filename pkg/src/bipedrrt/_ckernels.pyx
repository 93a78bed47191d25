# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_pykernels`` (same signatures)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, sin, cos, atan2, acos, fmod, exp, log, hypot, fabs, M_PI, INFINITY

cnp.import_array()

BACKEND = "cython"

cdef double TWO_PI = 2.0 * M_PI
cdef double WRAP_EPS = 1e-10
cdef double ROOT_EPS = 1e-12
cdef double SAME_CIRCLE_EPS = 1e-12


cdef inline double wrap(double a) noexcept nogil:
    cdef double r = fmod(a, TWO_PI)
    if r < 0.0:
        r += TWO_PI
    if r >= TWO_PI:
        r = 0.0
    return r


cdef inline double mod2pi(double a) noexcept nogil:
    cdef double r = wrap(a)
    if r > TWO_PI - WRAP_EPS:
        return 0.0
    return r


cdef inline double signed_angle(double a) noexcept nogil:
    cdef double r = wrap(a)
    if r > M_PI:
        r -= TWO_PI
    return r


cdef double dubins_length(double x0, double y0, double th0,
                          double x1, double y1, double th1, double r) noexcept nogil:
    cdef double dx = x1 - x0, dy = y1 - y0
    cdef double d, phi, alpha, beta, sa, ca, sb, cb, vab, p2, p, tmp, c, t, q, L, ux, uy
    cdef double best = INFINITY
    th0 = wrap(th0)
    th1 = wrap(th1)
    if fabs(dx) <= 1e-12 and fabs(dy) <= 1e-12 and fabs(th0 - th1) <= 1e-12:
        return 0.0
    d = hypot(dx, dy) / r
    phi = atan2(dy, dx) if d > 0.0 else 0.0
    alpha = wrap(th0 - phi)
    beta = wrap(th1 - phi)
    sa = sin(alpha); ca = cos(alpha); sb = sin(beta); cb = cos(beta)
    vab = 2.0 * sin(0.5 * (alpha - beta))
    vab = vab * vab

    # LSL
    ux = d + sa - sb
    uy = cb - ca
    p = hypot(ux, uy)
    if p <= SAME_CIRCLE_EPS:
        L = mod2pi(beta - alpha)
    else:
        tmp = atan2(uy, ux)
        L = mod2pi(tmp - alpha) + p + mod2pi(beta - tmp)
    if L < best:
        best = L
    # RSR
    ux = d - sa + sb
    uy = ca - cb
    p = hypot(ux, uy)
    if p <= SAME_CIRCLE_EPS:
        L = mod2pi(alpha - beta)
    else:
        tmp = atan2(uy, ux)
        L = mod2pi(alpha - tmp) + p + mod2pi(tmp - beta)
    if L < best:
        best = L
    # LSR
    p2 = d * d - vab + 2.0 * d * (sa + sb)
    if p2 >= -ROOT_EPS:
        p = sqrt(p2 if p2 > 0.0 else 0.0)
        tmp = atan2(-ca - cb, d + sa + sb) - atan2(-2.0, p)
        L = mod2pi(tmp - alpha) + p + mod2pi(tmp - beta)
        if L < best:
            best = L
    # RSL
    p2 = d * d - vab - 2.0 * d * (sa + sb)
    if p2 >= -ROOT_EPS:
        p = sqrt(p2 if p2 > 0.0 else 0.0)
        tmp = atan2(ca + cb, d - sa - sb) - atan2(2.0, p)
        L = mod2pi(alpha - tmp) + p + mod2pi(beta - tmp)
        if L < best:
            best = L
    # RLR
    c = (8.0 - vab - d * d + 2.0 * d * (sa - sb)) / 8.0
    if fabs(c) <= 1.0 + ROOT_EPS:
        c = 1.0 if c > 1.0 else (-1.0 if c < -1.0 else c)
        p = mod2pi(TWO_PI - acos(c))
        t = mod2pi(alpha - atan2(ca - cb, d - sa + sb) + p / 2.0)
        q = mod2pi(alpha - beta - t + p)
        L = t + p + q
        if L < best:
            best = L
    # LRL
    c = (8.0 - vab - d * d + 2.0 * d * (sb - sa)) / 8.0
    if fabs(c) <= 1.0 + ROOT_EPS:
        c = 1.0 if c > 1.0 else (-1.0 if c < -1.0 else c)
        p = mod2pi(TWO_PI - acos(c))
        t = mod2pi(-alpha + atan2(cb - ca, d + sa - sb) + p / 2.0)
        q = mod2pi(beta - alpha - t + p)
        L = t + p + q
        if L < best:
            best = L
    return best * r


def dubins_lengths(xs, ys, ths, double qx, double qy, double qth, double r_min):
    cdef double[::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[::1] T = np.ascontiguousarray(ths, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0], i
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] O = out
    with nogil:
        for i in range(n):
            O[i] = dubins_length(X[i], Y[i], T[i], qx, qy, qth, r_min)
    return out


cdef int psp(double x, double xd, double y, double yd, double px1, double py1,
             double px2, double xd2, double yd2, double w, double* out) noexcept nogil:
    """Phase-space step; writes (t_switch, t_apex, p_y, y_apex). Returns 0 on success."""
    cdef double C, x_sw, rad, xd_sw, A, arg, t_sw, t_ap, ep, em, Ay, By, ysw, ydsw, D, Cy, py2
    if not (px2 > px1) or not (xd2 > 0.0):
        return 1
    C = (x - px1) * (x - px1) + (xd2 * xd2 - xd * xd) / (w * w)
    x_sw = 0.5 * (C / (px2 - px1) + (px1 + px2))
    rad = w * w * ((x_sw - px1) * (x_sw - px1) - (x - px1) * (x - px1)) + xd * xd
    if rad < 0.0:
        return 2
    xd_sw = sqrt(rad)
    A = 0.5 * ((x - px1) + xd / w)
    if A == 0.0:
        return 3
    arg = (x_sw + xd_sw / w - px1) / (2.0 * A)
    if not (arg > 0.0):
        return 4
    t_sw = log(arg) / w
    if t_sw < 0.0:
        return 5
    A = 0.5 * (xd2 / w)
    if A == 0.0:
        return 3
    arg = (x_sw + xd_sw / w - px2) / (2.0 * A)
    if not (arg > 0.0):
        return 4
    t_ap = -log(arg) / w
    if not (t_ap > 0.0):
        return 6
    ep = exp(w * t_sw)
    em = 1.0 / ep
    Ay = 0.5 * ((y - py1) + yd / w)
    By = 0.5 * ((y - py1) - yd / w)
    ysw = Ay * ep + By * em + py1
    ydsw = w * (Ay * ep - By * em)
    ep = exp(w * t_ap)
    em = 1.0 / ep
    D = 0.5 * w * (em - ep)
    if D == 0.0:
        return 7
    Cy = 0.5 * w * ((ysw + ydsw / w) * ep - (ysw - ydsw / w) * em)
    py2 = (yd2 - Cy) / D
    Ay = 0.5 * ((ysw - py2) + ydsw / w)
    By = 0.5 * ((ysw - py2) - ydsw / w)
    out[0] = t_sw
    out[1] = t_ap
    out[2] = py2
    out[3] = Ay * ep + By * em + py2
    return 0


def propagate_chain(xs, ys, ths, seed, double g, double a, double b, double V):
    cdef double[::1] X = np.ascontiguousarray(xs, dtype=np.float64)
    cdef double[::1] Y = np.ascontiguousarray(ys, dtype=np.float64)
    cdef double[::1] T = np.ascontiguousarray(ths, dtype=np.float64)
    cdef Py_ssize_t n = X.shape[0] - 1, j
    rows = np.zeros((n if n > 0 else 0, 13), dtype=np.float64)
    cdef double[:, ::1] R = rows
    cdef double sx = seed[0], sxd = seed[1], sy = seed[2], syd = seed[3]
    cdef double spx = seed[4], spy = seed[5]
    cdef double out[4]
    cdef double cp, sp, cc, sc, dx, dy, px2, dth, xd2, yd2, h, w
    cdef double gx, gy, vx, vy, fx, fy
    cdef Py_ssize_t n_ok = 0
    with nogil:
        for j in range(n):
            cp = cos(T[j]); sp = sin(T[j])
            dx = X[j + 1] - X[j]
            dy = Y[j + 1] - Y[j]
            px2 = cp * dx + sp * dy
            dth = signed_angle(T[j + 1] - T[j])
            xd2 = V * cos(dth)
            yd2 = V * sin(dth)
            h = a * px2 + b
            if not (h > 0.0):
                break
            w = sqrt(g / h)
            if psp(sx, sxd, sy, syd, spx, spy, px2, xd2, yd2, w, out) != 0:
                break
            R[j, 0] = px2
            R[j, 1] = xd2
            R[j, 2] = yd2
            R[j, 3] = out[0]
            R[j, 4] = out[1]
            R[j, 5] = out[2]
            R[j, 6] = out[3]
            # apex state of this step: parent frame -> global -> child frame
            cc = cos(T[j + 1]); sc = sin(T[j + 1])
            gx = X[j] + cp * px2 - sp * out[3] - X[j + 1]
            gy = Y[j] + sp * px2 + cp * out[3] - Y[j + 1]
            sx = cc * gx + sc * gy
            sy = -sc * gx + cc * gy
            vx = cp * xd2 - sp * yd2
            vy = sp * xd2 + cp * yd2
            sxd = cc * vx + sc * vy
            syd = -sc * vx + cc * vy
            fx = X[j] + cp * px2 - sp * out[2] - X[j + 1]
            fy = Y[j] + sp * px2 + cp * out[2] - Y[j + 1]
            spx = cc * fx + sc * fy
            spy = -sc * fx + cc * fy
            R[j, 7] = sx
            R[j, 8] = sxd
            R[j, 9] = sy
            R[j, 10] = syd
            R[j, 11] = spx
            R[j, 12] = spy
            n_ok += 1
    return rows[:n_ok], n_ok


def first_collision(px, py, t, obstacles, bounds, double radius):
    cdef double[::1] PX = np.ascontiguousarray(px, dtype=np.float64)
    cdef double[::1] PY = np.ascontiguousarray(py, dtype=np.float64)
    cdef double[::1] TT = np.ascontiguousarray(t, dtype=np.float64)
    obs = np.ascontiguousarray(obstacles, dtype=np.float64).reshape(-1, 12)
    cdef double[:, ::1] O = obs
    cdef Py_ssize_t n = PX.shape[0], m = O.shape[0], i, k
    cdef double xlo = bounds[0], xhi = bounds[1], ylo = bounds[2], yhi = bounds[3]
    cdef double r2 = radius * radius
    cdef double cx, cy, s, speed, travel, ang, co, so, dx, dy, lx, ly, qx, qy, x, y, tt
    cdef int kind
    cdef Py_ssize_t hit = -1
    with nogil:
        for i in range(n):
            x = PX[i]; y = PY[i]; tt = TT[i]
            if x < xlo or x > xhi or y < ylo or y > yhi:
                hit = i
                break
            for k in range(m):
                kind = <int>O[k, 5]
                cx = O[k, 0]; cy = O[k, 1]
                if kind == 1:
                    speed = hypot(O[k, 6], O[k, 7])
                    travel = O[k, 8]
                    if travel > 0.0 and speed > 0.0:
                        s = fmod(speed * tt, 2.0 * travel)
                        if s < 0.0:
                            s += 2.0 * travel
                        if s > travel:
                            s = 2.0 * travel - s
                        cx = cx + s * O[k, 6] / speed
                        cy = cy + s * O[k, 7] / speed
                    else:
                        cx = cx + O[k, 6] * tt
                        cy = cy + O[k, 7] * tt
                elif kind == 2:
                    ang = O[k, 10] + O[k, 9] * tt
                    cx = O[k, 6] + O[k, 8] * cos(ang)
                    cy = O[k, 7] + O[k, 8] * sin(ang)
                co = cos(O[k, 4]); so = sin(O[k, 4])
                dx = x - cx; dy = y - cy
                lx = co * dx + so * dy
                ly = -so * dx + co * dy
                qx = lx - (O[k, 2] if lx > O[k, 2] else (-O[k, 2] if lx < -O[k, 2] else lx))
                qy = ly - (O[k, 3] if ly > O[k, 3] else (-O[k, 3] if ly < -O[k, 3] else ly))
                if qx * qx + qy * qy <= r2:
                    hit = i
                    break
            if hit >= 0:
                break
    return int(hit)
