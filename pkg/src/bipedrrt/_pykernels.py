"""Pure-Python implementations of the hot kernels.

These are the reference versions; ``_ckernels`` mirrors them in Cython and
the test-suite checks the two against each other.
"""

from __future__ import annotations

import math

import numpy as np

from .core import TWO_PI, Config, signed_angle, to_local
from .dubins import _ROOT_EPS, _SAME_CIRCLE_EPS, _WRAP_EPS
from .lipm import InfeasibleStep, LipmParams, PendulumState, StanceState, make_step, apex_state

BACKEND = "python"

STATIC, LINEAR, CIRCULAR = 0, 1, 2


def _mod2pi(a):
    a = np.mod(a, TWO_PI)
    return np.where(a > TWO_PI - _WRAP_EPS, 0.0, a)


def dubins_lengths(xs, ys, ths, qx, qy, qth, r_min):
    """Shortest Dubins length from every (xs[i], ys[i], ths[i]) to (qx, qy, qth).

    Vectorised over the sources; same family formulas and edge handling as
    :func:`bipedrrt.dubins.shortest_path`.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    ths = np.mod(np.asarray(ths, dtype=float), TWO_PI)
    qth = qth % TWO_PI
    dx = qx - xs
    dy = qy - ys
    d = np.hypot(dx, dy) / r_min
    phi = np.where(d > 0.0, np.arctan2(dy, dx), 0.0)
    alpha = np.mod(ths - phi, TWO_PI)
    beta = np.mod(qth - phi, TWO_PI)
    sa, ca, sb, cb = np.sin(alpha), np.cos(alpha), np.sin(beta), np.cos(beta)
    vab = (2.0 * np.sin(0.5 * (alpha - beta))) ** 2
    best = np.full(xs.shape, np.inf)
    with np.errstate(invalid="ignore"):
        for sign in (1.0, -1.0):  # LSL then RSR
            ux, uy = d + sign * (sa - sb), sign * (cb - ca)
            p = np.hypot(ux, uy)
            tmp = np.arctan2(uy, ux)
            L = _mod2pi(sign * (tmp - alpha)) + p + _mod2pi(sign * (beta - tmp))
            L = np.where(p <= _SAME_CIRCLE_EPS, _mod2pi(sign * (beta - alpha)), L)
            best = np.where(L < best, L, best)
        for sign in (1.0, -1.0):  # LSR then RSL
            p2 = d * d - vab + 2.0 * sign * d * (sa + sb)
            ok = p2 >= -_ROOT_EPS
            p = np.sqrt(np.maximum(p2, 0.0))
            tmp = np.arctan2(sign * (-ca - cb), d + sign * (sa + sb)) - np.arctan2(-2.0 * sign, p)
            L = _mod2pi(sign * (tmp - alpha)) + p + _mod2pi(sign * (tmp - beta))
            best = np.where(ok & (L < best), L, best)
        for sign in (-1.0, 1.0):  # RLR then LRL
            c = (8.0 - vab - d * d - 2.0 * sign * d * (sa - sb)) / 8.0
            ok = np.abs(c) <= 1.0 + _ROOT_EPS
            p = _mod2pi(TWO_PI - np.arccos(np.clip(c, -1.0, 1.0)))
            t = _mod2pi(sign * (np.arctan2(sign * (cb - ca), d + sign * (sa - sb)) - alpha) + p / 2.0)
            q = _mod2pi(-sign * (alpha - beta) - t + p)
            L = t + p + q
            best = np.where(ok & (L < best), L, best)
    same = (np.abs(dx) <= 1e-12) & (np.abs(dy) <= 1e-12) & (np.abs(ths - qth) <= 1e-12)
    return np.where(same, 0.0, best * r_min)


def propagate_chain(xs, ys, ths, seed, g, a, b, V):
    """Chain of step-planner calls along configurations ``xs[0..n]``.

    ``seed`` is the (x, xd, y, yd, p_x, p_y) apex state of node 0 in its own
    frame.  Returns ``(rows, n_ok)``: one 13-tuple per feasible step
    (7 locomotion parameters, then the 6-value seed for the next step) and the
    count of steps completed before the first infeasible one.
    """
    params = LipmParams(g, a, b)
    state = StanceState(PendulumState(seed[0], seed[1]), PendulumState(seed[2], seed[3]), seed[4], seed[5])
    rows = []
    parent = Config(xs[0], ys[0], ths[0])
    for j in range(1, len(xs)):
        child = Config(xs[j], ys[j], ths[j])
        p_x = to_local(parent.pose, (child.x, child.y))[0]
        dth = signed_angle(child.theta - parent.theta)
        try:
            m = make_step(state, p_x, V * math.cos(dth), V * math.sin(dth), params)
        except (InfeasibleStep, ValueError, OverflowError):
            break
        state = apex_state(m).reframe(parent.pose, child.pose)
        rows.append((m.p_x, m.xd_apex, m.yd_apex, m.t_switch, m.t_apex, m.p_y, m.y_apex) + state.as_tuple())
        parent = child
    return rows, len(rows)


def obstacle_centers(obs_row, t):
    """Centers of one packed obstacle at the times ``t`` (array)."""
    kind = int(obs_row[5])
    cx, cy = obs_row[0], obs_row[1]
    t = np.asarray(t, dtype=float)
    if kind == STATIC:
        return np.full_like(t, cx), np.full_like(t, cy)
    if kind == LINEAR:
        vx, vy, travel = obs_row[6], obs_row[7], obs_row[8]
        speed = math.hypot(vx, vy)
        if travel > 0.0 and speed > 0.0:
            s = np.mod(speed * t, 2.0 * travel)
            s = np.where(s > travel, 2.0 * travel - s, s)
            return cx + s * vx / speed, cy + s * vy / speed
        return cx + vx * t, cy + vy * t
    mx, my, radius, rate, phase = obs_row[6], obs_row[7], obs_row[8], obs_row[9], obs_row[10]
    ang = phase + rate * t
    return mx + radius * np.cos(ang), my + radius * np.sin(ang)


def disc_hits_boxes(px, py, cx, cy, hx, hy, orient, radius):
    """Vectorised disc-versus-oriented-rectangle test (touching counts as a hit)."""
    c, s = math.cos(orient), math.sin(orient)
    dx = px - cx
    dy = py - cy
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    qx = lx - np.clip(lx, -hx, hx)
    qy = ly - np.clip(ly, -hy, hy)
    return qx * qx + qy * qy <= radius * radius


def collision_mask(px, py, t, obstacles, bounds, radius):
    """Boolean mask of footsteps that are NOT free at their own time."""
    px = np.asarray(px, dtype=float)
    py = np.asarray(py, dtype=float)
    t = np.asarray(t, dtype=float)
    xlo, xhi, ylo, yhi = bounds
    hit = (px < xlo) | (px > xhi) | (py < ylo) | (py > yhi)
    for row in obstacles:
        cx, cy = obstacle_centers(row, t)
        hit |= disc_hits_boxes(px, py, cx, cy, row[2], row[3], row[4], radius)
    return hit


def first_collision(px, py, t, obstacles, bounds, radius):
    """Index of the first footstep in collision, or -1."""
    if len(px) == 0:
        return -1
    hit = collision_mask(px, py, t, obstacles, bounds, radius)
    idx = np.flatnonzero(hit)
    return int(idx[0]) if idx.size else -1
