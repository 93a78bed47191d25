"""Shortest bounded-curvature paths (Dubins) used as the RRT steering function.

Each family is solved in the normalized frame (unit turning radius, start at
the origin, goal on the +x axis).  The returned segment parameters are
``(t, p, q)``: first-arc angle, middle segment (normalized straight length for
the S families, arc angle for RLR/LRL) and last-arc angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .core import TWO_PI, Config, normalize_angle

FAMILIES = ("LSL", "RSR", "LSR", "RSL", "RLR", "LRL")

# Snap mod-2pi results this close to 2*pi back to zero so that
# straight-ahead connections do not turn a full circle.
_WRAP_EPS = 1e-10
_SAME_CONFIG_TOL = 1e-12
# Tangency cases (p == 0) land a rounding error either side of the root.
_ROOT_EPS = 1e-12
# Below this centre distance the two same-side circles coincide and the
# tangent direction is rounding noise, so the path is a single arc.
_SAME_CIRCLE_EPS = 1e-12


def _mod2pi(a: float) -> float:
    a = normalize_angle(a)
    if a > TWO_PI - _WRAP_EPS:
        return 0.0
    return a


def _vab(alpha: float, beta: float) -> float:
    # 2 - 2 cos(alpha - beta) without the cancellation near zero
    h = 2.0 * math.sin(0.5 * (alpha - beta))
    return h * h


def _lsl(alpha, beta, d, sa, ca, sb, cb, vab):
    # centre-to-centre vector; its length is the straight segment
    ux, uy = d + sa - sb, cb - ca
    p = math.hypot(ux, uy)
    if p <= _SAME_CIRCLE_EPS:
        return _mod2pi(beta - alpha), 0.0, 0.0
    tmp = math.atan2(uy, ux)
    return _mod2pi(tmp - alpha), p, _mod2pi(beta - tmp)


def _rsr(alpha, beta, d, sa, ca, sb, cb, vab):
    ux, uy = d - sa + sb, ca - cb
    p = math.hypot(ux, uy)
    if p <= _SAME_CIRCLE_EPS:
        return _mod2pi(alpha - beta), 0.0, 0.0
    tmp = math.atan2(uy, ux)
    return _mod2pi(alpha - tmp), p, _mod2pi(tmp - beta)


def _lsr(alpha, beta, d, sa, ca, sb, cb, vab):
    p2 = d * d - vab + 2.0 * d * (sa + sb)
    if p2 < -_ROOT_EPS:
        return None
    p2 = max(p2, 0.0)
    p = math.sqrt(p2)
    tmp = math.atan2(-ca - cb, d + sa + sb) - math.atan2(-2.0, p)
    return _mod2pi(tmp - alpha), p, _mod2pi(tmp - beta)


def _rsl(alpha, beta, d, sa, ca, sb, cb, vab):
    p2 = d * d - vab - 2.0 * d * (sa + sb)
    if p2 < -_ROOT_EPS:
        return None
    p2 = max(p2, 0.0)
    p = math.sqrt(p2)
    tmp = math.atan2(ca + cb, d - sa - sb) - math.atan2(2.0, p)
    return _mod2pi(alpha - tmp), p, _mod2pi(beta - tmp)


def _rlr(alpha, beta, d, sa, ca, sb, cb, vab):
    c = (8.0 - vab - d * d + 2.0 * d * (sa - sb)) / 8.0
    if abs(c) > 1.0 + _ROOT_EPS:
        return None
    c = min(1.0, max(-1.0, c))
    p = _mod2pi(TWO_PI - math.acos(c))
    t = _mod2pi(alpha - math.atan2(ca - cb, d - sa + sb) + p / 2.0)
    return t, p, _mod2pi(alpha - beta - t + p)


def _lrl(alpha, beta, d, sa, ca, sb, cb, vab):
    c = (8.0 - vab - d * d + 2.0 * d * (sb - sa)) / 8.0
    if abs(c) > 1.0 + _ROOT_EPS:
        return None
    c = min(1.0, max(-1.0, c))
    p = _mod2pi(TWO_PI - math.acos(c))
    t = _mod2pi(-alpha + math.atan2(cb - ca, d + sa - sb) + p / 2.0)
    return t, p, _mod2pi(beta - alpha - t + p)


_SOLVERS = {
    "LSL": _lsl,
    "RSR": _rsr,
    "LSR": _lsr,
    "RSL": _rsl,
    "RLR": _rlr,
    "LRL": _lrl,
}


def normalized_problem(q_from: Config, q_to: Config, r_min: float) -> Tuple[float, float, float]:
    """Return ``(alpha, beta, d)`` for the unit-radius canonical problem."""
    dx = q_to.x - q_from.x
    dy = q_to.y - q_from.y
    d = math.hypot(dx, dy) / r_min
    phi = math.atan2(dy, dx) if d > 0.0 else 0.0
    return normalize_angle(q_from.theta - phi), normalize_angle(q_to.theta - phi), d


def family_params(
    family: str, alpha: float, beta: float, d: float
) -> Optional[Tuple[float, float, float]]:
    """Normalized ``(t, p, q)`` for one family, or None when it has no solution."""
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    return _SOLVERS[family](alpha, beta, d, sa, ca, sb, cb, _vab(alpha, beta))


def all_family_params(q_from: Config, q_to: Config, r_min: float) -> dict:
    alpha, beta, d = normalized_problem(q_from, q_to, r_min)
    sa, ca = math.sin(alpha), math.cos(alpha)
    sb, cb = math.sin(beta), math.cos(beta)
    vab = _vab(alpha, beta)
    out = {}
    for fam in FAMILIES:
        sol = _SOLVERS[fam](alpha, beta, d, sa, ca, sb, cb, vab)
        if sol is not None:
            out[fam] = sol
    return out


@dataclass(frozen=True)
class DubinsPath:
    family: str
    seg_params: Tuple[float, float, float]
    r_min: float
    start: Config
    end: Config
    total_length: float

    @property
    def segment_lengths(self) -> Tuple[float, float, float]:
        t, p, q = self.seg_params
        if self.family[1] == "S":
            return (t * self.r_min, p, q * self.r_min)
        return (t * self.r_min, p * self.r_min, q * self.r_min)

    @property
    def is_degenerate(self) -> bool:
        return self.total_length == 0.0


def shortest_path(q_from: Config, q_to: Config, r_min: float) -> DubinsPath:
    """Minimum-length path over the six families; ties go to the earlier family."""
    if not (math.isfinite(r_min) and r_min > 0.0):
        raise ValueError(f"r_min must be positive, got {r_min!r}")
    if (
        abs(q_from.x - q_to.x) <= _SAME_CONFIG_TOL
        and abs(q_from.y - q_to.y) <= _SAME_CONFIG_TOL
        and abs(q_from.theta - q_to.theta) <= _SAME_CONFIG_TOL
    ):
        return DubinsPath("LSL", (0.0, 0.0, 0.0), r_min, q_from, q_to, 0.0)

    best = None
    best_len = math.inf
    for fam, (t, p, q) in all_family_params(q_from, q_to, r_min).items():
        length = (t + p + q) * r_min
        if length < best_len:
            best, best_len = (fam, (t, p, q)), length
    fam, (t, p, q) = best
    seg = (t, p * r_min, q) if fam[1] == "S" else (t, p, q)
    return DubinsPath(fam, seg, r_min, q_from, q_to, best_len)


def path_length(q_from: Config, q_to: Config, r_min: float) -> float:
    return shortest_path(q_from, q_to, r_min).total_length


def _advance(x: float, y: float, th: float, kind: str, s: float, r: float):
    if kind == "S":
        return x + s * math.cos(th), y + s * math.sin(th), th
    phi = s / r
    if kind == "L":
        return (
            x + r * (math.sin(th + phi) - math.sin(th)),
            y - r * (math.cos(th + phi) - math.cos(th)),
            th + phi,
        )
    return (
        x - r * (math.sin(th - phi) - math.sin(th)),
        y + r * (math.cos(th - phi) - math.cos(th)),
        th - phi,
    )


def point_at_arclength(path: DubinsPath, s: float) -> Config:
    """Configuration after travelling ``s`` metres along ``path``."""
    if not (0.0 <= s <= path.total_length) or not math.isfinite(s):
        raise ValueError(f"arclength {s!r} outside [0, {path.total_length}]")
    if s == path.total_length:
        return path.end
    return evaluate(path, s)


def evaluate(path: DubinsPath, s: float) -> Config:
    """Integrate the segment geometry up to ``s`` (no endpoint shortcut)."""
    x, y, th = path.start.x, path.start.y, path.start.theta
    remaining = s
    for kind, seg_len in zip(path.family, path.segment_lengths):
        step = min(remaining, seg_len)
        x, y, th = _advance(x, y, th, kind, step, path.r_min)
        remaining -= step
        if remaining <= 0.0:
            break
    return Config(x, y, th)


def node_count(total_length: float, s_max: float) -> int:
    if total_length <= 0.0:
        return 0
    # The quotient can round up past an integer (1.7 / 0.17 > 10), so take
    # the smallest n whose computed spacing fits.
    n = max(1, math.ceil(total_length / s_max))
    while n > 1 and total_length / (n - 1) <= s_max:
        n -= 1
    return n


def intermediate_nodes(path: DubinsPath, s_max: float) -> List[Config]:
    """Evenly spaced configurations along ``path``, ending exactly at ``path.end``."""
    if not (s_max > 0.0):
        raise ValueError("s_max must be positive")
    n = node_count(path.total_length, s_max)
    if n == 0:
        return []
    spacing = path.total_length / n
    nodes = [point_at_arclength(path, spacing * j) for j in range(1, n)]
    nodes.append(path.end)
    return nodes


def sample_path(path: DubinsPath, spacing: float) -> List[Config]:
    """Dense samples (including both endpoints) for plotting and checks."""
    if path.is_degenerate:
        return [path.start]
    n = max(1, math.ceil(path.total_length / spacing))
    L = path.total_length
    return [point_at_arclength(path, min(L, L * j / n)) for j in range(n + 1)]


def steer(q_from: Config, q_to: Config, r_min: float, s_max: float) -> Sequence[Config]:
    return intermediate_nodes(shortest_path(q_from, q_to, r_min), s_max)
