"""Static and moving obstacles, queried at a footstep's arrival time."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from . import kernels
from .core import TWO_PI, Vec2

STATIC, LINEAR, CIRCULAR = 0, 1, 2


@dataclass(frozen=True)
class StaticMotion:
    kind: str = field(default="static", init=False)


@dataclass(frozen=True)
class LinearMotion:
    """Uniform translation; with ``travel`` set the obstacle bounces back and
    forth over that distance from its start point."""

    velocity: Vec2
    travel: Optional[float] = None
    kind: str = field(default="linear", init=False)


@dataclass(frozen=True)
class CircularMotion:
    center: Vec2
    radius: float
    rate: float
    phase: float = 0.0
    kind: str = field(default="circular", init=False)

    def __post_init__(self) -> None:
        if self.radius < 0.0:
            raise ValueError("circular radius must be non-negative")


Motion = Union[StaticMotion, LinearMotion, CircularMotion]


@dataclass(frozen=True)
class Box:
    """Oriented rectangle."""

    center: Vec2
    half_extents: Vec2
    orientation: float = 0.0

    def corners(self):
        c, s = math.cos(self.orientation), math.sin(self.orientation)
        hx, hy = self.half_extents
        out = []
        for sx, sy in ((-1, -1), (1, -1), (1, 1), (-1, 1)):
            lx, ly = sx * hx, sy * hy
            out.append((self.center[0] + c * lx - s * ly, self.center[1] + s * lx + c * ly))
        return out


@dataclass(frozen=True)
class Obstacle:
    """A box with a known trajectory.  ``center`` is the pose at t = 0
    (for circular motion it is derived from the orbit)."""

    center: Vec2
    half_extents: Vec2
    orientation: float = 0.0
    motion: Motion = StaticMotion()
    name: str = ""

    def __post_init__(self) -> None:
        if not (self.half_extents[0] > 0.0 and self.half_extents[1] > 0.0):
            raise ValueError("obstacle half-extents must be positive")
        if isinstance(self.motion, CircularMotion):
            m = self.motion
            start = (
                m.center[0] + m.radius * math.cos(m.phase),
                m.center[1] + m.radius * math.sin(m.phase),
            )
            object.__setattr__(self, "center", start)
        if isinstance(self.motion, LinearMotion) and self.motion.travel is not None:
            if self.motion.travel <= 0.0:
                raise ValueError("linear travel must be positive")

    @property
    def is_static(self) -> bool:
        return isinstance(self.motion, StaticMotion)

    def packed(self) -> list:
        row = [self.center[0], self.center[1], self.half_extents[0], self.half_extents[1],
               self.orientation, STATIC] + [0.0] * 6
        m = self.motion
        if isinstance(m, LinearMotion):
            row[5] = LINEAR
            row[6:9] = [m.velocity[0], m.velocity[1], m.travel or 0.0]
        elif isinstance(m, CircularMotion):
            row[5] = CIRCULAR
            row[6:11] = [m.center[0], m.center[1], m.radius, m.rate, m.phase]
        return row


def obstacle_pose_at(obs: Obstacle, t: float) -> Box:
    """Pose of ``obs`` at time ``t`` (seconds from the start of the plan)."""
    if t < 0.0:
        raise ValueError("time must be non-negative")
    m = obs.motion
    if isinstance(m, StaticMotion):
        return Box(obs.center, obs.half_extents, obs.orientation)
    if isinstance(m, LinearMotion):
        vx, vy = m.velocity
        speed = math.hypot(vx, vy)
        if m.travel and speed > 0.0:
            s = math.fmod(speed * t, 2.0 * m.travel)
            if s > m.travel:
                s = 2.0 * m.travel - s
            c = (obs.center[0] + s * vx / speed, obs.center[1] + s * vy / speed)
        else:
            c = (obs.center[0] + vx * t, obs.center[1] + vy * t)
        return Box(c, obs.half_extents, obs.orientation)
    ang = m.phase + m.rate * t
    c = (m.center[0] + m.radius * math.cos(ang), m.center[1] + m.radius * math.sin(ang))
    return Box(c, obs.half_extents, obs.orientation)


def period(obs: Obstacle) -> Optional[float]:
    """Time after which the obstacle repeats its trajectory (None if it never does)."""
    m = obs.motion
    if isinstance(m, CircularMotion) and m.rate != 0.0:
        return TWO_PI / abs(m.rate)
    if isinstance(m, LinearMotion) and m.travel:
        speed = math.hypot(*m.velocity)
        return 2.0 * m.travel / speed if speed > 0.0 else None
    return None


def disc_intersects_box(point: Vec2, radius: float, box: Box) -> bool:
    """Closed-form disc/rectangle test: clamp into the box frame, compare distances."""
    c, s = math.cos(box.orientation), math.sin(box.orientation)
    dx = point[0] - box.center[0]
    dy = point[1] - box.center[1]
    lx = c * dx + s * dy
    ly = -s * dx + c * dy
    hx, hy = box.half_extents
    qx = lx - min(max(lx, -hx), hx)
    qy = ly - min(max(ly, -hy), hy)
    return qx * qx + qy * qy <= radius * radius


@dataclass(frozen=True)
class Bounds:
    """Per-axis sampling box; axes are normalized so that lo <= hi."""

    lo: Tuple[float, float, float]
    hi: Tuple[float, float, float]

    def __post_init__(self) -> None:
        lo = tuple(min(a, b) for a, b in zip(self.lo, self.hi))
        hi = tuple(max(a, b) for a, b in zip(self.lo, self.hi))
        object.__setattr__(self, "lo", tuple(float(v) for v in lo))
        object.__setattr__(self, "hi", tuple(float(v) for v in hi))

    def contains(self, x: float, y: float) -> bool:
        return self.lo[0] <= x <= self.hi[0] and self.lo[1] <= y <= self.hi[1]

    @property
    def xy(self) -> Tuple[float, float, float, float]:
        return (self.lo[0], self.hi[0], self.lo[1], self.hi[1])


@dataclass(frozen=True)
class World:
    obstacles: Tuple[Obstacle, ...]
    bounds: Bounds
    safety_radius: float = 0.3

    def __post_init__(self) -> None:
        object.__setattr__(self, "obstacles", tuple(self.obstacles))
        if not self.safety_radius > 0.0:
            raise ValueError("safety_radius must be positive")
        if not (self.bounds.lo[0] < self.bounds.hi[0] and self.bounds.lo[1] < self.bounds.hi[1]):
            raise ValueError("world bounds must have positive extent in x and y")
        packed = np.array([o.packed() for o in self.obstacles], dtype=float).reshape(-1, 12)
        object.__setattr__(self, "_packed", packed)

    @property
    def packed(self) -> np.ndarray:
        return self._packed

    @property
    def is_static(self) -> bool:
        return all(o.is_static for o in self.obstacles)

    def with_obstacles(self, obstacles: Sequence[Obstacle]) -> "World":
        return World(tuple(obstacles), self.bounds, self.safety_radius)


def is_free(point: Vec2, t: float, world: World) -> bool:
    """True iff ``point`` is inside the world bounds and its safety disc
    clears every obstacle posed at time ``t``."""
    if t < 0.0:
        raise ValueError("time must be non-negative")
    return kernels.first_collision(
        [point[0]], [point[1]], [t], world.packed, world.bounds.xy, world.safety_radius
    ) < 0


def first_blocked(footsteps: Sequence[Vec2], times: Sequence[float], world: World) -> int:
    """Index of the first footstep not free at its time, or -1."""
    if len(footsteps) == 0:
        return -1
    arr = np.asarray(footsteps, dtype=float).reshape(-1, 2)
    return kernels.first_collision(
        arr[:, 0], arr[:, 1], np.asarray(times, dtype=float), world.packed,
        world.bounds.xy, world.safety_radius,
    )


def prune_branch_for_collision(branch, world: World):
    """Longest prefix of ``branch`` whose footsteps are free at their arrival times."""
    k = first_blocked(branch.footsteps, branch.arrival_times, world)
    if k < 0:
        return branch
    return branch.prefix(k, collision_pruned=True)
