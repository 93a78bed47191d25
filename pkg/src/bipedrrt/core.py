"""Planar geometry shared by every module: configurations, SE(2) frames, angles."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

TWO_PI = 2.0 * math.pi

Vec2 = Tuple[float, float]


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite value: {v!r}")


def normalize_angle(theta: float) -> float:
    """Wrap an angle to [0, 2*pi)."""
    if not math.isfinite(theta):
        raise ValueError(f"non-finite value: {theta!r}")
    wrapped = math.fmod(theta, TWO_PI)
    if wrapped < 0.0:
        wrapped += TWO_PI
    # fmod of a tiny negative number can round up to exactly 2*pi
    if wrapped >= TWO_PI:
        wrapped = 0.0
    return wrapped


def signed_angle(theta: float) -> float:
    """Wrap an angle to (-pi, pi]."""
    wrapped = normalize_angle(theta)
    if wrapped > math.pi:
        wrapped -= TWO_PI
    return wrapped


@dataclass(frozen=True)
class Config:
    """Robot configuration (x, y, heading) in the global frame."""

    x: float
    y: float
    theta: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite position: ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "theta", normalize_angle(self.theta))

    def __iter__(self):
        return iter((self.x, self.y, self.theta))

    @property
    def pose(self) -> "Pose2":
        return Pose2((self.x, self.y), self.theta)

    def close_to(self, other: "Config", pos_tol: float, ang_tol: float) -> bool:
        dpos = math.hypot(self.x - other.x, self.y - other.y)
        dang = abs(signed_angle(self.theta - other.theta))
        return dpos <= pos_tol and dang <= ang_tol


@dataclass(frozen=True)
class Pose2:
    """An SE(2) frame: origin in global coordinates plus orientation."""

    origin: Vec2
    theta: float

    def __post_init__(self) -> None:
        _check_finite(self.origin[0], self.origin[1], self.theta)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "theta", normalize_angle(self.theta))


GLOBAL_FRAME = Pose2((0.0, 0.0), 0.0)


@dataclass(frozen=True)
class KinematicParams:
    r_min: float
    s_max: float
    V: float

    def __post_init__(self) -> None:
        for name in ("r_min", "s_max", "V"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if self.s_max >= TWO_PI * self.r_min:
            raise ValueError("s_max must be shorter than a full turning circle")


def to_local(frame: Pose2, p_global: Vec2) -> Vec2:
    """Express a global point in ``frame`` coordinates."""
    _check_finite(p_global[0], p_global[1])
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    dx = p_global[0] - frame.origin[0]
    dy = p_global[1] - frame.origin[1]
    return (c * dx + s * dy, -s * dx + c * dy)


def to_global(frame: Pose2, p_local: Vec2) -> Vec2:
    """Inverse of :func:`to_local`."""
    _check_finite(p_local[0], p_local[1])
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    return (
        frame.origin[0] + c * p_local[0] - s * p_local[1],
        frame.origin[1] + s * p_local[0] + c * p_local[1],
    )


def vector_to_local(frame: Pose2, v_global: Vec2) -> Vec2:
    """Rotate a free vector (e.g. a velocity) into ``frame``; no translation."""
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    return (c * v_global[0] + s * v_global[1], -s * v_global[0] + c * v_global[1])


def vector_to_global(frame: Pose2, v_local: Vec2) -> Vec2:
    c, s = math.cos(frame.theta), math.sin(frame.theta)
    return (c * v_local[0] - s * v_local[1], s * v_local[0] + c * v_local[1])
