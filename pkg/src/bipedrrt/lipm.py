"""Closed-form LIPM dynamics and the phase-space step planner.

Every routine works on a single axis; the sagittal (x) and lateral (y)
directions share the same equations.  Coordinates are those of the local
frame attached to the parent node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

from .core import Pose2, to_global, to_local, vector_to_global, vector_to_local


class InfeasibleStep(ValueError):
    """The requested step has no forward-walking solution on the LIPM."""


@dataclass(frozen=True)
class LipmParams:
    g: float = 9.81
    a: float = 0.0
    b: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.g) and self.g > 0.0):
            raise ValueError(f"g must be positive, got {self.g!r}")
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("height surface coefficients must be finite")


class PendulumState(NamedTuple):
    pos: float
    vel: float


@dataclass(frozen=True)
class LocomotionParams:
    """One step: PSP inputs (p_x, apex velocities) and outputs (timings, p_y, y_apex).

    Positions are in the local frame of the node's parent.  ``x_apex`` always
    equals ``p_x`` by definition of the apex.
    """

    p_x: float
    xd_apex: float
    yd_apex: float
    t_switch: float = 0.0
    t_apex: float = 0.0
    p_y: float = 0.0
    y_apex: float = 0.0

    def __post_init__(self) -> None:
        if self.t_switch < 0.0 or self.t_apex < 0.0:
            raise ValueError("step timings must be non-negative")

    @property
    def x_apex(self) -> float:
        return self.p_x

    @property
    def duration(self) -> float:
        return self.t_switch + self.t_apex

    def as_dict(self) -> dict:
        return {
            "p_x": self.p_x,
            "p_y": self.p_y,
            "x_apex": self.x_apex,
            "xd_apex": self.xd_apex,
            "y_apex": self.y_apex,
            "yd_apex": self.yd_apex,
            "t_switch": self.t_switch,
            "t_apex": self.t_apex,
        }


@dataclass(frozen=True)
class StanceState:
    """CoM apex state plus stance foot, expressed in some planar frame.

    This is what the step planner consumes for the *parent* step after it has
    been re-expressed in the parent node's own frame.
    """

    x: PendulumState
    y: PendulumState
    p_x: float
    p_y: float

    def reframe(self, src: Pose2, dst: Pose2) -> "StanceState":
        """Re-express from frame ``src`` into frame ``dst``.

        Positions take the full SE(2) change; velocities only rotate.
        """
        com = to_local(dst, to_global(src, (self.x.pos, self.y.pos)))
        vel = vector_to_local(dst, vector_to_global(src, (self.x.vel, self.y.vel)))
        foot = to_local(dst, to_global(src, (self.p_x, self.p_y)))
        return StanceState(
            PendulumState(com[0], vel[0]), PendulumState(com[1], vel[1]), foot[0], foot[1]
        )

    def as_tuple(self):
        return (self.x.pos, self.x.vel, self.y.pos, self.y.vel, self.p_x, self.p_y)


def apex_state(m: LocomotionParams) -> StanceState:
    """The apex state a step ends in, in the frame ``m`` is expressed in."""
    return StanceState(
        PendulumState(m.x_apex, m.xd_apex), PendulumState(m.y_apex, m.yd_apex), m.p_x, m.p_y
    )


def omega(params: LipmParams, p_x: float) -> float:
    height = params.a * p_x + params.b
    if not height > 0.0:
        raise ValueError(f"non-positive pendulum height {height!r}")
    return math.sqrt(params.g / height)


def state_at(s0: PendulumState, p_x: float, w: float, t: float) -> PendulumState:
    """Closed-form state after ``t`` seconds (``t`` may be negative)."""
    if not (math.isfinite(t) and math.isfinite(s0.pos) and math.isfinite(s0.vel)):
        raise ValueError("non-finite pendulum input")
    A = 0.5 * ((s0.pos - p_x) + s0.vel / w)
    B = 0.5 * ((s0.pos - p_x) - s0.vel / w)
    ep = math.exp(w * t)
    em = 1.0 / ep
    return PendulumState(A * ep + B * em + p_x, w * (A * ep - B * em))


def orbit_invariant(s: PendulumState, p_x: float, w: float) -> float:
    """(x - p)^2 - (xd / w)^2, conserved along every trajectory."""
    return (s.pos - p_x) ** 2 - (s.vel / w) ** 2


def time_to_state(s0: PendulumState, p_x: float, w: float, target: PendulumState) -> float:
    """Time at which the orbit through ``s0`` passes ``target``; negative if earlier."""
    A = 0.5 * ((s0.pos - p_x) + s0.vel / w)
    if A == 0.0:
        raise InfeasibleStep("orbit converges to the stance foot (A == 0)")
    arg = (target.pos + target.vel / w - p_x) / (2.0 * A)
    if not arg > 0.0:
        raise InfeasibleStep(f"target state not reachable on this orbit (log argument {arg!r})")
    return math.log(arg) / w


def velocity_on_orbit(x: float, s0: PendulumState, p_x: float, w: float, sign: int = 1) -> float:
    radicand = w * w * ((x - p_x) ** 2 - (s0.pos - p_x) ** 2) + s0.vel**2
    if radicand < 0.0:
        raise InfeasibleStep(f"position {x!r} not reached on this orbit")
    return math.copysign(math.sqrt(radicand), sign)


def switching_position(
    p_x1: float, s01: PendulumState, p_x2: float, s02: PendulumState, w: float
) -> float:
    """Position where the orbits about two consecutive footholds cross."""
    if p_x1 == p_x2:
        raise InfeasibleStep("consecutive footholds coincide")
    C = (s01.pos - p_x1) ** 2 - (s02.pos - p_x2) ** 2 + (s02.vel**2 - s01.vel**2) / (w * w)
    return 0.5 * (C / (p_x2 - p_x1) + (p_x1 + p_x2))


def find_py(y_switch: PendulumState, yd_apex: float, t_apex: float, w: float) -> float:
    """Lateral foothold giving lateral velocity ``yd_apex`` after ``t_apex``."""
    ep = math.exp(w * t_apex)
    em = 1.0 / ep
    D = 0.5 * w * (em - ep)
    if D == 0.0:
        raise InfeasibleStep("zero apex time leaves the lateral foothold undetermined")
    C = 0.5 * w * (
        (y_switch.pos + y_switch.vel / w) * ep - (y_switch.pos - y_switch.vel / w) * em
    )
    return (yd_apex - C) / D


class StepTiming(NamedTuple):
    t_switch: float
    t_apex: float
    p_y: float
    y_apex: float


def psp_step(
    parent: StanceState,
    p_x2: float,
    xd_apex2: float,
    yd_apex2: float,
    params: LipmParams,
) -> StepTiming:
    """Timings and lateral foothold for the next step.

    ``parent`` must already be expressed in the parent node's own frame.
    Raises :class:`InfeasibleStep` whenever the step cannot be walked forward.
    """
    if not p_x2 > parent.p_x:
        raise InfeasibleStep("next foothold is not ahead of the stance foot")
    if not xd_apex2 > 0.0:
        raise InfeasibleStep("apex velocity must be forward")
    w = omega(params, p_x2)
    apex2 = PendulumState(p_x2, xd_apex2)

    x_sw = switching_position(parent.p_x, parent.x, p_x2, apex2, w)
    xd_sw = velocity_on_orbit(x_sw, parent.x, parent.p_x, w, +1)
    switch = PendulumState(x_sw, xd_sw)

    t_switch = time_to_state(parent.x, parent.p_x, w, switch)
    if t_switch < 0.0:
        raise InfeasibleStep("switching state lies before the parent apex")
    # Measured from the next apex, the switch lies in the past.
    t_apex = -time_to_state(apex2, p_x2, w, switch)
    if not t_apex > 0.0:
        raise InfeasibleStep("switching state lies after the next apex")

    y_sw = state_at(parent.y, parent.p_y, w, t_switch)
    p_y2 = find_py(y_sw, yd_apex2, t_apex, w)
    y_apex2 = state_at(y_sw, p_y2, w, t_apex).pos
    return StepTiming(t_switch, t_apex, p_y2, y_apex2)


def make_step(parent: StanceState, p_x2: float, xd2: float, yd2: float, params: LipmParams) -> LocomotionParams:
    timing = psp_step(parent, p_x2, xd2, yd2, params)
    return LocomotionParams(p_x2, xd2, yd2, *timing)

