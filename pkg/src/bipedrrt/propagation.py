"""Propagate LIPM dynamics along a sequence of configurations."""

from __future__ import annotations

import math
from functools import cached_property
from typing import List, Sequence, Tuple

from . import kernels
from .core import Config, Pose2, Vec2, signed_angle, to_local
from .lipm import LipmParams, LocomotionParams, PendulumState, StanceState, apex_state


class Branch:
    """Configurations with their mirrored locomotion parameters.

    ``params[j]`` is expressed in the frame of the configuration before
    ``configs[j]`` (``parent_config`` for j == 0).  ``states[j]`` is the apex
    state of step j re-expressed in ``configs[j]``'s own frame, ready to seed
    the following step.  Per-step objects are built lazily from the raw kernel
    rows, since most candidate branches are only ever timed.
    """

    def __init__(
        self,
        parent_config: Config,
        configs: Sequence[Config] = (),
        rows: Sequence[Sequence[float]] = (),
        t_seed: float = 0.0,
        requested: int = 0,
        dynamically_truncated: bool = False,
        collision_pruned: bool = False,
    ):
        if len(configs) != len(rows):
            raise ValueError("configs and locomotion rows must align")
        self.parent_config = parent_config
        self.configs = list(configs)
        self.rows = [tuple(r) for r in rows]
        self.t_seed = t_seed
        self.requested = requested
        self.dynamically_truncated = dynamically_truncated
        self.collision_pruned = collision_pruned

    def __len__(self) -> int:
        return len(self.configs)

    def __repr__(self) -> str:
        return (
            f"Branch(n={len(self)}, requested={self.requested}, duration={self.duration:.4f}, "
            f"truncated={self.dynamically_truncated}, pruned={self.collision_pruned})"
        )

    @cached_property
    def step_durations(self) -> List[float]:
        return [r[3] + r[4] for r in self.rows]

    @property
    def duration(self) -> float:
        return math.fsum(self.step_durations)

    @cached_property
    def arrival_times(self) -> List[float]:
        out = []
        t = self.t_seed
        for d in self.step_durations:
            t += d
            out.append(t)
        return out

    @cached_property
    def params(self) -> List[LocomotionParams]:
        return [LocomotionParams(*r[:7]) for r in self.rows]

    @cached_property
    def states(self) -> List[StanceState]:
        return [
            StanceState(PendulumState(r[7], r[8]), PendulumState(r[9], r[10]), r[11], r[12])
            for r in self.rows
        ]

    @cached_property
    def footsteps(self) -> List[Vec2]:
        # to_global inlined (same arithmetic); this runs for every candidate
        out = []
        prev = self.parent_config
        for cfg, r in zip(self.configs, self.rows):
            c, s = math.cos(prev.theta), math.sin(prev.theta)
            out.append((prev.x + c * r[0] - s * r[5], prev.y + s * r[0] + c * r[5]))
            prev = cfg
        return out

    @property
    def reached_target(self) -> bool:
        return (
            not self.dynamically_truncated
            and not self.collision_pruned
            and len(self.configs) == self.requested
        )

    def prefix(self, n: int, collision_pruned: bool = False) -> "Branch":
        return Branch(
            self.parent_config,
            self.configs[:n],
            self.rows[:n],
            self.t_seed,
            self.requested,
            self.dynamically_truncated,
            self.collision_pruned or collision_pruned,
        )


def compute_psp_input(q_parent: Config, q_child: Config, V: float) -> Tuple[float, float, float]:
    """Sagittal foothold and apex velocity of the step from ``q_parent`` to ``q_child``."""
    p_x, _unused = to_local(q_parent.pose, (q_child.x, q_child.y))
    dth = signed_angle(q_child.theta - q_parent.theta)
    return p_x, V * math.cos(dth), V * math.sin(dth)


def seed_state(m: LocomotionParams, expressed_in: Pose2, node: Config) -> StanceState:
    """Apex state of a stored step, re-expressed in its own node's frame."""
    return apex_state(m).reframe(expressed_in, node.pose)


def propagate_branch(
    q_parent: Config,
    branch_configs: Sequence[Config],
    m_seed: StanceState,
    params: LipmParams,
    V: float,
    t_seed: float = 0.0,
) -> Branch:
    """Run the step planner along ``branch_configs``.

    ``m_seed`` is the parent node's apex state in the parent's own frame and
    ``t_seed`` its arrival time.  A step the LIPM cannot walk stops the branch
    there and marks it dynamically truncated.
    """
    n = len(branch_configs)
    if n == 0:
        return Branch(q_parent, t_seed=t_seed)
    xs = [q_parent.x] + [c.x for c in branch_configs]
    ys = [q_parent.y] + [c.y for c in branch_configs]
    ths = [q_parent.theta] + [c.theta for c in branch_configs]
    rows, n_ok = kernels.propagate_chain(
        xs, ys, ths, m_seed.as_tuple(), params.g, params.a, params.b, V
    )
    return Branch(
        q_parent,
        branch_configs[:n_ok],
        rows,
        t_seed=t_seed,
        requested=n,
        dynamically_truncated=n_ok < n,
    )


def concatenate(first: Branch, second: Branch) -> Branch:
    """Join two branches where ``second`` grows from ``first``'s last node."""
    return Branch(
        first.parent_config,
        first.configs + second.configs,
        first.rows + second.rows,
        first.t_seed,
        first.requested + second.requested,
        first.dynamically_truncated or second.dynamically_truncated,
        first.collision_pruned or second.collision_pruned,
    )
