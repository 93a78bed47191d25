import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bipedrrt.core import Config
from bipedrrt.lipm import LipmParams, PendulumState, StanceState
from bipedrrt.propagation import propagate_branch
from bipedrrt.world import (
    Bounds, Box, CircularMotion, LinearMotion, Obstacle, World, disc_intersects_box,
    first_blocked, is_free, obstacle_pose_at, period, prune_branch_for_collision,
)
from oracles import disc_rect_oracle

BIG = Bounds((-50, -50, 0), (50, 50, 2 * math.pi))
STEADY = StanceState(PendulumState(0.0, 0.3), PendulumState(0.0, 0.0), 0.0, -0.1)


def world_of(*obstacles, radius=0.3):
    return World(tuple(obstacles), BIG, radius)


def test_static_pose():
    o = Obstacle((1.0, 2.0), (0.5, 0.25), 0.3)
    assert obstacle_pose_at(o, 7.0) == Box((1.0, 2.0), (0.5, 0.25), 0.3)


def test_linear_pose():
    o = Obstacle((0.0, 0.0), (0.1, 0.1), motion=LinearMotion((0.5, 0.0)))
    assert obstacle_pose_at(o, 4.0).center == pytest.approx((2.0, 0.0))


def test_linear_ping_pong():
    o = Obstacle((0.0, 0.0), (0.1, 0.1), motion=LinearMotion((1.0, 0.0), travel=2.0))
    xs = [obstacle_pose_at(o, t).center[0] for t in (0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.5)]
    assert xs == pytest.approx([0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 1.5])
    assert period(o) == pytest.approx(4.0)


def test_circular_pose_and_time_stepping():
    m = CircularMotion((5.0, 5.0), 2.0, math.pi / 4)
    o = Obstacle((0.0, 0.0), (0.2, 0.2), motion=m)
    assert o.center == pytest.approx((7.0, 5.0))
    assert obstacle_pose_at(o, 4.0).center == pytest.approx((3.0, 5.0), abs=1e-12)
    # RK4 on the orbit velocity field
    x, y, h = 7.0, 5.0, 1e-3

    def f(px, py):
        return -m.rate * (py - 5.0), m.rate * (px - 5.0)

    for _ in range(4000):
        k1 = f(x, y)
        k2 = f(x + h / 2 * k1[0], y + h / 2 * k1[1])
        k3 = f(x + h / 2 * k2[0], y + h / 2 * k2[1])
        k4 = f(x + h * k3[0], y + h * k3[1])
        x += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
        y += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
    assert obstacle_pose_at(o, 4.0).center == pytest.approx((x, y), abs=1e-9)
    assert period(o) == pytest.approx(8.0)


def test_is_free_examples():
    w = world_of(Obstacle((1.0, 0.0), (0.2, 0.2)))
    assert not is_free((1.0, 0.0), 0.0, w)
    assert not is_free((1.0, 0.49), 0.0, w)
    assert is_free((1.0, 0.51), 0.0, w)
    assert is_free((0.0, 0.0), 0.0, w)


def test_is_free_orbit_opposite():
    o = Obstacle((0.0, 0.0), (0.2, 0.2), motion=CircularMotion((5.0, 5.0), 2.0, math.pi / 4))
    w = world_of(o)
    assert not is_free((7.0, 5.0), 0.0, w)
    assert is_free((7.0, 5.0), 4.0, w)
    assert not is_free((3.0, 5.0), 4.0, w)


def test_point_must_be_inside_bounds():
    w = World((), Bounds((0, 0, 0), (10, 10, 1)), 0.3)
    assert is_free((5.0, 5.0), 0.0, w)
    assert is_free((0.2, 5.0), 0.0, w)
    assert not is_free((-0.01, 5.0), 0.0, w)
    assert not is_free((5.0, 10.01), 0.0, w)


def test_disc_box_against_dense_boundary_oracle():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(10000):
        center = tuple(rng.uniform(-2, 2, 2))
        half = tuple(rng.uniform(0.05, 1.5, 2))
        orient = rng.uniform(-math.pi, math.pi)
        p = tuple(rng.uniform(-4, 4, 2))
        r = rng.uniform(0.01, 1.0)
        expected = disc_rect_oracle(p, r, center, half, orient)
        if expected is None:
            continue
        checked += 1
        assert disc_intersects_box(p, r, Box(center, half, orient)) == expected
    assert checked > 9500


def straight_branch(n):
    configs = [Config(0.17 * (j + 1), 0.0, 0.0) for j in range(n)]
    return propagate_branch(Config(0, 0, 0), configs, STEADY, LipmParams(), 0.3)


def test_prune_all_free():
    b = straight_branch(9)
    assert prune_branch_for_collision(b, world_of()) is b


def test_prune_first_step_blocked():
    b = straight_branch(9)
    fx, fy = b.footsteps[0]
    pruned = prune_branch_for_collision(b, world_of(Obstacle((fx, fy), (0.01, 0.01)), radius=0.05))
    assert len(pruned) == 0 and pruned.collision_pruned and not pruned.reached_target


def test_prune_keeps_prefix_before_blocked_step():
    b = straight_branch(9)
    fx, fy = b.footsteps[4]
    w = world_of(Obstacle((fx, fy), (0.01, 0.01)), radius=0.05)
    assert first_blocked(b.footsteps, b.arrival_times, w) == 4
    pruned = prune_branch_for_collision(b, w)
    assert len(pruned) == 4
    assert pruned.configs == b.configs[:4] and pruned.rows == b.rows[:4]


def test_prune_uses_arrival_times():
    b = straight_branch(9)
    fx, fy = b.footsteps[4]
    t5 = b.arrival_times[4]
    # passes through footstep 5 long before the robot gets there
    o = Obstacle((fx, fy - 1.0), (0.01, 0.01), motion=LinearMotion((0.0, 1.0 / (0.5 * t5))))
    w = world_of(o, radius=0.05)
    assert not is_free((fx, fy), 0.5 * t5, w)
    assert prune_branch_for_collision(b, w) is b


@given(st.floats(-10, 10), st.floats(-10, 10), st.floats(0, 1e3), st.floats(0, 1e3))
def test_static_world_is_time_invariant(x, y, t1, t2):
    w = world_of(Obstacle((1.0, 0.0), (0.5, 2.0), 0.4), Obstacle((-3.0, 2.0), (1.0, 0.2)))
    assert is_free((x, y), t1, w) == is_free((x, y), t2, w)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        Obstacle((0, 0), (0.0, 1.0))
    with pytest.raises(ValueError):
        Obstacle((0, 0), (1.0, -1.0))
    with pytest.raises(ValueError):
        CircularMotion((0, 0), -1.0, 1.0)
    with pytest.raises(ValueError):
        Obstacle((0, 0), (1, 1), motion=LinearMotion((1, 0), travel=0.0))
    with pytest.raises(ValueError):
        World((), BIG, 0.0)
    with pytest.raises(ValueError):
        World((), Bounds((0, 0, 0), (0, 1, 1)), 0.3)
    with pytest.raises(ValueError):
        is_free((0, 0), -1.0, world_of())
    with pytest.raises(ValueError):
        obstacle_pose_at(Obstacle((0, 0), (1, 1)), -0.5)


def test_bounds_normalize_axis_order():
    b = Bounds((2, -1, 6), (-2, 1, 0))
    assert b.lo == (-2.0, -1.0, 0.0) and b.hi == (2.0, 1.0, 6.0)
