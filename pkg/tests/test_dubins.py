import math
import random

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bipedrrt import kernels
from bipedrrt.core import Config
from bipedrrt.dubins import (
    FAMILIES,
    DubinsPath,
    all_family_params,
    evaluate,
    intermediate_nodes,
    node_count,
    path_length,
    point_at_arclength,
    sample_path,
    shortest_path,
)
from oracles import dubins_oracle_length, endpoint_by_simulation, pose_error

coord = st.floats(-5.0, 5.0, allow_nan=False)
heading = st.floats(0.0, 2 * math.pi, allow_nan=False, exclude_max=True)
radius = st.floats(0.1, 2.0)
configs = st.builds(Config, coord, coord, heading)


def segments(path):
    return list(zip(path.family, path.segment_lengths))


def random_pair(rng):
    q0 = Config(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(0, 2 * math.pi))
    q1 = Config(rng.uniform(-4, 4), rng.uniform(-4, 4), rng.uniform(0, 2 * math.pi))
    return q0, q1, rng.uniform(0.2, 1.5)


def test_collinear_same_heading_is_straight():
    p = shortest_path(Config(0, 0, 0), Config(5, 0, 0), 0.5)
    assert p.family == "LSL"  # ties with RSR go to the earlier family
    assert p.seg_params == pytest.approx((0.0, 5.0, 0.0), abs=1e-12)
    assert p.total_length == pytest.approx(5.0, abs=1e-12)


def test_half_turn_is_single_left_arc():
    q0, q1 = Config(0, 0, 0), Config(0, 1, math.pi)
    p = shortest_path(q0, q1, 0.5)
    assert p.family[0] == "L"
    assert p.seg_params[0] == pytest.approx(math.pi, abs=1e-12)
    assert p.seg_params[1] == pytest.approx(0.0, abs=1e-12)
    assert p.seg_params[2] == pytest.approx(0.0, abs=1e-12)
    assert p.total_length == pytest.approx(1.5707963267948966, abs=1e-12)
    end = endpoint_by_simulation(tuple(q0), segments(p), 0.5)
    assert pose_error(end, tuple(q1)) < 1e-9


def test_identical_configs_give_degenerate_path():
    q = Config(1.0, 2.0, 0.3)
    p = shortest_path(q, q, 0.5)
    assert p.is_degenerate and p.total_length == 0.0
    assert intermediate_nodes(p, 0.17) == []
    assert point_at_arclength(p, 0.0) == q


def test_rejects_bad_radius():
    with pytest.raises(ValueError):
        shortest_path(Config(0, 0, 0), Config(1, 0, 0), 0.0)
    with pytest.raises(ValueError):
        shortest_path(Config(0, 0, 0), Config(1, 0, 0), math.nan)


def test_matches_geometric_oracle_on_random_pairs():
    rng = random.Random(1234)
    worst = 0.0
    for _ in range(2000):
        q0, q1, r = random_pair(rng)
        got = shortest_path(q0, q1, r).total_length
        worst = max(worst, abs(got - dubins_oracle_length(tuple(q0), tuple(q1), r)))
    assert worst < 1e-6


def test_forward_simulation_reaches_goal():
    rng = random.Random(99)
    for _ in range(60):
        q0, q1, r = random_pair(rng)
        p = shortest_path(q0, q1, r)
        end = endpoint_by_simulation(tuple(q0), segments(p), r, ds=2e-3)
        assert pose_error(end, tuple(q1)) < 1e-8


@given(configs, configs, radius)
def test_shortest_over_families(q0, q1, r):
    p = shortest_path(q0, q1, r)
    cands = all_family_params(q0, q1, r)
    assert cands, "at least one family always exists"
    for fam, (t, m, q) in cands.items():
        assert p.total_length <= (t + m + q) * r + 1e-12
        assert min(t, m, q) >= 0.0
    assert p.family in FAMILIES


@given(configs, configs, radius)
def test_length_decomposition_and_endpoint(q0, q1, r):
    p = shortest_path(q0, q1, r)
    t, m, q = p.seg_params
    if p.family[1] == "S":
        assert p.total_length == pytest.approx(r * (t + q) + m, abs=1e-9)
    else:
        assert p.total_length == pytest.approx(r * (t + m + q), abs=1e-9)
    end = evaluate(p, p.total_length)
    assert math.hypot(end.x - q1.x, end.y - q1.y) <= 1e-9
    assert abs(math.remainder(end.theta - q1.theta, 2 * math.pi)) <= 1e-9


def test_point_at_arclength_examples():
    p = shortest_path(Config(0, 0, 0), Config(5, 0, 0), 0.5)
    assert point_at_arclength(p, 0.0) == pytest.approx(Config(0, 0, 0))
    mid = point_at_arclength(p, 2.0)
    assert (mid.x, mid.y, mid.theta) == pytest.approx((2.0, 0.0, 0.0), abs=1e-12)
    assert point_at_arclength(p, p.total_length) == p.end
    for bad in (-1e-9, 5.0 + 1e-9, math.nan):
        with pytest.raises(ValueError):
            point_at_arclength(p, bad)


@pytest.mark.parametrize(
    "length, n, spacing",
    [(5.0, 30, 5.0 / 30), (0.17, 1, 0.17), (0.1701, 2, 0.08505), (1.7, 10, 0.17)],
)
def test_intermediate_node_counts(length, n, spacing):
    p = shortest_path(Config(0, 0, 0), Config(length, 0, 0), 0.5)
    nodes = intermediate_nodes(p, 0.17)
    assert len(nodes) == n == node_count(length, 0.17)
    xs = [0.0] + [c.x for c in nodes]
    assert np.diff(xs) == pytest.approx([spacing] * n, abs=1e-12)
    assert nodes[-1] == p.end


@given(st.floats(1e-6, 50.0), st.floats(0.01, 1.0))
def test_node_count_is_minimal(length, s_max):
    n = node_count(length, s_max)
    assert length / n <= s_max
    if n > 1:
        assert length / (n - 1) > s_max


@given(configs, configs, st.floats(0.3, 1.0), st.floats(0.05, 0.5))
def test_intermediate_spacing_and_end(q0, q1, r, s_max):
    p = shortest_path(q0, q1, r)
    nodes = intermediate_nodes(p, s_max)
    if p.is_degenerate:
        assert nodes == []
        return
    assert nodes[-1] == q1
    prev = q0
    for c in nodes:
        assert math.hypot(c.x - prev.x, c.y - prev.y) <= s_max + 1e-12  # chord <= arc
        prev = c


def menger_curvature(pts):
    a = np.hypot(*(pts[1:-1] - pts[:-2]).T)
    b = np.hypot(*(pts[2:] - pts[1:-1]).T)
    c = np.hypot(*(pts[2:] - pts[:-2]).T)
    u, v = pts[1:-1] - pts[:-2], pts[2:] - pts[:-2]
    cross = np.abs(u[:, 0] * v[:, 1] - u[:, 1] * v[:, 0])
    with np.errstate(invalid="ignore", divide="ignore"):
        k = 2.0 * cross / (a * b * c)
    return np.nan_to_num(k)


@given(configs, configs, st.floats(0.3, 1.5))
def test_sampled_curvature_bounded(q0, q1, r):
    p = shortest_path(q0, q1, r)
    if p.total_length < 1e-3:
        return
    pts = np.array([(c.x, c.y) for c in sample_path(p, 0.02)])
    if len(pts) < 3:
        return
    assert menger_curvature(pts).max() <= 1.0 / r + 1e-6
    # unit speed: chords never exceed the sampling arclength
    step = p.total_length / (len(pts) - 1)
    assert np.hypot(*np.diff(pts, axis=0).T).max() <= step + 1e-12


def test_goal_on_start_turning_circle_is_single_arc():
    # consecutive nodes along an arc: the start and goal circles coincide
    a = Config(3.1540009304483063, -1.811526286016837, 2.0719625939396935)
    b = Config(3.099340072511723, -1.653649431790726, 1.7362451071110634)
    path = shortest_path(a, b, 0.5)
    turn = a.theta - b.theta
    assert path.total_length == pytest.approx(0.5 * turn, abs=1e-9)
    assert pose_error(tuple(evaluate(path, path.total_length)), tuple(b)) < 1e-9
    for sign in (1.0, -1.0):
        start = Config(0.0, 0.0, 0.3)
        arc = evaluate(DubinsPath("LSL" if sign > 0 else "RSR", (0.4, 0.0, 0.0), 0.5, start, start, 0.2),
                       0.2)
        assert path_length(start, arc, 0.5) == pytest.approx(0.2, abs=1e-12)
        assert kernels.dubins_lengths([0.0], [0.0], [0.3], arc.x, arc.y, arc.theta, 0.5)[0] == \
            pytest.approx(0.2, abs=1e-12)
