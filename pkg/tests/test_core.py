import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from bipedrrt.core import (
    Config,
    KinematicParams,
    Pose2,
    normalize_angle,
    signed_angle,
    to_global,
    to_local,
    vector_to_global,
    vector_to_local,
)
from oracles import h_to_global, h_to_local

finite = st.floats(-1e3, 1e3, allow_nan=False)
angle = st.floats(-20.0, 20.0, allow_nan=False)


@pytest.mark.parametrize(
    "theta, expected",
    [(0.0, 0.0), (-math.pi / 2, 3 * math.pi / 2), (7 * math.pi / 2, 3 * math.pi / 2)],
)
def test_normalize_angle_examples(theta, expected):
    assert normalize_angle(theta) == pytest.approx(expected, abs=1e-15)


@pytest.mark.parametrize("bad", [math.inf, -math.inf, math.nan])
def test_normalize_angle_rejects_non_finite(bad):
    with pytest.raises(ValueError):
        normalize_angle(bad)


@given(angle)
def test_normalize_angle_range_and_congruence(theta):
    out = normalize_angle(theta)
    assert 0.0 <= out < 2 * math.pi
    assert math.remainder(out - theta, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)


@given(angle)
def test_signed_angle_range(theta):
    out = signed_angle(theta)
    assert -math.pi < out <= math.pi
    assert math.remainder(out - theta, 2 * math.pi) == pytest.approx(0.0, abs=1e-12)


def test_config_normalizes_heading_and_rejects_nan():
    assert Config(1.0, 2.0, -math.pi / 2).theta == pytest.approx(3 * math.pi / 2)
    with pytest.raises(ValueError):
        Config(math.nan, 0.0, 0.0)
    with pytest.raises(ValueError):
        Config(0.0, math.inf, 0.0)


def test_pose_normalizes_heading():
    assert Pose2((0.0, 0.0), 2 * math.pi + 0.5).theta == pytest.approx(0.5)


@pytest.mark.parametrize(
    "frame, p, expected",
    [
        (((0.0, 0.0), 0.0), (3.0, 4.0), (3.0, 4.0)),
        (((1.0, 0.0), math.pi / 2), (1.0, 2.0), (2.0, 0.0)),
        (((0.195, -0.052), 0.0), (0.365, -0.052), (0.17, 0.0)),
    ],
)
def test_to_local_examples(frame, p, expected):
    out = to_local(Pose2(*frame), p)
    assert out == pytest.approx(expected, abs=1e-12)
    assert out == pytest.approx(h_to_local(frame[0], frame[1], p), abs=1e-12)


@pytest.mark.parametrize(
    "frame, p, expected",
    [
        (((0.0, 0.0), 0.0), (3.0, 4.0), (3.0, 4.0)),
        (((1.0, 0.0), math.pi / 2), (2.0, 0.0), (1.0, 2.0)),
    ],
)
def test_to_global_examples(frame, p, expected):
    assert to_global(Pose2(*frame), p) == pytest.approx(expected, abs=1e-12)


@given(finite, finite, angle, finite, finite)
def test_transforms_match_homogeneous_matrices(ox, oy, th, px, py):
    f = Pose2((ox, oy), th)
    assert to_global(f, (px, py)) == pytest.approx(h_to_global((ox, oy), th, (px, py)), abs=1e-9)
    assert to_local(f, (px, py)) == pytest.approx(h_to_local((ox, oy), th, (px, py)), abs=1e-9)


@given(st.floats(-10, 10), st.floats(-10, 10), angle, st.floats(-10, 10), st.floats(-10, 10))
def test_round_trip(ox, oy, th, px, py):
    f = Pose2((ox, oy), th)
    back = to_global(f, to_local(f, (px, py)))
    assert back == pytest.approx((px, py), abs=1e-12)


def test_velocity_transform_ignores_translation():
    far = Pose2((100.0, -50.0), math.pi / 2)
    near = Pose2((0.0, 0.0), math.pi / 2)
    v = (0.3, 0.1)
    assert vector_to_local(far, v) == pytest.approx(vector_to_local(near, v))
    assert vector_to_local(far, v) == pytest.approx((0.1, -0.3))
    assert vector_to_global(far, (0.1, -0.3)) == pytest.approx(v)
    # positions do see the translation
    assert to_local(far, (100.0, -49.0)) == pytest.approx((1.0, 0.0))


def test_kinematic_params_validation():
    KinematicParams(0.5, 0.17, 0.3)
    for args in [(0.0, 0.17, 0.3), (0.5, -0.1, 0.3), (0.5, 0.17, 0.0), (0.1, 0.7, 0.3)]:
        with pytest.raises(ValueError):
            KinematicParams(*args)


def test_config_close_to_wraps_heading():
    a = Config(0.0, 0.0, 0.01)
    b = Config(0.02, 0.0, 2 * math.pi - 0.01)
    assert a.close_to(b, 0.05, 0.1)
    assert not a.close_to(b, 0.01, 0.1)
    assert not a.close_to(b, 0.05, 0.01)
