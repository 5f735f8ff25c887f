"""Frame conventions, anchor placement, and the residual sign convention."""

import json
import math

import numpy as np
import pytest

from rpr3.errors import GeometryError
from rpr3.geometry import (
    DEFAULT_GEOMETRY,
    JointAngles,
    LegState,
    ManipulatorGeometry,
    Pose,
    Vec2,
    angle_difference,
    constraint_residuals,
    load_geometry,
    normalize_angle,
    platform_anchor,
    rotation_matrix,
    signed_extensions,
)

SQRT3 = math.sqrt(3.0)


def test_normalize_angle_half_open_range():
    assert normalize_angle(0.0) == 0.0
    assert normalize_angle(math.pi) == math.pi
    # -pi is the excluded endpoint; it folds to +pi.
    assert normalize_angle(-math.pi) == math.pi
    assert abs(normalize_angle(3.0 * math.pi) - math.pi) < 1e-15
    assert abs(normalize_angle(7.1) - (7.1 - 2.0 * math.pi)) < 1e-15


def test_normalize_angle_idempotent_on_many_values():
    rng = np.random.default_rng(7)
    for raw in rng.uniform(-50.0, 50.0, 500):
        a = normalize_angle(float(raw))
        assert -math.pi < a <= math.pi
        assert normalize_angle(a) == a


def test_angle_difference_wraps():
    assert angle_difference(0.1, 0.1 + 2.0 * math.pi) < 1e-15
    assert abs(angle_difference(-3.0, 3.0) - (2.0 * math.pi - 6.0)) < 1e-15
    # period pi: direction-reversal equivalence used by the degeneracy tests
    assert angle_difference(0.2, 0.2 + math.pi, period=math.pi) < 1e-15


def test_vec2_algebra():
    u = Vec2(3.0, 4.0)
    v = Vec2(-1.0, 2.0)
    assert u.norm() == 5.0
    assert u.dot(v) == 5.0
    assert u.cross(v) == 10.0
    assert (u + v) == Vec2(2.0, 6.0)
    assert (u - v) == Vec2(4.0, 2.0)
    assert u * 0.5 == Vec2(1.5, 2.0)
    assert u.perp() == Vec2(-4.0, 3.0)
    assert u.perp().dot(u) == 0.0
    assert tuple(u) == (3.0, 4.0)


@pytest.mark.parametrize("bad", [math.nan, math.inf, -math.inf])
def test_vec2_rejects_nonfinite(bad):
    with pytest.raises(GeometryError):
        Vec2(bad, 0.0)
    with pytest.raises(GeometryError):
        Vec2(0.0, bad)


def test_pose_normalizes_orientation():
    p = Pose(0.1, -0.2, 5.0 * math.pi)
    assert abs(p.phi - math.pi) < 1e-15
    assert p.position == Vec2(0.1, -0.2)
    assert p.as_tuple() == (0.1, -0.2, p.phi)


def test_rotation_matrix_is_special_orthogonal():
    rng = np.random.default_rng(11)
    for phi in rng.uniform(-math.pi, math.pi, 1000):
        r = rotation_matrix(float(phi))
        assert np.allclose(r.T @ r, np.eye(2), atol=1e-15)
        assert abs(np.linalg.det(r) - 1.0) < 1e-15
    assert np.array_equal(rotation_matrix(0.0), np.eye(2))


def test_default_geometry_vertices():
    g = DEFAULT_GEOMETRY
    assert g.base_anchor(1) == Vec2(0.0, 0.0)
    assert g.base_anchor(2) == Vec2(1.0, 0.0)
    assert g.base_anchor(3) == Vec2(0.5, SQRT3 / 2.0)
    # platform anchors coincide with the base ones in the local frame
    assert g.platform_anchors_local() == g.base_anchors()
    with pytest.raises(ValueError):
        g.base_anchor(0)
    with pytest.raises(ValueError):
        g.base_anchor(4)


def test_geometry_scaling():
    g = ManipulatorGeometry.from_scale(2.0)
    assert g.base_anchor(2) == Vec2(2.0, 0.0)
    assert g.base_anchor(3) == Vec2(1.0, SQRT3)
    with pytest.raises(GeometryError):
        ManipulatorGeometry.from_scale(0.0)
    with pytest.raises(GeometryError):
        ManipulatorGeometry.from_scale(-1.0)


def test_geometry_rejects_non_equilateral_layout():
    g = DEFAULT_GEOMETRY
    bent = Vec2(0.5, SQRT3 / 2.0 + 1e-6)
    with pytest.raises(GeometryError):
        ManipulatorGeometry(g.a1, g.a2, bent, g.b1_local, g.b2_local, g.b3_local)


def test_platform_anchor_frozen_value():
    # independently derived: a2 rotated by 0.5 rad and shifted by (0.3, 0.2)
    b2 = platform_anchor(Pose(0.3, 0.2, 0.5), 2)
    assert abs(b2.x - 1.1775825618903728) < 1e-15
    assert abs(b2.y - 0.679425538604203) < 1e-15


def test_platform_anchors_at_identity_pose_sit_on_base():
    for scale in (1.0, 2.0):
        g = ManipulatorGeometry.from_scale(scale)
        for leg in (1, 2, 3):
            anchor = platform_anchor(Pose(0.0, 0.0, 0.0), leg, g)
            assert anchor == g.base_anchor(leg)


def test_first_anchor_is_the_reference_point():
    pose = Pose(-0.4, 0.9, 2.2)
    assert platform_anchor(pose, 1) == Vec2(-0.4, 0.9)


def test_residual_sign_convention():
    # residual_i = sin(t_i) dx - cos(t_i) dy, the cross product of the
    # anchor offset with the leg direction; frozen by a hand example.
    r = constraint_residuals(Pose(0.1, 0.0, 0.0), (math.pi / 2.0, 0.0, 0.0))
    assert abs(r[0] - 0.1) < 1e-16
    r = constraint_residuals(Pose(0.0, 0.1, 0.0), (0.0, 0.0, 0.0))
    assert abs(r[0] + 0.1) < 1e-16


def test_residuals_vanish_at_identity_for_any_angles():
    rng = np.random.default_rng(3)
    pose = Pose(0.0, 0.0, 0.0)
    for theta in rng.uniform(-math.pi, math.pi, (200, 3)):
        assert constraint_residuals(pose, theta) == (0.0, 0.0, 0.0)


def test_signed_extensions_measure_anchor_projection():
    rng = np.random.default_rng(4)
    for _ in range(100):
        pose = Pose(*rng.uniform(-0.8, 1.8, 2), rng.uniform(-math.pi, math.pi))
        for leg in (1, 2, 3):
            offset = platform_anchor(pose, leg) - DEFAULT_GEOMETRY.base_anchor(leg)
            direction = math.atan2(offset.y, offset.x)
            theta = [0.0, 0.0, 0.0]
            theta[leg - 1] = direction
            ext = signed_extensions(pose, theta)[leg - 1]
            assert abs(ext - offset.norm()) < 1e-12
            theta[leg - 1] = direction + math.pi
            ext = signed_extensions(pose, theta)[leg - 1]
            assert abs(ext + offset.norm()) < 1e-12


def test_leg_state_folds_negative_extension():
    leg = LegState(0.2, -0.5)
    assert leg.rho == 0.5
    assert abs(leg.theta - normalize_angle(0.2 + math.pi)) < 1e-15
    # the signed accessor undoes the fold relative to the original heading
    assert leg.signed_rho(0.2) == -0.5
    assert leg.signed_rho(leg.theta) == 0.5


def test_leg_state_rejects_nonfinite_extension():
    with pytest.raises(ValueError):
        LegState(0.0, math.nan)


def test_joint_angles_normalize_and_iterate():
    ja = JointAngles(3.0 * math.pi, 0.25, -math.pi)
    assert abs(ja.theta1 - math.pi) < 1e-15
    assert ja.theta3 == math.pi
    assert ja.as_tuple() == tuple(ja)


def test_load_geometry_roundtrip(tmp_path):
    path = tmp_path / "geom.json"
    path.write_text(json.dumps({"scale": 2.5}))
    g = load_geometry(path)
    assert g.scale == 2.5
    assert g.base_anchor(2) == Vec2(2.5, 0.0)


def test_load_geometry_rejects_unknown_keys(tmp_path):
    path = tmp_path / "geom.json"
    path.write_text(json.dumps({"scale": 1.0, "skew": 0.2}))
    with pytest.raises(GeometryError):
        load_geometry(path)


def test_load_geometry_rejects_non_object(tmp_path):
    path = tmp_path / "geom.json"
    path.write_text("[1, 2]")
    with pytest.raises(GeometryError):
        load_geometry(path)


def test_load_geometry_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_geometry(tmp_path / "absent.json")
