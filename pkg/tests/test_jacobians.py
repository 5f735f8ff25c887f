"""Velocity-level model: the A/B matrix pair and its degeneracies."""

import math

import numpy as np
import pytest

from rpr3.errors import (
    InconsistentStateError,
    ParallelSingularError,
    SerialSingularError,
)
from rpr3.geometry import (
    DEFAULT_GEOMETRY,
    ManipulatorGeometry,
    Pose,
    Vec2,
    constraint_residuals,
    platform_anchor,
    rotation_matrix,
)
from rpr3.jacobians import (
    SingularityKind,
    Twist,
    build_matrices,
    classify_singularity,
    det_A_specialized,
    forward_velocity,
    inverse_velocity,
)
from rpr3.solvers import inverse_kinematics

SQRT3 = math.sqrt(3.0)


def _consistent_config(rng, min_rho=0.05):
    """Random pose plus matching joint angles, away from base anchors."""
    while True:
        pose = Pose(
            rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5), rng.uniform(-math.pi, math.pi)
        )
        try:
            sol = inverse_kinematics(pose)
        except Exception:
            continue
        if min(sol.rhos()) >= min_rho:
            return pose, sol.angles


def test_matrix_entries_at_identity_pose():
    theta = (0.2, 0.9, 2.0)
    mats = build_matrices(Pose(0.0, 0.0, 0.0), theta)
    a = mats.a_matrix
    for i, t in enumerate(theta):
        assert abs(a[i, 0] + math.sin(t)) < 1e-15
        assert abs(a[i, 1] - math.cos(t)) < 1e-15
    # third column: moment arm of each anchor about the reference point
    assert a[0, 2] == 0.0
    assert abs(a[1, 2] - math.cos(theta[1])) < 1e-15
    third = math.cos(theta[2]) / 2.0 + SQRT3 * math.sin(theta[2]) / 2.0
    assert abs(a[2, 2] - third) < 1e-15
    assert mats.det_b == 0.0
    assert np.array_equal(mats.b_matrix, np.zeros((3, 3)))


def test_inconsistent_state_is_rejected():
    with pytest.raises(InconsistentStateError) as err:
        build_matrices(Pose(0.5, 0.0, 0.0), (math.pi / 2.0, 0.9, 2.0))
    assert max(map(abs, err.value.residuals)) > 0.4


def test_forward_inverse_velocity_roundtrip():
    rng = np.random.default_rng(42)
    for _ in range(200):
        pose, theta = _consistent_config(rng)
        mats = build_matrices(pose, theta)
        if mats.is_parallel_singular():
            continue
        rates = tuple(rng.uniform(-2.0, 2.0, 3))
        twist = forward_velocity(mats, rates)
        back = inverse_velocity(mats, twist)
        assert max(abs(a - b) for a, b in zip(back, rates)) < 1e-10


def test_zero_rates_give_zero_twist():
    rng = np.random.default_rng(5)
    pose, theta = _consistent_config(rng)
    twist = forward_velocity(build_matrices(pose, theta), (0.0, 0.0, 0.0))
    assert twist.linear.norm() == 0.0
    assert twist.angular == 0.0
    assert twist.as_array().shape == (3,)


def test_twist_constraint_directional_derivative():
    # moving along (twist, rates) must keep the constraints stationary:
    # r(pose + eps*twist, theta + eps*rates) = O(eps^2)
    rng = np.random.default_rng(77)
    eps = 1e-6
    for _ in range(50):
        pose, theta = _consistent_config(rng)
        mats = build_matrices(pose, theta)
        # a decent margin from the parallel stratum keeps the twist O(1),
        # so the quadratic remainder stays visible below the bound
        if abs(mats.det_a) < 1e-3 * np.linalg.norm(mats.a_matrix) ** 3:
            continue
        rates = tuple(rng.uniform(-1.0, 1.0, 3))
        twist = forward_velocity(mats, rates)
        moved = Pose(
            pose.x + eps * twist.linear.x,
            pose.y + eps * twist.linear.y,
            pose.phi + eps * twist.angular,
        )
        nudged = tuple(t + eps * w for t, w in zip(theta, rates))
        residual = max(map(abs, constraint_residuals(moved, nudged)))
        assert residual < 1e-9


def test_identity_pose_is_serial_for_any_angles():
    theta = (0.2, 0.9, 2.0)
    mats = build_matrices(Pose(0.0, 0.0, 0.0), theta)
    assert mats.det_b == 0.0
    assert mats.serial_zero_legs() == (1, 2, 3)
    with pytest.raises(SerialSingularError) as err:
        inverse_velocity(mats, Twist(Vec2(0.1, 0.0), 0.0))
    assert err.value.legs == (1, 2, 3)
    # with the actuators locked the platform cannot move: A t = 0 only at 0
    twist = forward_velocity(mats, (0.3, -0.2, 0.5))
    assert twist.linear.norm() < 1e-15
    assert abs(twist.angular) < 1e-15


def test_single_zero_extension_leg_reported():
    # platform rolled about anchor B2: leg 2 sits exactly on its base point
    phi = 0.4
    a2 = DEFAULT_GEOMETRY.base_anchor(2)
    r = rotation_matrix(phi)
    offset = r @ a2.as_array()
    pose = Pose(a2.x - offset[0], a2.y - offset[1], phi)
    sol_angles = []
    for leg in (1, 3):
        d = platform_anchor(pose, leg) - DEFAULT_GEOMETRY.base_anchor(leg)
        sol_angles.append(math.atan2(d.y, d.x))
    theta = (sol_angles[0], 0.7, sol_angles[1])  # leg 2 angle is free
    mats = build_matrices(pose, theta)
    assert mats.serial_zero_legs() == (2,)
    with pytest.raises(SerialSingularError) as err:
        inverse_velocity(mats, Twist(Vec2(0.0, 0.1), 0.0))
    assert err.value.legs == (2,)


def test_parallel_singular_forward_velocity_raises():
    mats = build_matrices(Pose(0.0, 0.0, 0.0), (0.5, 0.5, 0.5))
    assert mats.is_parallel_singular()
    with pytest.raises(ParallelSingularError):
        forward_velocity(mats, (0.1, 0.2, 0.3))


def test_det_a_specialized_matches_general_build():
    rng = np.random.default_rng(9)
    for theta in rng.uniform(-math.pi, math.pi, (1000, 3)):
        direct = det_A_specialized(tuple(theta))
        general = build_matrices(Pose(0.0, 0.0, 0.0), tuple(theta)).det_a
        assert abs(direct - general) < 1e-12


def test_det_a_specialized_zero_for_equal_angles():
    for t in np.linspace(-math.pi, math.pi, 25):
        assert det_A_specialized((t, t, t)) == 0.0


def test_det_a_specialized_scales_linearly():
    theta = (0.2, 0.9, 2.0)
    one = det_A_specialized(theta)
    two = det_A_specialized(theta, ManipulatorGeometry.from_scale(2.0))
    assert abs(two - 2.0 * one) < 1e-14


def test_classify_regular_configuration():
    rng = np.random.default_rng(15)
    pose, theta = _consistent_config(rng)
    report = classify_singularity(pose, theta)
    assert report.kind is SingularityKind.REGULAR
    assert report.zero_rho_legs == ()
    assert report.intersection_point is None


def test_classify_serial_at_identity():
    report = classify_singularity(Pose(0.0, 0.0, 0.0), (0.2, 0.9, 2.0))
    assert report.kind is SingularityKind.SERIAL
    assert report.zero_rho_legs == (1, 2, 3)


def test_classify_both_with_translation_flag():
    report = classify_singularity(Pose(0.0, 0.0, 0.0), (0.5, 0.5, 0.5))
    assert report.kind is SingularityKind.BOTH
    assert report.translation_case
    assert report.det_a == 0.0
    assert report.det_b == 0.0


def _parallel_config(rng):
    """Hunt a parallel singularity by bisecting det A along a pose path."""
    for _ in range(200):
        start = np.array(
            [rng.uniform(-0.3, 1.3), rng.uniform(-0.3, 1.3), rng.uniform(-2.5, 2.5)]
        )
        stop = np.array(
            [rng.uniform(-0.3, 1.3), rng.uniform(-0.3, 1.3), rng.uniform(-2.5, 2.5)]
        )

        def det_at(s):
            p = Pose(*(start + s * (stop - start)))
            try:
                sol = inverse_kinematics(p)
            except Exception:
                return None
            if min(sol.rhos()) < 1e-3:
                return None
            return build_matrices(p, sol.angles).det_a

        samples = [(s, det_at(s)) for s in np.linspace(0.0, 1.0, 33)]
        samples = [(s, d) for s, d in samples if d is not None]
        for (s0, d0), (s1, d1) in zip(samples, samples[1:]):
            if d0 == 0.0 or (d0 < 0.0) == (d1 < 0.0):
                continue
            for _ in range(80):
                mid = 0.5 * (s0 + s1)
                dm = det_at(mid)
                if dm is None:
                    break
                if (dm < 0.0) == (d0 < 0.0):
                    s0, d0 = mid, dm
                else:
                    s1, d1 = mid, dm
            else:
                p = Pose(*(start + s0 * (stop - start)))
                return p, inverse_kinematics(p).angles
    raise AssertionError("no parallel singularity found on random paths")


def test_classify_parallel_and_wrench_geometry():
    rng = np.random.default_rng(123)
    pose, theta = _parallel_config(rng)
    report = classify_singularity(pose, theta)
    assert report.kind in (SingularityKind.PARALLEL, SingularityKind.BOTH)
    center = report.intersection_point
    if center is None:
        pytest.skip("landed on an all-parallel pencil (point at infinity)")

    mats = build_matrices(pose, theta)
    # uncontrolled self motion: rotation about the common intersection point
    spin = np.array([-(pose.y - center.y), pose.x - center.x, 1.0])
    norm_a = np.linalg.norm(mats.a_matrix)
    assert np.linalg.norm(mats.a_matrix @ spin) < 1e-6 * norm_a * np.linalg.norm(spin)

    # every actuation wrench is a force whose line of action passes through
    # the same point: moment about the reference equals (center - p) x f
    for _ in range(5):
        z = rng.uniform(-1.0, 1.0, 3)
        wrench = mats.a_matrix.T @ z
        fx, fy, torque = wrench
        arm = (center.x - pose.x) * fy - (center.y - pose.y) * fx
        scale = max(1.0, math.hypot(fx, fy))
        assert abs(torque - arm) < 1e-6 * scale
