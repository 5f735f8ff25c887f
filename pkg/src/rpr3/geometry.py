"""Core geometry of the planar 3-RPR manipulator.

The mechanism has three legs.  Leg i is anchored to the ground at ``a_i``
through an actuated revolute joint (angle ``theta_i``), followed by a
passive prismatic joint (extension ``rho_i``), followed by a passive
revolute joint at the platform anchor ``b_i``.  Base and platform are
congruent equilateral triangles; the platform pose is the position of its
first vertex plus the orientation ``phi``.

All public functions take an optional :class:`ManipulatorGeometry`; the
default is the unit equilateral geometry.  Angles are radians and are kept
in the half-open interval (-pi, pi].
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import GeometryError

__all__ = [
    "Vec2",
    "Pose",
    "JointAngles",
    "LegState",
    "ManipulatorGeometry",
    "DEFAULT_GEOMETRY",
    "normalize_angle",
    "angle_difference",
    "rotation_matrix",
    "platform_anchor",
    "constraint_residuals",
    "signed_extensions",
    "load_geometry",
]

TAU = math.tau

# Vertices of the unit equilateral triangle shared by base and platform.
_UNIT_TRIANGLE = ((0.0, 0.0), (1.0, 0.0), (0.5, math.sqrt(3.0) / 2.0))


def normalize_angle(angle: float) -> float:
    """Reduce an angle to (-pi, pi].

    >>> normalize_angle(3 * math.pi)
    3.141592653589793
    """
    if not math.isfinite(angle):
        raise ValueError(f"angle must be finite, got {angle!r}")
    folded = math.remainder(angle, TAU)
    # remainder() lands in [-pi, pi]; fold the open endpoint.
    if folded <= -math.pi:
        folded += TAU
    return folded


def angle_difference(a: float, b: float, period: float = TAU) -> float:
    """Distance from ``a`` to ``b`` modulo ``period``, in [0, period/2]."""
    return abs(math.remainder(a - b, period))


@dataclass(frozen=True)
class Vec2:
    """Immutable planar vector."""

    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise GeometryError(
                f"components must be finite, got ({self.x!r}, {self.y!r})"
            )

    def __iter__(self) -> Iterator[float]:
        yield self.x
        yield self.y

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other.x, self.y + other.y)

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other.x, self.y - other.y)

    def __mul__(self, scalar: float) -> "Vec2":
        return Vec2(self.x * scalar, self.y * scalar)

    __rmul__ = __mul__

    def dot(self, other: "Vec2") -> float:
        return self.x * other.x + self.y * other.y

    def cross(self, other: "Vec2") -> float:
        """z component of the 3D cross product (signed parallelogram area)."""
        return self.x * other.y - self.y * other.x

    def perp(self) -> "Vec2":
        """Rotate by +90 degrees: (x, y) -> (-y, x)."""
        return Vec2(-self.y, self.x)

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def as_array(self) -> np.ndarray:
        return np.array((self.x, self.y), dtype=float)


@dataclass(frozen=True)
class Pose:
    """Platform pose: position of the first platform vertex and orientation.

    ``phi`` is normalized to (-pi, pi] on construction.
    """

    x: float
    y: float
    phi: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"position must be finite, got ({self.x!r}, {self.y!r})")
        object.__setattr__(self, "phi", normalize_angle(self.phi))

    @property
    def position(self) -> Vec2:
        return Vec2(self.x, self.y)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.phi)


@dataclass(frozen=True)
class LegState:
    """One leg's joint values in canonical form.

    The prismatic extension is kept nonnegative; a negative ``rho`` passed to
    the constructor is folded into the revolute angle (theta + pi, -rho).
    """

    theta: float
    rho: float

    def __post_init__(self) -> None:
        theta, rho = self.theta, self.rho
        if not math.isfinite(rho):
            raise ValueError(f"rho must be finite, got {rho!r}")
        if rho < 0.0:
            theta, rho = theta + math.pi, -rho
        object.__setattr__(self, "theta", normalize_angle(theta))
        object.__setattr__(self, "rho", rho)

    def signed_rho(self, direction: float) -> float:
        """Extension measured along ``direction`` instead of the canonical
        leg direction: +rho when the two agree (within a quarter turn either
        way), -rho when opposed.  This is what the diagonal of the inverse
        velocity matrix needs when the actuated angle sits on the flipped
        branch."""
        return self.rho if math.cos(self.theta - direction) >= 0.0 else -self.rho


@dataclass(frozen=True)
class JointAngles:
    """Actuated revolute angles, one per leg, normalized to (-pi, pi]."""

    theta1: float
    theta2: float
    theta3: float

    def __post_init__(self) -> None:
        for name in ("theta1", "theta2", "theta3"):
            object.__setattr__(self, name, normalize_angle(getattr(self, name)))

    def __iter__(self) -> Iterator[float]:
        yield self.theta1
        yield self.theta2
        yield self.theta3

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.theta1, self.theta2, self.theta3)


def _as_angles(theta: "JointAngles | Sequence[float]") -> tuple[float, float, float]:
    if isinstance(theta, JointAngles):
        return theta.as_tuple()
    t = tuple(float(v) for v in theta)
    if len(t) != 3:
        raise ValueError(f"expected 3 joint angles, got {len(t)}")
    return t


@dataclass(frozen=True)
class ManipulatorGeometry:
    """Anchor layout of the manipulator.

    Base anchors ``a1..a3`` and platform anchors ``b1..b3`` (in the platform
    frame) are the vertices of congruent equilateral triangles, both equal to
    ``scale`` times the unit triangle (0,0), (1,0), (1/2, sqrt(3)/2).  The
    first platform vertex coincides with the pose reference point, so
    ``b1_local`` is the origin.
    """

    a1: Vec2
    a2: Vec2
    a3: Vec2
    b1_local: Vec2
    b2_local: Vec2
    b3_local: Vec2
    scale: float = 1.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.scale) and self.scale > 0.0):
            raise GeometryError(f"scale must be positive and finite, got {self.scale!r}")
        tol = 1e-12 * self.scale
        for label, got in (("a", self.base_anchors()), ("b", self.platform_anchors_local())):
            for k, vec in enumerate(got, start=1):
                ux, uy = _UNIT_TRIANGLE[k - 1]
                want = Vec2(ux * self.scale, uy * self.scale)
                if (vec - want).norm() > tol:
                    raise GeometryError(
                        f"{label}{k} = ({vec.x!r}, {vec.y!r}) is not the scaled "
                        f"equilateral vertex ({want.x!r}, {want.y!r})"
                    )

    @classmethod
    def from_scale(cls, scale: float = 1.0) -> "ManipulatorGeometry":
        """Equilateral geometry with every anchor multiplied by ``scale``."""
        verts = tuple(Vec2(x * scale, y * scale) for x, y in _UNIT_TRIANGLE)
        return cls(*verts, *verts, scale=scale)

    def base_anchors(self) -> tuple[Vec2, Vec2, Vec2]:
        return (self.a1, self.a2, self.a3)

    def platform_anchors_local(self) -> tuple[Vec2, Vec2, Vec2]:
        return (self.b1_local, self.b2_local, self.b3_local)

    def base_anchor(self, leg: int) -> Vec2:
        """Base anchor of ``leg`` (1-based)."""
        return self.base_anchors()[_leg_index(leg)]

    def platform_anchor_local(self, leg: int) -> Vec2:
        """Platform anchor of ``leg`` (1-based), in the platform frame."""
        return self.platform_anchors_local()[_leg_index(leg)]


DEFAULT_GEOMETRY = ManipulatorGeometry.from_scale(1.0)


def _leg_index(leg: int) -> int:
    if leg not in (1, 2, 3):
        raise ValueError(f"leg must be 1, 2 or 3, got {leg!r}")
    return leg - 1


def rotation_matrix(phi: float) -> np.ndarray:
    """2x2 rotation by ``phi``."""
    c, s = math.cos(phi), math.sin(phi)
    return np.array(((c, -s), (s, c)))


def platform_anchor(
    pose: Pose, leg: int, geometry: ManipulatorGeometry = DEFAULT_GEOMETRY
) -> Vec2:
    """World position of platform anchor ``leg`` (1-based) at ``pose``.

    b_i = p + R(phi) b_i_local.  For leg 1 this is the pose position itself,
    exactly (the local anchor is the origin, no rounding enters).
    """
    local = geometry.platform_anchor_local(leg)
    c, s = math.cos(pose.phi), math.sin(pose.phi)
    return Vec2(
        pose.x + c * local.x - s * local.y,
        pose.y + s * local.x + c * local.y,
    )


def constraint_residuals(
    pose: Pose,
    theta: JointAngles | Sequence[float],
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
) -> tuple[float, float, float]:
    """Signed distance of each platform anchor from its leg's prismatic axis.

    Leg i constrains b_i to the line through a_i with direction
    v_i = (cos theta_i, sin theta_i); the residual is the cross product
    (b_i - a_i) x v_i = sin(theta_i) dx_i - cos(theta_i) dy_i.  All three
    vanish exactly when (pose, theta) is an assembly of the mechanism, and
    each value scales linearly with the geometry.
    """
    angles = _as_angles(theta)
    out = []
    for leg in (1, 2, 3):
        delta = platform_anchor(pose, leg, geometry) - geometry.base_anchor(leg)
        t = angles[leg - 1]
        out.append(math.sin(t) * delta.x - math.cos(t) * delta.y)
    return (out[0], out[1], out[2])


def signed_extensions(
    pose: Pose,
    theta: JointAngles | Sequence[float],
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
) -> tuple[float, float, float]:
    """Prismatic extension of each leg, signed along its direction vector.

    rho_i = (cos theta_i, sin theta_i) . (b_i - a_i).  Negative when the
    platform anchor lies behind the base anchor relative to the leg
    direction.  Complements :func:`constraint_residuals`: residual and
    signed extension are the transverse and longitudinal components of the
    same anchor offset.
    """
    angles = _as_angles(theta)
    out = []
    for leg in (1, 2, 3):
        delta = platform_anchor(pose, leg, geometry) - geometry.base_anchor(leg)
        t = angles[leg - 1]
        out.append(math.cos(t) * delta.x + math.sin(t) * delta.y)
    return (out[0], out[1], out[2])


def load_geometry(path: str | os.PathLike[str]) -> ManipulatorGeometry:
    """Read a geometry description from a JSON file.

    The file holds an object with a single ``scale`` entry, e.g.
    ``{"scale": 2.0}``.  Unknown keys are rejected to catch typos.
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise GeometryError(f"geometry file must hold a JSON object, got {type(data).__name__}")
    unknown = set(data) - {"scale"}
    if unknown:
        raise GeometryError(f"unknown geometry keys: {sorted(unknown)}")
    scale = data.get("scale", 1.0)
    if not isinstance(scale, (int, float)) or isinstance(scale, bool):
        raise GeometryError(f"scale must be a number, got {scale!r}")
    return ManipulatorGeometry.from_scale(float(scale))
