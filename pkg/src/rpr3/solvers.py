"""Position-level solvers: inverse and direct kinematics.

The inverse problem is elementary (each leg sees its platform anchor
directly).  The direct problem exploits the fact that each leg constraint is
affine in the platform position once the orientation is fixed: the
solvability condition of the three affine equations is a single
trigonometric equation m*cos(phi) + n*sin(phi) - m = 0, whose nontrivial
root has the closed form phi = atan2(2*m*n, m*m - n*n).  The trivial
assembly (every platform anchor on its base anchor, identity pose) is
always the other root.

Degenerate joint-angle triples admit a one-dimensional continuum of
assemblies instead of two isolated ones; ``classify_dk_degeneracy`` detects
these from angle predicates before any floating-point cancellation can hide
them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum, unique
from typing import Sequence

from .errors import DegenerateLegPairError, LegAtAnchorError
from .geometry import (
    DEFAULT_GEOMETRY,
    JointAngles,
    LegState,
    ManipulatorGeometry,
    Pose,
    Vec2,
    _as_angles,
    angle_difference,
    normalize_angle,
    platform_anchor,
)

__all__ = [
    "DEGENERACY_ANGLE_TOL",
    "REDUCTION_NULL_TOL",
    "IkSolution",
    "inverse_kinematics",
    "DkKind",
    "LineDescriptor",
    "DkSolutionSet",
    "mn_coefficients",
    "classify_dk_degeneracy",
    "position_from_orientation",
    "direct_kinematics",
]

# Angle-difference tolerance (radians) for the degeneracy predicates.  Wide
# enough that decimal constants printed with 8+ significant digits for pi/3
# and friends still land inside after parsing, yet ten orders of magnitude
# below anything a physical encoder resolves.
DEGENERACY_ANGLE_TOL = 5e-9

# Threshold on m*m + n*n (dimensionless) below which the orientation
# reduction cannot certify a second root.
REDUCTION_NULL_TOL = 1e-12

_SQRT3 = math.sqrt(3.0)
_LEG_PAIRS = ((1, 2), (2, 3), (1, 3))


@dataclass(frozen=True)
class IkSolution:
    """Inverse-kinematics result for one branch selection.

    ``branch[i]`` is 0 when leg i+1 aims at its platform anchor and 1 when
    it aims away (the extension runs negative through the base anchor).
    Leg states are canonical, so the branch shows up in ``theta`` and in the
    sign of ``signed_rhos``.
    """

    legs: tuple[LegState, LegState, LegState]
    branch: tuple[int, int, int]

    @property
    def angles(self) -> JointAngles:
        return JointAngles(*(leg.theta for leg in self.legs))

    def rhos(self) -> tuple[float, float, float]:
        l1, l2, l3 = self.legs
        return (l1.rho, l2.rho, l3.rho)

    def signed_rhos(self) -> tuple[float, float, float]:
        """Extensions measured along each leg's direction vector."""
        out = tuple(
            leg.rho * (1.0 - 2.0 * k) for leg, k in zip(self.legs, self.branch)
        )
        return (out[0], out[1], out[2])


def inverse_kinematics(
    pose: Pose,
    branch: Sequence[int] = (0, 0, 0),
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
    anchor_tol: float = 1e-9,
) -> IkSolution:
    """Joint values reaching ``pose``, one solution per leg branch.

    theta_i is the two-argument arctangent of b_i - a_i plus branch*pi,
    rho_i the anchor separation.  Raises :class:`LegAtAnchorError` listing
    every leg whose separation is below ``anchor_tol * scale``; those legs
    have arbitrary revolute angle and no meaningful branch.
    """
    br = tuple(int(k) for k in branch)
    if len(br) != 3 or any(k not in (0, 1) for k in br):
        raise ValueError(f"branch must be three flags in {{0, 1}}, got {branch!r}")
    tol = anchor_tol * geometry.scale
    legs: list[LegState] = []
    stuck: list[int] = []
    for leg in (1, 2, 3):
        delta = platform_anchor(pose, leg, geometry) - geometry.base_anchor(leg)
        rho = delta.norm()
        if rho < tol:
            stuck.append(leg)
            continue
        theta = math.atan2(delta.y, delta.x) + br[leg - 1] * math.pi
        legs.append(LegState(theta, rho))
    if stuck:
        raise LegAtAnchorError(tuple(stuck))
    return IkSolution((legs[0], legs[1], legs[2]), br)


@unique
class DkKind(Enum):
    """Structure of the direct-kinematics solution set."""

    TWO_SOLUTIONS = "TwoSolutions"
    TRIVIAL_ONLY = "TrivialOnly"
    CONTINUUM_TRANSLATION = "ContinuumTranslation"
    CONTINUUM_REULEAUX = "ContinuumReuleaux"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class LineDescriptor:
    """A line in the plane: a point on it and a unit direction."""

    point: Vec2
    direction: Vec2


@dataclass(frozen=True)
class DkSolutionSet:
    """Direct-kinematics output.

    ``poses`` holds the isolated assemblies found, trivial identity pose
    first.  ``m`` and ``n`` are the orientation-reduction coefficients
    (dimensionless; identical for every leg-pair elimination, see
    :func:`mn_coefficients`).  ``continuum`` describes the translational
    self-motion line when ``kind`` is CONTINUUM_TRANSLATION; the rotational
    continuum is described by the coupler-curve module instead.
    ``coincident`` flags a nontrivial root that collapses onto the trivial
    one.
    """

    kind: DkKind
    poses: tuple[Pose, ...]
    m: float
    n: float
    continuum: LineDescriptor | None = None
    coincident: bool = False


def mn_coefficients(theta: JointAngles | Sequence[float]) -> tuple[float, float]:
    """Orientation-reduction coefficients.

    Eliminating the platform position from the three leg constraints leaves
    the solvability condition m*cos(phi) + n*sin(phi) - m = 0 with

        m = 2 sin(t3 - t1) sin(t2) - sin(t2 - t1) (sin(t3) - sqrt(3) cos(t3))
        n = -2 sin(t3 - t1) cos(t2) + sin(t2 - t1) (cos(t3) + sqrt(3) sin(t3))

    The condition is the 3x3 determinant of the stacked affine constraints,
    so it does not depend on which leg pair is nominally "eliminated"; both
    coefficients are dimensionless and unaffected by the geometry scale.
    """
    t1, t2, t3 = _as_angles(theta)
    m = 2.0 * math.sin(t3 - t1) * math.sin(t2) - math.sin(t2 - t1) * (
        math.sin(t3) - _SQRT3 * math.cos(t3)
    )
    n = -2.0 * math.sin(t3 - t1) * math.cos(t2) + math.sin(t2 - t1) * (
        math.cos(t3) + _SQRT3 * math.sin(t3)
    )
    return (m, n)


def classify_dk_degeneracy(
    theta: JointAngles | Sequence[float], tol: float = DEGENERACY_ANGLE_TOL
) -> DkKind:
    """Detect self-motion continua from the joint angles alone.

    A continuum exists in exactly two situations (angle comparisons mod pi,
    since reversing a leg direction only flips its extension sign):

    * all three directions parallel: the platform translates freely along
      them (CONTINUUM_TRANSLATION);
    * directions offset by (+pi/3, -pi/3) from leg 1: every orientation is
      reachable and the platform vertices run on straight lines
      (CONTINUUM_REULEAUX).  The offsets are chiral; swapping them yields an
      ordinary two-solution configuration, which is easy to confirm by a
      brute-force scan.

    Everything else is TWO_SOLUTIONS (the generic structure; whether the two
    roots actually differ is reported by :func:`direct_kinematics`).
    """
    t1, t2, t3 = _as_angles(theta)
    if (
        angle_difference(t2, t1, math.pi) < tol
        and angle_difference(t3, t1, math.pi) < tol
    ):
        return DkKind.CONTINUUM_TRANSLATION
    if (
        angle_difference(t2 - t1, math.pi / 3.0, math.pi) < tol
        and angle_difference(t3 - t1, -math.pi / 3.0, math.pi) < tol
    ):
        return DkKind.CONTINUUM_REULEAUX
    return DkKind.TWO_SOLUTIONS


def position_from_orientation(
    theta: JointAngles | Sequence[float],
    phi: float,
    pair: tuple[int, int] | None = None,
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
) -> Pose:
    """Platform position on the constraint variety at orientation ``phi``.

    Two legs' affine constraints are solved for (x, y); ``pair`` picks them,
    defaulting to the best-conditioned pair (largest |sin| of the angle
    difference).  The result satisfies the third constraint only when
    ``phi`` is a root of the orientation reduction; callers own that check.

    Raises :class:`DegenerateLegPairError` when the chosen (or every) pair
    is parallel within 1e-9.
    """
    t = _as_angles(theta)
    if pair is None:
        pair = max(_LEG_PAIRS, key=lambda ij: abs(math.sin(t[ij[1] - 1] - t[ij[0] - 1])))
    elif tuple(sorted(pair)) not in _LEG_PAIRS:
        raise ValueError(f"pair must be two distinct legs in 1..3, got {pair!r}")
    i, j = pair
    ti, tj = t[i - 1], t[j - 1]
    det = math.sin(tj - ti)
    if abs(det) < 1e-9:
        raise DegenerateLegPairError(
            f"legs {i} and {j} are parallel (sin difference {det:.3e}); "
            "their constraints cannot be solved for the position"
        )
    ci = _c_of_phi(t, i, phi, geometry)
    cj = _c_of_phi(t, j, phi, geometry)
    x = (ci * math.cos(tj) - cj * math.cos(ti)) / det
    y = (ci * math.sin(tj) - cj * math.sin(ti)) / det
    return Pose(x, y, phi)


def direct_kinematics(
    theta: JointAngles | Sequence[float],
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
) -> DkSolutionSet:
    """All assemblies compatible with the given revolute angles.

    The identity pose is always an assembly.  Generic angles admit exactly
    one more, at phi = atan2(2mn, m^2 - n^2) with the position
    back-substituted through the best-conditioned leg pair.  Degeneracies
    are classified results, not failures: angle predicates catch the two
    continuum families first, and a vanishing reduction that matches
    neither predicate is reported as DEGENERATE rather than guessed at.
    """
    t = _as_angles(theta)
    m, n = mn_coefficients(t)
    kind = classify_dk_degeneracy(t)
    trivial = Pose(0.0, 0.0, 0.0)

    if kind is DkKind.CONTINUUM_TRANSLATION:
        line = LineDescriptor(Vec2(0.0, 0.0), Vec2(math.cos(t[0]), math.sin(t[0])))
        return DkSolutionSet(kind, (trivial,), m, n, continuum=line)
    if kind is DkKind.CONTINUUM_REULEAUX:
        return DkSolutionSet(kind, (trivial,), m, n)

    if m * m + n * n <= REDUCTION_NULL_TOL:
        return DkSolutionSet(DkKind.DEGENERATE, (trivial,), m, n)

    phi2 = math.atan2(2.0 * m * n, m * m - n * n)
    second = position_from_orientation(t, phi2, geometry=geometry)
    coincident = abs(normalize_angle(phi2)) < DEGENERACY_ANGLE_TOL
    return DkSolutionSet(
        DkKind.TWO_SOLUTIONS, (trivial, second), m, n, coincident=coincident
    )


# --- reduction internals ----------------------------------------------------
#
# With phi fixed, leg i's constraint is affine in the platform position:
#     sin(t_i) x - cos(t_i) y + c_i(phi) = 0,
#     c_i(phi) = Ai cos(phi) + Bi sin(phi) + Di,
# and because each platform anchor coincides with its base anchor at the
# identity pose, c_i(0) = 0 for every leg.


def _c_coefficients(t: float, b_local: Vec2, a: Vec2) -> tuple[float, float, float]:
    st, ct = math.sin(t), math.cos(t)
    ai = st * b_local.x - ct * b_local.y
    bi = -(ct * b_local.x + st * b_local.y)
    di = -(st * a.x - ct * a.y)
    return (ai, bi, di)


def _c_of_phi(
    t: tuple[float, float, float],
    leg: int,
    phi: float,
    geometry: ManipulatorGeometry,
) -> float:
    ai, bi, di = _c_coefficients(
        t[leg - 1], geometry.platform_anchor_local(leg), geometry.base_anchor(leg)
    )
    return ai * math.cos(phi) + bi * math.sin(phi) + di
