"""Cardanic coupler curves and the straight-line degeneracy.

Fixing theta1 and theta2 constrains platform anchors B1 and B2 to slide
along two fixed lines while staying one platform edge apart; the third
vertex B3 then sweeps a Cardanic coupler curve as the orientation phi runs
a full cycle.  Generically that curve is an ellipse through a3.  When
theta2 - theta1 is pi/3 (mod pi) the vertex B3 lands on the moving
centrode of the two-slider motion and the ellipse collapses to a straight
segment: the mechanism behaves as a Reuleaux straight-line linkage, and
with the third angle at -pi/3 (mod pi) from the first the whole direct
kinematics degenerates to a continuum.

Intersecting the curve with the third leg's axis solves the direct problem
geometrically; this route shares only the loop-closure formulas with the
closed-form solver and is used to cross-check it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DegenerateLegPairError, NotReuleauxError
from .geometry import (
    DEFAULT_GEOMETRY,
    JointAngles,
    ManipulatorGeometry,
    Pose,
    Vec2,
    _as_angles,
    normalize_angle,
)
from .solvers import (
    DkKind,
    DkSolutionSet,
    LineDescriptor,
    REDUCTION_NULL_TOL,
    classify_dk_degeneracy,
    mn_coefficients,
)

__all__ = [
    "PAIR_SIN_TOL",
    "COLLINEARITY_TOL",
    "CurveSample",
    "CouplerCurve",
    "SegmentDescriptor",
    "ReuleauxDescriptor",
    "rho_from_phi",
    "trace_cardanic",
    "geometric_dkp",
    "reuleaux_descriptor",
]

# |sin(theta2 - theta1)| below this means the two slider lines are parallel
# and the curve construction is rank deficient.
PAIR_SIN_TOL = 1e-9

# Maximum point-line distance (relative to scale) under which a sampled
# curve counts as a straight segment.
COLLINEARITY_TOL = 1e-9

_THIRD_VERTEX_ANGLE = math.pi / 3.0


class CurveSample(NamedTuple):
    phi: float
    b3: Vec2
    rho1: float
    rho2: float


@dataclass(frozen=True)
class CouplerCurve:
    """Sampled trace of the third platform vertex over one orientation cycle.

    Samples are ordered by phi over (-pi, pi] (phi = 0 included for even
    sample counts, where the curve touches a3 exactly).  ``degenerate`` is
    decided by the measured collinearity of the samples, not by an angle
    predicate, so it reflects what the trace actually does; ``segment``
    holds the endpoints of the degenerate stroke when set.
    """

    theta1: float
    theta2: float
    samples: tuple[CurveSample, ...]
    degenerate: bool
    segment: tuple[Vec2, Vec2] | None
    scale: float


@dataclass(frozen=True)
class SegmentDescriptor:
    """A straight stroke: midpoint, unit direction, and half extent."""

    point: Vec2
    direction: Vec2
    half_length: float

    @property
    def length(self) -> float:
        return 2.0 * self.half_length

    def endpoints(self) -> tuple[Vec2, Vec2]:
        offset = self.direction * self.half_length
        return (self.point - offset, self.point + offset)


@dataclass(frozen=True)
class ReuleauxDescriptor:
    """Measured constants of the straight-line self-motion.

    ``p_line`` is the longest straight stroke of the platform reference
    point between serial singularities (leg extensions changing sign);
    ``a_displacement_magnitude`` is the full-cycle travel of each vertex
    along its slider axis, identical for the three legs.
    """

    p_line: SegmentDescriptor
    a_displacement_magnitude: float


def rho_from_phi(
    theta1: float,
    theta2: float,
    phi: float,
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
) -> tuple[float, float]:
    """Signed extensions of legs 1 and 2 at orientation ``phi``.

    Solves the loop closure of the quadrilateral a1-b1-b2-a2:

        rho1 = scale * (sin(t2)(1 - cos phi) + cos(t2) sin phi) / sin(t2 - t1)
        rho2 = scale * (sin(t1)(1 - cos phi) + cos(t1) sin phi) / sin(t2 - t1)

    Both vanish at phi = 0.  Raises :class:`DegenerateLegPairError` when the
    slider lines are parallel (|sin(t2 - t1)| < PAIR_SIN_TOL).
    """
    den = math.sin(theta2 - theta1)
    if abs(den) < PAIR_SIN_TOL:
        raise DegenerateLegPairError(
            f"legs parallel: sin(theta2 - theta1) = {den:.3e}"
        )
    one_minus_cos = 1.0 - math.cos(phi)
    sin_phi = math.sin(phi)
    rho1 = (math.sin(theta2) * one_minus_cos + math.cos(theta2) * sin_phi) / den
    rho2 = (math.sin(theta1) * one_minus_cos + math.cos(theta1) * sin_phi) / den
    return (geometry.scale * rho1, geometry.scale * rho2)


def _b3_at(
    theta1: float, theta2: float, phi: float, geometry: ManipulatorGeometry
) -> tuple[Vec2, float, float]:
    """Third vertex position plus the two slider extensions at ``phi``.

    B3 = a1 + rho1 v1 + R(phi) b3_local; the platform reference point is
    a1 + rho1 v1, so everything downstream (poses, intersections) reuses
    rho1.
    """
    rho1, rho2 = rho_from_phi(theta1, theta2, phi, geometry)
    s = geometry.scale
    a1 = geometry.base_anchor(1)
    b3 = Vec2(
        a1.x + rho1 * math.cos(theta1) + s * math.cos(phi + _THIRD_VERTEX_ANGLE),
        a1.y + rho1 * math.sin(theta1) + s * math.sin(phi + _THIRD_VERTEX_ANGLE),
    )
    return (b3, rho1, rho2)


def _cycle_grid(n_samples: int) -> np.ndarray:
    """n uniform phi values spanning (-pi, pi], endpoint included.

    For even n the grid contains phi = 0 exactly, where the curve meets a3.
    """
    k = np.arange(1, n_samples + 1, dtype=float)
    return -math.pi + k * (2.0 * math.pi / n_samples)


def trace_cardanic(
    theta1: float,
    theta2: float,
    n_samples: int = 720,
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
) -> CouplerCurve:
    """Sample the coupler curve of the third vertex over a full cycle.

    Degeneracy to a straight segment is detected by measuring the samples
    (max distance from their principal line below COLLINEARITY_TOL * scale);
    the angle criterion theta2 - theta1 = pi/3 (mod pi) is equivalent, and
    the dichotomy between the two is pinned by tests.

    Raises :class:`DegenerateLegPairError` for parallel slider lines, where
    no curve exists.
    """
    if n_samples < 8:
        raise ValueError(f"n_samples must be at least 8, got {n_samples}")
    t1 = normalize_angle(theta1)
    t2 = normalize_angle(theta2)
    samples = []
    for phi in _cycle_grid(n_samples):
        b3, rho1, rho2 = _b3_at(t1, t2, float(phi), geometry)
        samples.append(CurveSample(float(phi), b3, rho1, rho2))

    pts = np.array([(s.b3.x, s.b3.y) for s in samples])
    center = pts.mean(axis=0)
    spread = pts - center
    # Principal direction of the point cloud; the residual against it is the
    # collinearity measure.
    _, _, vt = np.linalg.svd(spread, full_matrices=False)
    major = vt[0]
    deviation = float(np.abs(spread @ vt[1]).max())
    degenerate = deviation < COLLINEARITY_TOL * geometry.scale

    segment: tuple[Vec2, Vec2] | None = None
    if degenerate:
        along = spread @ major
        lo = center + float(along.min()) * major
        hi = center + float(along.max()) * major
        segment = (Vec2(float(lo[0]), float(lo[1])), Vec2(float(hi[0]), float(hi[1])))

    return CouplerCurve(
        theta1=t1,
        theta2=t2,
        samples=tuple(samples),
        degenerate=degenerate,
        segment=segment,
        scale=geometry.scale,
    )


def geometric_dkp(
    theta: JointAngles | Sequence[float],
    curve: CouplerCurve | None = None,
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
    cluster_tol: float = 1e-7,
) -> DkSolutionSet:
    """Direct kinematics by intersecting the coupler curve with leg 3's axis.

    The signed distance of B3(phi) from the third slider line changes sign
    at every transversal assembly; crossings are bracketed on the sampled
    cycle (wrap included) and refined by bisection to 1e-12 in phi.  Each
    root maps back to a pose through rho1.  Shares no root formulas with
    the closed-form solver, which is the point: the two routes are compared
    in tests and by the command-line verifier.

    Returns the same solution-set type as the closed-form path so kinds and
    continua can be compared directly.
    """
    t = _as_angles(theta)
    m, n = mn_coefficients(t)
    kind = classify_dk_degeneracy(t)
    trivial = Pose(0.0, 0.0, 0.0)
    if kind is DkKind.CONTINUUM_TRANSLATION:
        line = LineDescriptor(Vec2(0.0, 0.0), Vec2(math.cos(t[0]), math.sin(t[0])))
        return DkSolutionSet(kind, (trivial,), m, n, continuum=line)

    if curve is None:
        curve = trace_cardanic(t[0], t[1], geometry=geometry)
    elif (
        abs(curve.theta1 - normalize_angle(t[0])) > 1e-12
        or abs(curve.theta2 - normalize_angle(t[1])) > 1e-12
        or curve.scale != geometry.scale
    ):
        raise ValueError("curve was traced for different angles or geometry")

    t3 = t[2]
    a3 = geometry.base_anchor(3)
    sin3, cos3 = math.sin(t3), math.cos(t3)

    def line_distance(phi: float) -> float:
        b3, _, _ = _b3_at(curve.theta1, curve.theta2, phi, geometry)
        return sin3 * (b3.x - a3.x) - cos3 * (b3.y - a3.y)

    phis = np.array([s.phi for s in curve.samples])
    dist = np.array(
        [sin3 * (s.b3.x - a3.x) - cos3 * (s.b3.y - a3.y) for s in curve.samples]
    )

    on_line = float(np.abs(dist).max()) < COLLINEARITY_TOL * geometry.scale
    if kind is DkKind.CONTINUUM_REULEAUX or (curve.degenerate and on_line):
        # The whole segment lies on the third axis: rotational self motion,
        # platform reference point running along leg 1's slider line.
        line = LineDescriptor(Vec2(0.0, 0.0), Vec2(math.cos(t[0]), math.sin(t[0])))
        return DkSolutionSet(DkKind.CONTINUUM_REULEAUX, (trivial,), m, n, continuum=line)

    roots = _cycle_roots(phis, dist, line_distance, geometry.scale)
    poses = []
    for phi in roots:
        rho1, _ = rho_from_phi(curve.theta1, curve.theta2, phi, geometry)
        poses.append(
            Pose(rho1 * math.cos(curve.theta1), rho1 * math.sin(curve.theta1), phi)
        )
    poses = _cluster_poses(poses, cluster_tol * max(geometry.scale, 1.0))
    poses.sort(key=lambda p: abs(p.phi))

    if len(poses) >= 2:
        return DkSolutionSet(DkKind.TWO_SOLUTIONS, tuple(poses), m, n)
    if len(poses) == 1 and m * m + n * n > REDUCTION_NULL_TOL:
        return DkSolutionSet(DkKind.TWO_SOLUTIONS, tuple(poses), m, n, coincident=True)
    return DkSolutionSet(DkKind.DEGENERATE, tuple(poses), m, n)


def _cycle_roots(phis, values, func, scale) -> list[float]:
    """Roots of a periodic sampled function, bisection-refined.

    Brackets come from sign changes between consecutive samples, including
    the wrap pair; samples that are zero within 1e-12 * scale are accepted
    directly so tangential touches are not lost.
    """
    n = len(phis)
    roots: list[float] = []
    for k in range(n):
        lo, flo = float(phis[k]), float(values[k])
        k2 = (k + 1) % n
        hi, fhi = float(phis[k2]), float(values[k2])
        if k2 == 0:
            hi += 2.0 * math.pi
        if abs(flo) < 1e-12 * scale:
            roots.append(normalize_angle(lo))
            continue
        if flo * fhi < 0.0:
            roots.append(normalize_angle(_bisect(func, lo, hi, flo)))
    return roots


def _bisect(func, lo: float, hi: float, flo: float, tol: float = 1e-12) -> float:
    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if hi - lo < tol:
            return mid
        fmid = func(mid)
        if fmid == 0.0:
            return mid
        if (flo < 0.0) == (fmid < 0.0):
            lo, flo = mid, fmid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _cluster_poses(poses: list[Pose], tol: float) -> list[Pose]:
    out: list[Pose] = []
    for pose in sorted(poses, key=lambda p: p.phi):
        for seen in out:
            if (
                abs(pose.x - seen.x) < tol
                and abs(pose.y - seen.y) < tol
                and abs(math.remainder(pose.phi - seen.phi, math.tau)) < tol
            ):
                break
        else:
            out.append(pose)
    return out


def reuleaux_descriptor(
    theta: JointAngles | Sequence[float],
    geometry: ManipulatorGeometry = DEFAULT_GEOMETRY,
    n_samples: int = 4096,
) -> ReuleauxDescriptor:
    """Measure the straight-line self-motion constants by a full-cycle sweep.

    For qualifying angles every orientation is admissible, each vertex b_i
    slides on the line through a_i, and the signed extensions rho_i(phi)
    are first-harmonic functions vanishing at phi = 0.  The sweep measures:

    * ``a_displacement_magnitude``: full-cycle extent max - min of each
      rho_i (the three agree; their mean is reported);
    * ``p_line``: the longest stroke of the reference point P = b1 along
      an arc free of interior serial singularities.  Zeros of any rho_i
      bound such arcs (crossing one reverses a slider), so the cycle is
      partitioned at all zeros and the P extent is maximized over the
      pieces.  For the unit geometry this stroke is 2 and the full-cycle
      travel is 4*sqrt(3)/3; both scale linearly.

    Raises :class:`NotReuleauxError` when the angle predicate fails or the
    sweep finds the third vertex off its slider line.
    """
    t = _as_angles(theta)
    if classify_dk_degeneracy(t) is not DkKind.CONTINUUM_REULEAUX:
        raise NotReuleauxError(
            f"angles {t} do not satisfy the straight-line degeneracy condition"
        )
    s = geometry.scale
    phis = _cycle_grid(n_samples)

    rho = np.empty((3, n_samples))
    off_line = 0.0
    t3 = t[2]
    a3 = geometry.base_anchor(3)
    for k, phi in enumerate(phis):
        b3, rho1, rho2 = _b3_at(t[0], t[1], float(phi), geometry)
        rho[0, k] = rho1
        rho[1, k] = rho2
        rho[2, k] = math.cos(t3) * (b3.x - a3.x) + math.sin(t3) * (b3.y - a3.y)
        off_line = max(
            off_line, abs(math.sin(t3) * (b3.x - a3.x) - math.cos(t3) * (b3.y - a3.y))
        )
    if off_line > 1e-6 * s:
        raise NotReuleauxError(
            f"third vertex leaves its slider line by {off_line:.3e}; "
            "the motion is not a straight-line continuum"
        )

    # Each extension has the form a (1 - cos phi) + b sin phi; a and b are
    # recovered exactly by discrete Fourier projection on the uniform grid.
    cos_g, sin_g = np.cos(phis), np.sin(phis)
    coeff_a = rho.mean(axis=1)
    coeff_b = 2.0 * (rho * sin_g).mean(axis=1)

    extents = 2.0 * np.hypot(coeff_a, coeff_b)
    displacement = float(extents.mean())

    # Zeros of a (1 - cos phi) + b sin phi: phi = 0 and 2 atan2(-b, a).
    boundaries = {0.0}
    for a_i, b_i in zip(coeff_a, coeff_b):
        boundaries.add(normalize_angle(2.0 * math.atan2(-b_i, a_i)))
    cuts = _dedupe_angles(sorted(boundaries))

    best = None
    a1, b1 = float(coeff_a[0]), float(coeff_b[0])
    for idx in range(len(cuts)):
        lo = cuts[idx]
        hi = cuts[(idx + 1) % len(cuts)]
        if idx + 1 == len(cuts):
            hi += 2.0 * math.pi
        lo_v, hi_v = _rho_extremes_on_arc(a1, b1, lo, hi)
        stroke = hi_v - lo_v
        if best is None or stroke > best[0]:
            best = (stroke, lo_v, hi_v)

    stroke, lo_v, hi_v = best
    v1 = Vec2(math.cos(t[0]), math.sin(t[0]))
    a1_anchor = geometry.base_anchor(1)
    mid = 0.5 * (lo_v + hi_v)
    p_line = SegmentDescriptor(
        point=Vec2(a1_anchor.x + mid * v1.x, a1_anchor.y + mid * v1.y),
        direction=v1,
        half_length=0.5 * stroke,
    )
    return ReuleauxDescriptor(p_line=p_line, a_displacement_magnitude=displacement)


def _rho_extremes_on_arc(a: float, b: float, lo: float, hi: float) -> tuple[float, float]:
    """Min and max of a (1 - cos phi) + b sin phi over [lo, hi]."""

    def f(phi: float) -> float:
        return a * (1.0 - math.cos(phi)) + b * math.sin(phi)

    candidates = [f(lo), f(hi)]
    # Interior critical points: a sin phi + b cos phi = 0.
    crit = math.atan2(-b, a)
    for cand in (crit, crit + math.pi, crit - math.pi, crit + 2.0 * math.pi):
        if lo < cand < hi:
            candidates.append(f(cand))
    return (min(candidates), max(candidates))


def _dedupe_angles(angles: list[float], tol: float = 1e-9) -> list[float]:
    """Collapse near-identical cycle positions, including the +-pi seam."""
    out: list[float] = []
    for a in angles:
        if out and a - out[-1] < tol:
            continue
        out.append(a)
    if len(out) > 1 and (out[0] + 2.0 * math.pi) - out[-1] < tol:
        out.pop()
    return out
