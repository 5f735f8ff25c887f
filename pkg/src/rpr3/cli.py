"""Command-line workbench for the planar 3-RPR manipulator.

Subcommands
-----------
ik            inverse kinematics for a pose (all eight branches or one)
dk            direct kinematics for actuated angles (closed form, geometric
              curve intersection, or both with cross-validation)
singularity   Jacobian classification report for one configuration
trace         coupler-curve sample table and optional figure
sweep         detA / detB field over a joint- or cartesian-space grid
verify        randomized self-checks of the solvers against the oracle

Exit codes: 0 success, 1 usage, 2 singular or degenerate input, 3 I/O
problem, 4 verification failure.  All angles are radians unless --deg is
given, which converts both inputs and outputs.  Set RPR_GEOMETRY to a JSON
file ``{"scale": s}`` to change the mechanism size.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .coupler import geometric_dkp, reuleaux_descriptor, rho_from_phi, trace_cardanic
from .errors import (
    DegenerateLegPairError,
    GeometryError,
    InconsistentStateError,
    LegAtAnchorError,
    NotReuleauxError,
    ParallelSingularError,
    SerialSingularError,
    SingularNearbyError,
)
from .geometry import (
    DEFAULT_GEOMETRY,
    ManipulatorGeometry,
    Pose,
    load_geometry,
    normalize_angle,
    platform_anchor,
)
from .jacobians import build_matrices, classify_singularity
from .oracle import dkp_bruteforce, jacobian_fd_check
from .solvers import (
    DkKind,
    classify_dk_degeneracy,
    direct_kinematics,
    inverse_kinematics,
    mn_coefficients,
)
from . import figio

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_SINGULAR = 2
EXIT_IO = 3
EXIT_VERIFY = 4

_ANGLE_AXES = {"t1", "t2", "t3", "phi"}


class _UsageError(Exception):
    """Bad flag combination detected after argparse accepted the line."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage by default; 2 is reserved for
    # singular inputs here, so remap usage problems to 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="rpr3",
        description="kinematic workbench for the planar 3-RPR manipulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_ik = sub.add_parser("ik", help="inverse kinematics for a platform pose")
    _add_pose_flags(p_ik)
    p_ik.add_argument(
        "--branch",
        default="all",
        help="three binary digits selecting per-leg angle branches, or 'all'",
    )
    _add_deg_flag(p_ik)
    p_ik.set_defaults(handler=_cmd_ik)

    p_dk = sub.add_parser("dk", help="direct kinematics for actuated angles")
    _add_theta_flags(p_dk, required=True)
    p_dk.add_argument(
        "--method",
        choices=("closed", "geometric", "both"),
        default="closed",
        help="solution route; 'both' cross-checks the two and fails on mismatch",
    )
    _add_deg_flag(p_dk)
    p_dk.set_defaults(handler=_cmd_dk)

    p_sing = sub.add_parser(
        "singularity", help="classify the Jacobian state of one configuration"
    )
    _add_pose_flags(p_sing)
    _add_theta_flags(p_sing, required=False)
    p_sing.add_argument(
        "--branch",
        default="000",
        help="inverse-kinematics branch used when angles are not given",
    )
    _add_deg_flag(p_sing)
    p_sing.set_defaults(handler=_cmd_singularity)

    p_trace = sub.add_parser(
        "trace", help="trace the third-anchor coupler curve for two fixed angles"
    )
    p_trace.add_argument("--t1", type=float, required=True, help="first leg angle")
    p_trace.add_argument("--t2", type=float, required=True, help="second leg angle")
    p_trace.add_argument(
        "--samples", type=int, default=720, help="number of orientation samples"
    )
    p_trace.add_argument("--csv", required=True, help="output CSV path")
    p_trace.add_argument("--svg", help="optional output SVG path")
    _add_deg_flag(p_trace)
    p_trace.set_defaults(handler=_cmd_trace)

    p_sweep = sub.add_parser(
        "sweep", help="tabulate detA/detB over a grid of configurations"
    )
    p_sweep.add_argument(
        "--space",
        choices=("joint", "cartesian"),
        required=True,
        help="grid over actuated angles or over platform poses",
    )
    for axis, what in (
        ("t1", "first leg angle"),
        ("t2", "second leg angle"),
        ("t3", "third leg angle"),
        ("x", "platform x"),
        ("y", "platform y"),
        ("phi", "platform orientation"),
    ):
        p_sweep.add_argument(
            f"--{axis}",
            help=f"{what}: fixed value 'v' or range 'lo:hi:n'",
        )
    p_sweep.add_argument("--csv", required=True, help="output CSV path")
    p_sweep.add_argument("--svg", help="optional zero-contour SVG (two swept axes)")
    p_sweep.add_argument(
        "--quantity",
        choices=("detA", "detB"),
        default="detA",
        help="field rendered in the SVG contour",
    )
    _add_deg_flag(p_sweep)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_verify = sub.add_parser(
        "verify", help="randomized cross-checks of solvers against the oracle"
    )
    p_verify.add_argument(
        "--scope",
        choices=("all", "dkp", "jacobian", "curves"),
        default="all",
        help="which check families to run",
    )
    p_verify.add_argument("--trials", type=int, default=200, help="trials per scope")
    p_verify.add_argument("--seed", type=int, default=0, help="random seed")
    p_verify.add_argument(
        "--csv", help="recheck a previously written trace CSV (curves scope)"
    )
    p_verify.set_defaults(handler=_cmd_verify)

    return parser


def _add_pose_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x", type=float, required=True, help="platform x")
    parser.add_argument("--y", type=float, required=True, help="platform y")
    parser.add_argument(
        "--phi", type=float, required=True, help="platform orientation"
    )


def _add_theta_flags(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument("--t1", type=float, required=required, help="first leg angle")
    parser.add_argument("--t2", type=float, required=required, help="second leg angle")
    parser.add_argument("--t3", type=float, required=required, help="third leg angle")


def _add_deg_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--deg",
        action="store_true",
        help="angles on the command line and in output are degrees",
    )


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        geom = _geometry_from_env()
    except (OSError, json.JSONDecodeError, GeometryError) as exc:
        print(f"rpr3: geometry error: {exc}", file=sys.stderr)
        return EXIT_IO
    try:
        return args.handler(args, geom)
    except _UsageError as exc:
        print(f"rpr3: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except LegAtAnchorError as exc:
        print(f"rpr3: serial singularity: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (
        DegenerateLegPairError,
        NotReuleauxError,
        InconsistentStateError,
        ParallelSingularError,
        SerialSingularError,
        SingularNearbyError,
    ) as exc:
        print(f"rpr3: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except OSError as exc:
        print(f"rpr3: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO


def _geometry_from_env() -> ManipulatorGeometry:
    path = os.environ.get("RPR_GEOMETRY")
    if not path:
        return DEFAULT_GEOMETRY
    return load_geometry(path)


def _in_angle(value: float, deg: bool) -> float:
    return math.radians(value) if deg else value


def _out_angle(value: float, deg: bool) -> float:
    return math.degrees(value) if deg else value


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _pose_payload(pose: Pose, deg: bool) -> dict:
    return {"x": pose.x, "y": pose.y, "phi": _out_angle(pose.phi, deg)}


def _line_payload(line, deg: bool) -> dict:
    # Direction components are a unit vector, not an angle; deg only
    # matters for fields that are angles.
    del deg
    return {
        "point": [line.point.x, line.point.y],
        "direction": [line.direction.x, line.direction.y],
    }


def _singularity_payload(pose: Pose, theta, geom: ManipulatorGeometry) -> dict:
    report = classify_singularity(pose, theta, geometry=geom)
    point = report.intersection_point
    return {
        "kind": report.kind.value,
        "det_a": report.det_a,
        "det_b": report.det_b,
        "zero_rho_legs": list(report.zero_rho_legs),
        "intersection_point": None if point is None else [point.x, point.y],
        "translation_case": report.translation_case,
    }


# ---------------------------------------------------------------- commands


def _cmd_ik(args, geom: ManipulatorGeometry) -> int:
    pose = Pose(args.x, args.y, _in_angle(args.phi, args.deg))
    if args.branch == "all":
        branches = [(i >> 2 & 1, i >> 1 & 1, i & 1) for i in range(8)]
    else:
        branches = [_parse_branch(args.branch)]
    solutions = []
    for branch in branches:
        sol = inverse_kinematics(pose, branch=branch, geometry=geom)
        legs = []
        for leg, signed in zip(sol.legs, sol.signed_rhos()):
            legs.append(
                {
                    "theta": _out_angle(leg.theta, args.deg),
                    "rho": leg.rho,
                    "signed_rho": signed,
                }
            )
        solutions.append({"branch": "".join(map(str, branch)), "legs": legs})
    _emit(
        {
            "schema": 1,
            "command": "ik",
            "scale": geom.scale,
            "pose": _pose_payload(pose, args.deg),
            "solutions": solutions,
        }
    )
    return EXIT_OK


def _parse_branch(text: str):
    if len(text) != 3 or any(c not in "01" for c in text):
        raise _UsageError(
            f"--branch must be three binary digits or 'all', got {text!r}"
        )
    return tuple(int(c) for c in text)


def _cmd_dk(args, geom: ManipulatorGeometry) -> int:
    theta = tuple(_in_angle(t, args.deg) for t in (args.t1, args.t2, args.t3))
    routes = {}
    if args.method in ("closed", "both"):
        routes["closed"] = direct_kinematics(theta, geometry=geom)
    if args.method in ("geometric", "both"):
        routes["geometric"] = geometric_dkp(theta, geometry=geom)

    primary = routes.get("closed") or routes["geometric"]
    m, n = mn_coefficients(theta)
    payload = {
        "schema": 1,
        "command": "dk",
        "scale": geom.scale,
        "method": args.method,
        "theta": [_out_angle(t, args.deg) for t in theta],
        "kind": primary.kind.value,
        "reduction": {"m": m, "n": n},
        "coincident": primary.coincident,
        "poses": [
            dict(
                _pose_payload(p, args.deg),
                singularity=_singularity_payload(p, theta, geom),
            )
            for p in primary.poses
        ],
        "continuum": None
        if primary.continuum is None
        else _line_payload(primary.continuum, args.deg),
    }
    if primary.kind is DkKind.CONTINUUM_REULEAUX:
        desc = reuleaux_descriptor(theta, geometry=geom)
        payload["continuum"] = _line_payload(desc.p_line, args.deg)
        payload["reuleaux"] = {
            "p_line": dict(
                _line_payload(desc.p_line, args.deg),
                half_length=desc.p_line.half_length,
                length=desc.p_line.length,
            ),
            "a_displacement_magnitude": desc.a_displacement_magnitude,
        }

    if args.method == "both":
        deviation = _pose_set_deviation(routes["closed"], routes["geometric"])
        kinds_match = routes["closed"].kind is routes["geometric"].kind
        payload["agreement"] = {
            "kinds_match": kinds_match,
            "max_pose_deviation": deviation,
        }
        if not kinds_match or not (deviation <= 1e-7 * max(geom.scale, 1.0)):
            _emit(payload)
            print(
                "rpr3: dk routes disagree "
                f"(kinds {routes['closed'].kind.value} vs "
                f"{routes['geometric'].kind.value}, deviation {deviation:.3e})",
                file=sys.stderr,
            )
            return EXIT_VERIFY

    _emit(payload)
    return EXIT_OK


def _pose_set_deviation(left, right) -> float:
    """Symmetric Hausdorff distance between two discrete pose sets."""
    if not left.poses or not right.poses:
        return 0.0 if not left.poses and not right.poses else math.inf
    worst = 0.0
    for src, dst in ((left.poses, right.poses), (right.poses, left.poses)):
        for p in src:
            best = min(_pose_distance(p, q) for q in dst)
            worst = max(worst, best)
    return worst


def _pose_distance(p: Pose, q: Pose) -> float:
    return max(
        abs(p.x - q.x),
        abs(p.y - q.y),
        abs(normalize_angle(p.phi - q.phi)),
    )


def _cmd_singularity(args, geom: ManipulatorGeometry) -> int:
    pose = Pose(args.x, args.y, _in_angle(args.phi, args.deg))
    given = [args.t1, args.t2, args.t3]
    if any(t is not None for t in given):
        if any(t is None for t in given):
            raise _UsageError("provide all of --t1 --t2 --t3 or none")
        theta = tuple(_in_angle(t, args.deg) for t in given)
    else:
        sol = inverse_kinematics(pose, branch=_parse_branch(args.branch), geometry=geom)
        theta = sol.angles
    mats = build_matrices(pose, theta, geometry=geom)
    payload = {
        "schema": 1,
        "command": "singularity",
        "scale": geom.scale,
        "pose": _pose_payload(pose, args.deg),
        "theta": [_out_angle(t, args.deg) for t in theta],
        "a_matrix": [[float(v) for v in row] for row in mats.a_matrix],
        "b_diagonal": [float(mats.b_matrix[i, i]) for i in range(3)],
    }
    payload.update(_singularity_payload(pose, theta, geom))
    _emit(payload)
    return EXIT_OK


def _cmd_trace(args, geom: ManipulatorGeometry) -> int:
    t1 = _in_angle(args.t1, args.deg)
    t2 = _in_angle(args.t2, args.deg)
    if args.samples < 4:
        raise _UsageError("--samples must be at least 4")
    curve = trace_cardanic(t1, t2, n_samples=args.samples, geometry=geom)

    rows = []
    for s in curve.samples:
        rows.append(
            (
                _out_angle(t1, args.deg),
                _out_angle(t2, args.deg),
                _out_angle(s.phi, args.deg),
                s.b3.x,
                s.b3.y,
                s.rho1,
                s.rho2,
            )
        )
    figio.write_csv(
        args.csv, ("theta1", "theta2", "phi", "x", "y", "rho1", "rho2"), rows
    )

    if args.svg:
        canvas = figio.SvgCanvas(title="third-anchor coupler curve")
        _draw_base(canvas, geom)
        _draw_slider_axis(canvas, geom.base_anchor(1), t1)
        _draw_slider_axis(canvas, geom.base_anchor(2), t2)
        canvas.polyline(
            [(s.b3.x, s.b3.y) for s in curve.samples],
            stroke="#c02020",
            width=0.015,
        )
        if curve.segment is not None:
            end_a, end_b = curve.segment
            canvas.line(
                end_a.x, end_a.y, end_b.x, end_b.y, stroke="#2020c0", width=0.02
            )
        canvas.write(args.svg)

    payload = {
        "schema": 1,
        "command": "trace",
        "scale": geom.scale,
        "theta1": _out_angle(t1, args.deg),
        "theta2": _out_angle(t2, args.deg),
        "samples": args.samples,
        "degenerate": curve.degenerate,
        "csv": args.csv,
        "svg": args.svg,
    }
    if curve.segment is not None:
        end_a, end_b = curve.segment
        payload["segment"] = {
            "endpoints": [[end_a.x, end_a.y], [end_b.x, end_b.y]],
            "length": math.hypot(end_b.x - end_a.x, end_b.y - end_a.y),
        }
    else:
        payload["segment"] = None
    if curve.degenerate:
        # A straight-line curve means the legs are one third-turn apart, so
        # the Reuleaux family applies; complete the triple accordingly.
        t3 = normalize_angle(t1 - math.pi / 3.0)
        desc = reuleaux_descriptor((t1, t2, t3), geometry=geom)
        payload["reuleaux"] = {
            "theta3": _out_angle(t3, args.deg),
            "p_line": dict(
                _line_payload(desc.p_line, args.deg),
                half_length=desc.p_line.half_length,
                length=desc.p_line.length,
            ),
            "a_displacement_magnitude": desc.a_displacement_magnitude,
        }
    _emit(payload)
    return EXIT_OK


def _draw_base(canvas: figio.SvgCanvas, geom: ManipulatorGeometry) -> None:
    anchors = [geom.base_anchor(i) for i in (1, 2, 3)]
    canvas.polyline(
        [(a.x, a.y) for a in anchors], stroke="#808080", width=0.008, closed=True
    )
    for a in anchors:
        canvas.circle(a.x, a.y, 0.025, fill="#404040")


def _draw_slider_axis(canvas, anchor, theta: float) -> None:
    reach = 6.0
    dx, dy = math.cos(theta), math.sin(theta)
    canvas.line(
        anchor.x - reach * dx,
        anchor.y - reach * dy,
        anchor.x + reach * dx,
        anchor.y + reach * dy,
        stroke="#b0b0b0",
        width=0.006,
        dash="0.04,0.04",
    )


# ------------------------------------------------------------------ sweep


def _parse_axis(parser_error, name: str, text: str | None, deg: bool):
    """Return an array of axis values; None text means axis must be fixed."""
    if text is None:
        parser_error(f"--{name} is required for this space")
    angular = name in _ANGLE_AXES
    parts = text.split(":")
    try:
        if len(parts) == 1:
            values = np.array([float(parts[0])])
        elif len(parts) == 3:
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 2:
                parser_error(f"--{name}: range needs at least 2 samples")
            values = np.linspace(lo, hi, count)
        else:
            parser_error(f"--{name}: expected 'v' or 'lo:hi:n'")
            return None
    except ValueError:
        parser_error(f"--{name}: could not parse {text!r}")
        return None
    if angular and deg:
        values = np.radians(values)
    return values


def _cmd_sweep(args, geom: ManipulatorGeometry) -> int:
    def fail(message):
        raise _UsageError(message)

    if args.space == "joint":
        axis_names = ("t1", "t2", "t3")
    else:
        axis_names = ("x", "y", "phi")
    axes = [
        _parse_axis(fail, name, getattr(args, name), args.deg) for name in axis_names
    ]
    swept = [i for i, a in enumerate(axes) if len(a) > 1]
    if args.svg and len(swept) != 2:
        fail("--svg requires exactly two swept axes")

    header = ("theta1", "theta2", "theta3", "x", "y", "phi", "detA", "detB", "kind")
    rows = []
    grid_values = (
        np.empty((len(axes[swept[0]]), len(axes[swept[1]]))) if args.svg else None
    )

    for i0, v0 in enumerate(axes[0]):
        for i1, v1 in enumerate(axes[1]):
            for i2, v2 in enumerate(axes[2]):
                index = (i0, i1, i2)
                if args.space == "joint":
                    theta = (float(v0), float(v1), float(v2))
                    pose = Pose(0.0, 0.0, 0.0)
                    mats = build_matrices(pose, theta, geometry=geom)
                    kind = classify_dk_degeneracy(theta).value
                else:
                    pose = Pose(float(v0), float(v1), float(v2))
                    try:
                        theta = inverse_kinematics(
                            pose, branch=(0, 0, 0), geometry=geom
                        ).angles.as_tuple()
                        mats = build_matrices(pose, theta, geometry=geom)
                        kind = classify_singularity(
                            pose, theta, geometry=geom
                        ).kind.value
                    except LegAtAnchorError:
                        # Pose touches a base anchor; angles are undefined.
                        theta = (math.nan, math.nan, math.nan)
                        mats = None
                        kind = "Serial"
                rows.append(
                    (
                        _out_angle(theta[0], args.deg),
                        _out_angle(theta[1], args.deg),
                        _out_angle(theta[2], args.deg),
                        pose.x,
                        pose.y,
                        _out_angle(pose.phi, args.deg),
                        mats.det_a if mats else math.nan,
                        mats.det_b if mats else 0.0,
                        kind,
                    )
                )
                if grid_values is not None:
                    value = (
                        (mats.det_a if args.quantity == "detA" else mats.det_b)
                        if mats
                        else math.nan
                    )
                    grid_values[index[swept[0]], index[swept[1]]] = value

    figio.write_csv(args.csv, header, rows)

    if args.svg:
        _write_sweep_svg(args, axes, swept, axis_names, grid_values)

    _emit(
        {
            "schema": 1,
            "command": "sweep",
            "scale": geom.scale,
            "space": args.space,
            "rows": len(rows),
            "csv": args.csv,
            "svg": args.svg,
        }
    )
    return EXIT_OK


def _write_sweep_svg(args, axes, swept, axis_names, grid_values) -> None:
    lo = figio.VIEW_MIN + 0.2
    hi = figio.VIEW_MAX - 0.2
    u_axis = axes[swept[0]]
    v_axis = axes[swept[1]]

    def map_u(u):
        return lo + (hi - lo) * (u - u_axis[0]) / (u_axis[-1] - u_axis[0])

    def map_v(v):
        return lo + (hi - lo) * (v - v_axis[0]) / (v_axis[-1] - v_axis[0])

    canvas = figio.SvgCanvas(title=f"{args.quantity} zero contour")
    canvas.polyline(
        [(lo, lo), (hi, lo), (hi, hi), (lo, hi)],
        stroke="#000000",
        width=0.008,
        closed=True,
    )
    finite = np.nan_to_num(grid_values, nan=0.0)
    for (ax, ay), (bx, by) in figio.contour_segments(u_axis, v_axis, finite):
        canvas.line(
            map_u(ax), map_v(ay), map_u(bx), map_v(by), stroke="#c02020", width=0.012
        )
    name_u = axis_names[swept[0]]
    name_v = axis_names[swept[1]]
    canvas.text(lo, lo - 0.15, f"{name_u}: {u_axis[0]:.6g} .. {u_axis[-1]:.6g}")
    canvas.text(lo, lo - 0.3, f"{name_v}: {v_axis[0]:.6g} .. {v_axis[-1]:.6g}")
    canvas.write(args.svg)


# ----------------------------------------------------------------- verify


def _cmd_verify(args, geom: ManipulatorGeometry) -> int:
    rng = np.random.default_rng(args.seed)
    failures: list[str] = []
    scopes = ("dkp", "jacobian", "curves") if args.scope == "all" else (args.scope,)

    if "dkp" in scopes:
        _verify_dkp(rng, args.trials, geom, failures)
    if "jacobian" in scopes:
        _verify_jacobian(rng, args.trials, geom, failures)
    if "curves" in scopes:
        _verify_curves(rng, args.trials, geom, failures)
        if args.csv:
            code = _recheck_trace_csv(args.csv, geom, failures)
            if code:
                return code

    if failures:
        for line in failures:
            print(f"rpr3: FAIL {line}", file=sys.stderr)
        return EXIT_VERIFY
    print("verify: ok")
    return EXIT_OK


def _verify_dkp(rng, trials: int, geom, failures: list[str]) -> None:
    done = 0
    worst = 0.0
    attempts = 0
    while done < trials and attempts < trials * 50:
        attempts += 1
        theta = tuple(rng.uniform(-math.pi, math.pi, 3))
        m, n = mn_coefficients(theta)
        if m * m + n * n < 1e-8:
            continue  # keep checks away from the degeneracy threshold
        if abs(math.atan2(2.0 * m * n, m * m - n * n)) < 1e-2:
            continue  # roots closer than the scan grid can separate
        closed = direct_kinematics(theta, geometry=geom)
        if closed.kind is not DkKind.TWO_SOLUTIONS or closed.coincident:
            continue
        report = dkp_bruteforce(theta, geometry=geom)
        if len(report.solutions_found) != len(closed.poses):
            failures.append(
                f"dkp count mismatch at theta={theta}: closed "
                f"{len(closed.poses)}, scan {len(report.solutions_found)}"
            )
            return
        deviation = _pose_set_deviation(closed, _PoseBag(report.solutions_found))
        worst = max(worst, deviation)
        if deviation > 1e-7 * max(geom.scale, 1.0):
            failures.append(f"dkp deviation {deviation:.3e} at theta={theta}")
            return
        done += 1
    print(f"verify dkp: {done} trials, max pose deviation {worst:.3e}")


class _PoseBag:
    def __init__(self, poses):
        self.poses = tuple(poses)


def _verify_jacobian(rng, trials: int, geom, failures: list[str]) -> None:
    done = 0
    worst = 0.0
    attempts = 0
    s = geom.scale
    while done < trials and attempts < trials * 50:
        attempts += 1
        pose = Pose(
            rng.uniform(-0.5 * s, 1.5 * s),
            rng.uniform(-0.5 * s, 1.5 * s),
            rng.uniform(-math.pi, math.pi),
        )
        try:
            sol = inverse_kinematics(pose, geometry=geom)
        except LegAtAnchorError:
            continue
        if min(sol.rhos()) < 0.05 * s:
            continue
        theta = sol.angles
        mats = build_matrices(pose, theta, geometry=geom)
        norm = np.linalg.norm(mats.a_matrix)
        if abs(mats.det_a) < 1e-6 * norm**3:
            continue
        try:
            err = jacobian_fd_check(pose, theta, geometry=geom)
        except SingularNearbyError:
            continue
        worst = max(worst, err)
        if err > 1e-5:
            failures.append(f"jacobian fd error {err:.3e} at pose={pose.as_tuple()}")
            return
        done += 1
    print(f"verify jacobian: {done} trials, max fd error {worst:.3e}")


def _verify_curves(rng, trials: int, geom, failures: list[str]) -> None:
    done = 0
    worst = 0.0
    attempts = 0
    s = geom.scale
    while done < trials and attempts < trials * 50:
        attempts += 1
        t1, t2 = rng.uniform(-math.pi, math.pi, 2)
        if abs(math.sin(t2 - t1)) < 1e-6:
            continue
        curve = trace_cardanic(t1, t2, n_samples=360, geometry=geom)
        b1 = geom.base_anchor(1)
        b2 = geom.base_anchor(2)
        for sample in curve.samples:
            pose = Pose(
                b1.x + sample.rho1 * math.cos(t1),
                b1.y + sample.rho1 * math.sin(t1),
                sample.phi,
            )
            anchor2 = platform_anchor(pose, 2, geometry=geom)
            anchor3 = platform_anchor(pose, 3, geometry=geom)
            r1 = 0.0  # first anchor is on its slider line by construction
            r2 = math.sin(t2) * (anchor2.x - b2.x) - math.cos(t2) * (
                anchor2.y - b2.y
            )
            gap = max(
                abs(r1),
                abs(r2),
                math.hypot(anchor3.x - sample.b3.x, anchor3.y - sample.b3.y),
            )
            worst = max(worst, gap)
            if gap > 1e-9 * max(s, 1.0):
                failures.append(
                    f"curve residual {gap:.3e} at theta=({t1}, {t2}), "
                    f"phi={sample.phi}"
                )
                return
        rho_lo = rho_from_phi(t1, t2, -math.pi, geometry=geom)
        rho_hi = rho_from_phi(t1, t2, math.pi, geometry=geom)
        closure = max(
            abs(rho_lo[0] - rho_hi[0]), abs(rho_lo[1] - rho_hi[1])
        )
        if closure > 1e-10 * max(s, 1.0):
            failures.append(f"curve closure {closure:.3e} at theta=({t1}, {t2})")
            return
        done += 1
    print(f"verify curves: {done} trials, max residual {worst:.3e}")


def _recheck_trace_csv(path: str, geom, failures: list[str]) -> int:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            rows = list(reader)
    except OSError as exc:
        print(f"rpr3: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not rows:
        print(f"rpr3: {path}: no data rows", file=sys.stderr)
        return EXIT_IO
    worst = 0.0
    for idx, row in enumerate(rows):
        try:
            t1 = float(row["theta1"])
            t2 = float(row["theta2"])
            phi = float(row["phi"])
            recorded = (
                float(row["x"]),
                float(row["y"]),
                float(row["rho1"]),
                float(row["rho2"]),
            )
        except (KeyError, TypeError, ValueError):
            print(f"rpr3: {path}: malformed row {idx + 1}", file=sys.stderr)
            return EXIT_IO
        rho1, rho2 = rho_from_phi(t1, t2, phi, geometry=geom)
        b1 = geom.base_anchor(1)
        pose = Pose(
            b1.x + rho1 * math.cos(t1), b1.y + rho1 * math.sin(t1), phi
        )
        anchor3 = platform_anchor(pose, 3, geometry=geom)
        gap = max(
            abs(anchor3.x - recorded[0]),
            abs(anchor3.y - recorded[1]),
            abs(rho1 - recorded[2]),
            abs(rho2 - recorded[3]),
        )
        worst = max(worst, gap)
        if gap > 1e-12 * max(geom.scale, 1.0):
            failures.append(f"trace csv row {idx + 1} deviates by {gap:.3e}")
            return 0
    print(f"verify trace-csv: {len(rows)} rows, max deviation {worst:.3e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
