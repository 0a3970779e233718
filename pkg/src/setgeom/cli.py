"""Command line front end.

Every verb prints a JSON report ``{"verb", "inputs", "result",
"worst_violation", "witness", "pass"}`` to stdout (or ``--report``) and a
one-line summary to stderr. Exit status: 0 pass, 1 fail, 2 bad input.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import hull as _hull
from .io import InputError, dumps, read_cloud, read_isometry, write_cloud
from .isometry import (
    IsometryError,
    NotPointImageError,
    RecoveryFailedError,
    induced_map,
    recover_point_map,
    recovery_residual,
    verify_induced_isometry,
)
from .midpoint import CANONICAL, Combined, check_cat0_comparison, check_midpoint_axioms, sample_cat0_comparisons
from .sets import Cloud, hausdorff_distance, random_cloud
from .spaces import GeometryError, Hyperbolic, Space, make_space

EXIT_PASS, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


def _space_from_args(args, required: bool = False) -> Space | None:
    if args.space is None:
        if required:
            raise InputError("--space is required for this verb")
        return None
    if args.dim is None:
        raise InputError("--dim is required with --space")
    try:
        return make_space(args.space, args.dim, args.p)
    except GeometryError as exc:
        raise InputError(str(exc)) from None


def _load_clouds(paths, args) -> list[Cloud]:
    override = _space_from_args(args)
    clouds = [read_cloud(p, override) for p in paths]
    spaces = {c.space for c in clouds}
    if len(spaces) > 1:
        raise InputError("input clouds live in different spaces: " + ", ".join(sorted(map(str, spaces))))
    return clouds


def _params(args) -> _hull.HullParams:
    try:
        return _hull.HullParams(args.tol, args.max_iterations, args.decimation)
    except GeometryError as exc:
        raise InputError(str(exc)) from None


def _report(verb, inputs, result, worst=None, witness=None, passed=True) -> dict:
    return {
        "verb": verb,
        "inputs": inputs,
        "result": result,
        "worst_violation": worst,
        "witness": witness or {},
        "pass": bool(passed),
    }


def _emit_cloud(args, cloud: Cloud) -> dict:
    if args.cloud_out:
        write_cloud(args.cloud_out, cloud)
        return {"cloud_file": str(args.cloud_out), "size": len(cloud), "resolution": cloud.resolution}
    return {"cloud": cloud.to_dict(), "size": len(cloud), "resolution": cloud.resolution}


# verbs -----------------------------------------------------------------


def cmd_hausdorff(args):
    A, B = _load_clouds(args.clouds, args)
    d = hausdorff_distance(A.space, A, B)
    return _report("hausdorff", {"clouds": args.clouds}, d), f"{d!r}"


def cmd_hull(args):
    (A,) = _load_clouds(args.clouds, args)
    params = _params(args)
    inputs = {"cloud": args.clouds[0], "tol": params.tol, "decimation_radius": params.decimation_radius}
    try:
        H, trace = _hull.m_convex_hull_traced(A.space, CANONICAL, A, params)
    except _hull.HullNonConvergenceError as exc:
        rep = _report("hull", inputs, {"gaps": exc.gaps, "last_gap": exc.last_gap}, exc.last_gap, passed=False)
        return rep, f"hull did not converge; last gap {exc.last_gap:.3g}"
    result = _emit_cloud(args, H)
    result.update(iterations=trace.iterations, gaps=trace.gaps, gaps_nonincreasing=trace.gaps_nonincreasing)
    return _report("hull", inputs, result, trace.gaps[-1]), f"hull: {len(H)} points in {trace.iterations} rounds"


def cmd_midset_m(args):
    A, B = _load_clouds(args.clouds, args)
    params = _params(args)
    inputs = {"clouds": args.clouds, "tol": params.tol}
    try:
        M = _hull.midpoint_set_M(A.space, CANONICAL, A, B, params)
    except _hull.HullNonConvergenceError as exc:
        return _report("midset-m", inputs, {"last_gap": exc.last_gap}, exc.last_gap, passed=False), str(exc)
    sp = A.space
    half = 0.5 * hausdorff_distance(sp, A, B)
    slack = A.resolution + B.resolution + 2.0 * params.tol if args.slack is None else args.slack
    err = max(abs(hausdorff_distance(sp, M, A) - half), abs(hausdorff_distance(sp, M, B) - half))
    result = _emit_cloud(args, M)
    result.update(half_distance=half, slack=slack)
    rep = _report("midset-m", inputs, result, err, {"midpoint_error": err}, err <= slack)
    return rep, f"midset-m: {len(M)} points, midpoint error {err:.3g} (slack {slack:.3g})"


def cmd_midset_frak(args):
    A, B = _load_clouds(args.clouds, args)
    params = _params(args)
    slack = A.resolution + B.resolution + 2.0 * params.tol if args.slack is None else args.slack
    inputs = {"clouds": args.clouds, "tol": params.tol, "slack": slack, "convex": not args.non_convex}
    try:
        F = _hull.midpoint_set_frak(A.space, CANONICAL, A, B, params, slack, convex=not args.non_convex)
    except _hull.EmptyIntersectionError as exc:
        return _report("midset-frak", inputs, None, None, {"error": str(exc)}, False), str(exc)
    except _hull.HullNonConvergenceError as exc:
        return _report("midset-frak", inputs, {"last_gap": exc.last_gap}, exc.last_gap, passed=False), str(exc)
    sp = A.space
    half = 0.5 * hausdorff_distance(sp, A, B)
    err = max(abs(hausdorff_distance(sp, F, A) - half), abs(hausdorff_distance(sp, F, B) - half))
    result = _emit_cloud(args, F)
    result.update(half_distance=half)
    rep = _report("midset-frak", inputs, result, err, {"midpoint_error": err}, err <= slack)
    return rep, f"midset-frak: {len(F)} points, midpoint error {err:.3g} (slack {slack:.3g})"


def cmd_verify_axioms(args):
    space = _space_from_args(args, required=True)
    mmap = CANONICAL if args.map == "canonical" else Combined(CANONICAL, CANONICAL)
    rep = check_midpoint_axioms(space, mmap, args.samples, args.seed)
    inputs = {"space": space.to_dict(), "map": str(mmap), "samples": args.samples, "seed": args.seed}
    result = {k: v for k, v in rep.details.items() if isinstance(v, dict)}
    out = _report("verify-axioms", inputs, result, rep.worst_violation, rep.witness, rep.passed)
    return out, f"verify-axioms on {space}: {'pass' if rep.passed else 'FAIL'} (worst {rep.worst_violation:.3g})"


def cmd_verify_cat0(args):
    if args.cloud:
        (C,) = _load_clouds([args.cloud], args)
        if len(C) != 3:
            raise InputError(f"{args.cloud}: expected exactly 3 points, got {len(C)}")
        try:
            rep = check_cat0_comparison(C.space, *C.points, args.s, args.t)
        except GeometryError as exc:
            raise InputError(str(exc)) from None
        inputs = {"cloud": args.cloud, "s": args.s, "t": args.t}
        space = C.space
    else:
        space = _space_from_args(args, required=True)
        rep = sample_cat0_comparisons(space, args.samples, args.seed)
        inputs = {"space": space.to_dict(), "samples": args.samples, "seed": args.seed}
    out = _report("verify-cat0", inputs, rep.details, rep.worst_violation, rep.witness, rep.passed)
    return out, f"verify-cat0 on {space}: {'pass' if rep.passed else 'FAIL'} (worst {rep.worst_violation:.3g})"


def _isometry_space(args, iso) -> Space:
    space = _space_from_args(args)
    if space is None:
        n = iso.matrix.shape[0]
        if iso.kind == "lorentz":
            space = Hyperbolic(n - 1)
        elif iso.kind == "euclidean_rigid":
            space = make_space("euclidean", n)
        else:
            raise InputError("lp_symmetry needs --space lp --dim N --p P")
    try:
        iso.validate(space)
    except IsometryError as exc:
        raise InputError(f"{args.isometry}: {exc}") from None
    return space


def cmd_verify_isometry(args):
    iso = read_isometry(args.isometry)
    space = _isometry_space(args, iso)
    if args.clouds:
        clouds = _load_clouds(args.clouds, args)
        if any(c.space != space for c in clouds):
            raise InputError("clouds and isometry live in different spaces")
        if len(clouds) < 2:
            raise InputError("verify-isometry needs at least two clouds (or none for random pairs)")
        pairs = [(a, b) for k, a in enumerate(clouds) for b in clouds[k + 1 :]]
    else:
        rng = np.random.default_rng(args.seed)
        pairs = [
            (random_cloud(space, rng, 20, 1.0), random_cloud(space, rng, 20, 1.0)) for _ in range(args.count)
        ]
    rep = verify_induced_isometry(space, iso, pairs)
    inputs = {"isometry": args.isometry, "clouds": args.clouds, "seed": args.seed}
    out = _report("verify-isometry", inputs, rep.details, rep.worst_violation, {"pair_index": rep.witness["pair_index"]}, rep.passed)
    return out, f"verify-isometry: {'pass' if rep.passed else 'FAIL'} (worst {rep.worst_violation:.3g})"


def cmd_recover(args):
    iso = read_isometry(args.isometry)
    space = _isometry_space(args, iso)
    oracle = induced_map(space, iso)
    inputs = {"isometry": args.isometry, "space": space.to_dict(), "seed": args.seed}
    try:
        found = recover_point_map(space, oracle, seed=args.seed)
    except (NotPointImageError, RecoveryFailedError) as exc:
        return _report("recover", inputs, None, None, {"error": str(exc)}, False), str(exc)
    residual = recovery_residual(space, oracle, found, seed=args.seed + 1)
    out = _report("recover", inputs, {"isometry": found.to_dict(), "residual": residual}, residual, passed=residual <= 1e-6)
    return out, f"recover: residual {residual:.3g}"


# parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--space", choices=("euclidean", "hyperbolic", "lp"), help="override / choose the space")
    common.add_argument("--dim", type=int)
    common.add_argument("--p", type=float, help="exponent for --space lp")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--report", type=Path, help="write the JSON report here instead of stdout")

    hullopts = argparse.ArgumentParser(add_help=False)
    hullopts.add_argument("--tol", type=float, default=1e-3)
    hullopts.add_argument("--max-iterations", type=int, default=50)
    hullopts.add_argument("--decimation", type=float, default=None, help="thinning radius (default tol/4)")
    hullopts.add_argument("--slack", type=float, default=None, help="default: resolutions + 2*tol")
    hullopts.add_argument("--cloud-out", type=Path, help="write the resulting cloud to this file")

    parser = argparse.ArgumentParser(prog="setgeom", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("hausdorff", parents=[common], help="Hausdorff distance of two clouds")
    p.add_argument("clouds", nargs=2)
    p.set_defaults(func=cmd_hausdorff)

    p = sub.add_parser("hull", parents=[common, hullopts], help="midpoint-convex hull of a cloud")
    p.add_argument("clouds", nargs=1)
    p.set_defaults(func=cmd_hull)

    p = sub.add_parser("midset-m", parents=[common, hullopts], help="hull of pairwise midpoints")
    p.add_argument("clouds", nargs=2)
    p.set_defaults(func=cmd_midset_m)

    p = sub.add_parser("midset-frak", parents=[common, hullopts], help="intersection of half-distance neighbourhoods")
    p.add_argument("clouds", nargs=2)
    p.add_argument("--non-convex", action="store_true", help="inputs are arbitrary compact sets")
    p.set_defaults(func=cmd_midset_frak)

    p = sub.add_parser("verify-axioms", parents=[common], help="midpoint-map axioms on random samples")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--map", choices=("canonical", "combined"), default="canonical")
    p.set_defaults(func=cmd_verify_axioms)

    p = sub.add_parser("verify-cat0", parents=[common], help="CAT(0) comparison test")
    p.add_argument("cloud", nargs="?", help="cloud file with exactly three points")
    p.add_argument("--s", type=float, default=0.5)
    p.add_argument("--t", type=float, default=0.5)
    p.add_argument("--samples", type=int, default=500)
    p.set_defaults(func=cmd_verify_cat0)

    p = sub.add_parser("verify-isometry", parents=[common], help="induced map preserves d_H")
    p.add_argument("isometry")
    p.add_argument("clouds", nargs="*")
    p.add_argument("--count", type=int, default=20, help="random cloud pairs when no clouds are given")
    p.set_defaults(func=cmd_verify_isometry)

    p = sub.add_parser("recover", parents=[common], help="recover a point isometry from its induced set map")
    p.add_argument("isometry")
    p.set_defaults(func=cmd_recover)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        report, summary = args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    text = dumps(report)
    if args.report:
        args.report.write_text(text)
    else:
        sys.stdout.write(text)
    print(summary, file=sys.stderr)
    return EXIT_PASS if report["pass"] else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
