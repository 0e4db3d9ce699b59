"""Command-line front end.

Exit status: 0 when the requested certificate holds, 1 when it does not,
2 for usage, parse or unsupported-family errors.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .antipolar import (
    NotRayLikeError,
    antipolar,
    biantipolar_check,
    is_raylike,
    recession_identity_check,
)
from .duality import (
    InvalidProblemError,
    build_bidual,
    build_gauge_dual,
    build_lagrange_dual,
    certify,
)
from .gauges import UnsupportedGaugeError
from .instances import maxcut_summary
from .problem_io import ParseError, dump_report, read_problem, read_set
from .sensitivity import (
    ConstraintQualificationError,
    ValueFunctionProbe,
    check_subgradient_inequality,
    sigma_sweep,
    value_subgradient,
)
from .sets import GenericAntipolar, HullOfUnion, Intersection, UnsupportedSetError
from .solvers import (
    SubgradConfig,
    UnsupportedFamilyError,
    family_tolerance,
    solve_gauge_dual,
    solve_lagrange_dual,
    solve_primal_oracle,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _config(args):
    return SubgradConfig(max_iters=args.max_iters, step_c=args.step_c, seed=args.seed)


def cmd_dual(args, out):
    p, _ = read_problem(args.file)
    build = {"gauge": build_gauge_dual, "lagrange": build_lagrange_dual, "bidual": build_bidual}
    d = build[args.kind](p)
    rep = d.summary()
    rep["strong_duality"] = p.strong_duality_basis()
    rep["assumptions"] = p.assumption_flags()
    out.write(dump_report(rep) + "\n")
    return EXIT_OK


def cmd_solve(args, out):
    p, meta = read_problem(args.file)
    cfg = _config(args)
    try:
        oracle = solve_primal_oracle(p)
    except UnsupportedFamilyError as exc:
        sys.stderr.write("unsupported family: %s\n" % exc)
        return EXIT_USAGE
    except InvalidProblemError as exc:
        out.write(dump_report({"error": str(exc), "primal_residual": None, "product": None}) + "\n")
        return EXIT_FAIL
    gd = build_gauge_dual(p)
    dual = solve_gauge_dual(gd, cfg)
    cert = certify(p, oracle.x, dual.x)
    tol = args.tol if args.tol is not None else family_tolerance(oracle.method)
    rep = cert.as_dict()
    rep.update({
        "problem": p.name,
        "dual": gd.description,
        "oracle_method": oracle.method,
        "dual_method": dual.method,
        "iterations": dual.iterations,
        "stalled": dual.stalled,
        "tolerance": tol,
    })
    if gd.polyhedral or p.objective_gauge().polar_epigraph() is not None:
        rep["v_l"] = solve_lagrange_dual(build_lagrange_dual(p), cfg).value
    if meta["graph"] is not None:
        rep["maxcut"] = maxcut_summary(meta["graph"], oracle.x)
    out.write(dump_report(rep) + "\n")
    ok = cert.product is not None and abs(cert.product - 1.0) <= tol
    return EXIT_OK if ok else EXIT_FAIL


def cmd_antipolar(args, out):
    C, _ = read_set(args.file)
    rep = {"set": repr(C)}
    status = EXIT_OK
    try:
        A = antipolar(C, seed=args.seed)
        rep.update({"rule": A.rule, "closure_taken": A.closure_taken, "antipolar": repr(A.body)})
    except NotRayLikeError as exc:
        rep["rule_error"] = str(exc)
        sys.stderr.write("antipolar rule refused: %s\n" % exc)
        A, status = None, EXIT_FAIL
    if args.check == "membership":
        if args.point is None:
            sys.stderr.write("--point is required for membership\n")
            return EXIT_USAGE
        x = np.array(args.point, dtype=float)
        rep["point"] = x
        rep["in_antipolar"] = GenericAntipolar(C).contains(x)
        if A is not None:
            rep["in_rule_result"] = A.contains(x)
        if isinstance(C, Intersection):
            parts = [antipolar(q, seed=args.seed) for q in C.parts]
            rep["in_hull_of_part_antipolars"] = HullOfUnion(parts).contains(x)
            rep["parts_raylike"] = [is_raylike(q, args.seed)[0] for q in C.parts]
    elif args.check == "biantipolar":
        r = biantipolar_check(C, samples=args.samples, seed=args.seed)
        rep["biantipolar"] = r.as_dict()
        if r.raylike == "yes" and r.ok:
            rep["message"] = "C'' = C confirmed"
        status = status if r.ok else EXIT_FAIL
    else:
        r = recession_identity_check(C, directions=args.samples, seed=args.seed)
        rep["recession"] = r.as_dict()
        status = status if r.ok else EXIT_FAIL
    out.write(dump_report(rep) + "\n")
    return status


def cmd_sensitivity(args, out):
    p, meta = read_problem(args.file)
    if not meta["interior_declared"]:
        raise ConstraintQualificationError(
            "add 'interior: declared' to assert that (0, 0) is interior to dom v")
    steps = (0.0,) if args.grid <= 1 else tuple(np.linspace(-args.radius, args.radius, args.grid))
    probe = ValueFunctionProbe(p, steps=steps, interior_declared=True)
    cfg = _config(args)
    g = value_subgradient(p, "lagrange", cfg)
    g2 = value_subgradient(p, "gauge", cfg)
    r = check_subgradient_inequality(probe, g)
    rep = r.as_dict()
    rep["gauge_route"] = g2.as_dict()
    rep["route_gap"] = g.distance(g2)
    rep["sigma_sweep"] = sigma_sweep(probe)
    out.write(dump_report(rep) + "\n")
    return EXIT_OK if r.ok else EXIT_FAIL


def build_parser():
    ap = argparse.ArgumentParser(prog="gaugedual", description="Gauge duality toolkit.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-iters", type=int, default=50000)
    common.add_argument("--step-c", type=float, default=1.0)
    common.add_argument("--tol", type=float, default=None)
    sub = ap.add_subparsers(dest="command", required=True)

    d = sub.add_parser("dual", parents=[common], help="print a dual problem")
    d.add_argument("file")
    d.add_argument("--kind", choices=["gauge", "lagrange", "bidual"], default="gauge")
    d.set_defaults(func=cmd_dual)

    s = sub.add_parser("solve", parents=[common], help="solve and certify")
    s.add_argument("file")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("antipolar", parents=[common], help="antipolar calculus checks")
    a.add_argument("file")
    a.add_argument("--check", choices=["membership", "biantipolar", "recession"],
                   default="membership")
    a.add_argument("--point", type=float, nargs="+")
    a.add_argument("--samples", type=int, default=500)
    a.set_defaults(func=cmd_antipolar)

    v = sub.add_parser("sensitivity", parents=[common], help="value-function subgradients")
    v.add_argument("file")
    v.add_argument("--grid", type=int, default=3)
    v.add_argument("--radius", type=float, default=0.1)
    v.set_defaults(func=cmd_sensitivity)
    return ap


def main(argv=None, out=None):
    out = sys.stdout if out is None else out
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out)
    except (ParseError, InvalidProblemError, ConstraintQualificationError, UnsupportedGaugeError,
            UnsupportedSetError, UnsupportedFamilyError, OSError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
