"""Command-line interface: ``gwlab <subcommand> ...``.

Exit codes: 0 success, 2 bad input, 3 theorem violation (a bug),
4 oracle requested but unavailable, 5 QAP identity check failed.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments, gwcore, mmspace, oracle, solvers
from .errors import InternalInconsistency, TooManyDof, ValidationError
from .spectral import certify_nonconvex

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_THEOREM = 3
EXIT_NO_ORACLE = 4
EXIT_IDENTITY = 5


def _emit(obj, stream=None):
    stream = stream or sys.stdout
    json.dump(obj, stream)
    stream.write("\n")


def _spaces(args):
    X = mmspace.load_space(args.space_x, args.format)
    Y = mmspace.load_space(args.space_y, args.format)
    return X, Y


def cmd_gamma(args):
    X, Y = _spaces(args)
    problem = gwcore.build_problem(X, Y, args.p)
    if args.out:
        gwcore.write_gamma(problem, args.out)
    else:
        _emit(problem.to_json())
    return EXIT_OK


def cmd_spectrum(args):
    X, Y = _spaces(args)
    report = certify_nonconvex(gwcore.build_problem(X, Y, args.p), args.eig_method)
    _emit(report.to_json())
    return EXIT_OK


def _initial(args, problem):
    if args.init == "independence":
        return gwcore.independence_coupling(problem.mu_x, problem.mu_y)
    if args.init == "diagonal":
        if problem.m != problem.n or not (problem.mu_x == problem.mu_y).all():
            raise ValidationError("diagonal init needs two spaces with the same measure")
        return gwcore.diagonal_coupling(problem.mu_x)
    return solvers.random_coupling(problem.mu_x, problem.mu_y, solvers.make_rng(args.seed))


def cmd_solve(args):
    X, Y = _spaces(args)
    problem = gwcore.build_problem(X, Y, args.p)
    if args.oracle and problem.dof > oracle.MAX_DOF:
        print(
            f"error: oracle needs at most {oracle.MAX_DOF} degrees of freedom, problem has {problem.dof}",
            file=sys.stderr,
        )
        return EXIT_NO_ORACLE
    if args.method == "fw":
        result = solvers.frank_wolfe(problem, _initial(args, problem), args.max_iter, args.tol)
    elif args.method == "entropic":
        result = solvers.entropic_gw(
            problem, args.epsilon, args.outer_iters, args.sinkhorn_iters, _initial(args, problem)
        )
    else:
        result = solvers.multistart(problem, args.k, args.seed, args.max_iter, args.tol)
    out = result.to_json()
    out["p"] = problem.p
    if args.trace:
        result.write_trace(args.trace)
    if args.oracle:
        ref = oracle.oracle(problem, args.resolution)
        out["oracle"] = ref.to_json()
        out["oracle_gap"] = result.value - ref.value
    _emit(out)
    return EXIT_OK


def _sweep_out(rows, args, meta):
    meta = dict(meta, rows=len(rows), spearman=experiments.trend(rows))
    if args.out:
        experiments.write_sweep(rows, args.out)
        _emit(meta)
    else:
        experiments.write_sweep(rows, sys.stdout)
        _emit(meta, sys.stderr)
    return EXIT_OK


def cmd_sweep_delta(args):
    rows = experiments.sweep_delta(args.m, args.n_min, args.n_max, args.p, args.eig_method)
    return _sweep_out(rows, args, {"experiment": "delta", "m": args.m, "p": args.p})


def cmd_sweep_curves(args):
    cx = mmspace.load_curve(args.curve_x)
    cy = mmspace.load_curve(args.curve_y)
    rows = experiments.sweep_curves(cx, cy, args.m, args.n_min, args.n_max, args.p, args.eig_method)
    meta = {
        "experiment": "curves",
        "m": args.m,
        "p": args.p,
        "sampling": "evenly spaced sample indices, both endpoints kept; arc length along the full curve",
    }
    return _sweep_out(rows, args, meta)


def cmd_qap_check(args):
    X, Y = _spaces(args)
    report = experiments.qap_check(X, Y, args.trials, args.seed)
    _emit(report)
    if report["failures"]:
        for f in report["failures"]:
            print(f"identity failed: {f}", file=sys.stderr)
        return EXIT_IDENTITY
    return EXIT_OK


def cmd_standin_curve(args):
    curve = mmspace.spiral_curve(args.samples, args.growth)
    mmspace.save_curve(curve, args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gwlab",
        description="Gromov-Wasserstein programs between finite metric-measure spaces.",
        epilog="exit codes: 0 ok, 2 bad input, 3 internal theorem violation, "
        "4 oracle unavailable, 5 QAP identity failure",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=float, default=1.0, help="loss exponent (>= 1)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", default=None, help="output path")
    common.add_argument(
        "--eig-method", choices=("auto", "jacobi", "lapack"), default="auto", help=argparse.SUPPRESS
    )

    pair = argparse.ArgumentParser(add_help=False)
    pair.add_argument("space_x")
    pair.add_argument("space_y")
    pair.add_argument("--format", choices=mmspace.FORMATS, default="distance-matrix")

    p = sub.add_parser("gamma", parents=[common, pair], help="dump Gamma_p, A and b")
    p.set_defaults(func=cmd_gamma)

    p = sub.add_parser("spectrum", parents=[common, pair], help="spectral non-convexity report")
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("solve", parents=[common, pair], help="solve the GW program locally")
    p.add_argument("--method", choices=("fw", "entropic", "multistart"), default="fw")
    p.add_argument("--init", choices=("independence", "diagonal", "random"), default="independence")
    p.add_argument("--tol", type=float, default=solvers.DEFAULT_TOL)
    p.add_argument("--max-iter", type=int, default=solvers.DEFAULT_MAX_ITER)
    p.add_argument("--epsilon", type=float, default=None)
    p.add_argument("--outer-iters", type=int, default=solvers.DEFAULT_OUTER_ITERS)
    p.add_argument("--sinkhorn-iters", type=int, default=solvers.DEFAULT_SINKHORN_ITERS)
    p.add_argument("--k", type=int, default=5, help="multistart runs")
    p.add_argument("--oracle", action="store_true", help="compare with the global oracle")
    p.add_argument("--resolution", type=int, default=None)
    p.add_argument("--trace", default=None, help="write iteration,value,gap CSV here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("sweep-delta", parents=[common], help="negative counts for Delta_m vs Delta_n")
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=50)
    p.set_defaults(func=cmd_sweep_delta)

    p = sub.add_parser("sweep-curves", parents=[common], help="negative counts for two sampled curves")
    p.add_argument("curve_x")
    p.add_argument("curve_y")
    p.add_argument("--m", type=int, default=50)
    p.add_argument("--n-min", type=int, default=10)
    p.add_argument("--n-max", type=int, default=50)
    p.set_defaults(func=cmd_sweep_curves)

    p = sub.add_parser("qap-check", parents=[common, pair], help="verify the p=2 QAP split")
    p.add_argument("--trials", type=int, default=100)
    p.set_defaults(func=cmd_qap_check)

    p = sub.add_parser("standin-curve", help="write a synthetic spiral curve CSV")
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--growth", type=float, default=0.12, help="> 0 spirals out, < 0 spirals in")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_standin_curve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except InternalInconsistency as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_THEOREM
    except TooManyDof as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_ORACLE
    except (ValidationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
