"""Command-line interface: solve, verify, render, check.

Exit codes distinguish failure classes so batch drivers can react:
0 success, 1 unexpected error, 2 invalid input or structural problem
defect, 3 spec/results parse error, 4 I/O error, 5 numerical failure,
6 unsupported dimension. A completed solve exits 0 regardless of the
optimality verdict.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import specio
from .errors import (
    InvalidInputError,
    NumericalError,
    SpecError,
    StructuralError,
    UnsupportedDimensionError,
)
from .optimality import verify
from .problem import (
    check_existence,
    check_nondegeneracy,
    check_pairwise_disjoint,
    connected_components,
    objective,
    pair_label,
)
from .render import render_svg, write_coordinates_table
from .solver import SolverConfig, StepRule, initialize, solve

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_INVALID = 2
EXIT_PARSE = 3
EXIT_IO = 4
EXIT_NUMERICAL = 5
EXIT_DIMENSION = 6


def _g12(value: float) -> str:
    return f"{value:.12g}"


def _merge_solver_config(base: SolverConfig | None, args) -> SolverConfig:
    cfg = base or SolverConfig()
    overrides = {}
    if args.tolerance is not None:
        overrides["tolerance"] = args.tolerance
    if args.max_iter is not None:
        overrides["max_iter"] = args.max_iter
    if args.step_rule is not None:
        overrides["step_rule"] = StepRule(args.step_rule)
    if args.step_scale is not None:
        overrides["step_scale"] = args.step_scale
    if args.step_offset is not None:
        overrides["step_offset"] = args.step_offset
    if args.stop_on_gradient:
        overrides["stop_on_gradient"] = True
    if not overrides:
        return cfg
    return SolverConfig(
        step_rule=overrides.get("step_rule", cfg.step_rule),
        step_scale=overrides.get("step_scale", cfg.step_scale),
        step_offset=overrides.get("step_offset", cfg.step_offset),
        tolerance=overrides.get("tolerance", cfg.tolerance),
        max_iter=overrides.get("max_iter", cfg.max_iter),
        stop_on_gradient=overrides.get("stop_on_gradient", cfg.stop_on_gradient),
        trace_stride=cfg.trace_stride,
    )


def _cmd_solve(args) -> int:
    spec = specio.load_problem(args.spec)
    problem = spec.problem
    cfg = _merge_solver_config(spec.solver, args)
    start = initialize(problem, None if args.anchors else spec.init)
    result = solve(problem, start, cfg)
    report = verify(problem, result.best_config, args.verify_tol)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.json"
    trace_path = out_dir / "trace.csv"
    specio.save_results(results_path, result, report)
    specio.write_trace_csv(trace_path, result.trace)

    print(f"J_best     = {_g12(result.best_objective)}")
    print(f"iterations = {result.iterations} ({result.stop_reason.value})")
    for tol, it in sorted(result.checkpoints.items(), reverse=True):
        print(f"  |dJ| < {tol:.0e} first reached at iteration {it}")
    print(f"verdict    = {report.verdict.value} (tol {report.tol:g})")
    print(f"results    -> {results_path}")
    print(f"trace      -> {trace_path}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    spec = specio.load_problem(args.spec)
    results = specio.load_results(args.results)
    value = specio.check_results_consistency(spec.problem, results)
    report = verify(spec.problem, results.best_config, args.verify_tol)
    print(f"objective  = {_g12(value)} (recomputed, matches stored)")
    print(f"verdict    = {report.verdict.value} (tol {report.tol:g})")
    for i, ok in enumerate(report.chain_normal_ok):
        res = report.chain_residuals[i]
        print(f"  a{i + 1}: normal-cone membership {'ok' if ok else 'FAILED'}"
              f" (residual norm {_g12(float((res @ res) ** 0.5))})")
    hres = report.hub_residual
    print(f"  x : normal-cone membership {'ok' if report.hub_normal_ok else 'FAILED'}"
          f" (residual norm {_g12(float((hres @ hres) ** 0.5))})")
    print(f"global balance norm = {_g12(report.global_balance_norm)}")
    if report.indeterminate_vertices or report.hub_indeterminate:
        labels = [f"a{i + 1}" for i in report.indeterminate_vertices]
        if report.hub_indeterminate:
            labels.append("x")
        print(f"indeterminate blocks: {', '.join(labels)}")
    return EXIT_OK


def _cmd_render(args) -> int:
    spec = specio.load_problem(args.spec)
    results = specio.load_results(args.results)
    try:
        render_svg(spec.problem, results.best_config, args.svg)
    except UnsupportedDimensionError:
        fallback = Path(args.svg).with_suffix(".csv")
        write_coordinates_table(spec.problem, results.best_config, fallback)
        print(f"cannot draw n={spec.problem.n} as SVG; wrote data table -> {fallback}",
              file=sys.stderr)
        raise
    print(f"svg -> {args.svg}")
    return EXIT_OK


def _cmd_check(args) -> int:
    spec = specio.load_problem(args.spec)
    problem = spec.problem
    print(f"dimension n = {problem.n}, chain length m = {problem.m}")

    bad = check_nondegeneracy(problem)
    print(f"vertex coupling: {'ok' if not bad else 'VIOLATED at ' + str(bad)}")

    comps = connected_components(problem)
    for comp in comps:
        names = ", ".join(f"C{k + 1}" for k in comp.indices)
        hub = "with hub" if comp.includes_hub else "no hub"
        print(f"  component [{names}] ({hub})")

    existence = check_existence(problem)
    print(f"existence preconditions: {'satisfied' if existence.satisfied else 'NOT satisfied'}")
    for check in existence.checks:
        if not check.satisfied:
            names = ", ".join(f"C{k + 1}" for k in check.component.indices)
            print(f"  component [{names}]: no bounded set")

    report = check_pairwise_disjoint(problem, args.margin)
    if report.ok:
        print(f"pairwise set distances all exceed margin {args.margin:g}")
    else:
        print(f"pairs within margin {args.margin:g}:")
        for pair in report.flagged:
            print(f"  {pair_label(pair.first)} vs {pair_label(pair.second)}: "
                  f"distance {_g12(pair.distance)}")

    if spec.init is not None:
        print(f"init: explicit configuration, objective {_g12(objective(problem, spec.init))}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="heronwaist",
        description="Weighted closed-chain / hub placement over convex sets "
                    "via projected subgradient descent.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="solve a problem spec and write results + trace")
    p_solve.add_argument("spec", help="path to a problem spec JSON file")
    p_solve.add_argument("--tolerance", type=float, default=None,
                         help="stagnation tolerance (default from spec or 1e-12)")
    p_solve.add_argument("--max-iter", type=int, default=None)
    p_solve.add_argument("--step-rule", choices=[r.value for r in StepRule], default=None)
    p_solve.add_argument("--step-scale", type=float, default=None)
    p_solve.add_argument("--step-offset", type=int, default=None)
    p_solve.add_argument("--stop-on-gradient", action="store_true")
    p_solve.add_argument("--anchors", action="store_true",
                         help="ignore the spec's init section and start from set anchors")
    p_solve.add_argument("--verify-tol", type=float, default=1e-4,
                         help="normal-cone membership tolerance for the post-solve check")
    p_solve.add_argument("--out", default=".", help="output directory (default: .)")
    p_solve.set_defaults(func=_cmd_solve)

    p_verify = sub.add_parser("verify", help="verify first-order optimality of stored results")
    p_verify.add_argument("spec")
    p_verify.add_argument("results")
    p_verify.add_argument("--verify-tol", type=float, default=1e-4)
    p_verify.set_defaults(func=_cmd_verify)

    p_render = sub.add_parser("render", help="draw a stored 2-D configuration as SVG")
    p_render.add_argument("spec")
    p_render.add_argument("results")
    p_render.add_argument("--svg", required=True, help="output SVG path")
    p_render.set_defaults(func=_cmd_render)

    p_check = sub.add_parser("check", help="run structural diagnostics on a spec")
    p_check.add_argument("spec")
    p_check.add_argument("--margin", type=float, default=0.0,
                         help="pairwise set-distance margin (default 0)")
    p_check.set_defaults(func=_cmd_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except SpecError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (InvalidInputError, StructuralError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except UnsupportedDimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
