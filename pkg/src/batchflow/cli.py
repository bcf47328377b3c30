"""Command-line front end.

Exit codes: 0 success, 1 infeasible result or validation violations,
2 usage error (argparse default), 3 runtime failure.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import bench as benchmod
from . import graph as graphmod
from . import instance as instmod
from . import milp as milpmod
from . import mps as mpsmod
from . import oracle as oraclemod
from .decode import decode, read_schedule, validate_schedule, write_schedule
from .external import run_shim
from .solver import STATUS_INFEASIBLE, solve_exact


def _emit(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def cmd_generate(args) -> int:
    if args.family in ("chen", "muter"):
        if len(args.p) != 2 or len(args.s) != 2:
            print("generate: --p and --s take two integers for chen/muter", file=sys.stderr)
            return 2
        gen = instmod.generate_chen if args.family == "chen" else instmod.generate_muter
        inst = gen(args.n, (int(args.p[0]), int(args.p[1])), (int(args.s[0]), int(args.s[1])), args.B, args.seed)
    else:
        if len(args.p) != 1 or len(args.s) != 1:
            print("generate: --p takes p1|p2 and --s takes s1|s2|s3 for new", file=sys.stderr)
            return 2
        inst = instmod.generate_new(args.n, args.p[0], args.s[0], args.B, args.seed)
    instmod.write_instance(inst, args.output)
    print(f"wrote {args.output} ({inst.n_jobs} jobs, B={inst.capacity})")
    return 0


def cmd_graph(args) -> int:
    inst = instmod.read_instance(args.instance)
    prof = instmod.profile(inst)
    g = graphmod.build_graph(prof, inst.capacity)
    report = graphmod.size_report(prof, inst.capacity)
    if args.reduced:
        g = graphmod.reduce_graph(g)
    _emit(report)
    if args.arcs:
        with open(args.arcs, "w", encoding="utf-8") as fh:
            fh.write(graphmod.dump_arcs(g))
    if args.dot:
        graphmod.write_dot(g, args.dot)
    return 0


def cmd_model(args) -> int:
    inst = instmod.read_instance(args.instance)
    model = milpmod.BUILDERS[args.formulation](inst)
    if args.relax:
        model = milpmod.lp_relaxation(model)
    out = str(args.output)
    if out.endswith(".lp"):
        mpsmod.write_lp(model, out)
    elif out.endswith(".mps"):
        mpsmod.write_mps(model, out)
    else:
        print("model: output must end in .lp or .mps", file=sys.stderr)
        return 2
    _emit(model.stats())
    return 0


def cmd_solve(args) -> int:
    inst = instmod.read_instance(args.instance)
    report, flows = solve_exact(inst, time_limit_s=args.time_limit, node_limit=args.node_limit)
    _emit(report.to_dict())
    if args.schedule and report.objective is not None:
        schedule = decode(flows, inst)
        write_schedule(schedule, args.schedule)
    return 0


def cmd_solve_external(args) -> int:
    report = run_shim(args.model, args.shim, args.time_limit)
    _emit(report.to_dict())
    return 1 if report.status == STATUS_INFEASIBLE else 0


def cmd_validate(args) -> int:
    inst = instmod.read_instance(args.instance)
    schedule = read_schedule(args.schedule, inst)
    violations = validate_schedule(schedule, inst)
    if violations:
        for v in violations:
            print(f"violation: {v}")
        return 1
    print(f"OK makespan {schedule.makespan}")
    return 0


def cmd_bench(args) -> int:
    configs = benchmod.load_suite(args.suite)
    rows, aggregates = benchmod.run_suite(
        configs,
        args.backends,
        time_limit_s=args.time_limit,
        jobs=args.jobs,
        shim=args.shim,
        node_limit=args.node_limit,
    )
    benchmod.write_rows_csv(rows, args.output)
    if args.aggregate:
        benchmod.write_aggregate_csv(aggregates, args.aggregate)
    print(f"wrote {args.output} ({len(rows)} rows)")
    return 0


def cmd_oracle(args) -> int:
    inst = instmod.read_instance(args.instance)
    optimum, schedule = oraclemod.brute_force(inst, allow_large=args.allow_large)
    _emit({"optimal_makespan": optimum, "num_batches": len(schedule.batches)})
    return 0


def cmd_scaling(args) -> int:
    rows = benchmod.scaling_demo(
        n_list=[int(tok) for tok in args.n],
        time_range=(args.p[0], args.p[1]),
        size_range=(args.s[0], args.s[1]),
        capacity=args.B,
        seed=args.seed,
        time_limit_s=args.time_limit,
    )
    benchmod.write_scaling_csv(rows, args.output)
    print(f"wrote {args.output} ({len(rows)} rows)")
    return 0


def cmd_report(args) -> int:
    from . import plotting

    if args.scaling:
        import csv

        with open(args.scaling, newline="", encoding="utf-8") as fh:
            rows = []
            for raw in csv.DictReader(fh):
                rows.append(
                    {
                        "n": int(raw["n"]),
                        "generate_s": float(raw["generate_s"]),
                        "construct_s": float(raw["construct_s"]),
                        "flow_variables": int(raw["flow_variables"]),
                        "flow_constraints": int(raw["flow_constraints"]),
                        "solve_s": float(raw["solve_s"]),
                    }
                )
        written = plotting.render_scaling_report(rows, args.outdir)
    else:
        rows = benchmod.read_rows_csv(args.results)
        written = plotting.render_suite_report(rows, args.outdir, time_limit_s=args.time_limit)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="batchflow")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a random instance file")
    p.add_argument("--family", choices=("chen", "muter", "new"), required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", nargs="+", required=True, help="two ints, or p1|p2 for new")
    p.add_argument("--s", nargs="+", required=True, help="two ints, or s1|s2|s3 for new")
    p.add_argument("--B", type=int, required=True)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("graph", help="size report and optional graph dumps")
    p.add_argument("--instance", required=True)
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--arcs")
    p.add_argument("--dot")
    p.set_defaults(func=cmd_graph)

    p = sub.add_parser("model", help="compile a formulation to .lp or .mps")
    p.add_argument("--formulation", choices=sorted(milpmod.BUILDERS), required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--relax", action="store_true", help="clear integrality")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_model)

    p = sub.add_parser("solve", help="run the built-in exact solver")
    p.add_argument("--instance", required=True)
    p.add_argument("--time-limit", type=float)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--schedule", help="write the decoded schedule here")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("solve-external", help="solve an MPS file through a shim")
    p.add_argument("--model", required=True)
    p.add_argument("--shim", required=True)
    p.add_argument("--time-limit", type=float)
    p.set_defaults(func=cmd_solve_external)

    p = sub.add_parser("validate", help="check a schedule file against an instance")
    p.add_argument("--instance", required=True)
    p.add_argument("--schedule", required=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("bench", help="run a benchmark suite to CSV")
    p.add_argument("--suite", required=True)
    p.add_argument("--backends", nargs="+", default=["builtin"])
    p.add_argument("--time-limit", type=float)
    p.add_argument("--node-limit", type=int)
    p.add_argument("--shim", help="shim command for external backends")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--aggregate", help="also write the per-config summary CSV")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="brute-force optimum for tiny instances")
    p.add_argument("--instance", required=True)
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("scaling", help="model-size/timing table across n")
    p.add_argument("--n", nargs="+", required=True)
    p.add_argument("--p", nargs=2, type=int, default=[1, 20])
    p.add_argument("--s", nargs=2, type=int, default=[2, 4])
    p.add_argument("--B", type=int, default=10)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--time-limit", type=float)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(func=cmd_scaling)

    p = sub.add_parser("report", help="render figures + summary CSV from results")
    p.add_argument("--results", help="raw rows CSV from bench")
    p.add_argument("--scaling", help="scaling CSV instead of suite results")
    p.add_argument("--time-limit", type=float, help="limit used in the run, for aggregation")
    p.add_argument("-o", "--outdir", required=True)
    p.set_defaults(func=cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "report" and not (args.results or args.scaling):
        parser.error("report: one of --results/--scaling is required")
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
