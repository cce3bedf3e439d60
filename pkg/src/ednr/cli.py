"""Command-line front end.

Machine-readable JSON on stdout by default; --output redirects to a file.
Exit codes: 0 success, 2 validation or usage error, 3 budget exhausted
(result present but unproven).
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
from fractions import Fraction

from . import analysis, exact_solver, instance as inst_mod, minmin, reductions
from .errors import EdnrError
from .spanning_tree import (
    evaluate,
    export_dot,
    parse_tree,
    serialize_tree,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_BUDGET = 3


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _emit_json(doc, output: str | None) -> None:
    _emit(json.dumps(doc, indent=2, sort_keys=True), output)


def _load_instance(path: str) -> inst_mod.Instance:
    try:
        with open(path) as fh:
            return inst_mod.parse(fh.read())
    except OSError as exc:
        raise EdnrError(f"cannot read {path}: {exc.strerror}") from exc


def _write_tree(tree, instance, path: str) -> None:
    if path.endswith((".dot", ".gv")):
        text = export_dot(instance, tree)
    else:
        text = serialize_tree(tree)
    _emit(text, path)


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers: {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ednr",
        description="Loss-minimal spanning trees on distribution grids.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate instances")
    gen_sub = gen.add_subparsers(dest="kind", required=True)
    gen_grid = gen_sub.add_parser("grid", help="uniform corner-rooted grid")
    gen_grid.add_argument("--n", type=int, required=True, help="rows")
    gen_grid.add_argument("--m", type=int, required=True, help="columns")
    gen_grid.add_argument("--output")
    gen_rand = gen_sub.add_parser("random", help="random connected instance")
    gen_rand.add_argument("--vertices", type=int, required=True)
    gen_rand.add_argument("--seed", type=int, default=0)
    gen_rand.add_argument("--extra-edges", type=int, default=3)
    gen_rand.add_argument("--max-demand", type=int, default=5)
    gen_rand.add_argument("--max-resistance", type=int, default=3)
    gen_rand.add_argument("--output")

    ev = sub.add_parser("eval", help="evaluate a tree's loss")
    ev.add_argument("--input", required=True)
    ev.add_argument("--tree", required=True)
    ev.add_argument("--output")

    mm = sub.add_parser("minmin", help="build the heuristic grid tree")
    mm.add_argument("--n", type=int, required=True)
    mm.add_argument("--m", type=int, required=True)
    mm.add_argument("--emit", help="write tree (.json) or drawing (.dot)")
    mm.add_argument("--output")

    spt = sub.add_parser("spt", help="shortest-path tree baseline")
    spt.add_argument("--input", required=True)
    spt.add_argument("--emit", help="write tree (.json) or drawing (.dot)")
    spt.add_argument("--output")

    exact = sub.add_parser("exact", help="prove the optimum")
    exact.add_argument("--input", required=True)
    exact.add_argument("--budget-nodes", type=int, default=None)
    exact.add_argument("--threads", type=int, default=1)
    exact.add_argument("--output")

    bound = sub.add_parser("bound", help="lower bounds for a uniform grid")
    bound.add_argument("--n", type=int, required=True)
    bound.add_argument("--m", type=int, required=True)
    bound.add_argument("--output")

    certify = sub.add_parser("certify", help="approximation-ratio certificate")
    certify.add_argument("--n", type=int, required=True)
    certify.add_argument("--m", type=int, required=True)
    certify.add_argument("--output")

    bauer = sub.add_parser("bauer", help="balanced sum-of-squares bound check")
    bauer.add_argument("--t", type=int, required=True, help="number of terms")
    bauer.add_argument("--c", type=_rational, required=True, help="sum of terms")
    bauer.add_argument("--cap", type=int, default=12)
    bauer.add_argument("--output")

    reduce_p = sub.add_parser("reduce", help="hardness-reduction encoders")
    reduce_sub = reduce_p.add_subparsers(dest="kind", required=True)
    red1 = reduce_sub.add_parser("partition", help="subset balancing, height 3")
    red1.add_argument("--a", type=_int_list, required=True, help="item values")
    red1.add_argument("--output", help="instance file; sidecar gets .meta.json")
    red3 = reduce_sub.add_parser("3partition", help="triple balancing, 0/1 demands")
    red3.add_argument("--n", type=int, required=True, help="group count")
    red3.add_argument("--a", type=_int_list, required=True, help="3n item values")
    red3.add_argument("--W", type=int, default=None, help="row spacing override")
    red3.add_argument("--rinf", type=int, default=None, help="infinity stand-in")
    red3.add_argument("--output", help="instance file; sidecar gets .meta.json")

    bench = sub.add_parser("bench", help="benchmark tables")
    bench_sub = bench.add_subparsers(dest="kind", required=True)
    table1 = bench_sub.add_parser("table1", help="square grids: optimum vs heuristic")
    table1.add_argument("--max-n", type=int, default=5, help="largest size proven")
    table1.add_argument("--stretch-budget", type=int, default=None)
    table1.add_argument(
        "--format", choices=("markdown", "csv", "json"), default="markdown"
    )
    table1.add_argument("--output")

    render = sub.add_parser("render", help="emit Graphviz DOT")
    render.add_argument("--input", required=True)
    render.add_argument("--tree")
    render.add_argument("--output")

    return parser


def _cmd_gen(args) -> int:
    if args.kind == "grid":
        built = inst_mod.make_uniform_grid(args.n, args.m)
    else:
        rng = random.Random(args.seed)
        built = inst_mod.random_connected_instance(
            rng,
            args.vertices,
            extra_edges=args.extra_edges,
            max_demand=args.max_demand,
            max_resistance=args.max_resistance,
        )
    _emit(inst_mod.serialize(built), args.output)
    return EXIT_OK


def _cmd_eval(args) -> int:
    instance = _load_instance(args.input)
    with open(args.tree) as fh:
        tree = parse_tree(fh.read(), instance)
    report = evaluate(instance, tree)
    _emit_json(
        {
            "total": report.total,
            "per_level": list(report.per_level) if report.per_level else None,
        },
        args.output,
    )
    return EXIT_OK


def _cmd_minmin(args) -> int:
    tree = minmin.minmin_tree(args.n, args.m)
    grid = inst_mod.make_uniform_grid(args.n, args.m)
    report = evaluate(grid, tree)
    if args.emit:
        _write_tree(tree, grid, args.emit)
    _emit_json(
        {
            "rows": args.n,
            "cols": args.m,
            "loss": report.total,
            "per_level": list(report.per_level),
        },
        args.output,
    )
    return EXIT_OK


def _cmd_spt(args) -> int:
    instance = _load_instance(args.input)
    tree = minmin.shortest_path_tree(instance)
    report = evaluate(instance, tree)
    if args.emit:
        _write_tree(tree, instance, args.emit)
    _emit_json({"loss": report.total}, args.output)
    return EXIT_OK


def _cmd_exact(args) -> int:
    if args.threads < 1:
        raise EdnrError("--threads must be at least 1")
    instance = _load_instance(args.input)
    budget = args.budget_nodes
    if budget is None and os.environ.get("EDNR_BUDGET_NODES"):
        budget = int(os.environ["EDNR_BUDGET_NODES"])
    result = exact_solver.solve_bnb(instance, budget_nodes=budget)
    _emit_json(result.as_dict(), args.output)
    return (
        EXIT_BUDGET if result.status == exact_solver.BUDGET_EXHAUSTED else EXIT_OK
    )


def _cmd_bound(args) -> int:
    report = analysis.lower_bound(args.n, args.m)
    _emit_json(
        {
            "sum_bound": str(report.sum_bound),
            "sum_bound_float": float(report.sum_bound),
            "log_bound": report.log_bound,
            "strict": report.strict,
        },
        args.output,
    )
    return EXIT_OK


def _cmd_certify(args) -> int:
    cert = analysis.ratio_certificate(args.n, args.m)
    _emit_json(cert.as_dict(), args.output)
    return EXIT_OK


def _cmd_bauer(args) -> int:
    result = analysis.bauer_bruteforce(args.t, args.c, cap=args.cap)
    _emit_json(
        {
            "t": result.t,
            "total": str(result.total),
            "per_k": [str(x) for x in result.per_k],
            "brute_max": str(result.brute_max),
            "closed_bound": str(result.closed_bound),
            "tight": result.brute_max == result.closed_bound,
        },
        args.output,
    )
    return EXIT_OK


def _artifact_meta(artifact) -> dict:
    threshold = artifact.threshold
    return {
        "threshold": str(threshold) if isinstance(threshold, Fraction) else threshold,
        "threshold_float": float(threshold),
        "source_map": artifact.source_map,
        "params": artifact.params,
    }


def _cmd_reduce(args) -> int:
    if args.kind == "partition":
        artifact = reductions.encode_partition(
            reductions.PartitionInstance(values=args.a)
        )
    else:
        artifact = reductions.encode_3partition(
            reductions.ThreePartitionInstance(group_count=args.n, values=args.a),
            spacing=args.W,
            big_resistance=args.rinf,
        )
    text = inst_mod.serialize(artifact.instance)
    meta = _artifact_meta(artifact)
    if args.output:
        _emit(text, args.output)
        _emit_json(meta, args.output + ".meta.json")
    else:
        _emit_json({"instance": json.loads(text), **meta}, None)
    return EXIT_OK


def _cmd_bench(args) -> int:
    rows = exact_solver.verify_table1(
        exact_limit=args.max_n, stretch_budget=args.stretch_budget
    )
    if args.format == "json":
        _emit_json([row.__dict__ for row in rows], args.output)
        return EXIT_OK
    lines = []
    if args.format == "markdown":
        lines.append("| n | Optimal loss | Loss by heuristic | status |")
        lines.append("|---|---|---|---|")
        for r in rows:
            opt = r.optimal_loss if r.optimal_loss is not None else "-"
            lines.append(f"| {r.size} | {opt} | {r.minmin_loss} | {r.status} |")
    else:
        lines.append("n,optimal_loss,minmin_loss,status")
        for r in rows:
            opt = r.optimal_loss if r.optimal_loss is not None else ""
            lines.append(f"{r.size},{opt},{r.minmin_loss},{r.status}")
    _emit("\n".join(lines), args.output)
    return EXIT_OK


def _cmd_render(args) -> int:
    instance = _load_instance(args.input)
    tree = None
    if args.tree:
        with open(args.tree) as fh:
            tree = parse_tree(fh.read(), instance)
    _emit(export_dot(instance, tree), args.output)
    return EXIT_OK


_HANDLERS = {
    "gen": _cmd_gen,
    "eval": _cmd_eval,
    "minmin": _cmd_minmin,
    "spt": _cmd_spt,
    "exact": _cmd_exact,
    "bound": _cmd_bound,
    "certify": _cmd_certify,
    "bauer": _cmd_bauer,
    "reduce": _cmd_reduce,
    "bench": _cmd_bench,
    "render": _cmd_render,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_VALIDATION if exc.code not in (0, None) else EXIT_OK
    try:
        return _HANDLERS[args.command](args)
    except EdnrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (AssertionError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
