"""Command-line entry point: ``skeleta <subcommand> ...``.

Exit status is 2 for usage errors, 1 for domain errors (reported as
``error: <ErrorName>: message``), and otherwise 0 unless the subcommand's
own check (exact recovery, full rank) fails, in which case it is 1.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .covering import enumerate_connected_covers, enumerate_connected_double_covers
from .errors import GraphError, SkeletaError
from .generators import random_lengths, random_min_valency3_graph
from .graph import Graph, MetricGraph, betti, enumerate_loops
from .graphio import dumps_graph, format_rational, load_graph, parse_rational, to_dot
from .padic import KummerQuery, Val, is_split_ball, preimage_exponent
from .pipeline import (DEFAULT_DENOM_BOUND, DEFAULT_E_MAX, DEFAULT_I_MAX, DEFAULT_MAX_REFERENCES,
                       SplitOracle, run_recovery)
from .reconstruct import ConstraintSystem, iter_rows, solve_lengths, verify_prop_a1
from .tate import distinguish, p1_edge_length


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except GraphError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _val(text: str) -> Val:
    if text.strip() == "inf":
        return Val("inf")
    return Val(_rational(text))


def _write(out, text: str) -> None:
    out.write(text)


def _load_metric(graph_path, lengths_path=None) -> MetricGraph:
    g = load_graph(graph_path)
    if lengths_path is None:
        if not isinstance(g, MetricGraph):
            raise GraphError(f"{graph_path} carries no edge lengths; pass --lengths")
        return g
    structure = g.graph if isinstance(g, MetricGraph) else g
    data = json.loads(Path(lengths_path).read_text(encoding="utf-8"))
    if isinstance(data, dict) and "edges" in data:
        other = load_graph(lengths_path)
        if not isinstance(other, MetricGraph):
            raise GraphError(f"{lengths_path} carries no edge lengths")
        lengths = dict(other.length)
    elif isinstance(data, dict):
        lengths = {e: parse_rational(x) for e, x in data.items()}
    else:
        raise GraphError("lengths file must be a JSON object")
    return MetricGraph(structure, lengths)


def cmd_kummer(args, out) -> int:
    q = KummerQuery(args.p, args.e, args.v)
    i = preimage_exponent(q)
    split = "true" if is_split_ball(q) else "false"
    _write(out, f"i={i} preimages={args.p ** i} split={split}\n")
    return 0


def cmd_p1(args, out) -> int:
    _write(out, f"length={p1_edge_length(args.vlambda)}\n")
    return 0


def cmd_tate(args, out) -> int:
    rep = distinguish(args.valpha, args.vbeta, args.p)
    rows = rep.rows()
    if args.report == "json":
        payload = {"p": args.p, "sides": rows, "lg_gap": format_rational(rep.lg_gap),
                   "differ": rep.differ}
        _write(out, json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif args.report == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _write(out, buf.getvalue())
    else:
        first = rep.params[0]
        _write(out, f"n={first.n} l={first.l} m={first.m}\n")
        for r in rows:
            _write(out, f"{r['side']}: v={r['v']} I1={r['I1']} points={{{r['I1_points'].replace(' ', ',')}}} "
                        f"lg(I1)={r['lg_I1']} I2={r['I2']} lg(I2)={r['lg_I2']}\n")
        _write(out, f"lg gap={format_rational(rep.lg_gap)} differ={'true' if rep.differ else 'false'}\n")
    return 0


def cmd_covers(args, out) -> int:
    g = load_graph(args.graph)
    name = Path(args.graph).stem
    if args.degree == 2:
        covers = enumerate_connected_double_covers(g, name)
    else:
        covers = list(enumerate_connected_covers(g, args.degree, name))
    _write(out, f"connected degree-{args.degree} covers: {len(covers)}\n")
    if args.list:
        for c in covers:
            _write(out, f"{c.name} vertices={len(c.total.vertices)} edges={len(c.total.edges)} "
                        f"b1={betti(c.total)}\n")
    if args.dot:
        chunks = []
        for c in covers:
            labels = {x: f"{x[0]}/{x[1]}" for x in c.total.edges}
            chunks.append(to_dot(_relabel(c.total), c.name, _relabel_labels(labels)))
        Path(args.dot).write_text("".join(chunks), encoding="utf-8")
    return 0


def _relabel(g):
    vid = {v: f"{v[0]}.{v[1]}" for v in g.vertices}
    edges = {f"{e[0]}.{e[1]}": (vid[u], vid[v]) for e, (u, v) in g.edges.items()}
    return Graph(frozenset(vid.values()), edges)


def _relabel_labels(labels):
    return {f"{e[0]}.{e[1]}": text for e, text in labels.items()}


def cmd_reconstruct(args, out) -> int:
    hidden = _load_metric(args.graph, args.lengths)
    rows = [row for _, row in iter_rows(hidden, args.max_degree)]
    order = hidden.graph.sorted_edges()
    report = verify_prop_a1(hidden.graph, max_degree=args.max_degree)
    _write(out, report.summary() + "\n")
    lengths = solve_lengths(ConstraintSystem(rows, order))
    exact = all(lengths[e] == hidden.length[e] for e in order)
    for e in order:
        _write(out, f"{e} {format_rational(lengths[e])}\n")
    _write(out, f"exact={'true' if exact else 'false'}\n")
    return 0 if exact else 1


def cmd_pipeline(args, out) -> int:
    hidden = _load_metric(args.graph, args.lengths)
    oracle = SplitOracle(hidden, args.p)
    max_refs = None if args.max_references == 0 else args.max_references
    rep = run_recovery(hidden.graph, oracle, i_max=args.i_max, denom_bound=args.denom_bound,
                       e_max=args.e_max, max_references=max_refs,
                       edge_denom_bound=args.edge_denom_bound or None)
    order = hidden.graph.sorted_edges()
    exact = all(rep.lengths[e] == hidden.length[e] for e in order)
    joint = sum(1 for r in rep.rows if r.joint)
    _write(out, f"p={args.p} rows_measured={len(rep.resolved)} rows_skipped={len(rep.unresolved)} "
                f"rows_joint={joint} queries={rep.queries}\n")
    _write(out, "edge hidden recovered\n")
    for e in order:
        _write(out, f"{e} {format_rational(hidden.length[e])} {format_rational(rep.lengths[e])}\n")
    _write(out, f"exact={'true' if exact else 'false'}\n")
    return 0 if exact else 1


def cmd_verify_a1(args, out) -> int:
    g = load_graph(args.graph)
    report = verify_prop_a1(g, max_degree=args.max_degree)
    _write(out, report.summary() + "\n")
    if report.null_space:
        for vec in report.null_space:
            _write(out, "null " + " ".join(format_rational(x) for x in vec) + "\n")
    return 0 if report.holds else 1


def cmd_loops(args, out) -> int:
    g = load_graph(args.graph)
    for c in enumerate_loops(g):
        _write(out, " ".join(f"{e}{'+' if o == 1 else '-'}" for e, o in c.steps) + "\n")
    return 0


def cmd_generate(args, out) -> int:
    rng = random.Random(args.seed)
    g = random_min_valency3_graph(rng, max_edges=args.max_edges)
    m = random_lengths(rng, g, max_denominator=args.max_denominator)
    text = dumps_graph(m)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        _write(out, text)
    if args.dot:
        Path(args.dot).write_text(to_dot(m, f"seed{args.seed}"), encoding="utf-8")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="skeleta", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=f"skeleta {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    s = sub.add_parser("kummer", help="preimage count of B(1, p^-v) under z -> z^(p^e)")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--e", type=int, required=True)
    s.add_argument("--v", type=_val, required=True, help="valuation of the radius, NUM/DEN or inf")
    s.set_defaults(func=cmd_kummer)

    s = sub.add_parser("p1", help="skeleton edge length of P1 minus four points")
    s.add_argument("--vlambda", type=_rational, required=True)
    s.set_defaults(func=cmd_p1)

    s = sub.add_parser("tate", help="distinguish two Tate-curve valuations")
    s.add_argument("--valpha", type=_rational, required=True)
    s.add_argument("--vbeta", type=_rational, required=True)
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--report", choices=["text", "csv", "json"], default="text")
    s.set_defaults(func=cmd_tate)

    s = sub.add_parser("covers", help="connected covers of a graph")
    s.add_argument("graph")
    s.add_argument("--degree", type=int, choices=[2, 3], default=2)
    s.add_argument("--list", action="store_true")
    s.add_argument("--dot", metavar="FILE")
    s.set_defaults(func=cmd_covers)

    s = sub.add_parser("loops", help="simple cycles of a graph")
    s.add_argument("graph")
    s.set_defaults(func=cmd_loops)

    s = sub.add_parser("reconstruct", help="edge lengths from measured loop lengths")
    s.add_argument("graph")
    s.add_argument("--lengths", help="hidden lengths (graph file or {edge: NUM/DEN})")
    s.add_argument("--max-degree", type=int, choices=[2, 3], default=2)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("pipeline", help="edge lengths from split-oracle answers only")
    s.add_argument("graph")
    s.add_argument("--lengths", help="hidden lengths (graph file or {edge: NUM/DEN})")
    s.add_argument("--p", type=int, required=True)
    s.add_argument("--e-max", type=int, default=DEFAULT_E_MAX)
    s.add_argument("--i-max", type=int, default=DEFAULT_I_MAX)
    s.add_argument("--denom-bound", type=int, default=DEFAULT_DENOM_BOUND)
    s.add_argument("--max-references", type=int, default=DEFAULT_MAX_REFERENCES or 0,
                   help="reference loops per measured loop (0: no limit)")
    s.add_argument("--edge-denom-bound", type=int, default=0,
                   help="denominator bound on edge lengths for ambiguous loops (0: off)")
    s.set_defaults(func=cmd_pipeline)

    s = sub.add_parser("verify-a1", help="rank check: do loop lengths determine edge lengths")
    s.add_argument("graph")
    s.add_argument("--max-degree", type=int, choices=[2, 3], default=3)
    s.set_defaults(func=cmd_verify_a1)

    s = sub.add_parser("generate", help="seeded random min-valency-3 metric graph")
    s.add_argument("--seed", type=int, required=True)
    s.add_argument("--max-edges", type=int, default=9)
    s.add_argument("--max-denominator", type=int, default=4)
    s.add_argument("--out")
    s.add_argument("--dot", metavar="FILE")
    s.set_defaults(func=cmd_generate)
    return ap


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args, out)
    except SkeletaError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
