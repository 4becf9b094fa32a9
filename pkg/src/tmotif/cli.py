"""Command-line interface: count, estimate, diagnose, gen.

Every subcommand prints a single JSON report on stdout; anything else
(errors, progress) goes to stderr.  Exit codes: 0 success, 1 usage error,
2 data error, 3 internal/overflow error.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from pathlib import Path

from .core import (
    UNBOUNDED_DELTA,
    Motif,
    MOTIF_SHORTCUTS,
    ParseError,
    TemporalGraph,
    load_temporal_graph,
    normalize_timestamps,
    parse_motif,
    static_projection,
)
from .exact import (
    CountOverflowError,
    count_backtracking,
    count_two_node_motif,
    pattern_from_motif,
)
from .sampling import (
    ConfigurationError,
    EstimatorContractError,
    SamplingConfig,
    StreamOrderError,
    build_interval_grid,
    correlation_diagnostic,
    estimate,
    estimate_streaming,
    heuristic_probabilities,
    interval_count_vector,
    sparsity_measure,
    tradeoff_report,
)
from .testkit import (
    CliqueInstance,
    clique_reduction_instance,
    random_clique_instance,
    random_temporal_graph,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_delta(text: str) -> int:
    if text.lower() in ("inf", "max", "unbounded"):
        return UNBOUNDED_DELTA
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"delta {text!r} is not an integer")
    if value < 0:
        raise argparse.ArgumentTypeError("delta must be nonnegative")
    return value


def _load_motif(spec: str) -> Motif:
    """Resolve a motif argument: shortcut name or path to a motif file."""
    if spec in MOTIF_SHORTCUTS:
        return parse_motif(spec)
    path = Path(spec)
    if not path.exists():
        raise UsageError(
            f"motif {spec!r} is neither a shortcut "
            f"({', '.join(sorted(MOTIF_SHORTCUTS))}) nor an existing file"
        )
    return parse_motif(path.read_text(encoding="utf-8"))


def _load_input(path: str) -> TemporalGraph:
    return normalize_timestamps(load_temporal_graph(path))


def _input_stats(path: str, g: TemporalGraph) -> dict:
    return {
        "path": path,
        "nodes": g.num_nodes,
        "temporal_edges": g.num_edges,
        "static_edges": static_projection(g).num_edges,
    }


def _motif_echo(spec: str, m: Motif) -> dict:
    return {
        "spec": spec,
        "edges": [[u, v] for u, v in m.edges],
        "k": m.k,
        "l": m.l,
    }


def _pick_counter(algo: str, m: Motif):
    """Map an --algo flag to a counter, enforcing pattern compatibility."""
    pattern = pattern_from_motif(m)
    if algo == "ex23":
        if pattern is None:
            raise UsageError(
                "--algo ex23 requires a 2-node, 3-edge motif; use bt or auto"
            )
        return "ex23", count_two_node_motif
    if algo == "bt":
        return "bt", count_backtracking
    if pattern is not None:
        return "ex23", count_two_node_motif
    return "bt", count_backtracking


def cmd_count(args) -> dict:
    t0 = time.perf_counter()
    g = _load_input(args.input)
    motif = _load_motif(args.motif)
    algo_name, counter = _pick_counter(args.algo, motif)
    hist = counter(g, motif, args.delta)
    return {
        "mode": "count",
        "algo": algo_name,
        "motif": _motif_echo(args.motif, motif),
        "delta": args.delta,
        "input": _input_stats(args.input, g),
        "result": hist.to_json_dict(),
        "wall_time_ms": (time.perf_counter() - t0) * 1000.0,
    }


def cmd_estimate(args) -> dict:
    t0 = time.perf_counter()
    g = _load_input(args.input)
    motif = _load_motif(args.motif)
    algo_name, counter = _pick_counter(args.algo, motif)
    cfg = SamplingConfig(
        window_factor=args.c,
        num_shifts=args.b,
        rate_scale=args.r,
        seed=args.seed,
    )
    if args.streaming:
        stream = zip(g.src, g.dst, g.ts)
        est = estimate_streaming(
            stream, g.num_edges, g.t_max, motif, args.delta, cfg, counter
        )
    else:
        est = estimate(g, motif, args.delta, cfg, counter, threads=args.threads)
    return {
        "mode": "estimate",
        "algo": algo_name,
        "motif": _motif_echo(args.motif, motif),
        "delta": args.delta,
        "input": _input_stats(args.input, g),
        "result": est.to_json_dict(include_timing=False),
        "wall_time_ms": (time.perf_counter() - t0) * 1000.0,
    }


def cmd_diagnose(args) -> dict:
    t0 = time.perf_counter()
    g = _load_input(args.input)
    motif = _load_motif(args.motif)
    algo_name, counter = _pick_counter(args.algo, motif)
    if g.num_edges == 0:
        raise ParseError("input graph is empty; nothing to diagnose")
    grid = build_interval_grid(g, args.c, args.delta, random.Random(args.seed))
    probs = heuristic_probabilities(g, grid, args.r)
    vec = interval_count_vector(g, grid, motif, args.delta, counter)
    values = vec.values
    nonzero = [v for v in values if v]
    total = sum(values)
    result = {
        "shift": grid.shift,
        "width": grid.width,
        "num_intervals": grid.num_intervals,
        "q": {
            "min": min(probs),
            "max": max(probs),
            "mean": sum(probs) / len(probs),
            "nonzero": sum(1 for q in probs if q > 0),
        },
        "y": {
            "l1": total,
            "max": max(values) if values else 0.0,
            "nonzero": len(nonzero),
        },
        "rho": correlation_diagnostic(probs, vec) if len(values) >= 2 else None,
        "sparsity": float(sparsity_measure(vec)) if total > 0 else None,
        "tradeoff": tradeoff_report(probs, vec, args.c, args.b)
        if total > 0
        else None,
    }
    return {
        "mode": "diagnose",
        "algo": algo_name,
        "motif": _motif_echo(args.motif, motif),
        "delta": args.delta,
        "input": _input_stats(args.input, g),
        "result": result,
        "wall_time_ms": (time.perf_counter() - t0) * 1000.0,
    }


def _write_edge_list(path: str, g: TemporalGraph) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.num_edges):
            fh.write(f"{g.src[i]} {g.dst[i]} {g.ts[i]}\n")


def _write_motif(path: str, m: Motif) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for u, v in m.edges:
            fh.write(f"{u} {v}\n")


def cmd_gen(args) -> dict:
    t0 = time.perf_counter()
    if args.kind == "random":
        g = random_temporal_graph(args.nodes, args.edges, args.t_range, args.seed)
        _write_edge_list(args.output, g)
        return {
            "mode": "gen",
            "kind": "random",
            "output": args.output,
            "nodes": args.nodes,
            "temporal_edges": g.num_edges,
            "t_range": args.t_range,
            "seed": args.seed,
            "wall_time_ms": (time.perf_counter() - t0) * 1000.0,
        }
    inst = random_clique_instance(args.n, args.k, args.edge_prob, args.seed)
    graph, motif, delta = clique_reduction_instance(inst)
    _write_edge_list(args.output, graph)
    _write_motif(args.motif_output, motif)
    return {
        "mode": "gen",
        "kind": "reduction",
        "output": args.output,
        "motif_output": args.motif_output,
        "n": args.n,
        "k": args.k,
        "edge_prob": args.edge_prob,
        "seed": args.seed,
        "temporal_edges": graph.num_edges,
        "source_edges": len(inst.edges),
        "delta": delta,
        "wall_time_ms": (time.perf_counter() - t0) * 1000.0,
    }


def build_parser() -> _Parser:
    parser = _Parser(
        prog="tmotif",
        description="Exact counting and sampled estimation of temporal motifs.",
    )
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_common(p):
        p.add_argument("--input", required=True, help="edge-list file (src dst t)")
        p.add_argument(
            "--motif",
            required=True,
            help="motif shortcut (m23, bifan) or motif file path",
        )
        p.add_argument(
            "--delta",
            required=True,
            type=_parse_delta,
            help="time window in the dataset's native unit, or 'inf'",
        )
        p.add_argument(
            "--algo",
            choices=("bt", "ex23", "auto"),
            default="auto",
            help="exact counter (auto picks ex23 for 2-node/3-edge motifs)",
        )

    p_count = sub.add_parser("count", help="exact count with duration histogram")
    add_common(p_count)
    p_count.set_defaults(func=cmd_count)

    p_est = sub.add_parser("estimate", help="sampled estimate of the count")
    add_common(p_est)
    p_est.add_argument("--c", type=int, default=32, help="interval width multiplier")
    p_est.add_argument("--b", type=int, default=8, help="number of grid shifts")
    p_est.add_argument("--r", type=float, default=32.0, help="probability scale")
    p_est.add_argument("--seed", type=int, default=0)
    p_est.add_argument(
        "--threads",
        type=int,
        default=os.cpu_count() or 1,
        help="worker count (results are identical for any value)",
    )
    p_est.add_argument(
        "--streaming",
        action="store_true",
        help="one-pass bounded-memory execution (same result, same seed)",
    )
    p_est.set_defaults(func=cmd_estimate)

    p_diag = sub.add_parser(
        "diagnose", help="full single-shift pass with sampling diagnostics"
    )
    add_common(p_diag)
    p_diag.add_argument("--c", type=int, default=32)
    p_diag.add_argument("--b", type=int, default=8)
    p_diag.add_argument("--r", type=float, default=32.0)
    p_diag.add_argument("--seed", type=int, default=0)
    p_diag.set_defaults(func=cmd_diagnose)

    p_gen = sub.add_parser("gen", help="write synthetic inputs")
    gen_sub = p_gen.add_subparsers(dest="kind", required=True, parser_class=_Parser)

    p_rand = gen_sub.add_parser("random", help="uniform random temporal graph")
    p_rand.add_argument("--nodes", type=int, required=True)
    p_rand.add_argument("--edges", type=int, required=True)
    p_rand.add_argument("--t-range", type=int, required=True, dest="t_range")
    p_rand.add_argument("--seed", type=int, default=0)
    p_rand.add_argument("--output", required=True)
    p_rand.set_defaults(func=cmd_gen)

    p_red = gen_sub.add_parser(
        "reduction", help="clique-to-star instance (edge list + motif file)"
    )
    p_red.add_argument("--n", type=int, required=True, help="source graph nodes")
    p_red.add_argument("--k", type=int, required=True, help="clique size")
    p_red.add_argument("--edge-prob", type=float, default=0.5, dest="edge_prob")
    p_red.add_argument("--seed", type=int, default=0)
    p_red.add_argument("--output", required=True)
    p_red.add_argument("--motif-output", required=True, dest="motif_output")
    p_red.set_defaults(func=cmd_gen)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        report = args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ConfigurationError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, FileNotFoundError, IsADirectoryError, StreamOrderError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (CountOverflowError, EstimatorContractError, OverflowError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    json.dump(report, sys.stdout, sort_keys=True)
    sys.stdout.write("\n")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
