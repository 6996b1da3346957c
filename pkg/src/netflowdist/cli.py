"""Command line interface: ``netflow-dist {generate,dist,cluster,heatmap,reproduce}``."""

from __future__ import annotations

import argparse
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from . import io as nio
from .clustering import kmeans_row, replace_diagonal_with_average, similarity_matrix, spectral_cluster
from .distance import (
    DEFAULT_N_SAMPLES,
    DEFAULT_T_MAX,
    FLOW_METRICS,
    METRICS,
    DisconnectedGraphWarning,
    make_time_grid,
    pairwise_distance_matrix,
)
from .errors import NetflowError
from .generators import bridge_deletion_scenario, fixed_bridge_scenario, two_sbm_scenario
from .plotting import plot_matrix, render_heatmap
from .reproduce import load_config, reproduce

EXIT_INPUT = 2
EXIT_NUMERIC = 3
EXIT_ASSERTION = 4


def _cmd_generate(args) -> int:
    if args.scenario == "bridge41":
        bundle = bridge_deletion_scenario(seed=args.seed)
    elif args.scenario == "fixed42":
        bundle = fixed_bridge_scenario(args.p, args.seed)
    else:
        bundle = two_sbm_scenario(args.seed)
    nio.save_bundle(bundle, args.out)
    print(f"wrote {len(bundle)} graphs to {args.out}")
    return 0


def _load_graphs(paths):
    if len(paths) == 1 and Path(paths[0]).is_dir():
        bundle = nio.load_bundle(paths[0])
        return list(bundle.graphs), list(bundle.labels)
    graphs = [nio.load_graph(p) for p in paths]
    return graphs, [Path(p).stem for p in paths]


def _cmd_dist(args) -> int:
    graphs, labels = _load_graphs(args.graphs)
    grid = make_time_grid(args.tmax, args.samples) if args.metric in FLOW_METRICS else None
    with warnings.catch_warnings():
        if args.quiet:
            warnings.simplefilter("ignore", DisconnectedGraphWarning)
        D = pairwise_distance_matrix(graphs, args.metric, grid, labels=labels)
    text = nio.distance_matrix_to_text(D)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_cluster(args) -> int:
    D = nio.load_distance_matrix(args.matrix)
    if args.method == "spectral":
        a = spectral_cluster(similarity_matrix(D), args.k, seed=args.seed, restarts=args.restarts)
    else:
        source = replace_diagonal_with_average(D) if args.replace_diagonal else D
        a = kmeans_row(source, args.row - 1, args.k, seed=args.seed, restarts=args.restarts)
    text = nio.cluster_table_text(a, D.labels)
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_heatmap(args) -> int:
    D = nio.load_distance_matrix(args.matrix)
    out = Path(args.out)
    if out.suffix.lower() == ".png":
        plot_matrix(D, out, title=args.title)
    else:
        render_heatmap(D, out)
    return 0


def _cmd_reproduce(args) -> int:
    cfg = load_config(args.config)
    overrides = {}
    if args.out:
        overrides["output_dir"] = Path(args.out)
    if args.seed is not None:
        overrides["seeds"] = (args.seed,)
    if args.tmax is not None:
        overrides["t_max"] = args.tmax
    if args.samples is not None:
        overrides["n_samples"] = args.samples
    if args.metric:
        overrides["metrics"] = tuple(args.metric)
    if overrides:
        cfg = replace(cfg, **overrides)
    passed, report = reproduce(cfg)
    print(report.read_text(), end="")
    return 0 if passed else EXIT_ASSERTION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="netflow-dist", description="Network flow distances between graphs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a scenario bundle (adjacency CSVs + manifest)")
    p.add_argument("--scenario", choices=("bridge41", "fixed42", "twosbm43"), required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--p", type=float, default=0.8, help="within-block probability for fixed42")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("dist", help="pairwise distance matrix CSV")
    p.add_argument("graphs", nargs="+", help="graph files, or one bundle directory")
    p.add_argument("--metric", choices=METRICS, default="nld")
    p.add_argument("--tmax", type=float, default=DEFAULT_T_MAX)
    p.add_argument("--samples", type=int, default=DEFAULT_N_SAMPLES)
    p.add_argument("--out")
    p.add_argument("--quiet", action="store_true", help="silence disconnected-graph warnings")
    p.set_defaults(func=_cmd_dist)

    p = sub.add_parser("cluster", help="cluster graphs from a distance matrix CSV")
    p.add_argument("matrix")
    p.add_argument("--method", choices=("kmeans", "spectral"), default="spectral")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=50)
    p.add_argument("--row", type=int, default=1, help="1-based matrix row for --method kmeans")
    p.add_argument("--replace-diagonal", action="store_true", help="row-average diagonal before k-means")
    p.add_argument("--out")
    p.set_defaults(func=_cmd_cluster)

    p = sub.add_parser("heatmap", help="render a distance matrix CSV (.ppm, or .png via matplotlib)")
    p.add_argument("matrix")
    p.add_argument("--out", required=True)
    p.add_argument("--title")
    p.set_defaults(func=_cmd_heatmap)

    p = sub.add_parser("reproduce", help="run a scenario config end to end")
    p.add_argument("config")
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--tmax", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--metric", action="append", choices=METRICS)
    p.set_defaults(func=_cmd_reproduce)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except NetflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
