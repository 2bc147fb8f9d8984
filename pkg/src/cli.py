#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Command-Line Surface

Thin adapters over the library: generate, gcc, centrality, curve, isolate and
experiment. Data and tables go to stdout, diagnostics to stderr.

Exit codes: 0 success, 1 usage error, 2 runtime/convergence error, 3 IO error.
"""

import argparse
import csv
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from loguru import logger

from centrality import Measure, SolverSettings, compute_centrality, top_fraction
from config import Config, load_config, load_experiment_config
from epidemic import aggregate_curve, capacity_exceedance, curve_peak, fit_gamma
from errors import DegenerateSampleError, ExportError, FlatCurveError, InvalidParamsError
from experiment import export, peak_table, reduction_table, run_experiment
from generators import MODELS, GeneratorParams, generate
from graph_core import (
    Graph,
    connected_triplet_count,
    global_clustering_coefficient,
    isolate_nodes,
    read_edge_list,
    triangle_count,
    write_edge_list,
)
from logger import setup_logging

USAGE_EXIT = 1


class _Parser(argparse.ArgumentParser):
    """用法错误统一以退出码1结束"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _parse_ids(text: str) -> List[int]:
    try:
        return [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise InvalidParamsError(f"node ids must be integers, got {text!r}")


def _open_csv(path: str):
    try:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        return open(path, "w", encoding="utf-8", newline="")
    except OSError as e:
        raise ExportError(f"cannot write {path}: {e}") from e


def _isolation_targets(g: Graph, fraction: float, by: str, settings: SolverSettings) -> tuple:
    if fraction == 0:
        return ()
    scores = compute_centrality(g, Measure.parse(by), settings)
    return top_fraction(scores, fraction, g.n)


def cmd_generate(args, config: Config) -> int:
    if args.model == "ba" and args.pt:
        logger.warning(f"--pt {args.pt} ignored for the ba model")
    params = GeneratorParams(n=args.n, m=args.m, triad_probability=args.pt, seed=args.seed)
    g = generate(args.model, params)
    write_edge_list(g, args.out)
    logger.info(f"wrote {args.model} graph n={g.n} edges={g.edge_count} to {args.out}")
    return 0


def cmd_gcc(args, config: Config) -> int:
    g = read_edge_list(args.input)
    gcc = global_clustering_coefficient(g)
    print(f"gcc {'undefined' if gcc is None else repr(gcc)}")
    print(f"triangles {triangle_count(g)}")
    print(f"triplets {connected_triplet_count(g)}")
    return 0


def cmd_centrality(args, config: Config) -> int:
    g = read_edge_list(args.input)
    measures = list(Measure) if args.measure == "all" else [Measure.parse(args.measure)]
    scores = [compute_centrality(g, m, config.solver) for m in measures]

    with _open_csv(args.out) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["node_id", "measure", "score"])
        for i in range(g.n):
            for s in scores:
                writer.writerow([i, s.measure.value, repr(float(s.values[i]))])
    logger.info(f"wrote {len(measures)} x {g.n} scores to {args.out}")
    return 0


def cmd_curve(args, config: Config) -> int:
    g = read_edge_list(args.input)
    targets = _isolation_targets(g, args.isolate_top, args.by, config.solver)
    target_set = set(targets)
    isolated = isolate_nodes(g, target_set)

    if args.sources == "all":
        sources = [v for v in range(g.n) if v not in target_set]
    else:
        sources = _parse_ids(args.sources)
    curve = aggregate_curve(isolated, sources)
    normalized = curve.normalized()

    with _open_csv(args.out) as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["t", "count", "normalized"])
        for t, count in enumerate(curve.counts):
            writer.writerow([t, count.item(), repr(float(normalized[t]))])

    print(f"isolated {len(targets)}")
    peak_t, peak_count = curve_peak(curve)
    print(f"peak_t {peak_t}")
    print(f"peak_count {peak_count}")
    try:
        gamma = fit_gamma(curve)
        print(f"gamma_shape {gamma.shape!r}")
        print(f"gamma_scale {gamma.scale!r}")
    except DegenerateSampleError as e:
        print("gamma undefined")
        logger.warning(str(e))

    if args.capacity is not None:
        report = capacity_exceedance(curve, args.capacity)
        first = report.first_step_above if report.first_step_above is not None else "-"
        print(f"capacity {args.capacity!r} steps_above {report.steps_above} "
              f"first_step_above {first} peak_excess {report.peak_excess!r}")
    return 0


def cmd_isolate(args, config: Config) -> int:
    g = read_edge_list(args.input)
    if args.nodes is not None:
        targets = tuple(sorted(set(_parse_ids(args.nodes))))
    else:
        targets = _isolation_targets(g, args.top, args.by, config.solver)
    write_edge_list(isolate_nodes(g, targets), args.out)
    print(" ".join(str(v) for v in targets))
    return 0


def cmd_experiment(args, config: Config) -> int:
    exp_config = load_experiment_config(args.experiment_config) if args.experiment_config else config.experiment
    workers = args.workers or config.system.workers

    result = run_experiment(exp_config, config.solver, workers)

    out_dir = Path(args.out_dir)
    written = export(result, "csv", out_dir)
    written += export(result, "json", out_dir / "result.json")
    for path in written:
        logger.info(f"wrote {path}")

    print(peak_table(result).format())
    if exp_config.measures:
        print()
        print(reduction_table(result).format(precision=3))
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "gcc": cmd_gcc,
    "centrality": cmd_centrality,
    "curve": cmd_curve,
    "isolate": cmd_isolate,
    "experiment": cmd_experiment,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="flatcurve",
        description="Epidemic curves on scale-free networks and targeted isolation",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python main.py generate --model hk --n 50 --m 2 --pt 0.5 --seed 7 --out g.txt
  python main.py centrality --in g.txt --measure all --out scores.csv
  python main.py curve --in g.txt --isolate-top 0.06 --by degree --out curve.csv
  python main.py experiment --config config/experiment.json --out-dir results
        """
    )
    parser.add_argument('--config', dest='system_config', type=str, help='Path to system configuration YAML')
    parser.add_argument('--debug', action='store_true', help='Enable debug logging')

    sub = parser.add_subparsers(dest='command', metavar='COMMAND', parser_class=_Parser)
    sub.required = True

    p = sub.add_parser('generate', help='生成 BA / Holme-Kim 网络')
    p.add_argument('--model', choices=MODELS, required=True)
    p.add_argument('--n', type=int, required=True)
    p.add_argument('--m', type=int, default=2)
    p.add_argument('--pt', type=float, default=0.0, help='三元闭包概率 (仅 hk)')
    p.add_argument('--seed', type=int, default=0)
    p.add_argument('--out', required=True)

    p = sub.add_parser('gcc', help='全局聚类系数')
    p.add_argument('--in', dest='input', required=True)

    p = sub.add_parser('centrality', help='节点中心性')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--measure', required=True, help=f"one of {[m.value for m in Measure]} or 'all'")
    p.add_argument('--out', required=True)

    p = sub.add_parser('curve', help='聚合感染曲线')
    p.add_argument('--in', dest='input', required=True)
    p.add_argument('--sources', default='all', help="'all' 或逗号分隔的节点编号")
    p.add_argument('--isolate-top', type=float, default=0.0)
    p.add_argument('--by', default=Measure.DEGREE.value)
    p.add_argument('--capacity', type=float)
    p.add_argument('--out', required=True)

    p = sub.add_parser('isolate', help='隔离节点并写出新图')
    p.add_argument('--in', dest='input', required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument('--top', type=float)
    group.add_argument('--nodes')
    p.add_argument('--by', default=Measure.DEGREE.value)
    p.add_argument('--out', required=True)

    p = sub.add_parser('experiment', help='蒙特卡洛实验')
    p.add_argument('--config', dest='experiment_config', help='实验配置 JSON')
    p.add_argument('--out-dir', required=True)
    p.add_argument('--workers', type=int)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """主函数"""
    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.debug else "INFO")

    try:
        if args.system_config and not Path(args.system_config).exists():
            raise ExportError(f"config file not found: {args.system_config}")
        config = load_config(args.system_config)
        setup_logging("DEBUG" if args.debug else config.system.log_level, config.system.log_path)
        return COMMANDS[args.command](args, config)

    except FlatCurveError as e:
        if args.debug:
            logger.exception(e)
        print(f"flatcurve {args.command}: {e}", file=sys.stderr)
        return e.exit_code

    except ValueError as e:
        print(f"flatcurve: {e}", file=sys.stderr)
        return USAGE_EXIT

    except KeyboardInterrupt:
        print("\nInterrupted", file=sys.stderr)
        return 130
