"""Command-line interface.

Subcommands:
  run          one algorithm on one stream, JSON result + optional plot CSV
  compare      several algorithms on a shared stream, table + JSON report
  graph        dump the feedback graph as an edge-list text file
  bench-regret terminal-regret slopes on realizable synthetic streams

Config files are flat INI key=value files ([experiment] section); any key
can be overridden by the command-line flag of the same name.
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

from . import harness, kernels

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def read_config_file(path: str) -> dict[str, str]:
    parser = configparser.ConfigParser(interpolation=None)
    with open(path) as fh:
        parser.read_file(fh)
    if "experiment" in parser:
        return dict(parser["experiment"])
    return dict(parser.defaults())


_INT_KEYS = {"repeats", "base_seed", "horizon", "shuffle_seed", "num_kernels",
             "num_rf", "out_degree", "beta_rank", "exploit_after",
             "synthetic_kernel_index", "synthetic_dim"}
_FLOAT_KEYS = {"lam", "eta", "xi", "synthetic_noise"}


def build_experiment_config(file_values: dict[str, str],
                            args: argparse.Namespace) -> harness.ExperimentConfig:
    values: dict = {}
    for key, raw in file_values.items():
        if key in _INT_KEYS:
            values[key] = int(raw)
        elif key in _FLOAT_KEYS:
            values[key] = float(raw)
        else:
            values[key] = raw
    for key in ("algorithm", "dataset", "manifest", "repeats", "base_seed",
                "horizon", "eta", "xi", "num_rf", "out_degree", "lam",
                "beta_rank", "exploit_after", "out"):
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            values[key] = flag
    # -1 disables the late-stream exploitation switch
    if values.get("exploit_after") == -1:
        values["exploit_after"] = None
    if "algorithm" not in values:
        raise harness.ConfigError("no algorithm given (flag or config file)")
    try:
        return harness.ExperimentConfig(**values)
    except TypeError as exc:
        raise harness.ConfigError(str(exc)) from exc


def _add_run_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="INI config file")
    parser.add_argument("--algorithm", choices=harness.ALGORITHMS)
    parser.add_argument("--dataset")
    parser.add_argument("--manifest")
    parser.add_argument("--seed", dest="base_seed", type=int)
    parser.add_argument("--repeats", type=int)
    parser.add_argument("--horizon", type=int)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--xi", type=float)
    parser.add_argument("--num-rf", dest="num_rf", type=int)
    parser.add_argument("--out-degree", dest="out_degree", type=int)
    parser.add_argument("--lam", type=float)
    parser.add_argument("--beta-rank", dest="beta_rank", type=int)
    parser.add_argument("--exploit-after", dest="exploit_after", type=int)
    parser.add_argument("--out")
    parser.add_argument("--plot-csv", dest="plot_csv")


def cmd_run(args: argparse.Namespace) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    config = build_experiment_config(file_values, args)
    result = harness.run_experiment(config)
    print(f"algorithm={config.algorithm} final_mse={result.final_mse:.6g} "
          f"online_s={result.online_seconds:.3f} offline_s={result.offline_seconds:.3f}")
    if args.plot_csv:
        harness.emit_plot_data(result, args.plot_csv)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    file_values = read_config_file(args.config) if args.config else {}
    algorithms = (args.algorithms.split(",") if args.algorithms
                  else ["sfg-mkl", "sfg-mkl-r", "full-dictionary"])
    configs = []
    for algo in algorithms:
        ns = argparse.Namespace(**{**vars(args), "algorithm": algo, "out": None})
        configs.append(build_experiment_config(dict(file_values), ns))
    report = harness.compare(configs)
    print(harness.format_comparison(report))
    if args.out:
        payload = {"rows": report["rows"], "speed_ratios": report["speed_ratios"]}
        Path(args.out).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return EXIT_OK


def cmd_graph(args: argparse.Namespace) -> int:
    specs = kernels.default_dictionary(args.num_kernels)
    harness.dump_graph(specs, args.m, args.dim, args.out)
    print(f"wrote feedback graph (N={args.num_kernels}, M={args.m}) to {args.out}")
    return EXIT_OK


def cmd_bench_regret(args: argparse.Namespace) -> int:
    horizons = [int(h) for h in args.horizons.split(",")]
    seeds = list(range(args.seed, args.seed + args.seeds))
    for algorithm in ("sfg-mkl", "sfg-mkl-r"):
        slope = harness.regret_slope(
            algorithm, horizons, seeds, kernel_index=args.kernel_index,
            num_kernels=args.num_kernels, num_rf=args.num_rf,
            out_degree=args.out_degree, noise=args.noise)
        print(f"{algorithm}: regret slope {slope:.3f} "
              f"(horizons={horizons}, seeds={len(seeds)})")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphmkl",
        description="Streaming multi-kernel regression benchmarks")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one algorithm")
    _add_run_flags(run_p)
    run_p.set_defaults(func=cmd_run)

    cmp_p = sub.add_parser("compare", help="compare algorithms on one stream")
    _add_run_flags(cmp_p)
    cmp_p.add_argument("--algorithms", help="comma-separated list")
    cmp_p.set_defaults(func=cmd_compare)

    graph_p = sub.add_parser("graph", help="dump the feedback graph")
    graph_p.add_argument("--m", type=int, default=5)
    graph_p.add_argument("--dim", type=int, default=5)
    graph_p.add_argument("--num-kernels", dest="num_kernels", type=int, default=41)
    graph_p.add_argument("--out", required=True)
    graph_p.set_defaults(func=cmd_graph)

    bench_p = sub.add_parser("bench-regret", help="regret slope benchmark")
    bench_p.add_argument("--kernel-index", dest="kernel_index", type=int, default=21)
    bench_p.add_argument("--horizons", default="1000,2000,4000,8000")
    bench_p.add_argument("--seeds", type=int, default=10)
    bench_p.add_argument("--seed", type=int, default=0)
    bench_p.add_argument("--num-kernels", dest="num_kernels", type=int, default=41)
    bench_p.add_argument("--num-rf", dest="num_rf", type=int, default=50)
    bench_p.add_argument("--out-degree", dest="out_degree", type=int, default=5)
    bench_p.add_argument("--noise", type=float, default=0.01)
    bench_p.set_defaults(func=cmd_bench_regret)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (harness.ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
