"""``kcollapse`` command line entry point.

Exit codes: 0 success, 1 validation error, 2 I/O or parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .attack import METHODS, AttackError
from .cores import core_numbers
from .graph import GraphError, ParseError, ParseOptions, load_edge_list
from .harness import (ConfigError, ExperimentConfig, TargetSpec, cores_csv, emit_report,
                      layers_csv, run_experiment, stats_dict, summarize)
from .onion import EmptyLayeringError, TargetError, mod_layers


def _parse_k(text: str):
    if text == "kmax":
        return text
    try:
        return int(text)
    except ValueError:
        raise argparse.ArgumentTypeError("k must be 'kmax' or an integer") from None


def _parse_methods(text: str) -> tuple[str, ...]:
    methods = tuple(m.strip() for m in text.split(",") if m.strip())
    for m in methods:
        if m not in METHODS:
            raise argparse.ArgumentTypeError(f"unknown method {m!r}")
    return methods


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kcollapse", description="Targeted k-node collapse attacks.")
    sub = p.add_subparsers(dest="command", required=True)

    def dataset_args(sp):
        sp.add_argument("--dataset", required=True, help="edge-list file")
        sp.add_argument("--delimiter", default=None, help="column separator (default: whitespace)")
        sp.add_argument("--skip-header", action="store_true", help="ignore the first data line")

    st = sub.add_parser("stats", help="dataset statistics")
    dataset_args(st)
    st.add_argument("--cores-csv", type=Path, help="write node_label,core_number")
    st.add_argument("--layers-csv", type=Path, help="write node_label,layer for --k")
    st.add_argument("--k", type=_parse_k, default="kmax")

    at = sub.add_parser("attack", help="run one or more attacks")
    dataset_args(at)
    at.add_argument("--k", type=_parse_k, default="kmax")
    at.add_argument("--targets", default="top:1", help="top:<b> | ids:<l1,l2,...> | all")
    at.add_argument("--method", type=_parse_methods, default=("mona",),
                    help="comma-separated: " + ",".join(METHODS))
    at.add_argument("--budget", type=int, default=None)
    at.add_argument("--trials", type=int, default=1)
    at.add_argument("--seed", type=int, default=0)
    at.add_argument("--max-size", type=int, default=3)
    at.add_argument("--freeze-p", action="store_true",
                    help="random: draw from the input graph's P instead of recomputing it")
    at.add_argument("--format", choices=("json", "csv"), default="json")
    at.add_argument("--timing", action="store_true", help="include wall times (not byte-stable)")
    at.add_argument("--out", type=Path, help="output file (default: stdout)")
    return p


def _write(data: bytes, out: Path | None) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.flush()
    else:
        out.write_bytes(data)


def _stats(args) -> None:
    opts = ParseOptions(delimiter=args.delimiter, skip_header=args.skip_header)
    g = load_edge_list(args.dataset, opts)
    info = core_numbers(g)
    _write((json.dumps(stats_dict(g, info), indent=2) + "\n").encode(), None)
    if args.cores_csv:
        args.cores_csv.write_bytes(cores_csv(g, info))
    if args.layers_csv:
        k = info.k_max if args.k == "kmax" else args.k
        args.layers_csv.write_bytes(layers_csv(g, mod_layers(g, k, info)))


def _attack(args) -> None:
    cfg = ExperimentConfig(
        dataset=args.dataset, k=args.k, targets=TargetSpec.parse(args.targets),
        methods=args.method, budget=args.budget, trials=args.trials, seed=args.seed,
        max_size=args.max_size, freeze_p=args.freeze_p,
        parse=ParseOptions(delimiter=args.delimiter, skip_header=args.skip_header))
    report = run_experiment(cfg)
    _write(emit_report(report, args.format, timing=args.timing), args.out)
    if args.out is not None:
        for line in summarize(report):
            print(line, file=sys.stderr)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "stats":
            _stats(args)
        else:
            _attack(args)
    except (ParseError, OSError) as exc:
        print(f"kcollapse: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, TargetError, AttackError, EmptyLayeringError, GraphError,
            ValueError) as exc:
        print(f"kcollapse: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
