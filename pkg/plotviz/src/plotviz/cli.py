"""Standalone plotting scripts; exit 2 on bad input files."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .aggregate import SchemaError
from .plots import plot_efficiency, plot_population, plot_rollout_tree
from .traces import TraceError


def _run(build, *args) -> int:
    try:
        out = build(*args)
    except (SchemaError, TraceError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(f"wrote {out}")
    return 0


def efficiency_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Efficiency vs rollout count, one line per rollout length.")
    parser.add_argument("aggregate_csv", type=Path)
    parser.add_argument("out_png", type=Path)
    parser.add_argument("--species", choices=("sheep", "wolves"), required=True)
    args = parser.parse_args(argv)
    return _run(plot_efficiency, args.aggregate_csv, args.out_png, args.species)


def population_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Mean sheep population vs rollout count of the planning species.")
    parser.add_argument("aggregate_csv", type=Path)
    parser.add_argument("out_png", type=Path)
    parser.add_argument("--species", choices=("sheep", "wolves"), default=None,
                        help="required when the file mixes species")
    args = parser.parse_args(argv)
    return _run(plot_population, args.aggregate_csv, args.out_png, args.species)


def rollout_tree_main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        description="Grid of rollout snapshots, one column per rollout.")
    parser.add_argument("trace_json", type=Path)
    parser.add_argument("out_png", type=Path)
    args = parser.parse_args(argv)
    return _run(plot_rollout_tree, args.trace_json, args.out_png)


if __name__ == "__main__":
    sys.exit(efficiency_main())
