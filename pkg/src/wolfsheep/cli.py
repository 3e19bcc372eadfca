"""Command-line interface.

Subcommands: `run` (single seeded run), `sweep` (rollout grid experiment),
`explain` (dump one agent's planning trace), `version`.  Exit codes: 0 on
success, 1 on runtime failure, 2 on usage or configuration errors.  All
randomness flows from the config's seed; the output directory comes from
--out, else $WOLFSHEEP_OUTDIR, else the config file.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .cognition import explain as explain_decision
from .cognition import observe
from .config import ConfigError, load_run_config, load_sweep_config, schema_help
from .engine import Species
from .metrics import run_experiment
from .model import init_world
from .output import write_summary_json, write_tick_csv
from .simulate import step_tick
from .sweep import run_sweep
from .trace import Trace, write_trace

ENV_OUTDIR = "WOLFSHEEP_OUTDIR"


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wolfsheep",
        description="Deterministic wolf-sheep-grass simulator with rollout-planning agents.",
        epilog=schema_help(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("config", type=Path, help="config file path")
        p.add_argument("--out", type=Path, default=None,
                       help=f"output directory (overrides ${ENV_OUTDIR} and the config)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker parallelism (never affects results)")
        p.add_argument("--set", dest="overrides", action="append", default=[],
                       metavar="SECTION.KEY=VALUE", help="override any config key")

    p_run = sub.add_parser("run", help="run one seeded simulation and write CSV output")
    add_common(p_run)
    p_run.add_argument("--seed", type=int, default=None, help="override [run] seed")
    p_run.add_argument("--ticks", type=int, default=None, help="override [run] ticks")

    p_sweep = sub.add_parser("sweep", help="run a rollout-count x length sweep grid")
    add_common(p_sweep)

    p_explain = sub.add_parser("explain", help="write one agent's planning trace as JSON")
    add_common(p_explain)
    p_explain.add_argument("--seed", type=int, default=None, help="override [run] seed")
    p_explain.add_argument("--agent", type=int, default=None, help="agent id to trace")
    p_explain.add_argument("--tick", type=int, default=None, help="tick of the decision")
    p_explain.add_argument("--trace-file", type=Path, default=None,
                           help="trace output path (default: <out>/trace_a<ID>_t<TICK>.json)")

    sub.add_parser("version", help="print the version and exit")
    return parser


def _out_dir(args, config_out: str) -> Path:
    if args.out is not None:
        return Path(args.out)
    env = os.environ.get(ENV_OUTDIR)
    if env:
        return Path(env)
    return Path(config_out)


def _threads(args, config_threads: int) -> int:
    n = args.threads if args.threads is not None else config_threads
    if n <= 0:
        n = os.cpu_count() or 1
    return n


def _cmd_run(args) -> int:
    cfg = load_run_config(args.config, args.overrides)
    seed = cfg.seed if args.seed is None else args.seed
    experiment = cfg.experiment
    if args.ticks is not None:
        from dataclasses import replace
        experiment = replace(experiment, ticks=args.ticks,
                             warmup=min(experiment.warmup, args.ticks))
    out = _out_dir(args, cfg.out)
    result = run_experiment(experiment, seed, threads=_threads(args, cfg.threads))
    write_tick_csv(out / "ticks.csv", result)
    write_summary_json(out / "summary.json", result)
    s = result.summary()

    def fmt(v):
        return "n/a" if v is None else f"{v:.4f}"

    print(f"run seed={seed} ticks={s.ticks_run} sheep_eff={fmt(s.mean_sheep_eff)} "
          f"wolf_eff={fmt(s.mean_wolf_eff)} sheep_pop={fmt(s.mean_sheep_pop)} "
          f"wolf_pop={fmt(s.mean_wolf_pop)}"
          + (f" EXTINCT({s.extinct_species}@{s.extinction_tick})" if s.extinction_tick else ""))
    print(f"wrote {out / 'ticks.csv'} and {out / 'summary.json'}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_sweep_config(args.config, args.overrides)
    out = _out_dir(args, cfg.out)
    result = run_sweep(cfg.spec, out_dir=out, workers=_threads(args, cfg.threads),
                       progress=lambda msg: print(msg, file=sys.stderr))
    failures = sum(1 for o in result.outcomes if o.error)
    print(f"sweep complete: {len(result.outcomes) - failures}/{len(result.outcomes)} runs ok, "
          f"aggregate at {out / 'aggregate.csv'}")
    if failures == len(result.outcomes):
        print("error: every run failed", file=sys.stderr)
        return 1
    return 0


def _cmd_explain(args) -> int:
    cfg = load_run_config(args.config, args.overrides)
    seed = cfg.seed if args.seed is None else args.seed
    agent_id = cfg.explain_agent if args.agent is None else args.agent
    tick = cfg.explain_tick if args.tick is None else args.tick
    if agent_id is None or tick is None:
        raise ConfigError("explain needs an agent id and tick "
                          "(--agent/--tick or the [explain] section)")
    if tick < 1:
        raise ConfigError(f"explain tick must be >= 1, got {tick}")
    experiment = cfg.experiment
    world = init_world(experiment.model, seed)
    policies = experiment.policies()
    threads = _threads(args, cfg.threads)
    for _ in range(tick - 1):
        step_tick(world, experiment.model, policies, seed, threads=threads)

    agent = world.agents_by_id.get(agent_id)
    if agent is None or not agent.alive:
        print(f"error: agent {agent_id} is dead or absent at tick {tick} under seed {seed}",
              file=sys.stderr)
        return 1
    cog = (experiment.sheep_cognition if agent.species == Species.SHEEP
           else experiment.wolf_cognition)
    if cog is None:
        species = "sheep" if agent.species == Species.SHEEP else "wolves"
        raise ConfigError(f"agent {agent_id} belongs to species '{species}' which has no "
                          f"planner; set [{species}.cognition] enabled = true to trace it")

    snapshot = observe(world, agent, cog.vision_radius)
    decision = explain_decision(snapshot, experiment.model, cog, seed)
    out = _out_dir(args, cfg.out)
    path = args.trace_file or out / f"trace_a{agent_id}_t{tick}.json"
    write_trace(path, Trace(seed=seed, snapshot=snapshot, params=cog, decision=decision))
    print(f"agent {agent_id} tick {tick}: chose {decision.chosen.name.lower()} "
          f"over {decision.counts} rollouts; trace at {path}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
        if args.command == "explain":
            return _cmd_explain(args)
        if args.command == "version":
            print(f"wolfsheep {__version__}")
            return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # runtime failure
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
