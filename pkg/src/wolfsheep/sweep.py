"""Experiment sweeps over rollout counts and lengths.

A sweep runs one species with planning at every (n_rollouts, rollout_length)
grid cell while the other species stays on the random walk, repeated over
seeds: run seed = base_seed XOR flat run index.  Runs are independent and may
execute on a process pool; results are aggregated in a fixed order so output
files do not depend on worker count.  Failed runs are recorded and skipped by
aggregation rather than aborting the sweep.
"""

from __future__ import annotations

import math
import sys
import traceback
from dataclasses import dataclass, replace
from multiprocessing import get_context
from pathlib import Path
from typing import Callable

from .cognition import CognitionParams
from .engine import Species
from .metrics import ExperimentConfig, RunSummary, run_experiment
from .model import ModelParams
from .output import write_summary_json, write_tick_csv


@dataclass(frozen=True)
class SweepSpec:
    species: Species
    n_rollouts_values: tuple[int, ...]
    rollout_lengths: tuple[int, ...]
    repetitions: int
    ticks: int = 2000
    warmup: int = 500
    base_seed: int = 0
    model: ModelParams = ModelParams()
    vision_radius: float = 5.0
    discount: float = 0.9
    death_reward: float = -1000.0

    def __post_init__(self):
        if self.repetitions < 1:
            raise ValueError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.ticks < self.warmup:
            raise ValueError(f"ticks ({self.ticks}) must be >= warmup ({self.warmup})")
        if not self.n_rollouts_values or not self.rollout_lengths:
            raise ValueError("sweep grid must be non-empty")
        if any(n < 1 for n in self.n_rollouts_values):
            raise ValueError("all n_rollouts values must be >= 1")
        if any(l < 0 for l in self.rollout_lengths):
            raise ValueError("all rollout lengths must be >= 0")

    def cells(self) -> list[tuple[int, int]]:
        return [(n, l) for n in self.n_rollouts_values for l in self.rollout_lengths]

    def run_plan(self) -> list["RunPlan"]:
        plans = []
        index = 0
        for (n, l) in self.cells():
            for rep in range(self.repetitions):
                plans.append(RunPlan(index, n, l, rep, self.base_seed ^ index))
                index += 1
        return plans

    def config_for(self, n_rollouts: int, length: int) -> ExperimentConfig:
        cog = CognitionParams(n_rollouts, length, self.vision_radius,
                              self.discount, self.death_reward)
        return ExperimentConfig(
            model=self.model,
            sheep_cognition=cog if self.species == Species.SHEEP else None,
            wolf_cognition=cog if self.species == Species.WOLF else None,
            ticks=self.ticks,
            warmup=self.warmup,
        )


@dataclass(frozen=True)
class RunPlan:
    index: int
    n_rollouts: int
    rollout_length: int
    rep: int
    seed: int

    @property
    def dirname(self) -> str:
        return f"r{self.n_rollouts}_l{self.rollout_length}_rep{self.rep}"


@dataclass
class RunOutcome:
    plan: RunPlan
    summary: RunSummary | None
    error: str | None = None


@dataclass
class CellAggregate:
    species: str
    n_rollouts: int
    rollout_length: int
    reps: int
    mean_eff: float | None
    eff_ci95: float | None
    mean_sheep_pop: float | None
    sheep_pop_ci95: float | None
    mean_wolf_pop: float | None
    wolf_pop_ci95: float | None
    extinctions: int


@dataclass
class SweepResult:
    spec: SweepSpec
    outcomes: list[RunOutcome]
    aggregates: list[CellAggregate]


def mean_ci95(values: list[float]) -> tuple[float | None, float | None]:
    """Sample mean and 1.96 * standard error; CI is 0 for a single value."""
    if not values:
        return None, None
    n = len(values)
    mean = sum(values) / n
    if n == 1:
        return mean, 0.0
    var = sum((v - mean) ** 2 for v in values) / (n - 1)
    return mean, 1.96 * math.sqrt(var / n)


def _execute_plan(spec: SweepSpec, plan: RunPlan, out_dir: str | None) -> RunOutcome:
    try:
        config = spec.config_for(plan.n_rollouts, plan.rollout_length)
        result = run_experiment(config, plan.seed)
        if out_dir is not None:
            run_dir = Path(out_dir) / plan.dirname
            write_tick_csv(run_dir / "ticks.csv", result)
            write_summary_json(run_dir / "summary.json", result)
        return RunOutcome(plan, result.summary())
    except Exception:
        return RunOutcome(plan, None, error=traceback.format_exc())


def aggregate(spec: SweepSpec, outcomes: list[RunOutcome]) -> list[CellAggregate]:
    by_cell: dict[tuple[int, int], list[RunOutcome]] = {}
    for outcome in outcomes:
        by_cell.setdefault((outcome.plan.n_rollouts, outcome.plan.rollout_length),
                           []).append(outcome)
    species_name = "sheep" if spec.species == Species.SHEEP else "wolves"
    rows = []
    for (n, l) in spec.cells():
        group = [o.summary for o in by_cell.get((n, l), []) if o.summary is not None]
        if spec.species == Species.SHEEP:
            effs = [s.mean_sheep_eff for s in group if s.mean_sheep_eff is not None]
        else:
            effs = [s.mean_wolf_eff for s in group if s.mean_wolf_eff is not None]
        sheep_pops = [s.mean_sheep_pop for s in group if s.mean_sheep_pop is not None]
        wolf_pops = [s.mean_wolf_pop for s in group if s.mean_wolf_pop is not None]
        mean_eff, eff_ci = mean_ci95(effs)
        mean_sp, sp_ci = mean_ci95(sheep_pops)
        mean_wp, wp_ci = mean_ci95(wolf_pops)
        rows.append(CellAggregate(
            species=species_name,
            n_rollouts=n,
            rollout_length=l,
            reps=len(group),
            mean_eff=mean_eff,
            eff_ci95=eff_ci,
            mean_sheep_pop=mean_sp,
            sheep_pop_ci95=sp_ci,
            mean_wolf_pop=mean_wp,
            wolf_pop_ci95=wp_ci,
            extinctions=sum(1 for s in group if s.extinction_tick is not None),
        ))
    return rows


def run_sweep(spec: SweepSpec, out_dir: Path | str | None = None,
              workers: int = 1,
              progress: Callable[[str], None] | None = None) -> SweepResult:
    """Execute every grid cell x repetition; optionally persist all files."""
    plans = spec.run_plan()
    out_str = str(out_dir) if out_dir is not None else None
    outcomes: list[RunOutcome] = []

    if workers <= 1 or len(plans) == 1:
        for plan in plans:
            outcomes.append(_execute_plan(spec, plan, out_str))
            _report_progress(progress, outcomes[-1], len(plans))
    else:
        ctx = get_context("fork")
        with ctx.Pool(processes=min(workers, len(plans))) as pool:
            pending = [
                pool.apply_async(_execute_plan, (spec, plan, out_str))
                for plan in plans
            ]
            for item in pending:
                outcomes.append(item.get())
                _report_progress(progress, outcomes[-1], len(plans))

    outcomes.sort(key=lambda o: o.plan.index)
    aggregates = aggregate(spec, outcomes)
    if out_dir is not None:
        from .output import write_aggregate_csv

        write_aggregate_csv(Path(out_dir) / "aggregate.csv", aggregates)
    return SweepResult(spec, outcomes, aggregates)


def _report_progress(progress, outcome: RunOutcome, total: int) -> None:
    if progress is None:
        return
    plan = outcome.plan
    status = "failed" if outcome.error else "done"
    progress(f"[{plan.index + 1}/{total}] {plan.dirname} seed={plan.seed} {status}")
    if outcome.error:
        print(outcome.error, file=sys.stderr)
