"""Efficiency metrics and single-run experiments.

Efficiency compares what a species ate in a tick against what randomly
walking agents would be expected to eat given food density: eaten count
divided by (population x food density), with densities measured at the start
of the tick (after regrowth, before anyone moves).  A value of 1 means
"doing as well as chance"; the ratio is undefined (and excluded from means)
on ticks where the denominator is zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .cognition import CognitionParams
from .engine import Species, TickReport, WorldState
from .model import ModelParams, init_world
from .simulate import RANDOM, Policy, RolloutPolicy, step_tick


def sheep_efficiency(report: TickReport, world: WorldState) -> float | None:
    """grass eaten / (sheep count x grass density); None when undefined."""
    total = world.width * world.height
    density = report.start_grass / total
    if report.start_sheep == 0 or density == 0.0:
        return None
    return report.grass_eaten / (report.start_sheep * density)


def wolf_efficiency(report: TickReport, world: WorldState) -> float | None:
    """sheep eaten / (wolf count x sheep density); None when undefined."""
    total = world.width * world.height
    if report.start_wolves == 0 or report.start_sheep == 0:
        return None
    density = report.start_sheep / total
    return report.sheep_eaten / (report.start_wolves * density)


@dataclass(frozen=True)
class ExperimentConfig:
    """One run: the model, an optional planner per species, and a duration."""

    model: ModelParams = ModelParams()
    sheep_cognition: CognitionParams | None = None
    wolf_cognition: CognitionParams | None = None
    ticks: int = 2000
    warmup: int = 500

    def __post_init__(self):
        if self.ticks < 0:
            raise ValueError(f"ticks must be >= 0, got {self.ticks}")
        if self.warmup < 0 or (self.ticks > 0 and self.warmup > self.ticks):
            raise ValueError(f"warmup must be in [0, ticks], got {self.warmup}")

    def policies(self) -> dict[Species, Policy]:
        return {
            Species.SHEEP: RolloutPolicy(self.sheep_cognition) if self.sheep_cognition else RANDOM,
            Species.WOLF: RolloutPolicy(self.wolf_cognition) if self.wolf_cognition else RANDOM,
        }


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


@dataclass
class RunSummary:
    seed: int
    ticks_run: int
    mean_sheep_eff: float | None
    mean_wolf_eff: float | None
    sheep_eff_excluded: int
    wolf_eff_excluded: int
    mean_sheep_pop: float | None
    mean_wolf_pop: float | None
    final_sheep: int
    final_wolves: int
    final_grass: int
    extinction_tick: int | None
    extinct_species: str | None


@dataclass
class RunResult:
    config: ExperimentConfig
    seed: int
    initial: TickReport
    reports: list[TickReport] = field(default_factory=list)
    sheep_eff: list[float | None] = field(default_factory=list)
    wolf_eff: list[float | None] = field(default_factory=list)

    def summary(self) -> RunSummary:
        warm = [r for r in self.reports if r.tick >= self.config.warmup]
        if not warm:
            warm = self.reports
        sheep_eff = [v for v in self.sheep_eff if v is not None]
        wolf_eff = [v for v in self.wolf_eff if v is not None]
        extinction_tick = None
        extinct_species = None
        if self.reports:
            last = self.reports[-1]
            if last.sheep_count == 0 or last.wolf_count == 0:
                extinction_tick = last.tick
                if last.sheep_count == 0 and last.wolf_count == 0:
                    extinct_species = "both"
                else:
                    extinct_species = "sheep" if last.sheep_count == 0 else "wolves"
            final = last
        else:
            final = self.initial
        return RunSummary(
            seed=self.seed,
            ticks_run=len(self.reports),
            mean_sheep_eff=_mean(sheep_eff),
            mean_wolf_eff=_mean(wolf_eff),
            sheep_eff_excluded=len(self.sheep_eff) - len(sheep_eff),
            wolf_eff_excluded=len(self.wolf_eff) - len(wolf_eff),
            mean_sheep_pop=_mean([float(r.sheep_count) for r in warm]) if warm else None,
            mean_wolf_pop=_mean([float(r.wolf_count) for r in warm]) if warm else None,
            final_sheep=final.sheep_count,
            final_wolves=final.wolf_count,
            final_grass=final.grass_count,
            extinction_tick=extinction_tick,
            extinct_species=extinct_species,
        )


def initial_report(world: WorldState) -> TickReport:
    report = TickReport(tick=0)
    report.sheep_count = report.start_sheep = world.count(Species.SHEEP)
    report.wolf_count = report.start_wolves = world.count(Species.WOLF)
    report.grass_count = report.start_grass = world.grass_count()
    return report


def run_experiment(config: ExperimentConfig, seed: int, threads: int = 1,
                   use_kernel: bool = True) -> RunResult:
    """Simulate one seeded run; stops early if either species dies out."""
    world = init_world(config.model, seed)
    result = RunResult(config=config, seed=seed, initial=initial_report(world))
    policies = config.policies()
    for _ in range(config.ticks):
        report = step_tick(world, config.model, policies, seed,
                           threads=threads, use_kernel=use_kernel)
        result.reports.append(report)
        result.sheep_eff.append(sheep_efficiency(report, world))
        result.wolf_eff.append(wolf_efficiency(report, world))
        if report.sheep_count == 0 or report.wolf_count == 0:
            break
    return result
