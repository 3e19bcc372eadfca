"""Per-tick wiring of policies, planning, and execution.

Each species runs under a policy: the base random walk, or rollout planning
with its own cognition parameters.  Planning happens in phase 1 against the
pre-tick world (rollout agents through the compiled batch planner by default,
or the reference path when `use_kernel` is off); execution, reproduction, and
death run in phase 2.

Per-agent main-model randomness comes from the (seed, BEHAVIOR, agent, tick)
stream: draw 0 is the walk turn for random-policy agents (planner agents skip
it), then one draw for the reproduction check and, if it fires, one for the
child's heading.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import fastcog
from .cognition import CognitionParams, decide, observe
from .engine import (
    Agent,
    Species,
    TickReport,
    WorldState,
    move_forward,
    norm360,
    two_phase_tick,
)
from .model import (
    Action,
    ModelParams,
    eat_attempt,
    maybe_reproduce,
    regrow_grass,
)
from .rng import PURPOSE_BEHAVIOR, Stream


@dataclass(frozen=True)
class RandomPolicy:
    pass


@dataclass(frozen=True)
class RolloutPolicy:
    params: CognitionParams


Policy = RandomPolicy | RolloutPolicy

RANDOM = RandomPolicy()


def _exec_turn(world: WorldState, agent: Agent, turn: float, params: ModelParams) -> bool:
    agent.heading = norm360(agent.heading + turn)
    move_forward(world, agent, 1.0)
    agent.energy -= params.move_cost
    return eat_attempt(world, agent, params)


def step_tick(world: WorldState, params: ModelParams,
              policies: dict[Species, Policy], seed: int,
              threads: int = 1, use_kernel: bool = True,
              event_log: list | None = None) -> TickReport:
    """Advance the world by one tick under the given per-species policies."""
    t = world.tick + 1
    cog_by_species = {
        sp: pol.params for sp, pol in policies.items()
        if isinstance(pol, RolloutPolicy)
    }

    def begin(world: WorldState, report: TickReport) -> None:
        report.grass_regrown = regrow_grass(world)

    def plan_all(world: WorldState, roster: list[Agent]) -> list[object]:
        actions: list[object] = [None] * len(roster)
        if cog_by_species:
            if use_kernel:
                live, arrays = fastcog.roster_arrays(world)
                deciders = np.fromiter(
                    (i for i, a in enumerate(roster) if a.species in cog_by_species),
                    np.int64,
                )
                chosen, _, _ = fastcog.decide_batch(
                    world, arrays, deciders, params, cog_by_species, seed, t, threads)
                for k, i in enumerate(deciders):
                    actions[i] = Action(int(chosen[k]))
            else:
                for i, a in enumerate(roster):
                    cp = cog_by_species.get(a.species)
                    if cp is not None:
                        snap = observe(world, a, cp.vision_radius)
                        actions[i] = decide(snap, params, cp, seed).chosen
        for i, a in enumerate(roster):
            if actions[i] is None:
                actions[i] = Stream(seed, PURPOSE_BEHAVIOR, a.id, t).uniform(-45.0, 45.0)
        return actions

    def execute(world: WorldState, agent: Agent, action: object, report: TickReport) -> None:
        energy_before = agent.energy
        stream = Stream(seed, PURPOSE_BEHAVIOR, agent.id, t)
        if isinstance(action, Action):
            ate = _exec_turn(world, agent, action.turn_degrees, params)
        else:
            stream.counter = 1  # the walk turn was drawn in phase 1
            ate = _exec_turn(world, agent, action, params)
        if ate:
            if agent.species == Species.SHEEP:
                report.grass_eaten += 1
            else:
                report.sheep_eaten += 1

        if agent.energy <= 0.0:
            world.remove(agent)
            if agent.species == Species.SHEEP:
                report.sheep_starved += 1
            else:
                report.wolf_starved += 1
            if event_log is not None:
                event_log.append((t, agent.id, energy_before, agent.energy, ate, False))
            return

        child = maybe_reproduce(world, agent, params, stream)
        if child is not None:
            if agent.species == Species.SHEEP:
                report.sheep_born += 1
            else:
                report.wolf_born += 1
        if event_log is not None:
            event_log.append((t, agent.id, energy_before, agent.energy, ate, child is not None))

    return two_phase_tick(world, plan=None, execute=execute, seed=seed,
                          begin_tick=begin, plan_all=plan_all)
