"""Wolf-sheep-grass dynamics.

Wolves eat sheep, sheep eat binary grass, grass regrows on a fixed countdown.
Moving costs energy, eating gains it, agents reproduce by splitting energy
with a child, and anything at or below zero energy dies.  Every agent action
is "turn, unit step, eat if possible"; the turn is either a uniform random
angle under 45 degrees (the base random walk) or one of the three discrete
planner actions.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .engine import (
    Agent,
    Species,
    TickReport,
    WorldState,
    move_forward,
    norm360,
    patch_at,
)
from .rng import PURPOSE_INIT, Stream


class Action(IntEnum):
    """The three planner actions: optional 30-degree turn, unit step, eat attempt."""

    TURN_LEFT = 0
    STRAIGHT = 1
    TURN_RIGHT = 2

    @property
    def turn_degrees(self) -> float:
        return (self.value - 1) * 30.0


@dataclass(frozen=True)
class SpeciesParams:
    initial_count: int
    gain_from_food: float
    reproduce_prob: float

    def __post_init__(self):
        if not 0.0 <= self.reproduce_prob <= 1.0:
            raise ValueError(f"reproduce_prob must be in [0, 1], got {self.reproduce_prob}")
        if self.gain_from_food <= 0:
            raise ValueError(f"gain_from_food must be positive, got {self.gain_from_food}")
        if self.initial_count < 0:
            raise ValueError(f"initial_count must be >= 0, got {self.initial_count}")


# Defaults reconstruct the standard library wolf-sheep-with-grass setup:
# 100 sheep (gain 4, reproduce 4%), 50 wolves (gain 20, reproduce 5%),
# regrowth 30 ticks, half the patches grassy, 51x51 wrapping world.
@dataclass(frozen=True)
class ModelParams:
    sheep: SpeciesParams = SpeciesParams(100, 4.0, 0.04)
    wolves: SpeciesParams = SpeciesParams(50, 20.0, 0.05)
    grass_regrowth_time: int = 30
    move_cost: float = 1.0
    width: int = 51
    height: int = 51
    wrap: bool = True
    initial_grass_fraction: float = 0.5

    def __post_init__(self):
        if self.grass_regrowth_time < 1:
            raise ValueError(f"grass_regrowth_time must be >= 1, got {self.grass_regrowth_time}")
        if self.move_cost < 0:
            raise ValueError(f"move_cost must be >= 0, got {self.move_cost}")
        if not 0.0 <= self.initial_grass_fraction <= 1.0:
            raise ValueError("initial_grass_fraction must be in [0, 1]")

    def species(self, sp: Species) -> SpeciesParams:
        return self.sheep if sp == Species.SHEEP else self.wolves

    def gain(self, sp: Species) -> float:
        return self.species(sp).gain_from_food


def init_world(params: ModelParams, seed: int) -> WorldState:
    """Build the starting world from one INIT stream (fully seed-determined).

    Patches are visited in (col, row) order; grassless patches start with a
    uniform countdown in [0, regrowth_time).  Agents get uniform positions and
    headings, and energy uniform in the open interval (0, 2 * gain).
    """
    world = WorldState(params.width, params.height, params.wrap)
    stream = Stream(seed, PURPOSE_INIT, 0, 0)

    for cx in range(params.width):
        for cy in range(params.height):
            if stream.bernoulli(params.initial_grass_fraction):
                world.grass[cx, cy] = True
            else:
                world.countdown[cx, cy] = stream.randint(params.grass_regrowth_time)

    for sp in (Species.SHEEP, Species.WOLF):
        spp = params.species(sp)
        for _ in range(spp.initial_count):
            x = stream.uniform(0.0, params.width)
            y = stream.uniform(0.0, params.height)
            heading = stream.uniform(0.0, 360.0)
            energy = 0.0
            while energy <= 0.0:
                energy = stream.u01() * (2.0 * spp.gain_from_food)
            world.spawn(sp, x, y, heading, energy)
    return world


def eat_attempt(world: WorldState, agent: Agent, params: ModelParams) -> bool:
    """Try to eat on the agent's current patch.

    Sheep consume live grass (patch goes dead, countdown restarts).  Wolves
    remove the lowest-id live sheep sharing their patch.  Returns whether
    anything was eaten.
    """
    cell = patch_at(agent.x, agent.y)
    if agent.species == Species.SHEEP:
        if world.grass[cell]:
            world.grass[cell] = False
            world.countdown[cell] = params.grass_regrowth_time
            agent.energy += params.sheep.gain_from_food
            return True
        return False
    prey_ids = world.sheep_ids_on_patch(cell)
    if prey_ids:
        world.remove(world.agents_by_id[min(prey_ids)])
        agent.energy += params.wolves.gain_from_food
        return True
    return False


def apply_action(world: WorldState, agent: Agent, action: Action, params: ModelParams) -> bool:
    """Turn by the action's angle, take a unit step, pay move cost, try to eat."""
    agent.heading = norm360(agent.heading + action.turn_degrees)
    move_forward(world, agent, 1.0)
    agent.energy -= params.move_cost
    return eat_attempt(world, agent, params)


def base_random_action(world: WorldState, agent: Agent, params: ModelParams,
                       stream: Stream) -> bool:
    """Default walk: turn by uniform(-45, 45) degrees, step, pay cost, eat."""
    agent.heading = norm360(agent.heading + stream.uniform(-45.0, 45.0))
    move_forward(world, agent, 1.0)
    agent.energy -= params.move_cost
    return eat_attempt(world, agent, params)


def maybe_reproduce(world: WorldState, agent: Agent, params: ModelParams,
                    stream: Stream) -> Agent | None:
    """Bernoulli reproduction: split energy in half, child steps one unit out."""
    if not stream.bernoulli(params.species(agent.species).reproduce_prob):
        return None
    half = agent.energy / 2.0
    agent.energy = half
    child = world.spawn(agent.species, agent.x, agent.y, stream.uniform(0.0, 360.0), half)
    move_forward(world, child, 1.0)
    return child


def regrow_grass(world: WorldState) -> int:
    """Advance every grassless patch's countdown; patches hitting 0 go live."""
    bare = ~world.grass
    np.subtract(world.countdown, 1, out=world.countdown, where=bare & (world.countdown > 0))
    ready = bare & (world.countdown == 0)
    world.grass[ready] = True
    return int(np.count_nonzero(ready))


def cull_dead(world: WorldState) -> tuple[int, int]:
    """Remove every agent at or below zero energy; returns (sheep, wolf) deaths."""
    starved = [a for a in world.agents if a.alive and a.energy <= 0.0]
    for a in starved:
        world.remove(a)
    world.compact()
    sheep = sum(1 for a in starved if a.species == Species.SHEEP)
    return sheep, len(starved) - sheep
