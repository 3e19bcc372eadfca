"""World substrate and the two-phase tick scheduler.

The world is a toroidal (optionally clamped) 2-D grid of patches with
continuous-position agents on top.  Headings are compass degrees: 0 = +y
(north), 90 = +x (east).

A tick runs in two phases: every live agent first produces an action from the
same pre-tick state (phase 1, side-effect free, parallelizable), then actions
are applied one agent at a time in an order shuffled by the tick's scheduler
stream (phase 2, single-threaded).  Conflicts such as two wolves reaching the
same sheep resolve by execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Callable, Iterable

import numpy as np

from . import rng

DEG = math.pi / 180.0


class Species(IntEnum):
    SHEEP = 0
    WOLF = 1


@dataclass(slots=True)
class Agent:
    id: int
    species: Species
    x: float
    y: float
    heading: float  # degrees in [0, 360)
    energy: float
    alive: bool = True


@dataclass(slots=True)
class TickReport:
    """Event counts and populations for one completed tick.

    start_* fields are measured after grass regrowth but before any agent
    acts; the plain count fields are end-of-tick.
    """

    tick: int
    sheep_count: int = 0
    wolf_count: int = 0
    grass_count: int = 0
    grass_eaten: int = 0
    sheep_eaten: int = 0
    grass_regrown: int = 0
    sheep_born: int = 0
    wolf_born: int = 0
    sheep_starved: int = 0
    wolf_starved: int = 0
    start_sheep: int = 0
    start_wolves: int = 0
    start_grass: int = 0


def norm360(h: float) -> float:
    return h % 360.0


class WorldState:
    """Full mutable simulation state: patch grid, agent roster, tick counter.

    Patches are numpy arrays indexed [col, row]; cell (c, r) covers the square
    [c, c+1) x [r, r+1).  The roster is kept in agent-id order (ids are
    monotone and never reused), and a per-patch index of live sheep is
    maintained for predation lookups.
    """

    def __init__(self, width: int, height: int, wrap: bool = True):
        if width <= 0 or height <= 0:
            raise ValueError(f"world dimensions must be positive, got {width}x{height}")
        self.width = width
        self.height = height
        self.wrap = wrap
        self.grass = np.zeros((width, height), dtype=bool)
        self.countdown = np.zeros((width, height), dtype=np.int32)
        self.agents: list[Agent] = []
        self.agents_by_id: dict[int, Agent] = {}
        self.tick = 0
        self.next_agent_id = 0
        self._sheep_on_patch: dict[tuple[int, int], set[int]] = {}

    # -- roster maintenance -------------------------------------------------

    def spawn(self, species: Species, x: float, y: float, heading: float, energy: float) -> Agent:
        agent = Agent(self.next_agent_id, species, x, y, norm360(heading), energy)
        self.next_agent_id += 1
        self.agents.append(agent)
        self.agents_by_id[agent.id] = agent
        if species == Species.SHEEP:
            self._sheep_on_patch.setdefault(patch_at(x, y), set()).add(agent.id)
        return agent

    def remove(self, agent: Agent) -> None:
        agent.alive = False
        del self.agents_by_id[agent.id]
        if agent.species == Species.SHEEP:
            cell = patch_at(agent.x, agent.y)
            bucket = self._sheep_on_patch.get(cell)
            if bucket is not None:
                bucket.discard(agent.id)
                if not bucket:
                    del self._sheep_on_patch[cell]

    def compact(self) -> None:
        """Drop dead agents from the roster (preserves id order)."""
        self.agents = [a for a in self.agents if a.alive]

    def place(self, agent: Agent, x: float, y: float) -> None:
        """Move an agent, keeping the sheep patch index consistent."""
        if agent.species == Species.SHEEP:
            old = patch_at(agent.x, agent.y)
            new = patch_at(x, y)
            if old != new:
                bucket = self._sheep_on_patch.get(old)
                if bucket is not None:
                    bucket.discard(agent.id)
                    if not bucket:
                        del self._sheep_on_patch[old]
                self._sheep_on_patch.setdefault(new, set()).add(agent.id)
        agent.x = x
        agent.y = y

    def sheep_ids_on_patch(self, cell: tuple[int, int]) -> set[int]:
        return self._sheep_on_patch.get(cell, _EMPTY_SET)

    def count(self, species: Species) -> int:
        return sum(1 for a in self.agents if a.alive and a.species == species)

    def grass_count(self) -> int:
        return int(np.count_nonzero(self.grass))


_EMPTY_SET: frozenset[int] = frozenset()


# -- geometry ---------------------------------------------------------------

def wrap_delta(d: float, span: float) -> float:
    """Signed minimal displacement along one wrapped axis."""
    d = d % span
    if d > span / 2:
        d -= span
    return d


def torus_distance(ax: float, ay: float, bx: float, by: float,
                   width: float, height: float, wrap: bool = True) -> float:
    """Minimal Euclidean distance between two points, wrap-aware."""
    dx = ax - bx
    dy = ay - by
    if wrap:
        dx = wrap_delta(dx, width)
        dy = wrap_delta(dy, height)
    return math.hypot(dx, dy)


def patch_at(x: float, y: float) -> tuple[int, int]:
    """Grid cell containing a position; cell (c, r) covers [c, c+1) x [r, r+1)."""
    return (int(math.floor(x)), int(math.floor(y)))


def step_position(x: float, y: float, heading: float, distance: float,
                  width: float, height: float, wrap: bool) -> tuple[float, float]:
    """Advance a position by `distance` along a compass heading."""
    rad = heading * DEG
    nx = x + distance * math.sin(rad)
    ny = y + distance * math.cos(rad)
    if wrap:
        nx %= width
        ny %= height
    else:
        nx = min(max(nx, 0.0), math.nextafter(width, 0.0))
        ny = min(max(ny, 0.0), math.nextafter(height, 0.0))
    return nx, ny


def move_forward(world: WorldState, agent: Agent, distance: float) -> None:
    nx, ny = step_position(agent.x, agent.y, agent.heading, distance,
                           world.width, world.height, world.wrap)
    world.place(agent, nx, ny)


def agents_in_radius(world: WorldState, cx: float, cy: float, radius: float,
                     exclude_id: int = -1) -> list[Agent]:
    """Live agents within `radius` of a point, ascending id; torus metric."""
    found = [
        a for a in world.agents
        if a.alive and a.id != exclude_id
        and torus_distance(a.x, a.y, cx, cy, world.width, world.height, world.wrap) <= radius
    ]
    found.sort(key=lambda a: a.id)
    return found


# -- scheduler ---------------------------------------------------------------

PlanFn = Callable[[WorldState, Agent], object]
ExecuteFn = Callable[[WorldState, Agent, object, TickReport], None]
BeginFn = Callable[[WorldState, TickReport], None]


def two_phase_tick(world: WorldState, plan: PlanFn, execute: ExecuteFn,
                   seed: int, begin_tick: BeginFn | None = None,
                   plan_all: Callable[[WorldState, list[Agent]], list[object]] | None = None,
                   ) -> TickReport:
    """Run one tick: begin hook, snapshot planning, shuffled execution.

    `plan` must not mutate the world; it sees the identical pre-tick state for
    every agent.  `plan_all`, when given, replaces the per-agent loop with one
    batched call (same contract).  `execute` applies one agent's action and
    records events on the report.  Agents killed earlier in phase 2 are
    skipped.  Newly spawned agents do not act until the next tick.
    """
    t = world.tick + 1
    report = TickReport(tick=t)

    if begin_tick is not None:
        begin_tick(world, report)

    report.start_sheep = world.count(Species.SHEEP)
    report.start_wolves = world.count(Species.WOLF)
    report.start_grass = world.grass_count()

    roster = [a for a in world.agents if a.alive]
    if plan_all is not None:
        actions = plan_all(world, roster)
    else:
        actions = [plan(world, a) for a in roster]

    # Prey act before predators (as in the reference predator-prey tick, where
    # every sheep moves before any wolf hunts); order within each species block
    # is shuffled by the tick's scheduler stream.
    stream = rng.Stream(seed, rng.PURPOSE_SCHEDULER, 0, t)
    order = [i for i, a in enumerate(roster) if a.species == Species.SHEEP]
    wolves = [i for i, a in enumerate(roster) if a.species != Species.SHEEP]
    stream.shuffle(order)
    stream.shuffle(wolves)
    order.extend(wolves)
    for i in order:
        agent = roster[i]
        if agent.alive:
            execute(world, agent, actions[i], report)

    world.compact()
    world.tick = t
    report.sheep_count = world.count(Species.SHEEP)
    report.wolf_count = world.count(Species.WOLF)
    report.grass_count = world.grass_count()
    return report
