"""Rollout-based action planning.

An agent plans by observing its surroundings (a Snapshot), spinning up a
small private world from that observation (a CognitiveWorld), and running N
random short simulations (rollouts) in copies of it.  Each rollout starts
with a uniformly random first action, accumulates the ego's discounted energy
change as reward, and the agent finally takes the first action with the
highest mean return.

The private world is deliberately simpler than the real one:

* it is a bounded, non-wrapping grid just large enough that nothing can
  leave it within a rollout (half-width = ceil(vision_radius) + length);
* only the ego's energy exists; other agents still move, and eat (wolves
  remove sheep, sheep kill grass), but never starve or reproduce;
* grass never regrows;
* terrain beyond the vision radius is unknown: each unknown patch resolves
  to live/dead at most once per rollout, by a Bernoulli(observed density)
  draw dedicated to that patch, so resolution order cannot matter.

Determinism contract (mirrored bit-for-bit by fastcog.py and relied on by
replay tests): rollout r of agent a at tick t draws from the stream keyed
(seed, PURPOSE_ROLLOUT, a, t, r).  Draw 0 is the first action; within each
simulated tick the ego's action draw (ticks >= 1) comes first, then one turn
draw per live non-ego agent in roster order.  Unknown-patch resolutions use
draw index CELL_DRAW_BASE + flat cell index.  When the ego dies, the tick's
reward is replaced by death_reward and the rollout stops consuming draws.
Argmax ties are broken by one draw from (seed, PURPOSE_TIEBREAK, a, t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .engine import DEG, Agent, Species, WorldState, norm360, patch_at, wrap_delta
from .model import Action, ModelParams
from .rng import CELL_DRAW_BASE, PURPOSE_ROLLOUT, PURPOSE_TIEBREAK, draw_at, stream_key

CELL_DEAD = 0
CELL_LIVE = 1
CELL_UNOBSERVED = 2


@dataclass(frozen=True)
class CognitionParams:
    n_rollouts: int
    rollout_length: int
    vision_radius: float = 5.0
    discount: float = 0.9
    death_reward: float = -1000.0

    def __post_init__(self):
        if self.n_rollouts < 1:
            raise ValueError(f"n_rollouts must be >= 1, got {self.n_rollouts}")
        if self.rollout_length < 0:
            raise ValueError(f"rollout_length must be >= 0, got {self.rollout_length}")
        if self.vision_radius <= 0:
            raise ValueError(f"vision_radius must be > 0, got {self.vision_radius}")
        if not 0.0 < self.discount <= 1.0:
            raise ValueError(f"discount must be in (0, 1], got {self.discount}")


@dataclass(frozen=True)
class Snapshot:
    """Ego-centric view of the world at the start of a tick.

    Neighbor positions are continuous offsets from the ego (wrap-minimal);
    grass offsets are integer patch offsets from the ego's patch.  Neighbors
    carry no energy: an agent cannot see how hungry anyone else is.
    `observed` is every patch offset whose center lies within the vision
    radius; `grass_live` is the subset currently bearing grass.
    """

    agent_id: int
    species: Species
    x: float
    y: float
    heading: float
    energy: float
    tick: int
    neighbors: tuple[tuple[Species, float, float, float], ...]
    grass_live: frozenset[tuple[int, int]]
    observed: frozenset[tuple[int, int]]
    density: float


@dataclass(frozen=True)
class RolloutRecord:
    first_action: Action
    rewards: tuple[float, ...]
    discounted_return: float
    terminated_by_death: bool
    states: tuple["CogState", ...] | None = None


@dataclass(frozen=True)
class CogState:
    """One per-tick snapshot of a rollout's world, for inspection/rendering."""

    ego_energy: float
    agents: tuple[tuple[int, float, float, float, bool], ...]  # (species, x, y, heading, alive)
    cells: tuple[int, ...]


@dataclass(frozen=True)
class Decision:
    chosen: Action
    counts: tuple[int, int, int]
    means: tuple[float | None, float | None, float | None]
    best_actions: tuple[Action, ...]
    records: tuple[RolloutRecord, ...] | None = None


class CognitiveWorld:
    """The ego's private world: a small flat grid plus a copied agent roster.

    Index 0 is always the ego.  Cells are a flat int8 array (col * side + row)
    with codes CELL_DEAD / CELL_LIVE / CELL_UNOBSERVED.
    """

    __slots__ = ("side", "half", "cells", "x", "y", "heading", "species",
                 "alive", "ego_energy", "density")

    def __init__(self, side: int, half: int, cells: np.ndarray,
                 x: list[float], y: list[float], heading: list[float],
                 species: list[int], ego_energy: float, density: float):
        self.side = side
        self.half = half
        self.cells = cells
        self.x = x
        self.y = y
        self.heading = heading
        self.species = species
        self.alive = [True] * len(x)
        self.ego_energy = ego_energy
        self.density = density

    def copy(self) -> "CognitiveWorld":
        dup = CognitiveWorld(self.side, self.half, self.cells.copy(),
                             list(self.x), list(self.y), list(self.heading),
                             list(self.species), self.ego_energy, self.density)
        dup.alive = list(self.alive)
        return dup

    def capture(self) -> CogState:
        agents = tuple(
            (self.species[j], self.x[j], self.y[j], self.heading[j], self.alive[j])
            for j in range(len(self.x))
        )
        return CogState(self.ego_energy, agents, tuple(int(v) for v in self.cells))


def observe(world: WorldState, agent: Agent, vision_radius: float) -> Snapshot:
    """Build the ego-centric Snapshot for one agent.

    Agents are included when their (wrap-minimal) distance to the ego is at
    most the radius; patches when their center is.  For wrapped worlds the
    neighborhood is unrolled into the ego's local frame, so on worlds smaller
    than the vision diameter a patch can appear at more than one offset.
    """
    r2 = vision_radius * vision_radius
    neighbors = []
    for other in world.agents:
        if not other.alive or other.id == agent.id:
            continue
        dx = other.x - agent.x
        dy = other.y - agent.y
        if world.wrap:
            dx = wrap_delta(dx, world.width)
            dy = wrap_delta(dy, world.height)
        if dx * dx + dy * dy <= r2:
            neighbors.append((other.id, other.species, dx, dy, other.heading))
    neighbors.sort(key=lambda n: n[0])

    pcx, pcy = patch_at(agent.x, agent.y)
    fx = agent.x - pcx
    fy = agent.y - pcy
    bound = int(math.ceil(vision_radius)) + 1
    observed = []
    live = []
    for dc in range(-bound, bound + 1):
        for dr in range(-bound, bound + 1):
            ccx = dc + 0.5 - fx
            ccy = dr + 0.5 - fy
            if ccx * ccx + ccy * ccy > r2:
                continue
            mc = pcx + dc
            mr = pcy + dr
            if world.wrap:
                mc %= world.width
                mr %= world.height
            elif not (0 <= mc < world.width and 0 <= mr < world.height):
                continue
            observed.append((dc, dr))
            if world.grass[mc, mr]:
                live.append((dc, dr))

    density = len(live) / len(observed) if observed else 0.0
    return Snapshot(
        agent_id=agent.id,
        species=agent.species,
        x=agent.x,
        y=agent.y,
        heading=agent.heading,
        energy=agent.energy,
        tick=world.tick + 1,
        neighbors=tuple((sp, dx, dy, h) for (_, sp, dx, dy, h) in neighbors),
        grass_live=frozenset(live),
        observed=frozenset(observed),
        density=density,
    )


def grid_half_width(vision_radius: float, rollout_length: int) -> int:
    """Half-width of the private grid: nothing can reach its edge in a rollout."""
    return int(math.ceil(vision_radius)) + rollout_length


def build_cognitive_world(snapshot: Snapshot, params: CognitionParams) -> CognitiveWorld:
    """Translate a Snapshot into a centered CognitiveWorld (an isometry)."""
    half = grid_half_width(params.vision_radius, params.rollout_length)
    side = 2 * half + 1
    cells = np.full(side * side, CELL_UNOBSERVED, dtype=np.int8)
    for (dc, dr) in snapshot.observed:
        cells[(half + dc) * side + (half + dr)] = CELL_DEAD
    for (dc, dr) in snapshot.grass_live:
        cells[(half + dc) * side + (half + dr)] = CELL_LIVE

    ego_x = half + (snapshot.x - math.floor(snapshot.x))
    ego_y = half + (snapshot.y - math.floor(snapshot.y))
    xs = [ego_x]
    ys = [ego_y]
    headings = [snapshot.heading]
    species = [int(snapshot.species)]
    for (sp, dx, dy, h) in snapshot.neighbors:
        xs.append(ego_x + dx)
        ys.append(ego_y + dy)
        headings.append(h)
        species.append(int(sp))
    return CognitiveWorld(side, half, cells, xs, ys, headings, species,
                          snapshot.energy, snapshot.density)


def _randint3(u: float) -> int:
    a = int(u * 3.0)
    return 2 if a > 2 else a


def _resolve_cell(cog: CognitiveWorld, cell: int, key: int) -> int:
    state = cog.cells[cell]
    if state == CELL_UNOBSERVED:
        u = draw_at(key, CELL_DRAW_BASE + cell)
        state = CELL_LIVE if u < cog.density else CELL_DEAD
        cog.cells[cell] = state
    return state


def _lowest_sheep_on(cog: CognitiveWorld, col: int, row: int) -> int:
    for j in range(len(cog.x)):
        if cog.alive[j] and cog.species[j] == int(Species.SHEEP):
            if int(cog.x[j]) == col and int(cog.y[j]) == row:
                return j
    return -1


def run_rollout(cog: CognitiveWorld, mparams: ModelParams, params: CognitionParams,
                key: int, record_states: bool = False) -> RolloutRecord:
    """Simulate `rollout_length` ticks on a private world copy.

    The caller must pass a fresh copy: the rollout consumes it.  See the
    module docstring for the exact draw order.
    """
    move_cost = mparams.move_cost
    sheep_gain = mparams.sheep.gain_from_food
    wolf_gain = mparams.wolves.gain_from_food
    side = cog.side
    ego_is_sheep = cog.species[0] == int(Species.SHEEP)

    ctr = 0
    first = _randint3(draw_at(key, ctr))
    ctr += 1

    rewards: list[float] = []
    states: list[CogState] = []
    total = 0.0
    disc = 1.0
    died = False

    for tau in range(params.rollout_length):
        if tau == 0:
            act = first
        else:
            act = _randint3(draw_at(key, ctr))
            ctr += 1
        energy_before = cog.ego_energy

        # Ego acts first within a tick.
        cog.heading[0] = norm360(cog.heading[0] + (act - 1) * 30.0)
        rad = cog.heading[0] * DEG
        cog.x[0] += math.sin(rad)
        cog.y[0] += math.cos(rad)
        cog.ego_energy -= move_cost
        col = int(cog.x[0])
        row = int(cog.y[0])
        if ego_is_sheep:
            if _resolve_cell(cog, col * side + row, key) == CELL_LIVE:
                cog.cells[col * side + row] = CELL_DEAD
                cog.ego_energy += sheep_gain
        else:
            prey = _lowest_sheep_on(cog, col, row)
            if prey > 0:
                cog.alive[prey] = False
                cog.ego_energy += wolf_gain
        died = cog.ego_energy <= 0.0

        if not died:
            for j in range(1, len(cog.x)):
                if not cog.alive[j]:
                    continue
                u = draw_at(key, ctr)
                ctr += 1
                cog.heading[j] = norm360(cog.heading[j] + (u * 90.0 - 45.0))
                rad = cog.heading[j] * DEG
                cog.x[j] += math.sin(rad)
                cog.y[j] += math.cos(rad)
                col = int(cog.x[j])
                row = int(cog.y[j])
                if cog.species[j] == int(Species.SHEEP):
                    if _resolve_cell(cog, col * side + row, key) == CELL_LIVE:
                        cog.cells[col * side + row] = CELL_DEAD
                else:
                    prey = _lowest_sheep_on(cog, col, row)
                    if prey == 0:
                        cog.alive[0] = False
                        died = True
                        break
                    if prey > 0:
                        cog.alive[prey] = False

        if died:
            cog.alive[0] = False
            reward = params.death_reward
        else:
            reward = cog.ego_energy - energy_before
        rewards.append(reward)
        total += disc * reward
        disc *= params.discount
        if record_states:
            states.append(cog.capture())
        if died:
            break

    return RolloutRecord(
        first_action=Action(first),
        rewards=tuple(rewards),
        discounted_return=total,
        terminated_by_death=died,
        states=tuple(states) if record_states else None,
    )


def decide(snapshot: Snapshot, mparams: ModelParams, params: CognitionParams,
           seed: int, keep_records: bool = False, record_states: bool = False,
           ) -> Decision:
    """Run the full rollout budget and pick the argmax-mean first action.

    Pure with respect to the main world: only the Snapshot is read.  Actions
    never sampled as a first action are ineligible.  Exact ties on the mean
    are broken uniformly at random from the agent's tie-break stream.
    """
    base = build_cognitive_world(snapshot, params)
    records = []
    counts = [0, 0, 0]
    sums = [0.0, 0.0, 0.0]
    for r in range(params.n_rollouts):
        key = stream_key(seed, PURPOSE_ROLLOUT, snapshot.agent_id, snapshot.tick, r)
        rec = run_rollout(base.copy(), mparams, params, key, record_states=record_states)
        counts[rec.first_action] += 1
        sums[rec.first_action] += rec.discounted_return
        if keep_records:
            records.append(rec)

    means: list[float | None] = [None, None, None]
    best_mean = None
    for a in range(3):
        if counts[a] > 0:
            means[a] = sums[a] / counts[a]
            if best_mean is None or means[a] > best_mean:
                best_mean = means[a]
    best = [Action(a) for a in range(3) if counts[a] > 0 and means[a] == best_mean]

    if len(best) > 1:
        u = draw_at(stream_key(seed, PURPOSE_TIEBREAK, snapshot.agent_id, snapshot.tick), 0)
        idx = int(u * len(best))
        if idx >= len(best):
            idx = len(best) - 1
        chosen = best[idx]
    else:
        chosen = best[0]

    return Decision(
        chosen=chosen,
        counts=tuple(counts),
        means=tuple(means),
        best_actions=tuple(best),
        records=tuple(records) if keep_records else None,
    )


def explain(snapshot: Snapshot, mparams: ModelParams, params: CognitionParams,
            seed: int) -> Decision:
    """decide() with every rollout record and per-tick world state retained."""
    return decide(snapshot, mparams, params, seed, keep_records=True, record_states=True)
