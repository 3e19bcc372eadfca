"""Shared fixtures and the independent decision-replay oracle.

The oracle reimplements the rollout semantics from the documented draw-order
contract using only the stream primitives and plain dict/list state; it never
touches cognition.py or fastcog.py internals, so agreement between the three
is meaningful.
"""

from __future__ import annotations

import math

from wolfsheep.engine import Species, WorldState
from wolfsheep.model import ModelParams, SpeciesParams
from wolfsheep.rng import (
    CELL_DRAW_BASE,
    PURPOSE_ROLLOUT,
    PURPOSE_TIEBREAK,
    draw_at,
    stream_key,
)

RAD = math.pi / 180.0


def make_world(width=20, height=20, wrap=True, grass_cells=(), agents=()):
    """Hand-built world: grass at given cells, agents as (species, x, y, heading, energy)."""
    world = WorldState(width, height, wrap)
    for cell in grass_cells:
        world.grass[cell] = True
    for (sp, x, y, heading, energy) in agents:
        world.spawn(sp, x, y, heading, energy)
    return world


def small_params(**kw):
    defaults = dict(
        sheep=SpeciesParams(8, 4.0, 0.0),
        wolves=SpeciesParams(4, 20.0, 0.0),
        width=20,
        height=20,
        grass_regrowth_time=10,
    )
    defaults.update(kw)
    return ModelParams(**defaults)


def report_totals(reports, field):
    return sum(getattr(r, field) for r in reports)


# -- replay oracle ------------------------------------------------------------


def _replay_rollout(snap, mparams, cparams, key):
    """One rollout from the draw-order contract; returns (first, return, died)."""
    half = math.ceil(cparams.vision_radius) + cparams.rollout_length
    side = 2 * half + 1
    ego_x = half + (snap.x - math.floor(snap.x))
    ego_y = half + (snap.y - math.floor(snap.y))

    cells = {}
    for (dc, dr) in snap.observed:
        cells[(half + dc) * side + (half + dr)] = 0
    for (dc, dr) in snap.grass_live:
        cells[(half + dc) * side + (half + dr)] = 1

    agents = [[int(snap.species), ego_x, ego_y, snap.heading, True]]
    for (sp, dx, dy, h) in snap.neighbors:
        agents.append([int(sp), ego_x + dx, ego_y + dy, h, True])
    energy = snap.energy

    counter = 0

    def draw():
        nonlocal counter
        value = draw_at(key, counter)
        counter += 1
        return value

    def resolve(cell):
        state = cells.get(cell, 2)
        if state == 2:
            state = 1 if draw_at(key, CELL_DRAW_BASE + cell) < snap.density else 0
            cells[cell] = state
        return state

    def sheep_index_on(col, row):
        for idx, (sp, x, y, _h, alive) in enumerate(agents):
            if alive and sp == 0 and int(x) == col and int(y) == row:
                return idx
        return -1

    first = min(int(draw() * 3.0), 2)
    total = 0.0
    weight = 1.0
    died = False

    for tau in range(cparams.rollout_length):
        act = first if tau == 0 else min(int(draw() * 3.0), 2)
        energy_before = energy

        ego = agents[0]
        ego[3] = (ego[3] + (act - 1) * 30.0) % 360.0
        rad = ego[3] * RAD
        ego[1] += math.sin(rad)
        ego[2] += math.cos(rad)
        energy -= mparams.move_cost
        col, row = int(ego[1]), int(ego[2])
        if ego[0] == 0:
            if resolve(col * side + row) == 1:
                cells[col * side + row] = 0
                energy += mparams.sheep.gain_from_food
        else:
            prey = sheep_index_on(col, row)
            if prey > 0:
                agents[prey][4] = False
                energy += mparams.wolves.gain_from_food
        died = energy <= 0.0

        if not died:
            for j in range(1, len(agents)):
                other = agents[j]
                if not other[4]:
                    continue
                u = draw()
                other[3] = (other[3] + (u * 90.0 - 45.0)) % 360.0
                rad = other[3] * RAD
                other[1] += math.sin(rad)
                other[2] += math.cos(rad)
                col, row = int(other[1]), int(other[2])
                if other[0] == 0:
                    if resolve(col * side + row) == 1:
                        cells[col * side + row] = 0
                else:
                    prey = sheep_index_on(col, row)
                    if prey == 0:
                        agents[0][4] = False
                        died = True
                        break
                    if prey > 0:
                        agents[prey][4] = False

        reward = cparams.death_reward if died else energy - energy_before
        total += weight * reward
        weight *= cparams.discount
        if died:
            break

    return first, total, died


def replay_decide(snap, mparams, cparams, seed):
    """Independent argmax replay; returns (chosen, best_set, counts, means)."""
    counts = [0, 0, 0]
    sums = [0.0, 0.0, 0.0]
    for r in range(cparams.n_rollouts):
        key = stream_key(seed, PURPOSE_ROLLOUT, snap.agent_id, snap.tick, r)
        first, total, _died = _replay_rollout(snap, mparams, cparams, key)
        counts[first] += 1
        sums[first] += total

    means = [sums[a] / counts[a] if counts[a] else None for a in range(3)]
    best_mean = max(m for m in means if m is not None)
    best = [a for a in range(3) if counts[a] and means[a] == best_mean]
    if len(best) > 1:
        u = draw_at(stream_key(seed, PURPOSE_TIEBREAK, snap.agent_id, snap.tick), 0)
        chosen = best[min(int(u * len(best)), len(best) - 1)]
    else:
        chosen = best[0]
    return chosen, best, tuple(counts), tuple(means)
