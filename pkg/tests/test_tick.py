"""Two-phase tick: phase separation, conflicts, conservation, determinism."""

import dataclasses

import pytest

from wolfsheep.engine import Species, two_phase_tick
from wolfsheep.metrics import ExperimentConfig, run_experiment
from wolfsheep.model import ModelParams, SpeciesParams, init_world, regrow_grass
from wolfsheep.simulate import RANDOM, step_tick

from .helpers import make_world, small_params


def random_policies():
    return {Species.SHEEP: RANDOM, Species.WOLF: RANDOM}


def test_empty_world_tick_still_regrows_and_counts():
    params = small_params()
    world = make_world()
    world.countdown[:] = 5
    world.countdown[2, 2] = 1
    report = step_tick(world, params, random_policies(), seed=1)
    assert world.tick == 1
    assert report.tick == 1
    assert report.grass_regrown == 1
    assert world.grass[2, 2]
    assert report.sheep_count == report.wolf_count == 0


@pytest.mark.parametrize("seed", range(8))
def test_two_wolves_one_sheep_exactly_one_eats(seed):
    """Both wolves converge on a stationary sheep; execution order picks the winner."""
    from wolfsheep.model import eat_attempt
    from wolfsheep.simulate import _exec_turn

    params = small_params(move_cost=1.0)
    world = make_world(agents=[
        (Species.SHEEP, 10.5, 11.5, 0.0, 1000.0),
        (Species.WOLF, 10.4, 10.5, 0.0, 50.0),
        (Species.WOLF, 10.6, 10.5, 0.0, 50.0),
    ])

    def plan(w, agent):
        return "stay" if agent.species == Species.SHEEP else 0.0

    def execute(w, agent, action, report):
        if action == "stay":
            return
        if _exec_turn(w, agent, action, params):
            report.sheep_eaten += 1

    report = two_phase_tick(world, plan, execute, seed=seed)
    world.compact()
    assert report.sheep_eaten == 1
    assert world.count(Species.SHEEP) == 0
    gained = [w for w in world.agents if w.energy > 50.0]
    assert len(gained) == 1
    assert gained[0].energy == 50.0 - params.move_cost + params.wolves.gain_from_food


def test_fixed_seed_same_reports():
    params = small_params()

    def run():
        world = init_world(params, seed=17)
        return [step_tick(world, params, random_policies(), seed=17) for _ in range(30)]

    assert run() == run()


def seeded_run_reports(params, seed, ticks):
    world = init_world(params, seed)
    return [step_tick(world, params, random_policies(), seed=seed) for _ in range(ticks)]


@pytest.mark.parametrize("seed", [1, 2, 3, 4, 5])
def test_population_conservation_identities(seed):
    params = ModelParams(
        sheep=SpeciesParams(40, 4.0, 0.05),
        wolves=SpeciesParams(15, 20.0, 0.05),
        width=25, height=25,
    )
    reports = seeded_run_reports(params, seed, 60)
    for report in reports:
        assert report.sheep_count == (report.start_sheep - report.sheep_eaten
                                      - report.sheep_starved + report.sheep_born)
        assert report.wolf_count == (report.start_wolves - report.wolf_starved
                                     + report.wolf_born)


@pytest.mark.parametrize("seed", [6, 7, 8])
def test_grass_conservation_identity(seed):
    params = small_params(sheep=SpeciesParams(30, 4.0, 0.05))
    world = init_world(params, seed)
    previous_grass = world.grass_count()
    for _ in range(50):
        report = step_tick(world, params, random_policies(), seed=seed)
        assert report.grass_count == previous_grass + report.grass_regrown - report.grass_eaten
        assert report.start_grass == previous_grass + report.grass_regrown
        previous_grass = report.grass_count


def test_no_agent_with_nonpositive_energy_survives_a_tick():
    params = small_params(sheep=SpeciesParams(50, 4.0, 0.0))
    world = init_world(params, seed=9)
    for agent in world.agents[:10]:
        agent.energy = 0.5  # will starve on the first move
    for _ in range(5):
        step_tick(world, params, random_policies(), seed=9)
        assert all(a.energy > 0 for a in world.agents)


def test_roster_stays_in_id_order():
    params = small_params(sheep=SpeciesParams(30, 4.0, 0.2),
                          wolves=SpeciesParams(10, 20.0, 0.2))
    world = init_world(params, seed=21)
    for _ in range(40):
        step_tick(world, params, random_policies(), seed=21)
        ids = [a.id for a in world.agents]
        assert ids == sorted(ids)
        assert len(ids) == len(set(ids))


def test_snapshot_isolation_plans_from_pre_tick_state():
    """Every phase-1 call sees the same world, no matter how phase 2 mutates it."""
    params = small_params(sheep=SpeciesParams(10, 4.0, 0.0))
    world = init_world(params, seed=31)
    captures = []

    def plan(w, agent):
        captures.append(tuple((a.id, a.x, a.y, a.energy) for a in w.agents))
        return 0.0

    def execute(w, agent, action, report):
        agent.x = (agent.x + 1.0) % w.width  # visible phase-2 mutation
        agent.energy -= 1.0

    pre_tick = None

    def begin(w, report):
        nonlocal pre_tick
        pre_tick = tuple((a.id, a.x, a.y, a.energy) for a in w.agents)

    two_phase_tick(world, plan, execute, seed=31, begin_tick=begin)
    assert len(captures) == 14  # 10 sheep + 4 wolves
    assert all(c == pre_tick for c in captures)


def test_newborns_do_not_act_in_their_birth_tick():
    from wolfsheep.engine import torus_distance

    params = small_params(sheep=SpeciesParams(1, 4.0, 1.0), move_cost=0.0)
    world = make_world(agents=[(Species.SHEEP, 10.5, 10.5, 0.0, 100.0)])
    report = step_tick(world, params, random_policies(), seed=2)
    assert report.sheep_born == 1
    assert world.count(Species.SHEEP) == 2
    parent = world.agents_by_id[0]
    child = world.agents_by_id[1]
    # the child is exactly one birth-step from its parent: it took no action
    assert torus_distance(child.x, child.y, parent.x, parent.y, 20, 20) == pytest.approx(1.0)


def test_zero_tick_run_reports_initial_state_only():
    config = ExperimentConfig(model=small_params(), ticks=0, warmup=0)
    result = run_experiment(config, seed=1)
    assert result.reports == []
    assert result.initial.sheep_count == 8
    summary = result.summary()
    assert summary.ticks_run == 0
    assert summary.mean_sheep_eff is None
