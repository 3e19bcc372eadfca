"""Acceptance suite: every exit criterion at its stated tolerance.

Each test prints one [PASS]/[FAIL] line (visible with `pytest -s` or on
failure).  Heavy simulation batches are shared through session fixtures:
the 20 baseline runs back both efficiency baselines and the population
persistence bands, and each sweep cell backs every criterion that needs it.

Expected total runtime: a few minutes on two cores, dominated by the
2000-tick planning sweeps.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest
from scipy import stats

import wolfsheep as ws
from wolfsheep import fastcog
from wolfsheep.cognition import CognitionParams, decide, observe
from wolfsheep.engine import Species
from wolfsheep.metrics import ExperimentConfig, run_experiment
from wolfsheep.model import ModelParams, SpeciesParams, init_world
from wolfsheep.sweep import SweepSpec, mean_ci95, run_sweep

from .helpers import make_world, replay_decide

BASELINE_SEEDS = list(range(1, 21))
REPS = 10
TICKS = 2000
WORKERS = 2


def report(ok: bool, label: str, detail: str) -> None:
    print(f"[{'PASS' if ok else 'FAIL'}] {label}: {detail}")
    assert ok, f"{label}: {detail}"


def intervals_disjoint(mean_a, ci_a, mean_b, ci_b) -> bool:
    return mean_a + ci_a < mean_b - ci_b or mean_b + ci_b < mean_a - ci_a


def _baseline_worker(seed: int):
    return run_experiment(ExperimentConfig(ticks=TICKS), seed).summary()


@pytest.fixture(scope="session")
def baseline_runs():
    """20 random-vs-random runs: both efficiency baselines + persistence bands."""
    from multiprocessing import get_context

    start = time.monotonic()
    with get_context("fork").Pool(WORKERS) as pool:
        summaries = pool.map(_baseline_worker, BASELINE_SEEDS)
    elapsed = time.monotonic() - start
    return summaries, elapsed


@pytest.fixture(scope="session")
def sheep_sweep():
    spec = SweepSpec(species=Species.SHEEP, n_rollouts_values=(1, 5, 20),
                     rollout_lengths=(3,), repetitions=REPS, ticks=TICKS,
                     base_seed=31000)
    start = time.monotonic()
    result = run_sweep(spec, workers=WORKERS)
    elapsed = time.monotonic() - start
    return result, elapsed


@pytest.fixture(scope="session")
def sheep_length5_sweep():
    spec = SweepSpec(species=Species.SHEEP, n_rollouts_values=(20,),
                     rollout_lengths=(5,), repetitions=REPS, ticks=TICKS,
                     base_seed=32000)
    return run_sweep(spec, workers=WORKERS)


@pytest.fixture(scope="session")
def wolf_sweep():
    spec = SweepSpec(species=Species.WOLF, n_rollouts_values=(1, 20),
                     rollout_lengths=(3,), repetitions=REPS, ticks=TICKS,
                     base_seed=33000)
    return run_sweep(spec, workers=WORKERS)


def cell(result, n, l):
    return next(r for r in result.aggregates
                if r.n_rollouts == n and r.rollout_length == l)


def cell_summaries(result, n, l):
    return [o.summary for o in result.outcomes
            if o.plan.n_rollouts == n and o.plan.rollout_length == l
            and o.summary is not None]


def test_c01_baseline_sheep_efficiency(baseline_runs):
    summaries, elapsed = baseline_runs
    effs = [s.mean_sheep_eff for s in summaries if s.mean_sheep_eff is not None]
    grand = sum(effs) / len(effs)
    ok = 0.85 <= grand <= 1.00 and elapsed < 120
    report(ok, "baseline sheep efficiency",
           f"grand mean {grand:.4f} over {len(effs)} runs in {elapsed:.0f}s "
           f"(need [0.85, 1.00], < 120 s)")


def test_c02_baseline_wolf_efficiency(baseline_runs):
    summaries, _ = baseline_runs
    effs = [s.mean_wolf_eff for s in summaries if s.mean_wolf_eff is not None]
    grand = sum(effs) / len(effs)
    report(0.60 <= grand <= 0.90, "baseline wolf efficiency",
           f"grand mean {grand:.4f} (need [0.60, 0.90])")


def test_c03_sheep_cognition_effect(sheep_sweep):
    result, elapsed = sheep_sweep
    c1, c5, c20 = cell(result, 1, 3), cell(result, 5, 3), cell(result, 20, 3)
    increasing = c1.mean_eff < c5.mean_eff < c20.mean_eff
    big_gain = c20.mean_eff >= 1.2 * c1.mean_eff
    disjoint = intervals_disjoint(c1.mean_eff, c1.eff_ci95, c20.mean_eff, c20.eff_ci95)
    ok = increasing and big_gain and disjoint and elapsed < 1800
    report(ok, "sheep cognition effect",
           f"means {c1.mean_eff:.3f} < {c5.mean_eff:.3f} < {c20.mean_eff:.3f}, "
           f"gain {c20.mean_eff / c1.mean_eff - 1:+.0%} (need >= +20%), "
           f"CIs +-{c1.eff_ci95:.3f}/+-{c20.eff_ci95:.3f} disjoint={disjoint}, "
           f"{elapsed:.0f}s (< 1800 s)")


def test_c04_wolf_cognition_effect(sheep_sweep, wolf_sweep):
    sheep_result, _ = sheep_sweep
    w1, w20 = cell(wolf_sweep, 1, 3), cell(wolf_sweep, 20, 3)
    s1, s20 = cell(sheep_result, 1, 3), cell(sheep_result, 20, 3)
    improved = w20.mean_eff > w1.mean_eff
    disjoint = intervals_disjoint(w1.mean_eff, w1.eff_ci95, w20.mean_eff, w20.eff_ci95)
    wolf_gain = w20.mean_eff / w1.mean_eff - 1
    sheep_gain = s20.mean_eff / s1.mean_eff - 1
    smaller = wolf_gain < sheep_gain
    report(improved and disjoint and smaller, "wolf cognition effect",
           f"wolf eff {w1.mean_eff:.3f} -> {w20.mean_eff:.3f} "
           f"(+-{w1.eff_ci95:.3f}/+-{w20.eff_ci95:.3f}, disjoint={disjoint}), "
           f"relative gain {wolf_gain:+.0%} vs sheep {sheep_gain:+.0%} "
           f"(need wolf < sheep)")


def test_c05_population_feedback_from_smart_wolves(wolf_sweep):
    dumb = [s.mean_sheep_pop for s in cell_summaries(wolf_sweep, 1, 3)]
    smart = [s.mean_sheep_pop for s in cell_summaries(wolf_sweep, 20, 3)]
    t_stat, p_value = stats.ttest_ind(smart, dumb, equal_var=False,
                                      alternative="less")
    ok = p_value < 0.05 and np.mean(smart) < np.mean(dumb)
    report(ok, "population feedback",
           f"mean sheep pop {np.mean(smart):.1f} (smart wolves) vs "
           f"{np.mean(dumb):.1f} (random wolves), one-sided Welch p={p_value:.2e}")


def test_c06_rollout_length_saturation(sheep_sweep, sheep_length5_sweep):
    result, _ = sheep_sweep
    l3 = cell(result, 20, 3)
    l5 = cell(sheep_length5_sweep, 20, 5)
    overlap = not intervals_disjoint(l3.mean_eff, l3.eff_ci95, l5.mean_eff, l5.eff_ci95)
    report(overlap, "rollout-length saturation",
           f"length 3: {l3.mean_eff:.3f}+-{l3.eff_ci95:.3f}, "
           f"length 5: {l5.mean_eff:.3f}+-{l5.eff_ci95:.3f} (CIs must overlap)")


def test_c07_single_rollout_is_uniform_random():
    world = make_world(width=25, height=25,
                       grass_cells=[(12, 13), (13, 12), (11, 12)],
                       agents=[(Species.SHEEP, 12.4, 12.6, 30.0, 10.0),
                               (Species.WOLF, 14.0, 12.0, 200.0, 30.0)])
    params = CognitionParams(1, 3)
    mp = ModelParams()
    snap = observe(world, world.agents[0], params.vision_radius)
    tallies = [0, 0, 0]
    n = 100_000
    for seed in range(n):
        tallies[int(decide(snap, mp, params, seed).chosen)] += 1
    chi2, p_value = stats.chisquare(tallies)
    report(p_value > 0.01, "single-rollout uniformity",
           f"choice counts {tallies} over {n} decisions, chi2={chi2:.2f}, "
           f"p={p_value:.3f} (need > 0.01)")


def test_c08_decision_oracle_agreement():
    from wolfsheep.rng import Stream

    fixture_stream = Stream(777, 0, 0, 0)
    checked = 0
    for case in range(110):
        params = ModelParams(
            sheep=SpeciesParams(1 + fixture_stream.randint(20), 4.0, 0.04),
            wolves=SpeciesParams(fixture_stream.randint(8), 20.0, 0.05),
            width=23, height=23,
            initial_grass_fraction=fixture_stream.uniform(0.05, 0.95),
        )
        world = init_world(params, seed=5000 + case)
        world.tick = fixture_stream.randint(30)
        ego = world.agents[fixture_stream.randint(len(world.agents))]
        cparams = CognitionParams(1 + fixture_stream.randint(15),
                                  fixture_stream.randint(5),
                                  vision_radius=4.0)
        seed = 6000 + case
        snap = observe(world, ego, cparams.vision_radius)
        decision = decide(snap, params, cparams, seed)
        oracle_chosen, oracle_best, oracle_counts, _ = replay_decide(
            snap, params, cparams, seed)
        live, arrays = fastcog.roster_arrays(world)
        ego_idx = next(i for i, a in enumerate(live) if a.id == ego.id)
        kchosen, kcounts, _ksums = fastcog.decide_batch(
            world, arrays, np.array([ego_idx], np.int64), params,
            {ego.species: cparams}, seed, snap.tick)
        assert int(decision.chosen) == oracle_chosen == int(kchosen[0])
        assert [int(a) for a in decision.best_actions] == oracle_best
        assert decision.counts == oracle_counts == tuple(kcounts[0])
        checked += 1
    report(checked >= 100, "decision oracle",
           f"{checked} frozen snapshots: planner, compiled planner, and "
           f"replay oracle agree exactly")


def test_c09_byte_identical_outputs_at_any_thread_count(tmp_path):
    from wolfsheep.cli import main

    cfg = tmp_path / "d.cfg"
    cfg.write_text(
        "[world]\nwidth = 25\nheight = 25\n"
        "[sheep]\ncount = 20\n[wolves]\ncount = 8\n"
        "[sheep.cognition]\nenabled = true\nn_rollouts = 6\nrollout_length = 3\n"
        "[wolves.cognition]\nenabled = true\nn_rollouts = 4\nrollout_length = 2\n"
        "[run]\nticks = 40\nwarmup = 0\nseed = 12\n")
    outs = []
    for threads in (1, 2):
        out = tmp_path / f"run_t{threads}"
        assert main(["run", str(cfg), "--out", str(out), "--threads", str(threads)]) == 0
        outs.append((out / "ticks.csv").read_bytes())
    run_identical = outs[0] == outs[1]

    sweep_cfg = tmp_path / "s.cfg"
    sweep_cfg.write_text(
        "[world]\nwidth = 25\nheight = 25\n"
        "[sheep]\ncount = 20\n[wolves]\ncount = 8\n"
        "[sweep]\nspecies = sheep\nrollouts = 1,4\nlengths = 2\nreps = 2\n"
        "ticks = 15\nwarmup = 0\nbase_seed = 3\n")
    aggs = []
    for threads in (1, 2):
        out = tmp_path / f"sweep_t{threads}"
        assert main(["sweep", str(sweep_cfg), "--out", str(out),
                     "--threads", str(threads)]) == 0
        aggs.append((out / "aggregate.csv").read_bytes())
    sweep_identical = aggs[0] == aggs[1]
    report(run_identical and sweep_identical, "determinism",
           f"run CSVs identical={run_identical}, sweep aggregates "
           f"identical={sweep_identical} across thread counts")


def test_c10_invariant_property_suites(baseline_runs):
    """Named module invariants, exercised compactly in one bundle."""
    summaries, _ = baseline_runs

    # population persistence bands (both species random, default parameters)
    survived = sum(1 for s in summaries if s.extinction_tick is None)
    wolf_means = [s.mean_wolf_pop for s in summaries if s.mean_wolf_pop is not None]
    sheep_means = [s.mean_sheep_pop for s in summaries if s.mean_sheep_pop is not None]
    persistence = (survived >= 18
                   and 30 <= np.mean(wolf_means) <= 150
                   and 80 <= np.mean(sheep_means) <= 300)

    # conservation identities on a planning run
    config = ExperimentConfig(
        model=ModelParams(sheep=SpeciesParams(30, 4.0, 0.04),
                          wolves=SpeciesParams(12, 20.0, 0.05),
                          width=25, height=25),
        sheep_cognition=CognitionParams(5, 2), ticks=60, warmup=0)
    result = run_experiment(config, seed=404)
    conservation = all(
        r.sheep_count == r.start_sheep - r.sheep_eaten - r.sheep_starved + r.sheep_born
        and r.wolf_count == r.start_wolves - r.wolf_starved + r.wolf_born
        for r in result.reports)

    # efficiency is scale-free: doubled area and populations, same expectation
    small = [run_experiment(ExperimentConfig(ticks=400, warmup=0), s).summary()
             for s in range(41, 47)]
    big_model = ModelParams(sheep=SpeciesParams(200, 4.0, 0.04),
                            wolves=SpeciesParams(100, 20.0, 0.05),
                            width=72, height=72)
    big = [run_experiment(ExperimentConfig(model=big_model, ticks=400, warmup=0), s).summary()
           for s in range(41, 47)]
    small_mean, small_ci = mean_ci95([s.mean_sheep_eff for s in small])
    big_mean, big_ci = mean_ci95([s.mean_sheep_eff for s in big])
    scale_free = not intervals_disjoint(small_mean, small_ci, big_mean, big_ci)

    ok = persistence and conservation and scale_free
    report(ok, "invariant suites",
           f"persistence {survived}/20 runs, wolf mean {np.mean(wolf_means):.0f}, "
           f"sheep mean {np.mean(sheep_means):.0f}; conservation={conservation}; "
           f"scale-free sheep eff {small_mean:.3f}+-{small_ci:.3f} vs "
           f"{big_mean:.3f}+-{big_ci:.3f} overlap={scale_free} "
           f"(discounting/isolation/Bernoulli/argmax-scale covered in module tests)")


def test_c11_performance_both_species_planning():
    cog = CognitionParams(20, 3)
    config = ExperimentConfig(sheep_cognition=cog, wolf_cognition=cog, ticks=TICKS)
    fastcog.warmup()
    start = time.monotonic()
    result = run_experiment(config, seed=2025, threads=WORKERS)
    elapsed = time.monotonic() - start
    report(elapsed < 60, "performance",
           f"2000-tick run, both species 20 rollouts x length 3: {elapsed:.1f}s "
           f"over {len(result.reports)} ticks (need < 60 s)")
