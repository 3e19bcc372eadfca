"""Deterministic wolf-sheep-grass simulator with rollout-planning agents."""

from .cognition import (
    CognitionParams,
    CognitiveWorld,
    Decision,
    RolloutRecord,
    Snapshot,
    build_cognitive_world,
    decide,
    explain,
    observe,
    run_rollout,
)
from .engine import (
    Agent,
    Species,
    TickReport,
    WorldState,
    agents_in_radius,
    move_forward,
    patch_at,
    torus_distance,
    two_phase_tick,
)
from .metrics import (
    ExperimentConfig,
    RunResult,
    RunSummary,
    run_experiment,
    sheep_efficiency,
    wolf_efficiency,
)
from .model import (
    Action,
    ModelParams,
    SpeciesParams,
    apply_action,
    base_random_action,
    cull_dead,
    eat_attempt,
    init_world,
    maybe_reproduce,
    regrow_grass,
)
from .simulate import RANDOM, RandomPolicy, RolloutPolicy, step_tick
from .sweep import SweepSpec, run_sweep
from .trace import Trace, parse_trace, read_trace, serialize_trace, write_trace

__version__ = "0.1.0"
