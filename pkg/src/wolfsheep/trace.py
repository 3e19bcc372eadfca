"""Serialization of planning traces.

A trace captures one agent's full planning episode: the observation, every
rollout (first action, per-tick rewards, discounted return, death flag, and
per-tick world states), and the resulting decision.  The format is JSON with
the layout below; `parse_trace(serialize_trace(...))` returns equal objects.

    {
      "format": "rollout-trace/1",
      "seed": int, "agent_id": int, "tick": int,
      "species": "sheep" | "wolf",
      "params": {"n_rollouts": int, "rollout_length": int,
                  "vision_radius": float, "discount": float,
                  "death_reward": float},
      "grid_side": int,
      "snapshot": {"x": float, "y": float, "heading": float, "energy": float,
                    "neighbors": [[species, dx, dy, heading], ...],
                    "grass_live": [[dc, dr], ...], "observed": [[dc, dr], ...],
                    "density": float},
      "decision": {"chosen": action, "counts": [int, int, int],
                    "means": [float | null, ...], "best": [action, ...]},
      "rollouts": [{"first_action": action, "rewards": [float, ...],
                     "discounted_return": float, "died": bool,
                     "states": [{"ego_energy": float,
                                  "agents": [[species, x, y, heading, alive], ...],
                                  "cells": [int, ...]}, ...]}, ...]
    }

Actions are the strings "turn_left" / "straight" / "turn_right"; species are
"sheep" / "wolf"; cell codes are 0 dead, 1 live, 2 unobserved.  Cells flatten
a square grid in (col, row) order, `cells[col * grid_side + row]`.  Agent
entries keep roster order with the ego always first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .cognition import (
    CognitionParams,
    CogState,
    Decision,
    RolloutRecord,
    Snapshot,
    grid_half_width,
)
from .engine import Species
from .model import Action

FORMAT = "rollout-trace/1"

_ACTION_NAMES = {Action.TURN_LEFT: "turn_left", Action.STRAIGHT: "straight",
                 Action.TURN_RIGHT: "turn_right"}
_ACTIONS_BY_NAME = {v: k for k, v in _ACTION_NAMES.items()}
_SPECIES_NAMES = {Species.SHEEP: "sheep", Species.WOLF: "wolf"}
_SPECIES_BY_NAME = {v: k for k, v in _SPECIES_NAMES.items()}


@dataclass(frozen=True)
class Trace:
    """A decision plus everything needed to re-render how it was reached."""

    seed: int
    snapshot: Snapshot
    params: CognitionParams
    decision: Decision

    def __post_init__(self):
        if self.decision.records is None:
            raise ValueError("trace requires a decision with retained records")


def _state_dict(state: CogState) -> dict:
    return {
        "ego_energy": state.ego_energy,
        "agents": [[sp, x, y, h, alive] for (sp, x, y, h, alive) in state.agents],
        "cells": list(state.cells),
    }


def _state_from(payload: dict) -> CogState:
    return CogState(
        ego_energy=payload["ego_energy"],
        agents=tuple((int(sp), x, y, h, bool(alive))
                     for (sp, x, y, h, alive) in payload["agents"]),
        cells=tuple(int(v) for v in payload["cells"]),
    )


def serialize_trace(trace: Trace) -> str:
    snap = trace.snapshot
    decision = trace.decision
    payload = {
        "format": FORMAT,
        "seed": trace.seed,
        "agent_id": snap.agent_id,
        "tick": snap.tick,
        "species": _SPECIES_NAMES[snap.species],
        "params": {
            "n_rollouts": trace.params.n_rollouts,
            "rollout_length": trace.params.rollout_length,
            "vision_radius": trace.params.vision_radius,
            "discount": trace.params.discount,
            "death_reward": trace.params.death_reward,
        },
        "grid_side": 2 * grid_half_width(trace.params.vision_radius,
                                         trace.params.rollout_length) + 1,
        "snapshot": {
            "x": snap.x,
            "y": snap.y,
            "heading": snap.heading,
            "energy": snap.energy,
            "neighbors": [[_SPECIES_NAMES[sp], dx, dy, h]
                          for (sp, dx, dy, h) in snap.neighbors],
            "grass_live": sorted(list(c) for c in snap.grass_live),
            "observed": sorted(list(c) for c in snap.observed),
            "density": snap.density,
        },
        "decision": {
            "chosen": _ACTION_NAMES[decision.chosen],
            "counts": list(decision.counts),
            "means": list(decision.means),
            "best": [_ACTION_NAMES[a] for a in decision.best_actions],
        },
        "rollouts": [
            {
                "first_action": _ACTION_NAMES[rec.first_action],
                "rewards": list(rec.rewards),
                "discounted_return": rec.discounted_return,
                "died": rec.terminated_by_death,
                "states": [_state_dict(s) for s in (rec.states or ())],
            }
            for rec in decision.records
        ],
    }
    return json.dumps(payload, indent=1, sort_keys=True) + "\n"


def parse_trace(text: str) -> Trace:
    payload = json.loads(text)
    if payload.get("format") != FORMAT:
        raise ValueError(f"unsupported trace format: {payload.get('format')!r}")
    params = CognitionParams(**payload["params"])
    snap_p = payload["snapshot"]
    snapshot = Snapshot(
        agent_id=payload["agent_id"],
        species=_SPECIES_BY_NAME[payload["species"]],
        x=snap_p["x"],
        y=snap_p["y"],
        heading=snap_p["heading"],
        energy=snap_p["energy"],
        tick=payload["tick"],
        neighbors=tuple((_SPECIES_BY_NAME[sp], dx, dy, h)
                        for (sp, dx, dy, h) in snap_p["neighbors"]),
        grass_live=frozenset((c, r) for (c, r) in snap_p["grass_live"]),
        observed=frozenset((c, r) for (c, r) in snap_p["observed"]),
        density=snap_p["density"],
    )
    dec_p = payload["decision"]
    records = tuple(
        RolloutRecord(
            first_action=_ACTIONS_BY_NAME[r["first_action"]],
            rewards=tuple(r["rewards"]),
            discounted_return=r["discounted_return"],
            terminated_by_death=r["died"],
            states=tuple(_state_from(s) for s in r["states"]),
        )
        for r in payload["rollouts"]
    )
    decision = Decision(
        chosen=_ACTIONS_BY_NAME[dec_p["chosen"]],
        counts=tuple(dec_p["counts"]),
        means=tuple(dec_p["means"]),
        best_actions=tuple(_ACTIONS_BY_NAME[a] for a in dec_p["best"]),
        records=records,
    )
    return Trace(seed=payload["seed"], snapshot=snapshot, params=params,
                 decision=decision)


def write_trace(path: Path, trace: Trace) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(serialize_trace(trace), encoding="utf-8")


def read_trace(path: Path) -> Trace:
    return parse_trace(Path(path).read_text(encoding="utf-8"))
