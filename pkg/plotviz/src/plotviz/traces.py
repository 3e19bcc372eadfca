"""Reading planning-trace JSON files (format "rollout-trace/1").

Only the fields the tree plot needs are modeled.  Cell codes: 0 dead grass,
1 live grass, 2 never observed.  Agent tuples are (species, x, y, heading,
alive) with the ego first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

FORMAT = "rollout-trace/1"


class TraceError(ValueError):
    pass


@dataclass(frozen=True)
class RolloutView:
    first_action: str
    discounted_return: float
    died: bool
    states: list  # per tick: {"agents": [[sp, x, y, h, alive], ...], "cells": [...]}


@dataclass(frozen=True)
class TraceView:
    agent_id: int
    tick: int
    species: str
    chosen: str
    grid_side: int
    rollouts: list[RolloutView]


def read_trace(path: Path | str) -> TraceView:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise TraceError(f"{path}: not valid JSON: {exc}") from None
    if payload.get("format") != FORMAT:
        raise TraceError(f"{path}: expected format {FORMAT!r}, "
                         f"got {payload.get('format')!r}")
    try:
        rollouts = [
            RolloutView(
                first_action=r["first_action"],
                discounted_return=r["discounted_return"],
                died=r["died"],
                states=r["states"],
            )
            for r in payload["rollouts"]
        ]
        view = TraceView(
            agent_id=payload["agent_id"],
            tick=payload["tick"],
            species=payload["species"],
            chosen=payload["decision"]["chosen"],
            grid_side=payload["grid_side"],
            rollouts=rollouts,
        )
    except KeyError as exc:
        raise TraceError(f"{path}: missing trace field {exc}") from None
    if not view.rollouts:
        raise TraceError(f"{path}: trace contains no rollouts")
    return view
