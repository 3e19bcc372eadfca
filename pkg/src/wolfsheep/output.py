"""File outputs: per-tick CSV, run summary JSON, sweep aggregate CSV.

All files are UTF-8 with RFC-4180 quoting and deterministic float formatting
(shortest round-trip repr), so identical runs produce identical bytes.
Undefined efficiency values are written as empty fields.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict
from pathlib import Path
from typing import Iterable

TICK_HEADER = ["tick", "sheep", "wolves", "grass", "grass_eaten", "sheep_eaten",
               "sheep_eff", "wolf_eff"]

AGGREGATE_HEADER = ["species", "n_rollouts", "rollout_length", "reps",
                    "mean_eff", "eff_ci95", "mean_sheep_pop", "sheep_pop_ci95",
                    "mean_wolf_pop", "wolf_pop_ci95", "extinctions"]


def _fmt(value: float | None) -> str:
    return "" if value is None else repr(value)


def write_tick_csv(path: Path, result) -> None:
    """Per-tick stream: an initial-state row (tick 0) then one row per tick."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(TICK_HEADER)
        init = result.initial
        writer.writerow([0, init.sheep_count, init.wolf_count, init.grass_count,
                         0, 0, "", ""])
        for report, se, we in zip(result.reports, result.sheep_eff, result.wolf_eff):
            writer.writerow([
                report.tick, report.sheep_count, report.wolf_count,
                report.grass_count, report.grass_eaten, report.sheep_eaten,
                _fmt(se), _fmt(we),
            ])


def write_summary_json(path: Path, result) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {
        "config": asdict(result.config),
        "seed": result.seed,
        "summary": asdict(result.summary()),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_aggregate_csv(path: Path, rows: Iterable) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(AGGREGATE_HEADER)
        for row in rows:
            writer.writerow([
                row.species, row.n_rollouts, row.rollout_length, row.reps,
                _fmt(row.mean_eff), _fmt(row.eff_ci95),
                _fmt(row.mean_sheep_pop), _fmt(row.sheep_pop_ci95),
                _fmt(row.mean_wolf_pop), _fmt(row.wolf_pop_ci95),
                row.extinctions,
            ])


def read_aggregate_csv(path: Path) -> list[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        missing = set(AGGREGATE_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"aggregate CSV missing columns: {sorted(missing)}")
        return list(reader)
