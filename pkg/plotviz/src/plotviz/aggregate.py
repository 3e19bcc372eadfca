"""Reading sweep aggregate CSVs.

The expected schema is the wolfsheep sweep output: one row per grid cell with
columns species, n_rollouts, rollout_length, reps, mean_eff, eff_ci95,
mean_sheep_pop, sheep_pop_ci95, mean_wolf_pop, wolf_pop_ci95, extinctions.
Empty numeric fields parse as None (undefined values are legal in the
interface).
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

REQUIRED_COLUMNS = [
    "species", "n_rollouts", "rollout_length", "reps",
    "mean_eff", "eff_ci95", "mean_sheep_pop", "sheep_pop_ci95",
    "mean_wolf_pop", "wolf_pop_ci95", "extinctions",
]


class SchemaError(ValueError):
    """The file is not a sweep aggregate; message names the offending columns."""


@dataclass(frozen=True)
class CellRow:
    species: str
    n_rollouts: int
    rollout_length: int
    reps: int
    mean_eff: float | None
    eff_ci95: float | None
    mean_sheep_pop: float | None
    sheep_pop_ci95: float | None
    mean_wolf_pop: float | None
    wolf_pop_ci95: float | None
    extinctions: int


def _opt_float(raw: str) -> float | None:
    return None if raw == "" else float(raw)


def read_aggregate(path: Path | str) -> list[CellRow]:
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        missing = [c for c in REQUIRED_COLUMNS if c not in fields]
        if missing:
            raise SchemaError(
                f"{path}: missing required columns {missing}; found {fields}")
        rows = []
        for record in reader:
            try:
                rows.append(CellRow(
                    species=record["species"],
                    n_rollouts=int(record["n_rollouts"]),
                    rollout_length=int(record["rollout_length"]),
                    reps=int(record["reps"]),
                    mean_eff=_opt_float(record["mean_eff"]),
                    eff_ci95=_opt_float(record["eff_ci95"]),
                    mean_sheep_pop=_opt_float(record["mean_sheep_pop"]),
                    sheep_pop_ci95=_opt_float(record["sheep_pop_ci95"]),
                    mean_wolf_pop=_opt_float(record["mean_wolf_pop"]),
                    wolf_pop_ci95=_opt_float(record["wolf_pop_ci95"]),
                    extinctions=int(record["extinctions"]),
                ))
            except ValueError as exc:
                raise SchemaError(f"{path}: bad row {record}: {exc}") from None
    return rows
