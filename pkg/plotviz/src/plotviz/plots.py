"""Figure builders: efficiency curves, population curves, rollout trees.

All styling is pinned in STYLE so identical inputs render identical bytes;
savefig strips the software metadata tag for the same reason.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .aggregate import CellRow, SchemaError, read_aggregate
from .traces import TraceView, read_trace

STYLE = {
    "figsize": (7.0, 4.5),
    "dpi": 120,
    "band_alpha": 0.2,
    "length_colors": plt.get_cmap("tab10").colors,
    "cell_colors": {0: (0.82, 0.71, 0.55), 1: (0.33, 0.63, 0.32),
                    2: (0.93, 0.93, 0.93)},
    "tree_panel": 1.1,
}

ACTION_SHORT = {"turn_left": "left", "straight": "straight", "turn_right": "right"}


def _save(fig, out_path: Path | str) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(out_path, metadata={"Software": None})
    plt.close(fig)
    return out_path


def _series_by_length(rows: list[CellRow]):
    lengths = sorted({r.rollout_length for r in rows})
    for idx, length in enumerate(lengths):
        series = sorted((r for r in rows if r.rollout_length == length),
                        key=lambda r: r.n_rollouts)
        color = STYLE["length_colors"][idx % len(STYLE["length_colors"])]
        yield length, color, series


def _line_with_band(ax, series, color, label, value, ci):
    xs = [r.n_rollouts for r in series]
    ys = [value(r) for r in series]
    cis = [ci(r) if ci(r) is not None else 0.0 for r in series]
    keep = [i for i, y in enumerate(ys) if y is not None]
    xs = [xs[i] for i in keep]
    ys = [ys[i] for i in keep]
    cis = [cis[i] for i in keep]
    if not xs:
        return
    ax.plot(xs, ys, marker="o", markersize=3, color=color, label=label)
    lo = [y - c for y, c in zip(ys, cis)]
    hi = [y + c for y, c in zip(ys, cis)]
    ax.fill_between(xs, lo, hi, color=color, alpha=STYLE["band_alpha"],
                    linewidth=0)


def build_efficiency_figure(rows: list[CellRow], species: str):
    subset = [r for r in rows if r.species == species]
    if not subset:
        present = sorted({r.species for r in rows})
        raise SchemaError(f"no rows for species {species!r}; file has {present}")
    fig, ax = plt.subplots(figsize=STYLE["figsize"], dpi=STYLE["dpi"])
    for length, color, series in _series_by_length(subset):
        _line_with_band(ax, series, color, f"length {length}",
                        lambda r: r.mean_eff, lambda r: r.eff_ci95)
    ax.set_xlabel("rollouts per decision")
    food = "grass-eating" if species == "sheep" else "hunting"
    ax.set_ylabel(f"mean {food} efficiency (1 = random)")
    ax.set_title(f"{species} efficiency vs rollout budget")
    ax.legend(title="rollout length", fontsize=8)
    ax.grid(True, alpha=0.3)
    return fig


def build_population_figure(rows: list[CellRow], species: str | None = None):
    present = sorted({r.species for r in rows})
    if species is None:
        if len(present) != 1:
            raise SchemaError(
                f"file mixes species {present}; pass an explicit species")
        species = present[0]
    subset = [r for r in rows if r.species == species]
    if not subset:
        raise SchemaError(f"no rows for species {species!r}; file has {present}")
    fig, ax = plt.subplots(figsize=STYLE["figsize"], dpi=STYLE["dpi"])
    for length, color, series in _series_by_length(subset):
        _line_with_band(ax, series, color, f"length {length}",
                        lambda r: r.mean_sheep_pop, lambda r: r.sheep_pop_ci95)
    ax.set_xlabel(f"rollouts per {species[:-1] if species.endswith('s') else species} decision")
    ax.set_ylabel("mean sheep population (from warm-up tick)")
    ax.set_title(f"sheep population vs {species} rollout budget")
    ax.legend(title="rollout length", fontsize=8)
    ax.grid(True, alpha=0.3)
    return fig


def _draw_state(ax, state: dict, side: int):
    cells = np.asarray(state["cells"], dtype=int).reshape(side, side)
    image = np.zeros((side, side, 3))
    for code, color in STYLE["cell_colors"].items():
        image[cells.T == code] = color  # transpose: cells are (col, row)
    ax.imshow(image, origin="lower", extent=(0, side, 0, side),
              interpolation="nearest")
    for idx, (sp, x, y, _h, alive) in enumerate(state["agents"]):
        if not alive:
            continue
        if idx == 0:
            ax.plot([x], [y], marker="o", markersize=5,
                    markerfacecolor="none", markeredgecolor="tab:blue",
                    markeredgewidth=1.4)
        if sp in (0, "sheep"):
            ax.plot([x], [y], marker="o", markersize=2.6, color="white",
                    markeredgecolor="black", markeredgewidth=0.4)
        else:
            ax.plot([x], [y], marker="^", markersize=3.2, color="black")
    ax.set_xticks([])
    ax.set_yticks([])


def build_rollout_tree_figure(trace: TraceView):
    n = len(trace.rollouts)
    depth = max(len(r.states) for r in trace.rollouts)
    rows = max(depth, 1)
    panel = STYLE["tree_panel"]
    fig, axes = plt.subplots(rows, n, dpi=STYLE["dpi"],
                             figsize=(panel * n, panel * rows + 0.6),
                             squeeze=False)
    for col, rollout in enumerate(trace.rollouts):
        marker = " *" if rollout.first_action == trace.chosen else ""
        axes[0][col].set_title(
            f"{ACTION_SHORT.get(rollout.first_action, rollout.first_action)}{marker}\n"
            f"G={rollout.discounted_return:.2f}"
            + (" died" if rollout.died else ""),
            fontsize=7)
        for row in range(rows):
            ax = axes[row][col]
            if row < len(rollout.states):
                _draw_state(ax, rollout.states[row], trace.grid_side)
            else:
                ax.axis("off")
    fig.suptitle(
        f"rollouts of {trace.species} {trace.agent_id} at tick {trace.tick} "
        f"(chose {ACTION_SHORT.get(trace.chosen, trace.chosen)}; ticks run top to bottom)",
        fontsize=9)
    return fig


def plot_efficiency(csv_path: Path | str, out_path: Path | str, species: str) -> Path:
    return _save(build_efficiency_figure(read_aggregate(csv_path), species), out_path)


def plot_population(csv_path: Path | str, out_path: Path | str,
                    species: str | None = None) -> Path:
    return _save(build_population_figure(read_aggregate(csv_path), species), out_path)


def plot_rollout_tree(trace_path: Path | str, out_path: Path | str) -> Path:
    return _save(build_rollout_tree_figure(read_trace(trace_path)), out_path)
