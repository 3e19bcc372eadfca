"""Figure generation for sweep aggregates and planning traces."""

from .aggregate import CellRow, SchemaError, read_aggregate
from .plots import (
    build_efficiency_figure,
    build_population_figure,
    build_rollout_tree_figure,
    plot_efficiency,
    plot_population,
    plot_rollout_tree,
)
from .traces import TraceError, TraceView, read_trace

__version__ = "0.1.0"
