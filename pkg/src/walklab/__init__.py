"""Exact random-walk quantities on weighted graphs and numerical checks of
exit-time and heat-kernel lower bounds."""

from .generators import generate
from .graph import (
    InteriorMargin,
    VertexSet,
    WeightedGraph,
    ball,
    distance,
    load_graph,
    loads_graph,
    metric_sets,
    p0_check,
    save_graph,
    shortest_path_union,
    sphere,
    volume,
)

__version__ = "0.1.0"
