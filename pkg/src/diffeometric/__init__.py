"""Weak Riemannian metrics on diffeological spaces given by generating plots."""
from .constructions import (ConstructionError, GlueSpec, WarpSpec, adjunction, embedded_space,
                            euclidean, m_space, plus_space, point_space, product, subspace,
                            sum_space, warped_product, y_space)
from .core import ChartDomain, ChartMap, DiffeoSpace, GlueRecord, Plot, Point, SmoothMap, TangentDouble
from .distance import SearchConfig, path_length, pseudodistance_upper, transition_graph
from .mapping import LoopSpace, WedgeLoopSpace, concatenate, loop_space, section_s
from .metric import WeakMetric, definiteness_check, isometry_check, metric_eval, pullback

__version__ = "0.1.0"

__all__ = [
    "ChartDomain",
    "ChartMap",
    "ConstructionError",
    "DiffeoSpace",
    "GlueRecord",
    "GlueSpec",
    "LoopSpace",
    "Plot",
    "Point",
    "SearchConfig",
    "SmoothMap",
    "TangentDouble",
    "WarpSpec",
    "WeakMetric",
    "WedgeLoopSpace",
    "adjunction",
    "concatenate",
    "definiteness_check",
    "embedded_space",
    "euclidean",
    "isometry_check",
    "loop_space",
    "m_space",
    "metric_eval",
    "path_length",
    "plus_space",
    "point_space",
    "product",
    "pseudodistance_upper",
    "pullback",
    "section_s",
    "subspace",
    "sum_space",
    "transition_graph",
    "warped_product",
    "y_space",
]
