"""Arrowhead placement for straight-line digraph drawings."""

from .geom import Circle, Point, Segment
from .model import ArrowPosition, CandidateSet, Digraph, Edge, Layout, LayoutError, Placement

__version__ = "0.1.0"

__all__ = [
    "ArrowPosition",
    "CandidateSet",
    "Circle",
    "Digraph",
    "Edge",
    "Layout",
    "LayoutError",
    "Placement",
    "Point",
    "Segment",
]
