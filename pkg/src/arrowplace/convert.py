"""Placeholder for importing drawings from other graph formats.

Only the native layout format is read today.  A future importer would map:

GraphML (yFiles/OGDF flavour)
  ``<node id>``                 -> ``node <int id> x y``; string ids are
                                   numbered in document order
  ``y:Geometry x y w h``        -> node centre ``(x + w/2, -(y + h/2))``;
                                   GraphML's y axis points down
  ``<edge source target>``      -> ``edge <k> <source> <target>`` with k the
                                   running edge index
  bends                         -> rejected; only straight-line drawings apply

DOT (after ``dot -Tdot`` or ``neato -n``)
  ``pos="x,y"`` on nodes        -> node centre, in points
  ``a -> b``                    -> one edge per statement; undirected graphs
                                   rejected
  ``pos="e,..."`` on edges      -> ignored; edges are redrawn straight

Self-loops are dropped in both cases because a layout may not contain them.
"""

from __future__ import annotations

from .formats import LayoutFile

SUPPORTED = ()


class UnsupportedFormat(NotImplementedError):
    pass


def import_layout(path: str, kind: str) -> LayoutFile:
    """Always raises; see the module docstring for the intended mapping."""
    raise UnsupportedFormat(f"importing {kind} drawings ({path}) is not implemented; convert to the layout format")
