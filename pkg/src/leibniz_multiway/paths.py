"""Paths through a multiway graph and the quantities summed along them.

A path is a tuple of node ids in consecutive layers.  Parallel events between
the same two nodes do not produce distinct paths.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Sequence, Tuple

from .engine import MultiwayGraph

__all__ = [
    "Path",
    "PathLimitError",
    "validate_path",
    "action",
    "score",
    "enumerate_paths",
    "enumerate_physical_paths",
    "maximal_variety_paths",
    "render_path",
]

Path = Tuple[int, ...]

DEFAULT_PATH_LIMIT = 1_000_000


class PathLimitError(RuntimeError):
    """Raised when an enumeration would exceed its path-count cap."""


def validate_path(p: Sequence[int], g: MultiwayGraph) -> Path:
    p = tuple(p)
    if not p:
        raise ValueError("a path needs at least one node")
    for node_id in p:
        if node_id not in g:
            raise ValueError(f"node {node_id} is not in the graph")
    adj = g.adjacency()
    for a, b in zip(p, p[1:]):
        if b not in adj[a]:
            raise ValueError(f"no event joins {a} -> {b}")
        if g.node(b).depth != g.node(a).depth + 1:
            raise ValueError(f"{a} -> {b} does not advance exactly one layer")
    return p


def action(p: Sequence[int], g: MultiwayGraph) -> Fraction:
    """Negated variety summed over every node except the last.

    A single-node path has action 0.
    """
    p = validate_path(p, g)
    return -sum((g.node(i).variety for i in p[:-1]), Fraction(0))


def score(p: Sequence[int], g: MultiwayGraph) -> Fraction:
    """Variety summed over every node of the path, the last one included."""
    p = validate_path(p, g)
    return sum((g.node(i).variety for i in p), Fraction(0))


def enumerate_paths(
    g: MultiwayGraph,
    from_layer: int,
    to_layer: int,
    physical: bool = False,
    limit: int = DEFAULT_PATH_LIMIT,
) -> List[Path]:
    """All paths from a node of ``from_layer`` to a node of ``to_layer``.

    Order is lexicographic in node ids.  With ``physical=True`` every node on
    the path must be Leibnizian.
    """
    if from_layer > to_layer:
        raise ValueError("from_layer must not exceed to_layer")
    adj = g.adjacency()

    def ok(node_id):
        return g.node(node_id).leibnizian or not physical

    out: List[Path] = []
    stack: List[Tuple[int, Path]] = []
    for start in reversed(g.layer_ids(from_layer)):
        if ok(start):
            stack.append((start, (start,)))
    while stack:
        node_id, path = stack.pop()
        depth = from_layer + len(path) - 1
        if depth == to_layer:
            out.append(path)
            if len(out) > limit:
                raise PathLimitError(f"more than {limit} paths between layers {from_layer} and {to_layer}")
            continue
        for nxt in reversed(adj[node_id]):
            if ok(nxt):
                stack.append((nxt, path + (nxt,)))
    return out


def enumerate_physical_paths(g: MultiwayGraph, from_layer: int, to_layer: int,
                             limit: int = DEFAULT_PATH_LIMIT) -> List[Path]:
    return enumerate_paths(g, from_layer, to_layer, physical=True, limit=limit)


def maximal_variety_paths(g: MultiwayGraph, depth: int, limit: int = DEFAULT_PATH_LIMIT) -> List[Path]:
    """Physical paths from layer 0 to ``depth`` with the largest vertex-variety sum.

    Every maximiser is returned.  Uses a forward dynamic programme over layers,
    keeping all predecessors that attain the best partial score.
    """
    if depth > g.depth:
        raise ValueError(f"depth {depth} exceeds the graph depth {g.depth}")
    best: Dict[int, Fraction] = {}
    preds: Dict[int, List[int]] = {}
    for node_id in g.layer_ids(0):
        node = g.node(node_id)
        if node.leibnizian:
            best[node_id] = node.variety
            preds[node_id] = []
    adj = g.adjacency()
    for d in range(depth):
        for node_id in g.layer_ids(d):
            if node_id not in best:
                continue
            for nxt in adj[node_id]:
                node = g.node(nxt)
                if not node.leibnizian:
                    continue
                cand = best[node_id] + node.variety
                if nxt not in best or cand > best[nxt]:
                    best[nxt] = cand
                    preds[nxt] = [node_id]
                elif cand == best[nxt]:
                    preds[nxt].append(node_id)
    ends = [i for i in g.layer_ids(depth) if i in best]
    if not ends:
        return []
    top = max(best[i] for i in ends)
    out: List[Path] = []

    def unwind(node_id, suffix):
        if not preds[node_id]:
            out.append((node_id,) + suffix)
            if len(out) > limit:
                raise PathLimitError(f"more than {limit} maximal paths")
            return
        for prev in preds[node_id]:
            unwind(prev, (node_id,) + suffix)

    for end in ends:
        if best[end] == top:
            unwind(end, ())
    return sorted(out)


def render_path(p: Sequence[int], g: MultiwayGraph) -> str:
    return " -> ".join(g.node(i).label for i in p)
