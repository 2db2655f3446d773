"""String-substitution multiway systems.

A multiway graph is built breadth first: every node of layer ``d`` is rewritten
by every rule at every match position, and the results form layer ``d + 1``.
Node identity is ``(canonical string, depth)``; the same word reached at two
different depths gives two nodes.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .strcore import CANON_MODES, as_chars, canonicalize, is_leibnizian, join_symbols, variety

__all__ = [
    "RewriteRule",
    "RewriteEvent",
    "Node",
    "MultiwayGraph",
    "MATCH_MODES",
    "parse_rules",
    "find_matches",
    "apply_rule",
    "build_multiway",
    "physical_subgraph",
    "graph_from_layers",
]

log = logging.getLogger(__name__)

MATCH_MODES = ("linear", "cyclic")


@dataclass(frozen=True)
class RewriteRule:
    lhs: Tuple[str, ...]
    rhs: Tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "lhs", tuple(self.lhs))
        object.__setattr__(self, "rhs", tuple(self.rhs))
        if not self.lhs or not self.rhs:
            raise ValueError("both sides of a rewrite rule must be non-empty")

    @classmethod
    def parse(cls, text: str) -> "RewriteRule":
        """Parse ``"LHS->RHS"``."""
        if "->" not in text:
            raise ValueError(f"rule {text!r} is not of the form LHS->RHS")
        lhs, rhs = (part.strip() for part in text.split("->", 1))
        return cls(tuple(lhs), tuple(rhs))

    def __str__(self):
        return f"{join_symbols(self.lhs)}->{join_symbols(self.rhs)}"


def parse_rules(specs) -> List[RewriteRule]:
    """Accept rule objects, ``"A->B"`` strings, or comma-separated lists of them."""
    if isinstance(specs, (str, RewriteRule)):
        specs = [specs]
    rules = []
    for spec in specs:
        if isinstance(spec, RewriteRule):
            rules.append(spec)
            continue
        for chunk in spec.split(","):
            if chunk.strip():
                rules.append(RewriteRule.parse(chunk))
    return rules


@dataclass(frozen=True)
class RewriteEvent:
    source: int
    target: int
    rule_index: int
    position: int


@dataclass(frozen=True)
class Node:
    id: int
    depth: int
    string: Tuple[str, ...]
    variety: Fraction
    leibnizian: bool

    @property
    def label(self) -> str:
        return join_symbols(self.string)


@dataclass
class MultiwayGraph:
    layers: List[List[Node]]
    events: List[RewriteEvent]
    root: Optional[int] = 0
    rules: List[RewriteRule] = field(default_factory=list)
    options: Dict = field(default_factory=dict)
    truncated: bool = False

    def __post_init__(self):
        self._index = {node.id: node for layer in self.layers for node in layer}

    def node(self, node_id: int) -> Node:
        return self._index[node_id]

    def __contains__(self, node_id):
        return node_id in self._index

    @property
    def nodes(self) -> List[Node]:
        return [node for layer in self.layers for node in layer]

    @property
    def depth(self) -> int:
        """Index of the last non-empty layer."""
        for d in range(len(self.layers) - 1, -1, -1):
            if self.layers[d]:
                return d
        return -1

    def layer_ids(self, d: int) -> List[int]:
        if d >= len(self.layers):
            return []
        return [node.id for node in self.layers[d]]

    def successors(self, node_id: int) -> List[int]:
        """Distinct targets of events leaving ``node_id``, in id order."""
        return sorted({e.target for e in self.events if e.source == node_id})

    def adjacency(self) -> Dict[int, List[int]]:
        adj: Dict[int, set] = {node.id: set() for node in self.nodes}
        for e in self.events:
            adj[e.source].add(e.target)
        return {k: sorted(v) for k, v in adj.items()}

    def find(self, word, depth: Optional[int] = None) -> List[int]:
        """Ids of nodes whose string equals ``word`` (optionally at one depth)."""
        chars = as_chars(word)
        return [n.id for n in self.nodes if n.string == chars and (depth is None or n.depth == depth)]

    @property
    def frontier_empty(self) -> bool:
        """True when expansion stopped because no rule matched anywhere."""
        return bool(self.layers) and not self.layers[-1]


def _check_mode(mode, allowed, what):
    if mode not in allowed:
        raise ValueError(f"unknown {what} {mode!r}; expected one of {allowed}")


def find_matches(s, rule: RewriteRule, mode: str = "linear") -> List[int]:
    """1-based start positions where ``rule.lhs`` occurs in ``s``.

    ``cyclic`` mode lets a match run across the seam between the last and first
    character (the lhs still may not be longer than the word).
    """
    _check_mode(mode, MATCH_MODES, "match mode")
    chars = as_chars(s)
    n, k = len(chars), len(rule.lhs)
    if k > n:
        return []
    if mode == "linear":
        return [p + 1 for p in range(n - k + 1) if chars[p:p + k] == rule.lhs]
    return [p + 1 for p in range(n) if all(chars[(p + t) % n] == rule.lhs[t] for t in range(k))]


def apply_rule(s, rule: RewriteRule, position: int, mode: str = "linear", canon: str = "literal"):
    """Replace the match of ``rule.lhs`` that starts at ``position``.

    A match that wraps the seam is replaced in the rotated frame that starts at
    the match and the result is rotated back by ``position - 1`` places, so
    length-preserving rules keep every untouched symbol where it was.
    """
    chars = as_chars(s)
    if position not in find_matches(chars, rule, mode):
        raise ValueError(f"rule {rule} does not match {join_symbols(chars)!r} at position {position}")
    p = position - 1
    k = len(rule.lhs)
    if p + k <= len(chars):
        out = chars[:p] + rule.rhs + chars[p + k:]
    else:
        rotated = chars[p:] + chars[:p]
        out = rule.rhs + rotated[k:]
        shift = p % len(out)
        out = out[len(out) - shift:] + out[:len(out) - shift]
    out = canonicalize(out, canon)
    return join_symbols(out) if isinstance(s, str) else out


def _make_node(node_id, depth, chars) -> Node:
    return Node(node_id, depth, chars, variety(chars), is_leibnizian(chars))


def build_multiway(
    root,
    rules,
    depth: Optional[int] = None,
    *,
    match_mode: str = "linear",
    canon_mode: str = "literal",
    max_width: int = 10_000,
    max_nodes: int = 100_000,
) -> MultiwayGraph:
    """Breadth-first multiway expansion from ``root``.

    ``root`` may also be a list of words, in which case they all sit in layer 0
    and the graph has no single root (``g.root is None``).
    ``depth=None`` expands until no rule applies; the caps on layer width and
    total node count then act as the only stop and set ``truncated``.  Every
    ``(parent, rule, position)`` application is recorded as an event, including
    those that land on a word already present in the next layer.
    """
    _check_mode(match_mode, MATCH_MODES, "match mode")
    _check_mode(canon_mode, CANON_MODES, "canonicalization mode")
    if depth is not None and depth < 0:
        raise ValueError("depth must be non-negative")
    rules = parse_rules(rules) if rules else []
    if isinstance(root, (list, set)):
        starts = sorted({canonicalize(as_chars(w), canon_mode) for w in root})
    else:
        starts = [canonicalize(as_chars(root), canon_mode)]
    layers = [[_make_node(i, 0, w) for i, w in enumerate(starts)]]
    events: List[RewriteEvent] = []
    next_id = len(starts)
    truncated = False
    d = 0
    while depth is None or d < depth:
        pending = []
        for parent in layers[d]:
            for ri, rule in enumerate(rules):
                for pos in find_matches(parent.string, rule, match_mode):
                    child = apply_rule(parent.string, rule, pos, match_mode, canon_mode)
                    pending.append((parent.id, ri, pos, child))
        words = sorted({child for *_, child in pending})
        if len(words) > max_width or next_id + len(words) > max_nodes:
            log.warning("multiway expansion truncated at depth %d (%d new words)", d + 1, len(words))
            truncated = True
            break
        ids = {}
        layer = []
        for w in words:
            ids[w] = next_id
            layer.append(_make_node(next_id, d + 1, w))
            next_id += 1
        for src, ri, pos, child in sorted(pending, key=lambda t: (t[0], t[1], t[2])):
            events.append(RewriteEvent(src, ids[child], ri, pos))
        layers.append(layer)
        d += 1
        if not layer:
            break
    options = {
        "match_mode": match_mode,
        "canon_mode": canon_mode,
        "max_depth": depth,
        "max_width": max_width,
        "max_nodes": max_nodes,
    }
    root_id = 0 if len(starts) == 1 else None
    return MultiwayGraph(layers, events, root_id, list(rules), options, truncated)


def physical_subgraph(g: MultiwayGraph) -> MultiwayGraph:
    """Restrict ``g`` to Leibnizian nodes and the events between them.

    Node ids are preserved so paths can be compared across the two graphs.
    Layers may become empty; the layer count is unchanged.
    """
    layers = [[n for n in layer if n.leibnizian] for layer in g.layers]
    keep = {n.id for layer in layers for n in layer}
    events = [e for e in g.events if e.source in keep and e.target in keep]
    root = g.root if g.root in keep else None
    options = dict(g.options, physical=True)
    return MultiwayGraph(layers, events, root, list(g.rules), options, g.truncated)


def graph_from_layers(
    layers: Sequence[Sequence],
    edges: Iterable[Tuple[Tuple[int, int], Tuple[int, int]]],
    varieties: Optional[Sequence[Sequence]] = None,
) -> MultiwayGraph:
    """Assemble a graph by hand from an explicit connectivity pattern.

    ``layers[d]`` lists the words of layer ``d``.  ``edges`` are pairs
    ``((d, i), (d + 1, j))`` of 0-based (layer, index) coordinates.  When
    ``varieties`` is given the nodes carry those values and are all marked
    Leibnizian, which lets a connectivity diagram be studied without first
    finding concrete words that realise it.
    """
    built = []
    coord = {}
    next_id = 0
    for d, words in enumerate(layers):
        row = []
        for i, w in enumerate(words):
            chars = as_chars(w)
            if varieties is None:
                node = _make_node(next_id, d, chars)
            else:
                node = Node(next_id, d, chars, Fraction(varieties[d][i]), True)
            coord[(d, i)] = next_id
            row.append(node)
            next_id += 1
        built.append(row)
    events = []
    for (d0, i0), (d1, i1) in edges:
        if d1 != d0 + 1:
            raise ValueError("edges must join consecutive layers")
        events.append(RewriteEvent(coord[(d0, i0)], coord[(d1, i1)], -1, 0))
    events.sort(key=lambda e: (e.source, e.target))
    root = coord.get((0, 0)) if len(layers[0]) == 1 else None
    return MultiwayGraph(built, events, root, [], {"synthetic": True}, False)


def with_options(g: MultiwayGraph, **options) -> MultiwayGraph:
    return replace(g, options=dict(g.options, **options))
