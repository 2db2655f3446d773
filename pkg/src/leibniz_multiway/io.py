"""JSON, DOT and CSV serialisation of graphs, paths and transition matrices.

All JSON is written with sorted keys and a fixed indent so equal inputs give
byte-identical files.
"""
from __future__ import annotations

import csv
import io as _io
import json
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .engine import MultiwayGraph, Node, RewriteEvent, RewriteRule, parse_rules
from .gates import GateMatch
from .paths import action, score

__all__ = [
    "dumps",
    "frac_to_json",
    "frac_from_json",
    "complex_to_json",
    "complex_from_json",
    "graph_to_dict",
    "graph_from_dict",
    "path_to_dict",
    "smatrix_to_dict",
    "match_to_dict",
    "to_dot",
    "to_csv",
]


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def frac_to_json(x) -> Dict[str, int]:
    x = Fraction(x)
    return {"num": x.numerator, "den": x.denominator}


def frac_from_json(d) -> Fraction:
    return Fraction(int(d["num"]), int(d["den"]))


def _num(x: float) -> float:
    # -0.0 would print differently from 0.0
    return float(x) + 0.0


def complex_to_json(z) -> Dict[str, float]:
    z = complex(z)
    return {"re": _num(z.real), "im": _num(z.imag)}


def complex_from_json(d) -> complex:
    return complex(float(d["re"]), float(d["im"]))


def _split_label(label: str):
    return tuple(label.split(" ")) if " " in label else tuple(label)


def graph_to_dict(g: MultiwayGraph, config: Optional[dict] = None) -> dict:
    """Graph in the interchange schema, with provenance fields added."""
    return {
        "options": dict(g.options),
        "rules": [str(r) for r in g.rules],
        "root": g.root,
        "layers": [
            [{"id": n.id, "string": n.label, "variety": frac_to_json(n.variety), "leibnizian": n.leibnizian}
             for n in layer]
            for layer in g.layers
        ],
        "events": [{"src": e.source, "dst": e.target, "rule": e.rule_index, "pos": e.position} for e in g.events],
        "truncated": g.truncated,
        "config": config or {},
        "version": __version__,
    }


_GRAPH_KEYS = ("options", "layers", "events", "truncated")


def graph_from_dict(d: dict) -> MultiwayGraph:
    """Inverse of :func:`graph_to_dict`; raises ``ValueError`` on schema violations."""
    if not isinstance(d, dict):
        raise ValueError("graph document must be a JSON object")
    missing = [k for k in _GRAPH_KEYS if k not in d]
    if missing:
        raise ValueError(f"graph document lacks {', '.join(missing)}")
    layers: List[List[Node]] = []
    seen = set()
    try:
        for depth, layer in enumerate(d["layers"]):
            row = []
            for item in layer:
                nid = int(item["id"])
                if nid in seen:
                    raise ValueError(f"duplicate node id {nid}")
                seen.add(nid)
                row.append(Node(nid, depth, _split_label(item["string"]),
                                frac_from_json(item["variety"]), bool(item["leibnizian"])))
            layers.append(row)
        events = [RewriteEvent(int(e["src"]), int(e["dst"]), int(e["rule"]), int(e["pos"])) for e in d["events"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed graph document: {exc!r}") from exc
    for e in events:
        if e.source not in seen or e.target not in seen:
            raise ValueError(f"event {e.source}->{e.target} refers to an unknown node")
    rules: List[RewriteRule] = parse_rules(d.get("rules") or [])
    return MultiwayGraph(layers, events, d.get("root"), rules, dict(d["options"]), bool(d["truncated"]))


def path_to_dict(p: Sequence[int], g: MultiwayGraph) -> dict:
    return {
        "nodes": list(p),
        "strings": [g.node(i).label for i in p],
        "action": frac_to_json(action(p, g)),
        "score": frac_to_json(score(p, g)),
    }


def match_to_dict(m: GateMatch) -> dict:
    return {
        "gate": m.gate,
        "row_perm": list(m.row_perm),
        "col_perm": list(m.col_perm),
        "global_phase": complex_to_json(m.global_phase),
        "residual": _num(m.residual),
    }


def _complex_matrix(a) -> List[List[dict]]:
    return [[complex_to_json(z) for z in row] for row in np.asarray(a)]


def smatrix_to_dict(in_ids, out_ids, k: float, weights, phases, dense,
                    matches: Iterable[GateMatch] = (), **extra) -> dict:
    """S-matrix document; ``weights`` and ``phases`` may be ``None`` when no factored form exists."""
    doc = {
        "in": [int(i) for i in in_ids],
        "out": [int(j) for j in out_ids],
        "k": float(k),
        "weights": None if weights is None else [[_num(x) for x in row] for row in np.asarray(weights)],
        "phases": None if phases is None else [complex_to_json(z) for z in phases],
        "dense": _complex_matrix(dense),
        "matches": [match_to_dict(m) for m in matches],
        "version": __version__,
    }
    doc.update(extra)
    return doc


def _dot_quote(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(g: MultiwayGraph, highlight: Iterable[Sequence[int]] = ()) -> str:
    """Graphviz source.

    Leibnizian nodes are filled; the Leibnizian nodes and the events between
    them are repeated inside ``cluster_physical``.  Edges on any path in
    ``highlight`` are drawn bold.
    """
    bold = {(a, b) for p in highlight for a, b in zip(p, p[1:])}
    lines = ["digraph multiway {", "  rankdir=TB;", "  node [shape=box, fontname=monospace];"]
    for d, layer in enumerate(g.layers):
        if not layer:
            continue
        ids = " ".join(f"n{n.id}" for n in layer)
        lines.append(f"  {{ rank=same; {ids} }}")
    for n in g.nodes:
        label = _dot_quote(f"{n.label}\\n{n.variety}")
        style = ', style=filled, fillcolor="#f4cccc", color="#cc0000"' if n.leibnizian else ""
        lines.append(f"  n{n.id} [label={label}{style}];")
    phys = {n.id for n in g.nodes if n.leibnizian}
    lines.append("  subgraph cluster_physical {")
    lines.append('    label="physical"; style=dashed;')
    for nid in sorted(phys):
        lines.append(f"    n{nid};")
    lines.append("  }")
    drawn = set()
    for e in g.events:
        key = (e.source, e.target)
        if key in drawn:
            continue
        drawn.add(key)
        attrs = " [penwidth=3]" if key in bold else ""
        lines.append(f"  n{e.source} -> n{e.target}{attrs};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_csv(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([repr(x) if isinstance(x, float) else x for x in row])
    return buf.getvalue()
