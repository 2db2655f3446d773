"""Command-line entry point.

Exit codes: 0 on success, 2 for usage errors, 3 when ``--strict`` is given and
the result is infeasible or truncated.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import __version__
from .engine import MultiwayGraph, build_multiway, parse_rules, physical_subgraph
from .gates import recognize_gate
from .io import (
    dumps,
    frac_to_json,
    graph_from_dict,
    graph_to_dict,
    path_to_dict,
    smatrix_to_dict,
    to_csv,
    to_dot,
)
from .paths import PathLimitError, enumerate_paths, maximal_variety_paths, render_path
from .smatrix import (
    UnitarityError,
    build_smatrix,
    extend_for_unitarity,
    layer_system,
    mutual_interaction_check,
    normalize_columns,
    smatrix_spec,
    solve_unitary_weights,
    unitarity_residual,
)
from .stats import EnumerationLimitError, ensemble_report, entropy_variety_scan, random_leibnizian
from .strcore import (
    CANON_MODES,
    Alphabet,
    conditional_entropy,
    fractal_word,
    indifference_profile,
    is_leibnizian,
    max_radius,
    shannon_entropy,
    variety,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_STRICT = 3

log = logging.getLogger("leibniz_multiway")


class UsageError(Exception):
    pass


@dataclass
class SessionConfig:
    command: str
    alphabet: Optional[str] = None
    rules: List[str] = field(default_factory=list)
    canon_mode: str = "literal"
    match_mode: str = "linear"
    k: float = 1.0
    gamma: float = 1.0
    beta: float = 1.0
    tol: float = 1e-9
    restarts: int = 32
    seed: int = 0
    format: str = "json"
    params: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def _check_symbols(word: str, alphabet: Optional[str], what: str = "string") -> None:
    if not word:
        raise UsageError(f"{what} must not be empty")
    if alphabet is None:
        return
    for pos, c in enumerate(word, start=1):
        if c not in alphabet:
            raise UsageError(f"{what} {word!r}: symbol {c!r} at position {pos} is not in alphabet {alphabet!r}")


def _alphabet_arg(text: Optional[str]) -> Optional[str]:
    if text is None:
        return None
    try:
        Alphabet.of(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return text


def _config(args, command: str, **params) -> SessionConfig:
    return SessionConfig(
        command=command,
        alphabet=getattr(args, "alphabet", None),
        rules=list(getattr(args, "rule", None) or []),
        canon_mode=getattr(args, "canon", "literal"),
        match_mode=getattr(args, "match", "linear"),
        k=getattr(args, "k", 1.0),
        gamma=getattr(args, "gamma", 1.0),
        beta=getattr(args, "beta", 1.0),
        tol=getattr(args, "tol", 1e-9),
        restarts=getattr(args, "restarts", 32),
        seed=getattr(args, "seed", 0),
        format=args.format,
        params=params,
    )


def _csv_preamble(cfg: SessionConfig) -> str:
    return f"# leibniz-multiway {__version__}\n# config {json.dumps(cfg.as_dict(), sort_keys=True)}\n"


# --- analyze ---------------------------------------------------------------

def analyze_report(word: str) -> dict:
    n = len(word)
    lz = is_leibnizian(word)
    doc = {
        "string": word,
        "length": n,
        "max_radius": max_radius(n),
        "leibnizian": lz,
        "variety": frac_to_json(variety(word)),
        "variety_str": f"{variety(word).numerator}/{variety(word).denominator}",
        "shannon_entropy": shannon_entropy(word),
    }
    doc["a"] = list(indifference_profile(word).a) if n >= 2 else [0] * n
    doc["conditional_entropy"] = conditional_entropy(word) if n >= 2 else None
    return doc


def cmd_analyze(args) -> int:
    alphabet = _alphabet_arg(args.alphabet)
    _check_symbols(args.string, alphabet)
    cfg = _config(args, "analyze")
    doc = analyze_report(args.string)
    if args.format == "text":
        lines = [f"{k}={_text(v)}" for k, v in doc.items() if k != "variety"]
        _emit(args, "\n".join(lines) + "\n")
    else:
        doc.update(config=cfg.as_dict(), version=__version__)
        _emit(args, dumps(doc))
    return EXIT_OK


def _text(v):
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, list):
        return ",".join(str(x) for x in v)
    return str(v)


# --- multiway --------------------------------------------------------------

def multiway_document(g: MultiwayGraph, cfg: SessionConfig, path_depth: Optional[int] = None) -> dict:
    doc = graph_to_dict(g, cfg.as_dict())
    phys = physical_subgraph(g)
    doc["physical"] = {"nodes": [n.id for n in phys.nodes],
                       "events": [[e.source, e.target] for e in phys.events]}
    depth = g.depth if path_depth is None else path_depth
    best = maximal_variety_paths(g, depth) if depth >= 0 else []
    doc["maximal_paths"] = {"depth": depth, "paths": [path_to_dict(p, g) for p in best]}
    doc["frontier_empty"] = g.frontier_empty
    return doc


def cmd_multiway(args) -> int:
    alphabet = _alphabet_arg(args.alphabet)
    for w in args.init:
        _check_symbols(w, alphabet, "initial string")
    if not args.rule:
        raise UsageError("at least one --rule LHS->RHS is required")
    try:
        rules = parse_rules(args.rule)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    for r in rules:
        _check_symbols("".join(r.lhs), alphabet, "rule side")
        _check_symbols("".join(r.rhs), alphabet, "rule side")
    if args.depth is not None and args.depth < 0:
        raise UsageError("--depth must be non-negative")
    cfg = _config(args, "multiway", init=list(args.init), depth=args.depth,
                  max_width=args.max_width, max_nodes=args.max_nodes)
    root = args.init[0] if len(args.init) == 1 else list(args.init)
    g = build_multiway(root, rules, args.depth, match_mode=args.match, canon_mode=args.canon,
                       max_width=args.max_width, max_nodes=args.max_nodes)
    doc = multiway_document(g, cfg)
    if args.format == "dot":
        _emit(args, to_dot(g, [tuple(p["nodes"]) for p in doc["maximal_paths"]["paths"]]))
    elif args.format == "text":
        lines = []
        for d, layer in enumerate(g.layers):
            lines.append(f"layer {d}: " + " ".join(
                f"{n.label}{'*' if n.leibnizian else ''}" for n in layer))
        for p in doc["maximal_paths"]["paths"]:
            lines.append("maximal: " + render_path(p["nodes"], g))
        lines.append(f"truncated={_text(g.truncated)}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, dumps(doc))
    if g.truncated and args.strict:
        return EXIT_STRICT
    return EXIT_OK


def _load_graph(path: str) -> MultiwayGraph:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read graph file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"graph file is not valid JSON: {exc}") from exc
    try:
        return graph_from_dict(doc)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# --- paths -----------------------------------------------------------------

def cmd_paths(args) -> int:
    g = _load_graph(args.graph)
    to = g.depth if args.to_layer is None else args.to_layer
    cfg = _config(args, "paths", graph=args.graph, from_layer=args.from_layer, to_layer=to,
                  physical=args.physical, maximal=args.maximal)
    try:
        if args.maximal:
            if args.from_layer != 0:
                raise UsageError("--maximal paths always start at layer 0")
            found = maximal_variety_paths(g, to)
        else:
            found = enumerate_paths(g, args.from_layer, to, physical=args.physical, limit=args.limit)
    except PathLimitError as exc:
        log.error("%s", exc)
        return EXIT_STRICT
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "json":
        _emit(args, dumps({"paths": [path_to_dict(p, g) for p in found],
                           "config": cfg.as_dict(), "version": __version__}))
    else:
        _emit(args, "".join(render_path(p, g) + "\n" for p in found))
    return EXIT_OK


# --- smatrix ---------------------------------------------------------------

def _chain_dense(g: MultiwayGraph, a: int, b: int, k: float, gamma: float, restarts: int, seed: int,
                 tol: float):
    """Product of adjacent-layer matrices from ``a`` to ``b``, aligned by node id."""
    total = None
    total_in: List[int] = []
    total_out: List[int] = []
    ok = True
    for d in range(a, b):
        ls = layer_system(g, d, d + 1)
        sol = solve_unitary_weights(ls.connected, restarts=restarts, seed=seed, tol=tol)
        w = sol if sol.feasible else sol.best
        u = build_smatrix(ls, w, k, gamma=gamma)
        ok = ok and sol.feasible
        if total is None:
            total, total_in, total_out = u, list(ls.in_ids), list(ls.out_ids)
            continue
        # align previous out-words with current in-words; unmatched ids drop out
        align = np.zeros((len(ls.in_ids), len(total_out)), dtype=complex)
        col = {nid: t for t, nid in enumerate(total_out)}
        for r, nid in enumerate(ls.in_ids):
            if nid in col:
                align[r, col[nid]] = 1
        total = u @ align @ total
        total_out = list(ls.out_ids)
    return total, total_in, total_out, ok


def smatrix_document(g: MultiwayGraph, layer_a: int, layer_b: int, cfg: SessionConfig, *,
                     recognize: bool = False, extend: Optional[int] = None, lam: float = 2 ** -0.5) -> dict:
    """S-matrix between two layers; the same code path serves the CLI and library callers."""
    ls = layer_system(g, layer_a, layer_b)
    doc: dict = {"layers": [layer_a, layer_b], "connectivity": ls.connected.astype(int).tolist(),
                 "mutual_interaction": bool(ls.shape[0] == ls.shape[1] and mutual_interaction_check(ls.connected))}
    if ls.adjacent:
        sol = solve_unitary_weights(ls.connected, restarts=cfg.restarts, seed=cfg.seed, lam=lam, tol=cfg.tol)
        w = sol if sol.feasible else sol.best
        spec = smatrix_spec(ls, w, cfg.k, cfg.gamma)
        dense = spec.dense
        weights, phases = spec.weights.entries, spec.phases
        feasible = sol.feasible
        doc.update(feasible=feasible, residual=float(sol.residual) + 0.0,
                   method=w.method, reason=getattr(sol, "reason", ""))
    else:
        spec = None
        dense, _, _, feasible = _chain_dense(g, layer_a, layer_b, cfg.k, cfg.gamma, cfg.restarts,
                                             cfg.seed, cfg.tol)
        weights = phases = None
        doc.update(feasible=feasible, residual=unitarity_residual(dense) + 0.0, method="composition", reason="")
    matches = recognize_gate(dense, tol=cfg.tol) if recognize and feasible else []
    doc.update(smatrix_to_dict(ls.in_ids, ls.out_ids, cfg.k, weights, phases, dense, matches))
    doc["dense_normalized"] = smatrix_to_dict([], [], cfg.k, None, None, normalize_columns(dense))["dense"]
    doc["unitarity_residual"] = unitarity_residual(dense) + 0.0
    if extend is not None:
        if spec is None:
            doc["extension"] = {"error": "extension needs adjacent layers"}
        else:
            try:
                # an infeasible best fit is only a compromise, so re-solve every weight with the new rows
                pinned = None if feasible else np.zeros(ls.shape, dtype=bool)
                uc = extend_for_unitarity(spec, extend, pinned=pinned, restarts=cfg.restarts, seed=cfg.seed,
                                          tol=cfg.tol)
                doc["extension"] = smatrix_to_dict(uc.in_ids, uc.out_ids, uc.k, uc.weights.entries,
                                                   uc.phases, uc.dense)
                doc["extension"]["residual"] = unitarity_residual(uc) + 0.0
            except UnitarityError as exc:
                doc["extension"] = {"error": str(exc), "residual": float(exc.residual) + 0.0,
                                    "rows_needed": exc.rows_needed}
    doc["config"] = cfg.as_dict()
    return doc


def cmd_smatrix(args) -> int:
    g = _load_graph(args.graph)
    a, b = args.layers
    if args.k <= 0:
        raise UsageError("--k must be positive")
    cfg = _config(args, "smatrix", graph=args.graph, layers=[a, b], recognize=args.recognize,
                  extend=args.extend, lam=args.lam)
    try:
        doc = smatrix_document(g, a, b, cfg, recognize=args.recognize, extend=args.extend, lam=args.lam)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "text":
        lines = [f"feasible={_text(doc['feasible'])} residual={doc['residual']:.3g} method={doc['method']}"]
        for row in doc["dense"]:
            lines.append("  ".join(f"{z['re']:+.6f}{z['im']:+.6f}i" for z in row))
        for m in doc["matches"]:
            lines.append(f"match {m['gate']} rows={m['row_perm']} cols={m['col_perm']}")
        if not doc["feasible"] and doc["reason"]:
            lines.append(f"reason: {doc['reason']}")
        _emit(args, "\n".join(lines) + "\n")
    else:
        _emit(args, dumps(doc))
    failed = not doc["feasible"] or "error" in doc.get("extension", {})
    return EXIT_STRICT if failed and args.strict else EXIT_OK


# --- stats / corr / fractal ------------------------------------------------

def cmd_stats(args) -> int:
    alphabet = _alphabet_arg(args.alphabet)
    if args.length < 3:
        raise UsageError("--length must be at least 3")
    if args.beta <= 0:
        raise UsageError("--beta must be positive")
    cfg = _config(args, "stats", length=args.length)
    try:
        rep = ensemble_report(alphabet, args.length, args.beta, args.gamma, args.canon)
    except (EnumerationLimitError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    header = ["view", "radius", "n_expected", "fd_predicted", "abs_dev"]
    if args.format == "csv":
        _emit(args, _csv_preamble(cfg) + to_csv(header, ([r[h] for h in header] for r in rep.rows)))
    else:
        _emit(args, dumps({
            "size": rep.size, "size_prev": rep.size_prev, "Z_N": rep.Z_N, "Z_Nminus1": rep.Z_Nminus1,
            "mu": rep.mu, "total_occupation": rep.total_occupation, "max_abs_dev": rep.max_abs_dev,
            "rows": rep.rows, "config": cfg.as_dict(), "version": __version__,
        }))
    return EXIT_OK


def cmd_corr(args) -> int:
    alphabet = _alphabet_arg(args.alphabet)
    if args.min_length < 3 or args.max_length < args.min_length:
        raise UsageError("need 3 <= --min-length <= --max-length")
    cfg = _config(args, "corr", samples=args.samples, min_length=args.min_length, max_length=args.max_length)
    try:
        words = random_leibnizian(alphabet, range(args.min_length, args.max_length + 1), args.samples, args.seed)
        rep = entropy_variety_scan(words, args.seed)
    except (ValueError, RuntimeError) as exc:
        raise UsageError(str(exc)) from exc
    if args.format == "csv":
        body = to_csv(["string", "cond_entropy", "variety"], ((s, h, float(v)) for s, h, v in rep.rows))
        r = "undefined" if rep.r is None else repr(rep.r)
        _emit(args, _csv_preamble(cfg) + f"# pearson_r {r}\n" + body)
    else:
        _emit(args, dumps({"r": rep.r, "rows": [{"string": s, "cond_entropy": h, "variety": frac_to_json(v)}
                                                  for s, h, v in rep.rows],
                           "config": cfg.as_dict(), "version": __version__}))
    return EXIT_OK


def cmd_fractal(args) -> int:
    alphabet = _alphabet_arg(args.alphabet)
    if args.n < 1:
        raise UsageError("--n must be positive")
    cfg = _config(args, "fractal", n=args.n)
    word = str(fractal_word(alphabet, args.n))
    if args.format == "text":
        _emit(args, word + "\n")
    else:
        doc = analyze_report(word)
        doc.update(config=cfg.as_dict(), version=__version__)
        _emit(args, dumps(doc))
    return EXIT_OK


# --- plumbing --------------------------------------------------------------

def _emit(args, text: str) -> None:
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="write the artifact here instead of stdout")
    common.add_argument("--strict", action="store_true", help="exit 3 on infeasible or truncated results")
    common.add_argument("-v", "--verbose", action="store_true")

    alpha = argparse.ArgumentParser(add_help=False)
    alpha.add_argument("--alphabet", help="allowed symbols, e.g. AB")

    canon = argparse.ArgumentParser(add_help=False)
    canon.add_argument("--canon", choices=CANON_MODES, default="literal")

    solver = argparse.ArgumentParser(add_help=False)
    solver.add_argument("--k", type=float, default=1.0, help="phase coupling")
    solver.add_argument("--gamma", type=float, default=1.0, help="variety-to-action scale")
    solver.add_argument("--tol", type=float, default=1e-9)
    solver.add_argument("--restarts", type=int, default=32)
    solver.add_argument("--seed", type=int, default=0)

    p = argparse.ArgumentParser(prog="leibniz-multiway", description="Leibnizian strings and multiway systems")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("analyze", parents=[common, alpha], help="indifference, variety and entropies of a string")
    s.add_argument("string")
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.set_defaults(func=cmd_analyze)

    s = sub.add_parser("multiway", parents=[common, alpha, canon], help="build a multiway graph")
    s.add_argument("init", nargs="+", help="initial string(s)")
    s.add_argument("--rule", action="append", help="LHS->RHS; repeat or comma-separate")
    s.add_argument("--depth", type=int, default=None, help="layers to expand (default: until no rule applies)")
    s.add_argument("--match", choices=["linear", "cyclic"], default="linear")
    s.add_argument("--max-width", type=int, default=10_000)
    s.add_argument("--max-nodes", type=int, default=100_000)
    s.add_argument("--format", choices=["json", "dot", "text"], default="json")
    s.set_defaults(func=cmd_multiway)

    s = sub.add_parser("paths", parents=[common], help="enumerate paths of a graph file")
    s.add_argument("graph")
    s.add_argument("--from", dest="from_layer", type=int, default=0)
    s.add_argument("--to", dest="to_layer", type=int, default=None)
    s.add_argument("--physical", action="store_true", help="only Leibnizian nodes")
    s.add_argument("--maximal", action="store_true", help="maximal-variety paths only")
    s.add_argument("--limit", type=int, default=1_000_000)
    s.add_argument("--format", choices=["json", "text"], default="text")
    s.set_defaults(func=cmd_paths)

    s = sub.add_parser("smatrix", parents=[common, solver], help="transition matrix between two layers")
    s.add_argument("graph")
    s.add_argument("--layers", type=int, nargs=2, default=[0, 1], metavar=("A", "B"))
    s.add_argument("--recognize", action="store_true", help="match against the gate catalog")
    s.add_argument("--extend", type=int, default=None, metavar="DM", help="append DM auxiliary out-words")
    s.add_argument("--lam", type=float, default=2 ** -0.5, help="parameter of the 2x2 rotation family")
    s.add_argument("--format", choices=["json", "text"], default="json")
    s.set_defaults(func=cmd_smatrix)

    s = sub.add_parser("stats", parents=[common, canon], help="occupation statistics of the exhaustive ensemble")
    s.add_argument("--alphabet", default="AB")
    s.add_argument("--length", type=int, required=True)
    s.add_argument("--beta", type=float, default=1.0)
    s.add_argument("--gamma", type=float, default=1.0)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_stats)

    s = sub.add_parser("corr", parents=[common], help="entropy-variety correlation over random strings")
    s.add_argument("--alphabet", default="AB")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--min-length", type=int, default=8)
    s.add_argument("--max-length", type=int, default=20)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--format", choices=["csv", "json"], default="csv")
    s.set_defaults(func=cmd_corr)

    s = sub.add_parser("fractal", parents=[common], help="fractal word")
    s.add_argument("--alphabet", default="AB")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--format", choices=["text", "json"], default="text")
    s.set_defaults(func=cmd_fractal)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
