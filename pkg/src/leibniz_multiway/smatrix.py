"""Transition matrices between layers of a multiway graph.

The amplitude from in-word ``i`` to out-word ``j`` is a sum over the physical
paths joining them of ``weight(path) * exp(1j * action(path) / k)``.  Weights
are real free parameters; the routines here choose them so that the matrix has
orthonormal columns, compose matrices across layers and try to repair
non-unitary ones by stacking extra rows.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.optimize import least_squares
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .engine import MultiwayGraph
from .paths import Path, action, enumerate_paths

__all__ = [
    "LayerSystem",
    "WeightMatrix",
    "Infeasible",
    "SMatrixSpec",
    "Block",
    "UnitarityError",
    "layer_system",
    "phase",
    "build_smatrix",
    "smatrix_spec",
    "compose",
    "solve_unitary_weights",
    "rotation_weights",
    "unitarity_residual",
    "mutual_interaction_check",
    "free_param_count",
    "delta_m",
    "extend_for_unitarity",
    "euler_omega",
    "tensor_decompose_check",
    "normalize_columns",
    "diagonal_hamiltonian",
]

log = logging.getLogger(__name__)

FEASIBLE_TOL = 1e-9


class UnitarityError(ValueError):
    """The requested extension cannot make the matrix semi-unitary."""

    def __init__(self, message, residual, rows_needed=None):
        super().__init__(message)
        self.residual = residual
        self.rows_needed = rows_needed


@dataclass
class LayerSystem:
    """Connectivity and path actions between two layers.

    ``paths[(j, i)]`` lists every path from in-word ``i`` to out-word ``j``
    together with its exact action.
    """

    in_ids: List[int]
    out_ids: List[int]
    connected: np.ndarray
    paths: Dict[Tuple[int, int], List[Tuple[Path, Fraction]]]
    in_varieties: List[Fraction]
    layer_a: int = 0
    layer_b: int = 1

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.out_ids), len(self.in_ids)

    @property
    def adjacent(self) -> bool:
        return self.layer_b == self.layer_a + 1

    @property
    def accumulated_action(self) -> List[List[Optional[Fraction]]]:
        """Shared action of the paths behind each entry, ``None`` if absent or ambiguous."""
        m, n = self.shape
        out = [[None] * n for _ in range(m)]
        for (j, i), plist in self.paths.items():
            actions = {a for _, a in plist}
            if len(actions) == 1:
                out[j][i] = actions.pop()
        return out

    def column_actions(self) -> Optional[List[Optional[Fraction]]]:
        """Per-column action when every path out of an in-word shares it."""
        m, n = self.shape
        cols: List[Optional[Fraction]] = [None] * n
        for (j, i), plist in self.paths.items():
            for _, a in plist:
                if cols[i] is None:
                    cols[i] = a
                elif cols[i] != a:
                    return None
        return cols


def layer_system(g: MultiwayGraph, layer_a: int, layer_b: int, restrict_physical: bool = True) -> LayerSystem:
    """Connectivity from the words of ``layer_a`` to those of ``layer_b``.

    In-words are every (Leibnizian, if restricted) node of ``layer_a``; a word
    the rules cannot rewrite gives a zero column.  Out-words are the nodes of
    ``layer_b`` reached by at least one admissible path, so no row is empty.
    """
    if layer_a >= layer_b:
        raise ValueError("layer_a must precede layer_b")
    ok = (lambda nid: g.node(nid).leibnizian) if restrict_physical else (lambda nid: True)
    in_ids = [nid for nid in g.layer_ids(layer_a) if ok(nid)]
    if not in_ids:
        raise ValueError(f"layer {layer_a} has no admissible words")
    found = enumerate_paths(g, layer_a, layer_b, physical=restrict_physical)
    out_ids = sorted({p[-1] for p in found})
    if not out_ids:
        raise ValueError(f"no admissible path joins layer {layer_a} to layer {layer_b}")
    col = {nid: i for i, nid in enumerate(in_ids)}
    row = {nid: j for j, nid in enumerate(out_ids)}
    connected = np.zeros((len(out_ids), len(in_ids)), dtype=bool)
    paths: Dict[Tuple[int, int], List[Tuple[Path, Fraction]]] = {}
    for p in found:
        key = (row[p[-1]], col[p[0]])
        connected[key] = True
        paths.setdefault(key, []).append((p, action(p, g)))
    assert connected.any(axis=1).all(), "every out-word must be reached"
    return LayerSystem(in_ids, out_ids, connected, paths,
                       [g.node(i).variety for i in in_ids], layer_a, layer_b)


@dataclass
class WeightMatrix:
    """Real path weights restricted to a support pattern."""

    entries: np.ndarray
    support: np.ndarray
    residual: float = 0.0
    method: str = ""

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=float)
        self.support = np.asarray(self.support, dtype=bool)
        if self.entries.shape != self.support.shape:
            raise ValueError("entries and support must have the same shape")
        if np.any(self.entries[~self.support] != 0):
            raise ValueError("weights must vanish outside the support")
        if not np.all(np.isfinite(self.entries)):
            raise ValueError("weights must be finite")

    @classmethod
    def from_array(cls, entries) -> "WeightMatrix":
        entries = np.asarray(entries, dtype=float)
        return cls(entries, entries != 0)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def feasible(self) -> bool:
        return True


@dataclass
class Infeasible:
    """No support-constrained weights give orthonormal columns."""

    support: np.ndarray
    residual: float
    best: Optional[WeightMatrix] = None
    reason: str = ""

    @property
    def feasible(self) -> bool:
        return False


@dataclass
class SMatrixSpec:
    """Factored transition matrix ``weights @ diag(phases)``."""

    weights: WeightMatrix
    phases: np.ndarray
    k: float = 1.0
    in_ids: List[int] = field(default_factory=list)
    out_ids: List[int] = field(default_factory=list)

    @property
    def dense(self) -> np.ndarray:
        return self.weights.entries * self.phases[np.newaxis, :]

    @property
    def shape(self):
        return self.weights.shape


def phase(action_value, k: float = 1.0, gamma: float = 1.0) -> complex:
    """exp(i gamma S / k); gamma rescales the variety-valued action."""
    if k <= 0:
        raise ValueError("coupling k must be positive")
    return complex(np.exp(1j * gamma * float(action_value) / k))


def _as_weights(w) -> WeightMatrix:
    return w if isinstance(w, WeightMatrix) else WeightMatrix.from_array(w)


def build_smatrix(ls: LayerSystem, w=None, k: float = 1.0, *,
                  edge_weights: Optional[Mapping[Tuple[int, int], float]] = None,
                  gamma: float = 1.0) -> np.ndarray:
    """Dense amplitude matrix for a layer system.

    With a weight matrix ``w`` every path from ``i`` to ``j`` carries weight
    ``w[j, i]``.  With ``edge_weights`` (keyed by ``(source_id, target_id)``)
    a path's weight is the product of its edge weights, which is what makes
    multi-layer matrices agree with products of single-layer ones.
    """
    m, n = ls.shape
    u = np.zeros((m, n), dtype=complex)
    if edge_weights is not None:
        for (j, i), plist in ls.paths.items():
            total = 0j
            for p, a in plist:
                pw = 1.0
                for e in zip(p, p[1:]):
                    pw *= edge_weights.get(e, 0.0)
                total += pw * phase(a, k, gamma)
            u[j, i] = total
        return u
    if w is None:
        raise ValueError("either a weight matrix or edge weights is required")
    w = _as_weights(w)
    if w.shape != (m, n):
        raise ValueError(f"weight shape {w.shape} does not match system shape {(m, n)}")
    outside = w.support & ~ls.connected
    if np.any(outside & (w.entries != 0)):
        j, i = np.argwhere(outside & (w.entries != 0))[0]
        raise ValueError(f"weight at ({j}, {i}) lies outside the connectivity support")
    for (j, i), plist in ls.paths.items():
        if w.entries[j, i] == 0:
            continue
        u[j, i] = w.entries[j, i] * sum(phase(a, k, gamma) for _, a in plist)
    return u


def smatrix_spec(ls: LayerSystem, w, k: float = 1.0, gamma: float = 1.0) -> SMatrixSpec:
    """Factored form, available when each column has a single action.

    That is always the case for adjacent layers, where every path out of
    in-word ``i`` has action ``-variety(in_i)``.
    """
    w = _as_weights(w)
    cols = ls.column_actions()
    if cols is None or any(len(pl) != 1 for pl in ls.paths.values()):
        raise ValueError("phases do not factor by column for this layer system")
    phases = np.array([phase(a if a is not None else 0, k, gamma) for a in cols])
    return SMatrixSpec(w, phases, k, list(ls.in_ids), list(ls.out_ids))


def compose(u2, u1) -> np.ndarray:
    """Matrix product ``u2 @ u1`` of two transition matrices."""
    a = u2.dense if isinstance(u2, SMatrixSpec) else np.asarray(u2)
    b = u1.dense if isinstance(u1, SMatrixSpec) else np.asarray(u1)
    if a.shape[1] != b.shape[0]:
        raise ValueError(f"cannot compose {a.shape} after {b.shape}")
    return a @ b


def unitarity_residual(u) -> float:
    """max |U^H U - I|."""
    u = np.asarray(u.dense if isinstance(u, SMatrixSpec) else u)
    n = u.shape[1]
    return float(np.max(np.abs(u.conj().T @ u - np.eye(n)))) if n else 0.0


def rotation_weights(lam: float) -> np.ndarray:
    """The one-parameter family of orthogonal 2x2 weights."""
    if not -1 <= lam <= 1:
        raise ValueError("lambda must lie in [-1, 1]")
    c = np.sqrt(1 - lam * lam)
    return np.array([[c, lam], [-lam, c]])


@dataclass(frozen=True)
class Block:
    in_indices: Tuple[int, ...]
    out_indices: Tuple[int, ...]


def tensor_decompose_check(system) -> List[Block]:
    """Connected components of the bipartite in/out connectivity graph.

    Accepts a ``LayerSystem`` or a boolean ``m x n`` pattern.  In-words with no
    connection form singleton blocks with no out-words.
    """
    pattern = np.asarray(system.connected if isinstance(system, LayerSystem) else system, dtype=bool)
    m, n = pattern.shape
    adj = np.zeros((n + m, n + m), dtype=bool)
    adj[n:, :n] = pattern
    adj[:n, n:] = pattern.T
    count, labels = connected_components(csr_matrix(adj), directed=False)
    blocks = []
    for c in range(count):
        members = np.flatnonzero(labels == c)
        ins = tuple(int(x) for x in members if x < n)
        outs = tuple(int(x - n) for x in members if x >= n)
        blocks.append(Block(ins, outs))
    blocks.sort(key=lambda b: (b.in_indices[:1] or (n,), b.out_indices[:1] or (m,)))
    return blocks


def mutual_interaction_check(pattern) -> bool:
    """Square pattern is symmetric: i connected to j iff j connected to i."""
    pattern = np.asarray(pattern, dtype=bool)
    if pattern.ndim != 2 or pattern.shape[0] != pattern.shape[1]:
        raise ValueError("mutual interaction is only defined for square patterns")
    return bool(np.array_equal(pattern, pattern.T))


def free_param_count(n: int, m: int) -> int:
    """Weights left free once ``U^H U = I_n`` is imposed: ``mn - n(n+1)/2``.

    A negative value is the parameter deficit of an under-determined layer pair.
    """
    if n < 1 or m < 1:
        raise ValueError("word counts must be positive")
    return m * n - n * (n + 1) // 2


def delta_m(n: int, m: int) -> int:
    """Fewest auxiliary out-words that make the parameter count non-negative."""
    if n < 1 or m < 0:
        raise ValueError("word counts must be positive")
    if 2 * m >= n + 1:
        return 0
    return n // 2 + 1 - m if n % 2 == 0 else (n + 1) // 2 - m


def _residual_vector(w: np.ndarray) -> np.ndarray:
    g = w.T @ w - np.eye(w.shape[1])
    iu = np.triu_indices(w.shape[1])
    return g[iu]


def _max_residual(w: np.ndarray) -> float:
    return float(np.max(np.abs(w.T @ w - np.eye(w.shape[1])))) if w.shape[1] else 0.0


def _numeric_block(pattern: np.ndarray, restarts: int, rng: np.random.Generator,
                   fixed: Optional[np.ndarray] = None, free: Optional[np.ndarray] = None):
    """Multi-start least squares on the free entries of ``pattern``.

    ``fixed`` supplies values for support entries that are not in ``free``.
    Returns the lowest-residual matrix and its residual; ties keep the earliest
    restart.
    """
    free = pattern if free is None else free
    base = np.zeros(pattern.shape) if fixed is None else np.where(free, 0.0, fixed)
    idx = np.flatnonzero(free)
    best_w, best_r = base.copy(), _max_residual(base)
    if idx.size == 0:
        return best_w, best_r

    def fun(x):
        w = base.copy()
        w.flat[idx] = x
        return _residual_vector(w)

    def jac(x):
        w = base.copy()
        w.flat[idx] = x
        n = w.shape[1]
        iu, ju = np.triu_indices(n)
        out = np.zeros((iu.size, idx.size))
        rows, cols = np.unravel_index(idx, w.shape)
        # d(w^T w)_{pq} / d w_{rc} = delta_{pc} w_{rq} + delta_{qc} w_{rp}
        for t, (p, q) in enumerate(zip(iu, ju)):
            out[t] = np.where(cols == p, w[rows, q], 0.0) + np.where(cols == q, w[rows, p], 0.0)
        return out

    for _ in range(restarts):
        x0 = rng.uniform(-1.0, 1.0, idx.size)
        sol = least_squares(fun, x0, jac=jac, method="trf", xtol=1e-15, ftol=1e-15, gtol=1e-15, max_nfev=2000)
        w = base.copy()
        w.flat[idx] = sol.x
        r = _max_residual(w)
        if r < best_r:
            best_w, best_r = w, r
    return best_w, best_r


def _closed_form_block(pattern: np.ndarray, lam: float) -> Optional[Tuple[np.ndarray, str]]:
    m, n = pattern.shape
    per_col = pattern.sum(axis=0)
    if np.all(per_col == 1) and np.all(pattern.sum(axis=1) <= 1):
        return pattern.astype(float), "permutation"
    if (m, n) == (2, 2) and pattern.all():
        return rotation_weights(lam), "rotation"
    return None


def solve_unitary_weights(pattern, *, restarts: int = 32, seed: int = 0,
                          lam: float = 1 / np.sqrt(2), tol: float = FEASIBLE_TOL
                          ) -> Union[WeightMatrix, Infeasible]:
    """Real weights on ``pattern`` whose columns are orthonormal.

    The pattern is split into independent blocks first.  Permutation blocks get
    unit weights and a full 2x2 block gets the rotation family at ``lam``;
    anything else is solved numerically from ``restarts`` random starts drawn
    uniformly from [-1, 1].  An in-word with no connection, or a block with
    fewer out-words than in-words, can never be orthonormal; those still go
    through the numeric search so the reported residual is the best found.
    """
    pattern = np.asarray(pattern, dtype=bool)
    m, n = pattern.shape
    rng = np.random.default_rng(seed)
    weights = np.zeros((m, n))
    methods = []
    reasons = []
    for block in tensor_decompose_check(pattern):
        if not block.in_indices:
            continue
        rows, cols = list(block.out_indices), list(block.in_indices)
        if not rows:
            reasons.append(f"in-word {cols[0]} has no connection")
            continue
        sub = pattern[np.ix_(rows, cols)]
        closed = _closed_form_block(sub, lam)
        if closed is not None:
            w, how = closed
        else:
            w, _ = _numeric_block(sub, restarts, rng)
            how = "numeric"
            if len(rows) < len(cols):
                reasons.append(f"block with {len(cols)} in-words has only {len(rows)} out-words")
        weights[np.ix_(rows, cols)] = w
        methods.append(how)
    weights[~pattern] = 0.0
    residual = _max_residual(weights)
    method = "+".join(sorted(set(methods))) or "empty"
    wm = WeightMatrix(weights, pattern, residual, method)
    if residual <= tol:
        return wm
    reason = "; ".join(reasons) or f"best residual {residual:.3g} after {restarts} restarts"
    return Infeasible(pattern, residual, wm, reason)


def extend_for_unitarity(u: SMatrixSpec, dm: int, *, pinned=None, restarts: int = 32, seed: int = 0,
                         tol: float = FEASIBLE_TOL) -> SMatrixSpec:
    """Stack ``dm`` auxiliary rows under ``u`` so that the result is semi-unitary.

    With every weight of ``u`` pinned the auxiliary block is determined in
    closed form: its Gram matrix must equal ``I - w^T w``, so it exists iff that
    matrix is positive semi-definite with rank at most ``dm``.  Passing a
    boolean ``pinned`` mask frees the other support entries of ``u`` and the
    whole system is solved numerically instead.  Raises ``UnitarityError`` when
    no extension of that size exists.
    """
    if dm < 0:
        raise ValueError("dm must be non-negative")
    w = u.weights.entries
    m, n = w.shape
    if dm == 0:
        r = _max_residual(w)
        if r > tol:
            raise UnitarityError(f"matrix is not semi-unitary (residual {r:.3g}) and no rows were added", r)
        return u
    support = np.vstack([u.weights.support, np.ones((dm, n), dtype=bool)])
    if pinned is None:
        gram = np.eye(n) - w.T @ w
        evals, evecs = np.linalg.eigh((gram + gram.T) / 2)
        order = np.argsort(evals)[::-1]
        evals, evecs = evals[order], evecs[:, order]
        if evals[-1] < -tol:
            raise UnitarityError("the pinned weights already exceed unit column norm", float(-evals[-1]))
        rank = int(np.sum(evals > tol))
        keep = np.where(evals[:dm] > tol, evals[:dm], 0.0)
        ext = (np.sqrt(keep)[:, None] * evecs[:, :dm].T)
        if ext.shape[0] < dm:
            ext = np.vstack([ext, np.zeros((dm - ext.shape[0], n))])
        stacked = np.vstack([w, ext])
        residual = _max_residual(stacked)
        if rank > dm or residual > tol:
            raise UnitarityError(
                f"I - w^T w has rank {rank}, so {dm} auxiliary rows cannot complete it (residual {residual:.3g})",
                residual, rank)
    else:
        pinned = np.asarray(pinned, dtype=bool)
        free = np.vstack([u.weights.support & ~pinned, np.ones((dm, n), dtype=bool)])
        fixed = np.vstack([w, np.zeros((dm, n))])
        stacked, residual = _numeric_block(support, restarts, np.random.default_rng(seed), fixed, free)
        if residual > tol:
            raise UnitarityError(f"no extension with {dm} rows found (best residual {residual:.3g})", residual)
    stacked = np.where(support, stacked, 0.0)
    out_ids = list(u.out_ids) + [-(t + 1) for t in range(dm)]
    return SMatrixSpec(WeightMatrix(stacked, support, residual, "extension"), u.phases.copy(), u.k,
                       list(u.in_ids), out_ids)


def euler_omega(psi: float, theta: float, phi: float, sign: int = 1) -> np.ndarray:
    """Orthogonal 3x3 matrix from z-x-z Euler angles, times ``sign``."""
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    cps, sps = np.cos(psi), np.sin(psi)
    cth, sth = np.cos(theta), np.sin(theta)
    cph, sph = np.cos(phi), np.sin(phi)
    w = np.array([
        [cps * cph - cth * sph * sps, cps * sph + cth * cph * sps, sps * sth],
        [-sps * cph - cth * sph * cps, -sps * sph + cth * cph * cps, cps * sth],
        [sth * sph, -sth * cph, cth],
    ])
    return sign * w


def normalize_columns(u) -> np.ndarray:
    """Scale each non-zero column to unit 2-norm."""
    u = np.array(u, dtype=complex)
    norms = np.linalg.norm(u, axis=0)
    nz = norms > 0
    u[:, nz] /= norms[nz]
    return u


def diagonal_hamiltonian(u, dt: float = 1.0) -> np.ndarray:
    """Real diagonal ``H`` with ``U = exp(-i H dt)`` for a diagonal unitary ``U``.

    Uses the principal branch of the logarithm.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape[0] != u.shape[1] or np.any(np.abs(u - np.diag(np.diag(u))) > 1e-12):
        raise ValueError("only diagonal matrices are supported")
    d = np.diag(u)
    if np.any(np.abs(np.abs(d) - 1) > 1e-9):
        raise ValueError("diagonal entries must have unit modulus")
    return np.diag(-np.angle(d) / dt)
