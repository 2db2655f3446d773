"""Reference gates and recognition of transition matrices up to word relabelling.

Two matrices are considered the same gate when one becomes the other after
reordering its rows (out-words), reordering its columns (in-words) and
multiplying by a global phase.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

__all__ = [
    "GateCatalogEntry",
    "GateMatch",
    "HADAMARD",
    "PI_8",
    "CNOT",
    "SWAP",
    "QUTRIT_SWAP",
    "z_spider",
    "x_spider",
    "x_spider_explicit",
    "gate_catalog",
    "recognize_gate",
    "sign_solutions",
    "SPIDER_ANGLES",
]

_S = 1 / np.sqrt(2)

HADAMARD = _S * np.array([[1, 1], [1, -1]], dtype=complex)
PI_8 = np.diag([1, np.exp(1j * np.pi / 4)])
CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
QUTRIT_SWAP = np.array([[1, 0, 0], [0, 0, 1], [0, 1, 0]], dtype=complex)

SPIDER_ANGLES = (0.0, np.pi / 4, np.pi / 2, np.pi)

# above this dimension recognition only tries signature-compatible permutations
EXHAUSTIVE_DIM = 4
MAX_CANDIDATES = 200_000


def z_spider(alpha: float) -> np.ndarray:
    """Two-in, two-out Z spider |00><00| + e^{i alpha} |11><11|."""
    z = np.zeros((4, 4), dtype=complex)
    z[0, 0] = 1
    z[3, 3] = np.exp(1j * alpha)
    return z


def x_spider(alpha: float) -> np.ndarray:
    """Z spider with a Hadamard on every leg."""
    hh = np.kron(HADAMARD, HADAMARD)
    return hh @ z_spider(alpha) @ hh


def x_spider_explicit(alpha: float) -> np.ndarray:
    """The X-spider entry table in the form it is usually printed (1/4 prefactor).

    Kept separately from :func:`x_spider` so the two constructions can be
    compared.  They are not equal entrywise; this table is :func:`x_spider`
    written in the basis order 00, 01, 11, 10.
    """
    e = np.exp(1j * alpha)
    p, q = 1 + e, 1 - e
    return 0.25 * np.array([[p, q, p, q], [q, p, q, p], [p, q, p, q], [q, p, q, p]])


@dataclass(frozen=True)
class GateCatalogEntry:
    name: str
    matrix: np.ndarray = field(compare=False, repr=False)
    alpha: Optional[float] = None
    unitary: bool = True

    @property
    def shape(self):
        return self.matrix.shape


@dataclass(frozen=True)
class GateMatch:
    """``u[row_perm][:, col_perm] == global_phase * gate`` up to ``residual``."""

    gate: str
    row_perm: Tuple[int, ...]
    col_perm: Tuple[int, ...]
    global_phase: complex
    residual: float

    @property
    def moved(self) -> int:
        return sum(a != b for a, b in enumerate(self.row_perm)) + sum(a != b for a, b in enumerate(self.col_perm))


def gate_catalog(angles: Sequence[float] = SPIDER_ANGLES) -> List[GateCatalogEntry]:
    entries = [
        GateCatalogEntry("H", HADAMARD),
        GateCatalogEntry("pi/8", PI_8),
        GateCatalogEntry("CNOT", CNOT),
        GateCatalogEntry("SWAP", SWAP),
        GateCatalogEntry("qutrit-SWAP", QUTRIT_SWAP),
    ]
    for a in angles:
        label = _angle_label(a)
        entries.append(GateCatalogEntry(f"Z({label})", z_spider(a), a, unitary=False))
        entries.append(GateCatalogEntry(f"X({label})", x_spider(a), a, unitary=False))
    return entries


def _angle_label(a: float) -> str:
    if a == 0:
        return "0"
    frac = a / np.pi
    for den in (1, 2, 3, 4, 6, 8):
        num = frac * den
        if abs(num - round(num)) < 1e-12:
            num = int(round(num))
            head = "pi" if num == 1 else f"{num}pi"
            return head if den == 1 else f"{head}/{den}"
    return f"{a:.6g}"


def _fit(candidate: np.ndarray, target: np.ndarray) -> Tuple[complex, float]:
    # least-squares optimal global phase for min |candidate - e^{i phi} target|
    overlap = np.vdot(target, candidate)
    ph = overlap / abs(overlap) if abs(overlap) > 0 else 1.0 + 0j
    return complex(ph), float(np.max(np.abs(candidate - ph * target)))


def _signature(vec: np.ndarray) -> Tuple[float, ...]:
    return tuple(np.round(np.sort(np.abs(vec)), 8))


def _candidate_perms(u_vecs: Sequence[np.ndarray], g_vecs: Sequence[np.ndarray]) -> Iterable[Tuple[int, ...]]:
    """Permutations ``p`` with ``u_vecs[p[t]]`` signature-equal to ``g_vecs[t]``."""
    n = len(g_vecs)
    if n <= EXHAUSTIVE_DIM:
        return itertools.permutations(range(n))
    options = []
    for t in range(n):
        sig = _signature(g_vecs[t])
        options.append([s for s in range(n) if _signature(u_vecs[s]) == sig])

    def walk(t, used, acc):
        if t == n:
            yield tuple(acc)
            return
        for s in options[t]:
            if s not in used:
                used.add(s)
                acc.append(s)
                yield from walk(t + 1, used, acc)
                acc.pop()
                used.discard(s)

    return walk(0, set(), [])


def _match_entry(u: np.ndarray, entry: GateCatalogEntry, tol: float) -> Optional[GateMatch]:
    g = entry.matrix
    if u.shape != g.shape or not np.any(g):
        return None
    m, n = g.shape
    best = None
    rows = list(_candidate_perms(list(u), list(g)))
    cols = list(_candidate_perms(list(u.T), list(g.T)))
    if len(rows) * len(cols) > MAX_CANDIDATES:
        raise RuntimeError(f"too many permutation candidates for {entry.name}")
    for rp in rows:
        ur = u[list(rp)]
        for cp in cols:
            cand = ur[:, list(cp)]
            ph, res = _fit(cand, g)
            if res <= tol:
                match = GateMatch(entry.name, tuple(rp), tuple(cp), ph, res)
                if best is None or (match.moved, match.residual) < (best.moved, best.residual):
                    best = match
    return best


def recognize_gate(u, catalog: Optional[Sequence[GateCatalogEntry]] = None, tol: float = 1e-9) -> List[GateMatch]:
    """Catalog gates equal to ``u`` after word permutations and a global phase.

    For each matching gate the permutation pair that moves the fewest words is
    reported.  Every permutation pair is tried up to dimension 4; above that
    only permutations that pair rows (columns) with equal sorted magnitudes are
    tried.
    """
    u = np.asarray(u, dtype=complex)
    catalog = gate_catalog() if catalog is None else catalog
    found = []
    for entry in catalog:
        match = _match_entry(u, entry, tol)
        if match is not None:
            found.append(match)
    found.sort(key=lambda mt: (mt.moved, mt.residual, mt.gate))
    return found


def sign_solutions(pattern, values: Sequence[float] = (-1.0, 1.0), tol: float = 1e-12) -> List[np.ndarray]:
    """All assignments of ``values`` to the support of ``pattern`` with orthonormal columns."""
    pattern = np.asarray(pattern, dtype=bool)
    idx = np.flatnonzero(pattern)
    n = pattern.shape[1]
    out = []
    for combo in itertools.product(values, repeat=idx.size):
        w = np.zeros(pattern.shape)
        w.flat[idx] = combo
        if np.max(np.abs(w.T @ w - np.eye(n))) <= tol:
            out.append(w)
    return out
