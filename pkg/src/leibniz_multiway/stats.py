"""Ensemble statistics of Leibnizian strings.

Each position of a Leibnizian string is identified by its *view*, the
neighborhood whose radius is the position's absolute indifference.  Views never
repeat inside one string, so their occupation numbers are 0 or 1, and the
ensemble averages behave like fermionic occupations.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .strcore import (
    Alphabet,
    as_chars,
    canonicalize,
    conditional_entropy,
    indifference_profile,
    is_leibnizian,
    join_symbols,
    neighborhood,
    variety,
)

__all__ = [
    "View",
    "EnsembleSpec",
    "EnsembleReport",
    "ScanReport",
    "EnumerationLimitError",
    "enumerate_leibnizian",
    "views_of",
    "partition_function",
    "occupation_expectation",
    "occupation_table",
    "chemical_potential",
    "fermi_dirac",
    "fd_prediction",
    "idealized_fd_oracle",
    "ensemble_report",
    "random_leibnizian",
    "entropy_variety_scan",
]

DEFAULT_ENUMERATION_CAP = 1 << 22


class EnumerationLimitError(RuntimeError):
    """The requested ensemble is larger than the enumeration cap."""


@dataclass(frozen=True, order=True)
class View:
    radius: int
    sequence: Tuple[str, ...]

    def __post_init__(self):
        if self.radius < 1 or len(self.sequence) != 2 * self.radius + 1:
            raise ValueError("a view has radius >= 1 and length 2*radius + 1")

    def __str__(self):
        return join_symbols(self.sequence)


@dataclass(frozen=True)
class EnsembleSpec:
    alphabet: Tuple[str, ...]
    length: int
    beta: float = 1.0
    gamma: float = 1.0
    canon_mode: str = "literal"

    def __post_init__(self):
        if self.beta <= 0:
            raise ValueError("beta must be positive")

    def report(self) -> "EnsembleReport":
        return ensemble_report(self.alphabet, self.length, self.beta, self.gamma, self.canon_mode)


@dataclass
class EnsembleReport:
    alphabet: Tuple[str, ...]
    length: int
    beta: float
    gamma: float
    canon_mode: str
    size: int
    size_prev: int
    Z_N: float
    Z_Nminus1: float
    mu: float
    rows: List[Dict] = field(default_factory=list)

    @property
    def total_occupation(self) -> float:
        return math.fsum(r["n_expected"] for r in self.rows)

    @property
    def max_abs_dev(self) -> float:
        return max((r["abs_dev"] for r in self.rows), default=0.0)


def _alphabet(alphabet) -> Alphabet:
    return alphabet if isinstance(alphabet, Alphabet) else Alphabet.of(alphabet)


def enumerate_leibnizian(alphabet, n: int, canon_mode: str = "literal",
                         cap: int = DEFAULT_ENUMERATION_CAP) -> List[Tuple[str, ...]]:
    """Every Leibnizian word of length ``n``, one per class of ``canon_mode``.

    Words are returned as symbol tuples in lexicographic order of the
    canonical representative.
    """
    alphabet = _alphabet(alphabet)
    if n < 1:
        raise ValueError("length must be positive")
    total = alphabet.size ** n
    if total > cap:
        raise EnumerationLimitError(f"{alphabet.size}^{n} = {total} words exceeds the cap of {cap}")
    found = set()
    for chars in itertools.product(alphabet.letters, repeat=n):
        if is_leibnizian(chars):
            found.add(canonicalize(chars, canon_mode))
    return sorted(found)


def views_of(s) -> List[View]:
    """View of every position, in position order."""
    chars = as_chars(s)
    if not is_leibnizian(chars):
        raise ValueError(f"{join_symbols(chars)!r} is not Leibnizian")
    a = indifference_profile(chars).a
    return [View(a[i], neighborhood(chars, i + 1, a[i])) for i in range(len(chars))]


def _weights(strings, beta: float, gamma: float) -> np.ndarray:
    v = np.array([float(variety(s)) for s in strings])
    return np.exp(-beta * gamma * v)


def partition_function(strings: Sequence, beta: float = 1.0, gamma: float = 1.0) -> float:
    """Sum of Boltzmann factors exp(-beta * gamma * variety)."""
    if len(strings) == 0:
        raise ValueError("the ensemble is empty")
    return math.fsum(_weights(strings, beta, gamma))


def occupation_expectation(view: View, strings: Sequence, beta: float = 1.0, gamma: float = 1.0) -> float:
    if len(strings) == 0:
        raise ValueError("the ensemble is empty")
    w = _weights(strings, beta, gamma)
    hit = np.array([view in set(views_of(s)) for s in strings], dtype=float)
    return math.fsum(w * hit) / math.fsum(w)


def occupation_table(strings: Sequence, beta: float = 1.0, gamma: float = 1.0) -> Dict[View, float]:
    """Expected occupation of every view that occurs somewhere in the ensemble.

    One pass over the ensemble; equivalent to calling
    :func:`occupation_expectation` for each view.
    """
    if len(strings) == 0:
        raise ValueError("the ensemble is empty")
    w = _weights(strings, beta, gamma)
    acc: Dict[View, List[float]] = {}
    for s, ws in zip(strings, w):
        for v in views_of(s):
            acc.setdefault(v, []).append(ws)
    z = math.fsum(w)
    return {v: math.fsum(ws) / z for v, ws in sorted(acc.items())}


def chemical_potential(alphabet, n: int, beta: float = 1.0, gamma: float = 1.0,
                       canon_mode: str = "literal") -> float:
    """mu = ln(Z(N-1) / Z(N)) / beta over exhaustive ensembles."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    now = enumerate_leibnizian(alphabet, n, canon_mode)
    prev = enumerate_leibnizian(alphabet, n - 1, canon_mode)
    if not now or not prev:
        raise ValueError(f"no Leibnizian words of length {n if not now else n - 1}")
    return _mu(partition_function(prev, beta, gamma), partition_function(now, beta, gamma), beta)


def _mu(z_prev: float, z_now: float, beta: float) -> float:
    return math.log(z_prev / z_now) / beta


def fermi_dirac(energy, beta: float, mu: float):
    return 1.0 / (np.exp(beta * (np.asarray(energy) - mu)) + 1.0)


def fd_prediction(a: int, beta: float = 1.0, gamma: float = 1.0, mu: float = 0.0) -> float:
    """Fermi-Dirac occupation of a view of radius ``a`` (energy gamma / a)."""
    if a < 1:
        raise ValueError("view radius must be at least 1")
    return float(fermi_dirac(gamma / a, beta, mu))


def _elementary_symmetric(x: np.ndarray, kmax: int) -> np.ndarray:
    e = np.zeros(kmax + 1)
    e[0] = 1.0
    for xi in x:
        e[1:] = e[1:] + xi * e[:-1]
    return e


def idealized_fd_oracle(energies: Sequence[float], n: int, beta: float = 1.0) -> Tuple[np.ndarray, float]:
    """Exact occupations of independent fermionic levels holding ``n`` particles.

    Returns the per-level expectations and the chemical potential defined by
    ``exp(beta mu) = Z(n-1) / Z(n)``.  Partition functions are elementary
    symmetric polynomials of the Boltzmann factors, built by the usual
    one-level-at-a-time recurrence; level ``s`` is occupied with probability
    ``x_s e_{n-1}(x without s) / e_n(x)``.
    """
    energies = np.asarray(energies, dtype=float)
    m = energies.size
    if not 0 <= n <= m:
        raise ValueError(f"cannot place {n} particles in {m} levels")
    # shift energies so the factors stay O(1); the shift cancels in occupations and mu
    shift = energies.min() if m else 0.0
    x = np.exp(-beta * (energies - shift))
    e = _elementary_symmetric(x, n)
    occ = np.empty(m)
    for s in range(m):
        rest = _elementary_symmetric(np.delete(x, s), max(n - 1, 0))
        occ[s] = x[s] * rest[n - 1] / e[n] if n >= 1 else 0.0
    mu = math.log(e[n - 1] / e[n]) / beta + shift if n >= 1 else float("nan")
    return occ, mu


def ensemble_report(alphabet, n: int, beta: float = 1.0, gamma: float = 1.0,
                    canon_mode: str = "literal") -> EnsembleReport:
    """Occupations at length ``n`` compared with the Fermi-Dirac formula."""
    alphabet = _alphabet(alphabet)
    now = enumerate_leibnizian(alphabet, n, canon_mode)
    prev = enumerate_leibnizian(alphabet, n - 1, canon_mode)
    if not now or not prev:
        raise ValueError(f"no Leibnizian words of length {n if not now else n - 1}")
    z_now = partition_function(now, beta, gamma)
    z_prev = partition_function(prev, beta, gamma)
    mu = _mu(z_prev, z_now, beta)
    rows = []
    for view, occ in occupation_table(now, beta, gamma).items():
        fd = fd_prediction(view.radius, beta, gamma, mu)
        rows.append({
            "view": str(view),
            "radius": view.radius,
            "n_expected": occ,
            "fd_predicted": fd,
            "abs_dev": abs(occ - fd),
        })
    return EnsembleReport(alphabet.letters, n, beta, gamma, canon_mode, len(now), len(prev),
                          z_now, z_prev, mu, rows)


def random_leibnizian(alphabet, lengths: Sequence[int], count: int, seed: int = 0,
                      max_tries: int = 1_000_000) -> List[Tuple[str, ...]]:
    """``count`` Leibnizian words by rejection sampling of uniform random words.

    Each draw picks a length uniformly from ``lengths`` and then the letters
    uniformly from the alphabet.
    """
    alphabet = _alphabet(alphabet)
    rng = np.random.default_rng(seed)
    lengths = list(lengths)
    out = []
    tries = 0
    while len(out) < count:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"only {len(out)} Leibnizian words after {max_tries} draws")
        n = lengths[rng.integers(len(lengths))]
        chars = tuple(alphabet.letters[k] for k in rng.integers(alphabet.size, size=n))
        if is_leibnizian(chars):
            out.append(chars)
    return out


@dataclass
class ScanReport:
    rows: List[Tuple[str, float, Fraction]]
    r: Optional[float]
    seed: Optional[int] = None

    @property
    def defined(self) -> bool:
        return self.r is not None


MIN_SCAN_SAMPLES = 30


def entropy_variety_scan(strings: Iterable, seed: Optional[int] = None) -> ScanReport:
    """Conditional entropy and variety per word plus their Pearson correlation.

    ``r`` is ``None`` when either column has zero variance.
    """
    strings = [as_chars(s) for s in strings]
    if len(strings) < MIN_SCAN_SAMPLES:
        raise ValueError(f"need at least {MIN_SCAN_SAMPLES} samples, got {len(strings)}")
    rows = [(join_symbols(s), conditional_entropy(s), variety(s)) for s in strings]
    h = np.array([r[1] for r in rows])
    v = np.array([float(r[2]) for r in rows])
    r = None
    if np.ptp(h) > 1e-12 and np.ptp(v) > 1e-12:
        r = float(np.corrcoef(h, v)[0, 1])
    return ScanReport(rows, r, seed)
