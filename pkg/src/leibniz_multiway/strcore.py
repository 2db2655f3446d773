"""Combinatorics of cyclic character strings.

Positions are 1-based throughout this module, so ``neighborhood(s, 1, 2)``
is the radius-2 window centred on the first character.  Symbols are opaque
hashable tokens; a plain ``str`` is treated as a sequence of one-character
symbols.
"""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Iterable, Optional, Sequence, Tuple, Union

__all__ = [
    "Alphabet",
    "CyclicString",
    "IndifferenceProfile",
    "CANON_MODES",
    "max_radius",
    "neighborhood",
    "isomorphic",
    "relative_indifference",
    "indifference_profile",
    "is_leibnizian",
    "is_leibnizian_full_scan",
    "variety",
    "shannon_entropy",
    "conditional_entropy",
    "fractal_word",
    "canonicalize",
    "rotate",
]

MIN_RADIUS = 1
CANON_MODES = ("literal", "rotation", "rotation_mirror")

Symbol = Hashable


@dataclass(frozen=True)
class Alphabet:
    """Ordered set of distinct symbols."""

    letters: Tuple[Symbol, ...]

    def __post_init__(self):
        letters = tuple(self.letters)
        if len(set(letters)) != len(letters):
            raise ValueError(f"duplicate symbols in alphabet {letters!r}")
        if not letters:
            raise ValueError("alphabet must not be empty")
        object.__setattr__(self, "letters", letters)

    @classmethod
    def of(cls, letters: Union[str, Iterable[Symbol]]) -> "Alphabet":
        return cls(tuple(letters))

    @property
    def size(self) -> int:
        return len(self.letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __contains__(self, symbol):
        return symbol in self.letters

    def index(self, symbol) -> int:
        return self.letters.index(symbol)


@dataclass(frozen=True)
class CyclicString:
    """A word with wraparound topology.

    The alphabet defaults to the sorted set of symbols that occur in ``chars``.
    """

    chars: Tuple[Symbol, ...]
    alphabet: Optional[Alphabet] = None

    def __post_init__(self):
        chars = tuple(self.chars)
        if not chars:
            raise ValueError("a cyclic string needs at least one character")
        alphabet = self.alphabet
        if alphabet is None:
            alphabet = Alphabet(tuple(sorted(set(chars))))
        for pos, c in enumerate(chars, start=1):
            if c not in alphabet:
                raise ValueError(f"symbol {c!r} at position {pos} is not in the alphabet")
        object.__setattr__(self, "chars", chars)
        object.__setattr__(self, "alphabet", alphabet)

    @classmethod
    def of(cls, word, alphabet=None) -> "CyclicString":
        if isinstance(word, CyclicString):
            if alphabet is None or word.alphabet == alphabet:
                return word
            return cls(word.chars, alphabet)
        if alphabet is not None and not isinstance(alphabet, Alphabet):
            alphabet = Alphabet.of(alphabet)
        return cls(tuple(word), alphabet)

    def __len__(self):
        return len(self.chars)

    def __iter__(self):
        return iter(self.chars)

    def __getitem__(self, item):
        return self.chars[item]

    def __str__(self):
        return join_symbols(self.chars)


@dataclass(frozen=True)
class IndifferenceProfile:
    """Absolute indifference per position plus the pairwise radius table.

    ``r[i][j]`` is ``None`` on the diagonal and wherever the two positions are
    never told apart.  Indices into ``a`` and ``r`` are 0-based.
    """

    a: Tuple[int, ...]
    r: Tuple[Tuple[Optional[int], ...], ...]

    @property
    def leibnizian(self) -> bool:
        return all(x > 0 for x in self.a)


Word = Union[str, CyclicString, Sequence[Symbol]]


def as_chars(s: Word) -> Tuple[Symbol, ...]:
    if isinstance(s, CyclicString):
        return s.chars
    return tuple(s)


def join_symbols(chars: Sequence[Symbol]) -> str:
    if all(isinstance(c, str) and len(c) == 1 for c in chars):
        return "".join(chars)
    return " ".join(str(c) for c in chars)


def max_radius(n: int) -> int:
    """Largest admissible neighborhood radius for a string of length ``n``."""
    if n < 1:
        raise ValueError("length must be positive")
    return n // 2 - 1 if n % 2 == 0 else (n - 1) // 2


def _window(chars, i0: int, m: int):
    n = len(chars)
    return tuple(chars[(i0 + k) % n] for k in range(-m, m + 1))


def neighborhood(s: Word, i: int, m: int) -> Tuple[Symbol, ...]:
    """Linear window of radius ``m`` centred on 1-based position ``i``."""
    chars = as_chars(s)
    n = len(chars)
    if not 1 <= i <= n:
        raise IndexError(f"position {i} outside 1..{n}")
    if not 0 <= m <= max_radius(n):
        raise ValueError(f"radius {m} outside 0..{max_radius(n)} for length {n}")
    return _window(chars, i - 1, m)


def isomorphic(u: Sequence, v: Sequence) -> bool:
    """Equal, or equal after reversing one of them."""
    u, v = tuple(u), tuple(v)
    return len(u) == len(v) and (u == v or u == v[::-1])


def _iso_key(seq: tuple) -> tuple:
    rev = seq[::-1]
    return seq if seq <= rev else rev


def _keys(chars, m: int):
    return [_iso_key(_window(chars, i, m)) for i in range(len(chars))]


def relative_indifference(s: Word, i: int, j: int) -> Optional[int]:
    """Smallest radius >= 1 at which positions ``i`` and ``j`` look different.

    Returns ``None`` when no admissible radius separates them.
    """
    chars = as_chars(s)
    n = len(chars)
    if i == j:
        raise ValueError("relative indifference needs two distinct positions")
    if not (1 <= i <= n and 1 <= j <= n):
        raise IndexError(f"positions must lie in 1..{n}")
    for m in range(MIN_RADIUS, max_radius(n) + 1):
        if not isomorphic(_window(chars, i - 1, m), _window(chars, j - 1, m)):
            return m
    return None


def indifference_profile(s: Word) -> IndifferenceProfile:
    chars = as_chars(s)
    n = len(chars)
    if n < 2:
        raise ValueError("indifference needs at least two positions")
    r = [[None] * n for _ in range(n)]
    open_pairs = {(i, j) for i in range(n) for j in range(i + 1, n)}
    for m in range(MIN_RADIUS, max_radius(n) + 1):
        if not open_pairs:
            break
        keys = _keys(chars, m)
        closed = [(i, j) for i, j in open_pairs if keys[i] != keys[j]]
        for i, j in closed:
            r[i][j] = r[j][i] = m
        open_pairs.difference_update(closed)
    a = []
    for i in range(n):
        row = [r[i][j] for j in range(n) if j != i]
        a.append(0 if any(x is None for x in row) else max(row))
    return IndifferenceProfile(tuple(a), tuple(tuple(row) for row in r))


def is_leibnizian(s: Word) -> bool:
    """Every position has a unique neighborhood (up to mirroring) at max radius.

    Separation is monotone in the radius, so checking the largest admissible
    radius decides the question.  Strings with ``max_radius < 1`` never qualify.
    """
    chars = as_chars(s)
    m = max_radius(len(chars))
    if m < MIN_RADIUS:
        return False
    keys = _keys(chars, m)
    return len(set(keys)) == len(keys)


def is_leibnizian_full_scan(s: Word) -> bool:
    """Reference check that scans every radius for every pair."""
    chars = as_chars(s)
    n = len(chars)
    if max_radius(n) < MIN_RADIUS:
        return False
    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            if relative_indifference(chars, i, j) is None:
                return False
    return True


def variety(s: Word) -> Fraction:
    """Exact BSD variety, zero for non-Leibnizian strings."""
    chars = as_chars(s)
    if not is_leibnizian(chars):
        return Fraction(0)
    return sum((Fraction(1, a) for a in _absolute_indifference(chars)), Fraction(0))


def _absolute_indifference(chars) -> list:
    # a_i is the first radius at which position i's key is unique; this avoids
    # building the full pair table for Leibnizian strings.
    n = len(chars)
    a = [0] * n
    pending = set(range(n))
    for m in range(MIN_RADIUS, max_radius(n) + 1):
        counts = Counter(keys := _keys(chars, m))
        for i in list(pending):
            if counts[keys[i]] == 1:
                a[i] = m
                pending.discard(i)
        if not pending:
            break
    return a


def _entropy(counts: Iterable[int]) -> float:
    counts = [c for c in counts if c]
    total = sum(counts)
    h = -sum((c / total) * math.log2(c / total) for c in counts)
    return h + 0.0  # normalise -0.0


def shannon_entropy(s: Word) -> float:
    """Letter-frequency entropy in bits."""
    chars = as_chars(s)
    if not chars:
        raise ValueError("entropy of an empty string is undefined")
    return _entropy(Counter(chars).values())


def conditional_entropy(s: Word, cyclic: bool = True) -> float:
    """H(X,Y) - H(X) with (X,Y) ranging over consecutive letter pairs.

    ``cyclic=True`` includes the pair that straddles the seam (N pairs);
    ``cyclic=False`` uses the N-1 interior pairs only.
    """
    chars = as_chars(s)
    n = len(chars)
    if n < 2:
        raise ValueError("conditional entropy needs at least two characters")
    stop = n if cyclic else n - 1
    pairs = Counter((chars[i], chars[(i + 1) % n]) for i in range(stop))
    return _entropy(pairs.values()) - shannon_entropy(chars)


def fractal_word(alphabet, n: int) -> CyclicString:
    """Concatenate l1^i l2^i ... lv^i for i = 1..n."""
    if n < 1:
        raise ValueError("n must be positive")
    if not isinstance(alphabet, Alphabet):
        alphabet = Alphabet.of(alphabet)
    chars = []
    for i in range(1, n + 1):
        for letter in alphabet:
            chars.extend([letter] * i)
    return CyclicString(tuple(chars), alphabet)


def rotate(s: Word, k: int) -> Tuple[Symbol, ...]:
    chars = as_chars(s)
    k %= len(chars)
    return chars[k:] + chars[:k]


def _min_rotation(chars: tuple) -> tuple:
    return min(chars[k:] + chars[:k] for k in range(len(chars)))


def canonicalize(s: Word, mode: str = "literal"):
    """Representative of ``s`` under the chosen identification.

    ``rotation`` picks the lexicographically least rotation; ``rotation_mirror``
    also considers the rotations of the reversed word.  Returns the same kind of
    object it was given (``str`` stays ``str``).
    """
    chars = as_chars(s)
    if mode == "literal":
        out = chars
    elif mode == "rotation":
        out = _min_rotation(chars)
    elif mode == "rotation_mirror":
        out = min(_min_rotation(chars), _min_rotation(chars[::-1]))
    else:
        raise ValueError(f"unknown canonicalization mode {mode!r}; expected one of {CANON_MODES}")
    if isinstance(s, CyclicString):
        return CyclicString(out, s.alphabet)
    if isinstance(s, str):
        return "".join(out)
    return out
