"""Permutations of ``n`` items stored as 1-based rank vectors.

A :class:`Permutation` ``sigma`` maps item ``i`` to its rank ``sigma(i)``.
Composition follows ``(s1 s2)(i) = s1(s2(i))``.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import Empty, NotABijection, SizeMismatch

__all__ = [
    "Permutation",
    "from_ranks",
    "identity",
    "reversal",
    "inverse",
    "compose",
    "permutation_matrix",
    "random_permutation",
    "as_rank_matrix",
]


class Permutation:
    """Immutable bijection of ``{1, ..., n}``.

    ``ranks[i - 1]`` is the rank of item ``i``. The backing array is
    read-only so instances can be shared freely between threads.
    """

    __slots__ = ("_ranks",)

    def __init__(self, ranks, *, _trusted: bool = False):
        arr = np.array(ranks, dtype=np.int64, copy=True).reshape(-1)
        if not _trusted:
            _check_bijection(arr)
        arr.setflags(write=False)
        self._ranks = arr

    @property
    def ranks(self) -> np.ndarray:
        """1-based ranks as a read-only ``int64`` array."""
        return self._ranks

    @property
    def n(self) -> int:
        return self._ranks.shape[0]

    @property
    def zero_based(self) -> np.ndarray:
        return self._ranks - 1

    def __call__(self, i: int) -> int:
        return int(self._ranks[i - 1])

    def __len__(self) -> int:
        return self.n

    def __iter__(self):
        return iter(self._ranks.tolist())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self._ranks, other._ranks))

    def __hash__(self) -> int:
        return hash(self._ranks.tobytes())

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __repr__(self) -> str:
        if self.n <= 20:
            return f"Permutation({self._ranks.tolist()})"
        return f"Permutation(n={self.n})"

    def tolist(self) -> list:
        return self._ranks.tolist()


def _check_bijection(arr: np.ndarray) -> None:
    n = arr.shape[0]
    if n == 0:
        raise Empty("a permutation needs at least one item")
    if arr.min() < 1 or arr.max() > n:
        bad = arr[(arr < 1) | (arr > n)]
        raise NotABijection(f"rank {int(bad[0])} outside [1, {n}]")
    counts = np.bincount(arr, minlength=n + 1)
    if np.any(counts[1:] != 1):
        dup = np.flatnonzero(counts > 1)
        raise NotABijection(f"rank {int(dup[0])} appears {int(counts[dup[0]])} times")


def from_ranks(values: Iterable[int]) -> Permutation:
    """Validate 1-based rank data and wrap it.

    Raises
    ------
    Empty
        zero-length input
    NotABijection
        duplicated (tied), missing, or out-of-range rank
    """
    vals = list(values)
    if len(vals) == 0:
        raise Empty("a permutation needs at least one item")
    for v in vals:
        if isinstance(v, (bool, np.bool_)) or int(v) != v:
            raise NotABijection(f"rank {v!r} is not an integer")
    return Permutation(np.asarray(vals, dtype=np.int64))


def identity(n: int) -> Permutation:
    if n < 1:
        raise Empty("n must be >= 1")
    return Permutation(np.arange(1, n + 1), _trusted=True)


def reversal(n: int) -> Permutation:
    if n < 1:
        raise Empty("n must be >= 1")
    return Permutation(np.arange(n, 0, -1), _trusted=True)


def inverse(sigma: Permutation) -> Permutation:
    inv = np.empty(sigma.n, dtype=np.int64)
    inv[sigma.ranks - 1] = np.arange(1, sigma.n + 1)
    return Permutation(inv, _trusted=True)


def compose(s1: Permutation, s2: Permutation) -> Permutation:
    """Return ``s1 s2``, i.e. ``i -> s1(s2(i))``."""
    if s1.n != s2.n:
        raise SizeMismatch(f"cannot compose permutations of size {s1.n} and {s2.n}")
    return Permutation(s1.ranks[s2.ranks - 1], _trusted=True)


def permutation_matrix(sigma: Permutation) -> np.ndarray:
    """``P[i, j] = 1`` iff ``i = sigma(j)`` (both 1-based)."""
    n = sigma.n
    mat = np.zeros((n, n), dtype=np.int64)
    mat[sigma.ranks - 1, np.arange(n)] = 1
    return mat


def random_permutation(n: int, seed) -> Permutation:
    """Uniform random permutation, deterministic in ``seed``.

    Draws come from NumPy's PCG64 bit generator; ``Generator.permutation``
    applies a Fisher-Yates shuffle, so the stream is stable across
    platforms for a given NumPy version. ``seed`` may also be an existing
    ``numpy.random.Generator``, which is advanced in place.
    """
    if n < 1:
        raise Empty("n must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return Permutation(rng.permutation(n) + 1, _trusted=True)


def as_rank_matrix(perms: Sequence[Permutation]) -> np.ndarray:
    """Stack permutations into an ``(m, n)`` array of 0-based ranks."""
    if len(perms) == 0:
        return np.zeros((0, 0), dtype=np.int64)
    n = perms[0].n
    for p in perms:
        if p.n != n:
            raise SizeMismatch(f"mixed permutation sizes {n} and {p.n}")
    return np.ascontiguousarray(np.stack([p.ranks for p in perms]) - 1)
