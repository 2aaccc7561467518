"""Explicit weighted embeddings of permutations and their kernels.

``phi(sigma, U)[i, j] = U[sigma(i), sigma(j)]`` permutes the entries of a
weight matrix; ``phi_tensor`` does the same along every mode of an order-d
tensor. Inner products of embeddings give the weighted kernels ``G_U``.
"""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .errors import BadOrder, SizeMismatch, TooLargeForKronecker, ValidationError
from .perm import Permutation, inverse, permutation_matrix

MAX_ORDER = 4
KRONECKER_MAX_N = 12

__all__ = [
    "phi",
    "g_weighted",
    "order_d_kernel",
    "phi_tensor",
    "g_tensor",
    "linear_eval",
    "linear_eval_tensor",
    "upper_indicator",
    "increasing_indicator",
]


def _matrix(U, n: int) -> np.ndarray:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape != (n, n):
        raise SizeMismatch(f"weight matrix has shape {U.shape}, need ({n}, {n})")
    return U


def _tensor(T, n: int, max_order: int) -> np.ndarray:
    T = np.asarray(T)
    if T.ndim < 2:
        raise ValidationError(f"weight tensor needs order >= 2, got {T.ndim}")
    if T.ndim > max_order:
        raise ValidationError(f"tensor order {T.ndim} exceeds cap {max_order}")
    if any(s != n for s in T.shape):
        raise SizeMismatch(f"weight tensor has shape {T.shape}, need side {n}")
    return T


def upper_indicator(n: int) -> np.ndarray:
    """``U[i, j] = 1`` iff ``i < j``; with it ``G_U`` is the Kendall kernel."""
    return np.triu(np.ones((n, n)), 1)


def increasing_indicator(n: int, d: int) -> np.ndarray:
    """Order-d tensor with ones exactly at strictly increasing index tuples."""
    T = np.zeros((n,) * d)
    for idx in combinations(range(n), d):
        T[idx] = 1.0
    return T


def phi(sigma: Permutation, U) -> np.ndarray:
    """Entry-permuted weights ``Pi^T U Pi``, by fancy indexing in O(n^2)."""
    U = _matrix(U, sigma.n)
    s0 = sigma.ranks - 1
    return U[s0[:, None], s0[None, :]]


def g_weighted(sigma: Permutation, sigma2: Permutation, U) -> float:
    if sigma.n != sigma2.n:
        raise SizeMismatch(f"permutations have sizes {sigma.n} and {sigma2.n}")
    return float(np.sum(phi(sigma, U) * phi(sigma2, U)))


def order_d_kernel(sigma: Permutation, sigma2: Permutation, d: int) -> int:
    """Count item d-subsets that both permutations put in the same relative order.

    Each subset is read in the order ``sigma`` ranks it, which makes the
    count the number of index tuples increasing under both. Enumerates all
    ``C(n, d)`` subsets.
    """
    if sigma.n != sigma2.n:
        raise SizeMismatch(f"permutations have sizes {sigma.n} and {sigma2.n}")
    n = sigma.n
    if int(d) != d or not 2 <= d <= n:
        raise BadOrder(f"order d={d} outside [2, {n}]")
    # walk items by sigma-rank so every subset is already sigma-increasing
    by_rank = np.argsort(sigma.ranks)
    r2 = sigma2.ranks[by_rank]
    tuples = np.fromiter(
        (i for t in combinations(range(n), int(d)) for i in t), dtype=np.int64
    ).reshape(-1, int(d))
    ok = np.all(np.diff(r2[tuples], axis=1) > 0, axis=1)
    return int(np.count_nonzero(ok))


def phi_tensor(sigma: Permutation, T, max_order: int = MAX_ORDER) -> np.ndarray:
    """``out[i1, ..., id] = T[sigma(i1), ..., sigma(id)]``."""
    T = _tensor(T, sigma.n, max_order)
    s0 = sigma.ranks - 1
    return T[np.ix_(*([s0] * T.ndim))]


def g_tensor(sigma: Permutation, sigma2: Permutation, T, max_order: int = MAX_ORDER) -> float:
    if sigma.n != sigma2.n:
        raise SizeMismatch(f"permutations have sizes {sigma.n} and {sigma2.n}")
    return float(np.sum(phi_tensor(sigma, T, max_order) * phi_tensor(sigma2, T, max_order)))


def linear_eval(sigma: Permutation, U, B, mode: str = "embed") -> float:
    """Linear function with coefficients ``B`` on the embedding ``phi(., U)``.

    ``embed``     -- ``<B, phi(sigma, U)>``
    ``swapped``   -- ``<U, phi(sigma^-1, B)>``
    ``kronecker`` -- ``<vec(U) vec(B)^T, Pi kron Pi>`` on ``n^2 x n^2``
    matrices; a test oracle limited to ``n <= 12``.
    """
    n = sigma.n
    U = _matrix(U, n)
    B = _matrix(B, n)
    if mode == "embed":
        return float(np.sum(B * phi(sigma, U)))
    if mode == "swapped":
        return float(np.sum(U * phi(inverse(sigma), B)))
    if mode == "kronecker":
        if n > KRONECKER_MAX_N:
            raise TooLargeForKronecker(f"kronecker mode is limited to n <= {KRONECKER_MAX_N}, got {n}")
        P = permutation_matrix(sigma)
        outer = np.outer(U.ravel(), B.ravel())
        return float(np.sum(outer * np.kron(P, P)))
    raise ValidationError(f"unknown mode {mode!r}")


def linear_eval_tensor(sigma: Permutation, U, B, mode: str = "embed",
                       max_order: int = MAX_ORDER) -> float:
    """Order-d analogue of :func:`linear_eval` (modes ``embed``, ``swapped``)."""
    U = _tensor(U, sigma.n, max_order)
    B = _tensor(B, sigma.n, max_order)
    if U.ndim != B.ndim:
        raise SizeMismatch(f"tensor orders differ: {U.ndim} and {B.ndim}")
    if mode == "embed":
        return float(np.sum(B * phi_tensor(sigma, U, max_order)))
    if mode == "swapped":
        return float(np.sum(U * phi_tensor(inverse(sigma), B, max_order)))
    raise ValidationError(f"unknown mode {mode!r}")
