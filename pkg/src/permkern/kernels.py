"""Kendall-family kernels on permutations.

Every kernel has a direct O(n^2) reference (``weighted_naive``) that sums
over ordered item pairs exactly as the kernel is defined. The families
``Standard``, ``TopK``, ``Average``, ``Additive`` and ``Multiplicative``
also have an O(n log n) evaluation (``kappa_fast``) of the one-argument
form ``kappa(pi) = K(e, pi)``; ``kernel`` uses it through right-invariance,
``K(s, t) = kappa(t s^-1)``.
"""
from __future__ import annotations

import hashlib
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import _fast
from .errors import (
    BadK,
    BadOrder,
    EmptyDataset,
    RangeError,
    SizeMismatch,
    SpecSizeMismatch,
    UnsupportedSpec,
    ValidationError,
)
from .perm import Permutation, as_rank_matrix, compose, inverse

__all__ = [
    "KernelSpec",
    "Standard",
    "TopK",
    "Average",
    "Additive",
    "Multiplicative",
    "MatrixWeight",
    "GeneralWeight",
    "WeightedEmbedding",
    "OrderD",
    "GramMatrix",
    "kendall_naive",
    "normalize_standard",
    "weighted_naive",
    "average_closed_form",
    "topk_counts",
    "kappa_fast",
    "kernel",
    "gram",
    "cross_gram",
    "write_gram",
    "dataset_hash",
    "spec_from_dict",
]


class KernelSpec:
    """Base class of kernel descriptors."""

    family = "abstract"
    fast = False
    integer = False

    def check(self, n: int) -> None:
        """Raise if the parameters do not fit permutations of size ``n``."""

    def describe(self) -> dict:
        return {"family": self.family}


def _as_vector(u) -> np.ndarray:
    arr = np.array(u, dtype=np.float64).reshape(-1)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("weight vector has non-finite entries")
    arr.setflags(write=False)
    return arr


def _as_matrix(U) -> np.ndarray:
    arr = np.array(U, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"weight matrix must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("weight matrix has non-finite entries")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Standard(KernelSpec):
    family = "standard"
    fast = True
    integer = True


@dataclass(frozen=True)
class TopK(KernelSpec):
    """Count concordant pairs whose ranks are all within the top ``k``."""

    k: int
    family = "topk"
    fast = True
    integer = True

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise BadK(f"top-k needs integer k >= 1, got {self.k!r}")

    def check(self, n):
        if self.k > n:
            raise SpecSizeMismatch(f"k={self.k} exceeds n={n}")

    def describe(self):
        return {"family": self.family, "k": int(self.k)}


@dataclass(frozen=True)
class Average(KernelSpec):
    """Mean of the top-k kernels over ``k = 1..n``."""

    family = "average"
    fast = True


@dataclass(frozen=True, eq=False)
class _VectorWeight(KernelSpec):
    u: np.ndarray
    fast = True

    def __post_init__(self):
        object.__setattr__(self, "u", _as_vector(self.u))

    def check(self, n):
        if self.u.shape[0] != n:
            raise SpecSizeMismatch(f"weight vector has length {self.u.shape[0]}, need {n}")

    def describe(self):
        return {"family": self.family, "u": self.u.tolist()}

    def matrix(self) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class Additive(_VectorWeight):
    """Pair weight ``U[a, b] = u[a] + u[b]`` on positions."""

    family = "additive"

    def matrix(self):
        return self.u[:, None] + self.u[None, :]


@dataclass(frozen=True, eq=False)
class Multiplicative(_VectorWeight):
    """Pair weight ``U[a, b] = u[a] * u[b]`` on positions."""

    family = "multiplicative"

    def matrix(self):
        return self.u[:, None] * self.u[None, :]


@dataclass(frozen=True, eq=False)
class MatrixWeight(KernelSpec):
    """Rank-one pair weight ``W((a,b),(c,d)) = U[a,b] U[c,d]``."""

    U: np.ndarray
    family = "matrix"

    def __post_init__(self):
        object.__setattr__(self, "U", _as_matrix(self.U))

    def check(self, n):
        if self.U.shape[0] != n:
            raise SpecSizeMismatch(f"weight matrix is {self.U.shape[0]}x{self.U.shape[0]}, need {n}")

    def describe(self):
        return {"family": self.family, "U": self.U.tolist()}


@dataclass(frozen=True, eq=False)
class GeneralWeight(KernelSpec):
    """Arbitrary pair weight ``W((a, b), (c, d))`` on 1-based positions."""

    W: Callable
    family = "general"

    def describe(self):
        return {"family": self.family, "W": getattr(self.W, "__name__", repr(self.W))}


@dataclass(frozen=True, eq=False)
class WeightedEmbedding(KernelSpec):
    """``G_U(s, t) = <Phi^U(s), Phi^U(t)>_F``; with ``invert`` the inputs are
    replaced by their inverses, giving ``G_U(s^-1, t^-1)``."""

    U: np.ndarray
    invert: bool = False
    family = "embedding"

    def __post_init__(self):
        object.__setattr__(self, "U", _as_matrix(self.U))

    def check(self, n):
        if self.U.shape[0] != n:
            raise SpecSizeMismatch(f"weight matrix is {self.U.shape[0]}x{self.U.shape[0]}, need {n}")

    def describe(self):
        return {"family": self.family, "U": self.U.tolist(), "invert": self.invert}


@dataclass(frozen=True)
class OrderD(KernelSpec):
    """Number of index d-tuples ordered concordantly by both permutations."""

    d: int
    family = "order_d"
    integer = True

    def check(self, n):
        if not 2 <= self.d <= n:
            raise BadOrder(f"order d={self.d} outside [2, {n}]")

    def describe(self):
        return {"family": self.family, "d": int(self.d)}


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Symmetric matrix of kernel values with the spec that produced it."""

    values: np.ndarray
    spec: KernelSpec = field(default_factory=Standard)

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    @property
    def shape(self):
        return self.values.shape


def _pair(s: Permutation, t: Permutation) -> None:
    if s.n != t.n:
        raise SizeMismatch(f"permutations have sizes {s.n} and {t.n}")


def _concordant(s0: np.ndarray, t0: np.ndarray) -> np.ndarray:
    # [i, j] -> s(i) < s(j) and t(i) < t(j); diagonal is False
    return (s0[:, None] < s0[None, :]) & (t0[:, None] < t0[None, :])


def kendall_naive(sigma: Permutation, sigma2: Permutation) -> int:
    """Number of item pairs ranked in the same order by both permutations."""
    _pair(sigma, sigma2)
    return int(np.count_nonzero(_concordant(sigma.ranks, sigma2.ranks)))


def normalize_standard(value, n: int) -> float:
    """Map a concordant-pair count to Kendall's correlation in [-1, 1]."""
    total = n * (n - 1) // 2
    if n < 2 or not 0 <= value <= total:
        raise RangeError(f"value {value} outside [0, {total}] for n={n}")
    return 2.0 * value / total - 1.0


def _topk_count(s: np.ndarray, t: np.ndarray, conc: np.ndarray, k: int) -> int:
    inside = (s <= k) & (t <= k)
    return int(np.count_nonzero(conc & inside[:, None] & inside[None, :]))


def topk_counts(sigma: Permutation, sigma2: Permutation) -> np.ndarray:
    """Top-k kernel values for every ``k = 1..n`` (entry ``k - 1``).

    A concordant pair enters the top-k count for each ``k`` at least the
    largest of its four ranks, so one histogram of that rank followed by a
    cumulative sum yields all ``n`` counts in O(n^2).
    """
    _pair(sigma, sigma2)
    n = sigma.n
    s, t = sigma.ranks, sigma2.ranks
    conc = _concordant(s, t)
    item_max = np.maximum(s, t)
    pair_max = np.maximum(item_max[:, None], item_max[None, :])[conc]
    return np.cumsum(np.bincount(pair_max, minlength=n + 1)[1:])


def _matrix_naive(s0: np.ndarray, t0: np.ndarray, U: np.ndarray) -> float:
    conc = _concordant(s0, t0)
    terms = U[s0[:, None], s0[None, :]] * U[t0[:, None], t0[None, :]]
    return float(np.sum(terms[conc]))


def weighted_naive(sigma: Permutation, sigma2: Permutation, spec: KernelSpec):
    """Reference double sum over ordered item pairs.

    Integer families return ``int``, the rest ``float``. ``Average`` is
    evaluated as the literal mean of the ``n`` top-k kernels.
    """
    _pair(sigma, sigma2)
    n = sigma.n
    spec.check(n)
    s, t = sigma.ranks, sigma2.ranks
    if isinstance(spec, Standard):
        return kendall_naive(sigma, sigma2)
    if isinstance(spec, TopK):
        return _topk_count(s, t, _concordant(s, t), spec.k)
    if isinstance(spec, Average):
        return int(topk_counts(sigma, sigma2).sum()) / n
    if isinstance(spec, (Additive, Multiplicative)):
        return _matrix_naive(s - 1, t - 1, spec.matrix())
    if isinstance(spec, MatrixWeight):
        return _matrix_naive(s - 1, t - 1, spec.U)
    if isinstance(spec, GeneralWeight):
        total = 0.0
        for i in range(n):
            for j in range(n):
                if i != j and s[i] < s[j] and t[i] < t[j]:
                    total += spec.W((int(s[i]), int(s[j])), (int(t[i]), int(t[j])))
        return total
    if isinstance(spec, WeightedEmbedding):
        from .embedding import g_weighted

        if spec.invert:
            return g_weighted(inverse(sigma), inverse(sigma2), spec.U)
        return g_weighted(sigma, sigma2, spec.U)
    if isinstance(spec, OrderD):
        from .embedding import order_d_kernel

        return order_d_kernel(sigma, sigma2, spec.d)
    raise UnsupportedSpec(f"unknown kernel spec {spec!r}")


def average_closed_form(sigma: Permutation, sigma2: Permutation) -> float:
    """Pair-weighted form ``sum min(s(i), t(i)) / n`` over concordant ``(i, j)``.

    This is a p.d. min-kernel weighting. It coincides with the mean of the
    top-k kernels for ``n <= 3`` only; ``Average`` uses the mean.
    """
    _pair(sigma, sigma2)
    s, t = sigma.ranks, sigma2.ranks
    conc = _concordant(s, t)
    weight = np.minimum(s, t)[:, None] * np.ones(s.shape[0], dtype=np.int64)[None, :]
    return int(np.sum(weight[conc])) / s.shape[0]


def _fast_args(spec: KernelSpec, n: int):
    if isinstance(spec, Standard):
        return "int", _fast.STANDARD, 0
    if isinstance(spec, TopK):
        return "int", _fast.TOPK, int(spec.k)
    if isinstance(spec, Average):
        return "int", _fast.AVERAGE, 0
    if isinstance(spec, Additive):
        return "real", _fast.ADDITIVE, np.ascontiguousarray(spec.u)
    if isinstance(spec, Multiplicative):
        return "real", _fast.MULTIPLICATIVE, np.ascontiguousarray(spec.u)
    raise UnsupportedSpec(f"no fast path for {spec.family!r} kernels")


def kappa_fast(pi: Permutation, spec: KernelSpec):
    """``K(e, pi)`` in expected O(n log n) time.

    Only the families with ``spec.fast`` set are supported.
    """
    kind, mode, arg = _fast_args(spec, pi.n)
    spec.check(pi.n)
    p0 = np.ascontiguousarray(pi.ranks - 1)
    if kind == "int":
        value = int(_fast.kappa_int(p0, mode, arg))
        return value / pi.n if mode == _fast.AVERAGE else value
    return float(_fast.kappa_real(p0, mode, arg))


def kernel(sigma: Permutation, sigma2: Permutation, spec: KernelSpec):
    """Kernel value, through ``kappa_fast(sigma2 sigma^-1)`` when available."""
    _pair(sigma, sigma2)
    if spec.fast:
        return kappa_fast(compose(sigma2, inverse(sigma)), spec)
    return weighted_naive(sigma, sigma2, spec)


def _default_threads(threads):
    if threads is None:
        return os.cpu_count() or 1
    return max(1, int(threads))


def _row_blocks(m: int, workers: int):
    # interleaved blocks balance the triangular workload
    nblocks = min(m, workers * 8)
    edges = np.linspace(0, m, nblocks + 1).astype(int)
    return [(int(a), int(b)) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _embedding_features(perms, spec: WeightedEmbedding) -> np.ndarray:
    from .embedding import phi

    ps = [inverse(p) for p in perms] if spec.invert else perms
    return np.stack([phi(p, spec.U).ravel() for p in ps])


def _compute(P_perms, Q_perms, spec: KernelSpec, symmetric: bool, threads) -> np.ndarray:
    m, q = len(P_perms), len(Q_perms)
    n = P_perms[0].n
    spec.check(n)
    if spec.fast:
        kind, mode, arg = _fast_args(spec, n)
        P = as_rank_matrix(P_perms)
        Q = as_rank_matrix(Q_perms)
        dtype = np.int64 if kind == "int" else np.float64
        out = np.zeros((m, q), dtype=dtype)
        fn = _fast.gram_rows_int if kind == "int" else _fast.gram_rows_real
        blocks = _row_blocks(m, _default_threads(threads))
        workers = _default_threads(threads)
        if workers == 1:
            for a, b in blocks:
                fn(P, Q, a, b, symmetric, mode, arg, out)
        else:
            with ThreadPoolExecutor(max_workers=workers) as ex:
                list(ex.map(lambda ab: fn(P, Q, ab[0], ab[1], symmetric, mode, arg, out), blocks))
        if mode == _fast.AVERAGE:
            out = out / n
    elif isinstance(spec, WeightedEmbedding):
        Fp = _embedding_features(P_perms, spec)
        Fq = Fp if symmetric else _embedding_features(Q_perms, spec)
        out = Fp @ Fq.T
    else:
        dtype = np.int64 if spec.integer else np.float64
        out = np.zeros((m, q), dtype=dtype)
        for r in range(m):
            for c in range(r if symmetric else 0, q):
                out[r, c] = weighted_naive(P_perms[r], Q_perms[c], spec)
    if symmetric:
        iu = np.triu_indices(m, 1)
        out[iu[1], iu[0]] = out[iu]
    return out


def _check_dataset(perms, what="dataset"):
    if len(perms) == 0:
        raise EmptyDataset(f"{what} is empty")
    n = perms[0].n
    for p in perms:
        if p.n != n:
            raise SizeMismatch(f"{what} mixes permutation sizes {n} and {p.n}")
    return n


def gram(perms: Sequence[Permutation], spec: KernelSpec, threads: int | None = None) -> GramMatrix:
    """Symmetric kernel matrix; only the upper triangle is evaluated.

    Entries are independent, so the result does not depend on ``threads``.
    """
    _check_dataset(perms)
    return GramMatrix(_compute(list(perms), list(perms), spec, True, threads), spec)


def cross_gram(test: Sequence[Permutation], train: Sequence[Permutation], spec: KernelSpec,
               threads: int | None = None) -> np.ndarray:
    """``out[i, j] = kernel(test[i], train[j], spec)``."""
    n1 = _check_dataset(test, "test set")
    n2 = _check_dataset(train, "training set")
    if n1 != n2:
        raise SizeMismatch(f"test permutations have size {n1}, training {n2}")
    return _compute(list(test), list(train), spec, False, threads)


def dataset_hash(perms: Sequence[Permutation]) -> str:
    h = hashlib.sha256()
    for p in perms:
        h.update(p.ranks.astype("<i8").tobytes())
        h.update(b"|")
    return h.hexdigest()


def write_gram(path, G, perms: Sequence[Permutation] | None = None, spec: KernelSpec | None = None,
               sidecar: bool = True) -> None:
    """Write a matrix as header-less CSV with 17 significant digits.

    A ``<path>.json`` sidecar records the kernel family, its parameters,
    ``n`` and a SHA-256 hash of the permutations.
    """
    from ._io import write_matrix_csv

    values = np.asarray(G)
    spec = spec if spec is not None else getattr(G, "spec", None)
    write_matrix_csv(path, values)
    if sidecar:
        meta = spec.describe() if spec is not None else {"family": None}
        meta.setdefault("k", None)
        meta.setdefault("u", None)
        meta["n"] = perms[0].n if perms else None
        meta["m"] = int(values.shape[0])
        meta["dataset_hash"] = dataset_hash(perms) if perms else None
        with open(str(path) + ".json", "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def spec_from_dict(meta: dict) -> KernelSpec:
    """Rebuild a spec from :meth:`KernelSpec.describe` output."""
    family = meta.get("family")
    if family == "standard":
        return Standard()
    if family == "topk":
        return TopK(int(meta["k"]))
    if family == "average":
        return Average()
    if family == "additive":
        return Additive(meta["u"])
    if family == "multiplicative":
        return Multiplicative(meta["u"])
    if family == "matrix":
        return MatrixWeight(meta["U"])
    if family == "embedding":
        return WeightedEmbedding(meta["U"], bool(meta.get("invert", False)))
    if family == "order_d":
        return OrderD(int(meta["d"]))
    raise UnsupportedSpec(f"cannot rebuild kernel family {family!r}")
