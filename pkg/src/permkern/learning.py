"""Supervised learning of the weight matrix of ``G_U``.

Two routes are provided. ``alternating_learn`` alternates kernel-machine
fits over the coefficients ``B`` (kernel ``G_U``) and over the weights ``U``
(kernel ``G_B`` on inverted permutations), which is possible because
``<B, phi(s, U)> = <U, phi(s^-1, B)>``. ``suquan_svd_init`` instead takes
the leading singular pair of the class-mean difference of ``Pi kron Pi``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .embedding import phi
from .errors import DegenerateM, DegenerateWeights, NoConvergence, ValidationError, ZeroMatrix
from .perm import Permutation, inverse
from .svm import check_labels, svm_predict, svm_train

__all__ = [
    "LabeledDataset",
    "LearnedWeights",
    "leading_singular_pair",
    "suquan_svd_init",
    "alternating_learn",
    "embedding_gram",
    "kronecker_moment",
    "write_weights",
]

SUQUAN_MAX_N = 32


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    perms: tuple
    labels: np.ndarray
    ids: tuple = ()
    dropped: int = 0

    def __post_init__(self):
        perms = tuple(self.perms)
        labels = np.asarray(self.labels, dtype=np.int64).reshape(-1)
        if len(perms) != labels.size:
            raise ValidationError(f"{len(perms)} permutations but {labels.size} labels")
        if not np.all((labels == 1) | (labels == -1)):
            raise ValidationError("labels must be +1 or -1")
        if perms and any(p.n != perms[0].n for p in perms):
            raise ValidationError("dataset mixes permutation sizes")
        labels.setflags(write=False)
        object.__setattr__(self, "perms", perms)
        object.__setattr__(self, "labels", labels)
        ids = tuple(self.ids) if self.ids else tuple(str(i + 1) for i in range(len(perms)))
        object.__setattr__(self, "ids", ids)

    @property
    def m(self) -> int:
        return len(self.perms)

    @property
    def n(self) -> int:
        return self.perms[0].n

    def subset(self, index) -> "LabeledDataset":
        index = np.asarray(index, dtype=np.int64)
        return LabeledDataset(tuple(self.perms[i] for i in index), self.labels[index],
                              tuple(self.ids[i] for i in index))


@dataclass(frozen=True, eq=False)
class LearnedWeights:
    """Weights ``U`` (unit Frobenius norm) and coefficients ``B``.

    The learned classifier is ``scale * <B, phi(sigma, U)> + bias``.
    """

    U: np.ndarray
    B: np.ndarray
    history: list = field(default_factory=list)
    bias: float = 0.0
    scale: float = 1.0
    C: float = 1.0
    tol: float = 1e-3

    def decision(self, perms) -> np.ndarray:
        B = self.B
        return np.array([self.scale * float(np.sum(B * phi(p, self.U))) + self.bias for p in perms])

    def predict(self, perms) -> np.ndarray:
        return np.where(self.decision(perms) >= 0, 1, -1)


def leading_singular_pair(M, tol: float = 1e-11, max_iter: int = 100_000):
    """Largest singular value of ``M`` with unit singular vectors, by power
    iteration on ``M^T M``.

    Iterates until ``||M v - s u|| <= tol * s``.
    """
    M = np.asarray(M, dtype=np.float64)
    if M.ndim != 2:
        raise ValidationError("expected a matrix")
    norms = np.linalg.norm(M, axis=1)
    if M.size == 0 or norms.max() == 0:
        raise ZeroMatrix("matrix is zero")
    v = M[int(np.argmax(norms))].copy()
    v /= np.linalg.norm(v)
    s = 0.0
    for _ in range(max_iter):
        u = M @ v
        u /= np.linalg.norm(u)
        w = M.T @ u
        s = float(np.linalg.norm(w))
        v = w / s
        if np.linalg.norm(M @ v - s * u) <= tol * s:
            # one more left update so u matches the final v
            u = M @ v
            u /= np.linalg.norm(u)
            return u, s, v
    raise NoConvergence(f"power iteration did not converge in {max_iter} steps")


def _fix_sign(U: np.ndarray, B: np.ndarray):
    flat = U.ravel()
    if flat[int(np.argmax(np.abs(flat)))] < 0:
        return -U, -B
    return U, B


def kronecker_moment(perms, weights) -> np.ndarray:
    """``sum_i weights[i] * kron(Pi_i, Pi_i)`` without materializing each term."""
    n = perms[0].n
    M = np.zeros((n * n, n * n))
    cols = np.arange(n * n)
    for p, w in zip(perms, weights):
        s0 = p.ranks - 1
        rows = (s0[:, None] * n + s0[None, :]).ravel()
        M[rows, cols] += w
    return M


def suquan_svd_init(data: LabeledDataset, tol: float = 1e-11):
    """Rank-one ``(U, B)`` from the leading singular pair of
    ``mean_+ kron(Pi, Pi) - mean_- kron(Pi, Pi)``.

    ``U`` has unit Frobenius norm and its largest-magnitude entry is positive.
    Returns ``(U, B, s)``.
    """
    y = check_labels(data.labels)
    n = data.n
    if n > SUQUAN_MAX_N:
        raise ValidationError(f"n={n} exceeds {SUQUAN_MAX_N}; the n^2 x n^2 moment is too large")
    pos = y > 0
    w = np.where(pos, 1.0 / pos.sum(), -1.0 / (~pos).sum())
    M = kronecker_moment(data.perms, w)
    if np.linalg.norm(M) < 1e-12:
        raise DegenerateM("class means of kron(Pi, Pi) coincide")
    u, s, v = leading_singular_pair(M, tol)
    U = u.reshape(n, n)
    B = v.reshape(n, n)
    U, B = _fix_sign(U, B)
    U = U / np.linalg.norm(U)
    return U, B, s


def embedding_gram(perms, U, invert: bool = False) -> np.ndarray:
    """Gram matrix of ``G_U`` (``invert``: on the inverse permutations)."""
    ps = [inverse(p) for p in perms] if invert else list(perms)
    F = np.stack([phi(p, U).ravel() for p in ps])
    G = F @ F.T
    return np.triu(G) + np.triu(G, 1).T


def _features(perms, W, invert=False):
    ps = [inverse(p) for p in perms] if invert else list(perms)
    return np.stack([phi(p, W).ravel() for p in ps])


def alternating_learn(data: LabeledDataset, U0, C: float = 1.0, iters: int = 5, tol: float = 1e-3):
    """Alternate SVM fits over ``B`` (``U`` fixed) and ``U`` (``B`` fixed).

    One iteration: fit on ``G_U`` and set ``B = sum a_i y_i phi(s_i, U)``;
    fit on ``G_B`` over inverses and set ``U = sum b_i y_i phi(s_i^-1, B)``;
    rescale ``U`` to unit Frobenius norm. ``history`` holds one record per
    iteration.
    """
    if iters < 1:
        raise ValidationError(f"iters must be >= 1, got {iters}")
    y = check_labels(data.labels).astype(np.float64)
    n = data.n
    U = np.array(U0, dtype=np.float64)
    if U.shape != (n, n):
        raise ValidationError(f"U0 has shape {U.shape}, need ({n}, {n})")
    if np.linalg.norm(U) < 1e-12:
        raise DegenerateWeights("initial weights are zero")
    history = []
    bias, scale = 0.0, 1.0
    for it in range(iters):
        F = _features(data.perms, U)
        G = F @ F.T
        G = np.triu(G) + np.triu(G, 1).T
        model_b = svm_train(G, y, C, tol)
        acc_b = float(np.mean(svm_predict(model_b, G)[1] == y))
        B = (model_b.coef @ F).reshape(n, n)

        Fi = _features(data.perms, B, invert=True)
        Gi = Fi @ Fi.T
        Gi = np.triu(Gi) + np.triu(Gi, 1).T
        model_u = svm_train(Gi, y, C, tol)
        acc_u = float(np.mean(svm_predict(model_u, Gi)[1] == y))
        U_raw = (model_u.coef @ Fi).reshape(n, n)
        norm = float(np.linalg.norm(U_raw))
        if norm < 1e-12:
            raise DegenerateWeights(f"weights collapsed to zero at iteration {it + 1}")
        U = U_raw / norm
        bias, scale = model_u.bias, norm
        history.append({
            "iteration": it + 1,
            "train_accuracy_B": acc_b,
            "objective_B": model_b.objective,
            "train_accuracy_U": acc_u,
            "objective_U": model_u.objective,
            "U": U.copy(),
        })
    return LearnedWeights(U=U, B=B, history=history, bias=bias, scale=scale, C=C, tol=tol)


def write_weights(prefix, U, B=None, meta: dict | None = None) -> list:
    """Write ``<prefix>U.csv``, ``<prefix>B.csv`` and ``<prefix>weights.json``."""
    from ._io import write_matrix_csv

    paths = [f"{prefix}U.csv"]
    write_matrix_csv(paths[0], U)
    if B is not None:
        paths.append(f"{prefix}B.csv")
        write_matrix_csv(paths[1], B)
    if meta is not None:
        clean = json.loads(json.dumps(meta, default=_jsonable))
        paths.append(f"{prefix}weights.json")
        with open(paths[-1], "w") as fh:
            json.dump(clean, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return paths


def _jsonable(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, Permutation):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")
