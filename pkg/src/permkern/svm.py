"""Binary soft-margin C-SVM on a precomputed Gram matrix.

The dual

    max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j G_ij
    s.t. 0 <= a_i <= C,  sum_i a_i y_i = 0

is solved by sequential minimal optimization: each step takes the
maximal violating pair (largest ``-y g`` among indices free to increase,
smallest among those free to decrease; lowest index wins ties), applies
the analytic two-variable update, and stops once the violation gap is at
most ``tol``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NoConvergence, NotPSD, OneClassOnly, SizeMismatch, ValidationError

MAX_PAIR_UPDATES = 1_000_000
_TAU = 1e-12

__all__ = ["SvmModel", "svm_train", "svm_predict", "check_labels", "kkt_violations"]


@dataclass(frozen=True, eq=False)
class SvmModel:
    alphas: np.ndarray
    bias: float
    labels: np.ndarray
    C: float
    tol: float
    spec: object = None
    train_perms: tuple = ()
    iterations: int = 0
    objective: float = 0.0
    extra: dict = field(default_factory=dict)

    @property
    def coef(self) -> np.ndarray:
        """``alpha_i * y_i``, the weights of the kernel expansion."""
        return self.alphas * self.labels

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.alphas > 0)

    def decision(self, rows) -> np.ndarray:
        return svm_predict(self, rows)[0]


def check_labels(labels) -> np.ndarray:
    y = np.asarray(labels, dtype=np.float64).reshape(-1)
    if not np.all((y == 1) | (y == -1)):
        raise ValidationError("labels must be +1 or -1")
    if np.all(y == y[0]):
        raise OneClassOnly(f"all {y.size} labels are {int(y[0]):+d}")
    return y


def _check_gram(G: np.ndarray) -> None:
    if G.ndim != 2 or G.shape[0] != G.shape[1]:
        raise SizeMismatch(f"Gram matrix must be square, got {G.shape}")
    scale = max(1.0, float(np.max(np.abs(G))))
    if np.max(np.abs(G - G.T)) > 1e-9 * scale:
        raise NotPSD("Gram matrix is not symmetric")
    trace = float(np.trace(G))
    lam = float(np.linalg.eigvalsh((G + G.T) / 2)[0])
    if lam < -1e-6 * abs(trace):
        raise NotPSD(f"minimum eigenvalue {lam:.3g} below -1e-6 * trace ({trace:.3g})")


def _masks(a, y, C):
    up = ((y > 0) & (a < C)) | ((y < 0) & (a > 0))
    low = ((y > 0) & (a > 0)) | ((y < 0) & (a < C))
    return up, low


def _bias(a, y, g, C) -> float:
    yg = y * g
    free = (a > 0) & (a < C)
    if np.any(free):
        rho = float(np.mean(yg[free]))
    else:
        at_upper = a >= C
        ub_mask = (at_upper & (y < 0)) | (~at_upper & (y > 0))
        lb_mask = ~ub_mask
        ub = float(np.min(yg[ub_mask])) if np.any(ub_mask) else np.inf
        lb = float(np.max(yg[lb_mask])) if np.any(lb_mask) else -np.inf
        rho = (ub + lb) / 2
    return -rho


def svm_train(G, labels, C: float = 1.0, tol: float = 1e-3, *, spec=None, train_perms=(),
              max_updates: int = MAX_PAIR_UPDATES) -> SvmModel:
    """Train on a precomputed Gram matrix ``G`` with labels in {-1, +1}.

    Raises
    ------
    OneClassOnly, NotPSD, NoConvergence
    """
    G = np.asarray(G, dtype=np.float64)
    y = check_labels(labels)
    if G.shape[0] != y.size:
        raise SizeMismatch(f"Gram matrix is {G.shape[0]}x{G.shape[0]} but there are {y.size} labels")
    if not C > 0:
        raise ValidationError(f"C must be positive, got {C}")
    _check_gram(G)
    m = y.size
    Q = (y[:, None] * y[None, :]) * G
    diag = np.diag(Q).copy()
    a = np.zeros(m)
    g = -np.ones(m)
    it = 0
    while True:
        up, low = _masks(a, y, C)
        score = -y * g
        if not np.any(up) or not np.any(low):
            break
        i = int(np.argmax(np.where(up, score, -np.inf)))
        j = int(np.argmin(np.where(low, score, np.inf)))
        if score[i] - score[j] <= tol:
            break
        if it >= max_updates:
            raise NoConvergence(f"no convergence after {max_updates} pair updates")
        it += 1
        ai, aj = a[i], a[j]
        if y[i] != y[j]:
            quad = diag[i] + diag[j] + 2 * Q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (-g[i] - g[j]) / quad
            diff = ai - aj
            ai += delta
            aj += delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > 0:
                if ai > C:
                    ai, aj = C, C - diff
            elif aj > C:
                aj, ai = C, C + diff
        else:
            quad = diag[i] + diag[j] - 2 * Q[i, j]
            if quad <= 0:
                quad = _TAU
            delta = (g[i] - g[j]) / quad
            total = ai + aj
            ai -= delta
            aj += delta
            if total > C:
                if ai > C:
                    ai, aj = C, total - C
            elif aj < 0:
                aj, ai = 0.0, total
            if total > C:
                if aj > C:
                    aj, ai = C, total - C
            elif ai < 0:
                ai, aj = 0.0, total
        di, dj = ai - a[i], aj - a[j]
        a[i], a[j] = ai, aj
        g += Q[:, i] * di + Q[:, j] * dj
    bias = _bias(a, y, g, C)
    objective = float(np.sum(a) - 0.5 * a @ Q @ a)
    return SvmModel(alphas=a, bias=bias, labels=y, C=float(C), tol=float(tol), spec=spec,
                    train_perms=tuple(train_perms), iterations=it, objective=objective)


def svm_predict(model: SvmModel, rows):
    """Scores ``rows @ (alpha * y) + bias`` and labels (ties go to +1).

    ``rows[j, i]`` is the kernel between query ``j`` and training point ``i``.
    """
    K = np.atleast_2d(np.asarray(rows, dtype=np.float64))
    if K.shape[1] != model.alphas.size:
        raise SizeMismatch(f"kernel rows have width {K.shape[1]}, model has {model.alphas.size} points")
    scores = K @ model.coef + model.bias
    return scores, np.where(scores >= 0, 1, -1)


def kkt_violations(model: SvmModel, G) -> np.ndarray:
    """Per-point KKT violation of a trained model on its own Gram matrix."""
    G = np.asarray(G, dtype=np.float64)
    margin = model.labels * (G @ model.coef + model.bias)
    a, C = model.alphas, model.C
    viol = np.zeros_like(margin)
    lower = a <= 0
    upper = a >= C
    free = ~lower & ~upper
    viol[lower] = np.maximum(0.0, 1 - margin[lower])
    viol[upper] = np.maximum(0.0, margin[upper] - 1)
    viol[free] = np.abs(margin[free] - 1)
    return viol
