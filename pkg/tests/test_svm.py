import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.optimize import minimize

from permkern.errors import NoConvergence, NotPSD, OneClassOnly, SizeMismatch, ValidationError
from permkern.kernels import Standard, cross_gram, gram
from permkern.perm import random_permutation
from permkern.svm import SvmModel, kkt_violations, svm_predict, svm_train


def random_problem(rng, m=30, d=4):
    X = rng.normal(size=(m, d))
    y = np.where(X[:, 0] + 0.3 * rng.normal(size=m) > 0, 1, -1)
    y[0], y[1] = 1, -1
    return X @ X.T, y


def dual_objective(a, G, y):
    Q = np.outer(y, y) * G
    return float(a.sum() - 0.5 * a @ Q @ a)


def test_two_point_analytic():
    model = svm_train(np.eye(2), [1, -1], C=1.0, tol=1e-6)
    np.testing.assert_allclose(model.alphas, [1.0, 1.0], atol=1e-12)
    assert abs(model.bias) <= 1e-12
    scores, labels = svm_predict(model, np.eye(2))
    np.testing.assert_allclose(scores, [1.0, -1.0], atol=1e-12)
    assert labels.tolist() == [1, -1]


def test_separable_margin():
    X = np.array([[2.0, 0.0], [1.5, 1.0], [-2.0, 0.0], [-1.5, -1.0]])
    X = np.vstack([X, X])
    y = np.array([1, 1, -1, -1] * 2)
    G = X @ X.T
    tol = 1e-3
    model = svm_train(G, y, C=100.0, tol=tol)
    margins = y * model.decision(G)
    sv = model.support
    assert sv.size > 0
    assert np.all(margins[sv] >= 1 - tol)
    assert np.all(margins >= 1 - tol)


def test_tiny_box():
    rng = np.random.default_rng(0)
    G, y = random_problem(rng)
    model = svm_train(G, y, C=1e-9)
    assert np.all(model.alphas <= 1e-9) and np.all(model.alphas >= 0)


def test_zero_alpha_scores_equal_bias():
    model = SvmModel(alphas=np.zeros(3), bias=0.25, labels=np.array([1.0, -1.0, 1.0]), C=1.0, tol=1e-3)
    scores, labels = svm_predict(model, np.ones((4, 3)))
    assert scores.tolist() == [0.25] * 4 and labels.tolist() == [1] * 4


def test_ties_go_positive():
    model = SvmModel(alphas=np.zeros(2), bias=0.0, labels=np.array([1.0, -1.0]), C=1.0, tol=1e-3)
    assert svm_predict(model, np.ones((1, 2)))[1].tolist() == [1]


@pytest.mark.parametrize("seed", range(8))
def test_dual_constraints_and_kkt(seed):
    rng = np.random.default_rng(seed)
    G, y = random_problem(rng, m=40)
    C, tol = float(rng.choice([0.1, 1.0, 10.0])), 1e-3
    model = svm_train(G, y, C=C, tol=tol)
    assert np.all(model.alphas >= 0) and np.all(model.alphas <= C)
    assert abs(np.sum(model.alphas * y)) <= 1e-8 * C * y.size
    assert kkt_violations(model, G).max() <= tol + 1e-9


@pytest.mark.parametrize("seed", range(4))
def test_objective_matches_generic_qp(seed):
    rng = np.random.default_rng(100 + seed)
    G, y = random_problem(rng, m=16, d=3)
    C = 1.0
    model = svm_train(G, y, C=C, tol=1e-8)
    Q = np.outer(y, y) * G
    res = minimize(lambda a: -dual_objective(a, G, y), np.zeros(y.size),
                   jac=lambda a: -(1 - Q @ a), bounds=[(0, C)] * y.size,
                   constraints=[{"type": "eq", "fun": lambda a: a @ y, "jac": lambda a: y.astype(float)}],
                   method="SLSQP", options={"ftol": 1e-12, "maxiter": 1000})
    assert model.objective >= -res.fun - 1e-6 * max(1.0, abs(res.fun))
    assert model.objective == pytest.approx(dual_objective(model.alphas, G, y), rel=1e-12)


def test_permutation_kernel_gram_and_order_invariance():
    rng = np.random.default_rng(7)
    perms = [random_permutation(6, rng) for _ in range(24)]
    y = np.array([1 if p.ranks[0] < p.ranks[-1] else -1 for p in perms])
    G = np.asarray(gram(perms, Standard()), dtype=float)
    model = svm_train(G, y, C=1.0, tol=1e-6)
    queries = [random_permutation(6, rng) for _ in range(10)]
    K = cross_gram(queries, perms, Standard())
    scores = svm_predict(model, K)[0]
    order = rng.permutation(len(perms))
    shuffled = SvmModel(alphas=model.alphas[order], bias=model.bias, labels=model.labels[order],
                        C=model.C, tol=model.tol)
    np.testing.assert_allclose(svm_predict(shuffled, K[:, order])[0], scores, rtol=1e-12, atol=1e-12)


def test_deterministic():
    rng = np.random.default_rng(5)
    G, y = random_problem(rng)
    a = svm_train(G, y)
    b = svm_train(G, y)
    assert np.array_equal(a.alphas, b.alphas) and a.bias == b.bias


@given(st.integers(0, 2**32 - 1))
def test_kkt_property(seed):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(4, 25))
    G, y = random_problem(rng, m=m, d=int(rng.integers(1, 6)))
    model = svm_train(G, y, C=float(rng.uniform(0.05, 5.0)), tol=1e-3)
    assert kkt_violations(model, G).max() <= 1e-3 + 1e-9


def test_errors():
    with pytest.raises(OneClassOnly):
        svm_train(np.eye(3), [1, 1, 1])
    with pytest.raises(ValidationError):
        svm_train(np.eye(2), [1, 0])
    with pytest.raises(ValidationError):
        svm_train(np.eye(2), [1, -1], C=0.0)
    with pytest.raises(NotPSD):
        svm_train(np.array([[1.0, 0.0], [0.0, -1.0]]), [1, -1])
    with pytest.raises(NotPSD):
        svm_train(np.array([[1.0, 0.5], [0.0, 1.0]]), [1, -1])
    with pytest.raises(SizeMismatch):
        svm_train(np.eye(3), [1, -1])
    rng = np.random.default_rng(1)
    G, y = random_problem(rng, m=40)
    with pytest.raises(NoConvergence):
        svm_train(G, y, C=10.0, tol=1e-12, max_updates=3)
    model = svm_train(np.eye(2), [1, -1])
    with pytest.raises(SizeMismatch):
        svm_predict(model, np.ones((1, 3)))
