import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from permkern.errors import Empty, NotABijection, SizeMismatch
from permkern.perm import (
    Permutation,
    compose,
    from_ranks,
    identity,
    inverse,
    permutation_matrix,
    random_permutation,
)

perms = st.integers(1, 12).flatmap(lambda n: st.permutations(list(range(1, n + 1)))).map(Permutation)


def same_size_triples():
    return st.integers(1, 10).flatmap(
        lambda n: st.tuples(*[st.permutations(list(range(1, n + 1))).map(Permutation)] * 3))


def test_from_ranks_identity():
    p = from_ranks([1, 2, 3])
    assert p == identity(3)
    assert p.n == 3


def test_from_ranks_transposition():
    p = from_ranks([2, 1, 3])
    assert p(1) == 2 and p(2) == 1 and p(3) == 3


@pytest.mark.parametrize("bad", [[1, 1, 3], [0, 1, 2], [1, 2, 4], [2, 2], [1.5, 2]])
def test_from_ranks_rejects_non_bijections(bad):
    with pytest.raises(NotABijection):
        from_ranks(bad)


def test_from_ranks_empty():
    with pytest.raises(Empty):
        from_ranks([])


def test_ranks_are_read_only():
    p = from_ranks([2, 1, 3])
    with pytest.raises(ValueError):
        p.ranks[0] = 5


def test_inverse_examples():
    assert inverse(identity(5)) == identity(5)
    s = from_ranks([2, 3, 1])
    t = inverse(s)
    assert t == from_ranks([3, 1, 2])
    assert all(t(s(i)) == i for i in range(1, 4))


def test_compose_example():
    assert compose(from_ranks([2, 1, 3]), from_ranks([3, 1, 2])) == from_ranks([3, 2, 1])


def test_compose_size_mismatch():
    with pytest.raises(SizeMismatch):
        compose(identity(3), identity(4))


@given(perms)
def test_round_trip_and_involution(p):
    assert from_ranks(p.tolist()) == p
    assert inverse(inverse(p)) == p
    assert compose(identity(p.n), p) == p
    assert compose(p, inverse(p)) == identity(p.n)
    assert compose(inverse(p), p) == identity(p.n)


@given(same_size_triples())
def test_compose_is_associative(triple):
    a, b, c = triple
    assert compose(compose(a, b), c) == compose(a, compose(b, c))
    n = a.n
    assert all(compose(a, b)(i) == a(b(i)) for i in range(1, n + 1))


def test_permutation_matrix_small():
    np.testing.assert_array_equal(permutation_matrix(identity(2)), np.eye(2))
    np.testing.assert_array_equal(permutation_matrix(from_ranks([2, 1])), [[0, 1], [1, 0]])


def test_permutation_matrix_entries():
    s = from_ranks([3, 1, 2])
    P = permutation_matrix(s)
    for i in range(3):
        for j in range(3):
            assert P[i, j] == (i + 1 == s(j + 1))
    assert P.sum(axis=0).tolist() == [1, 1, 1] and P.sum(axis=1).tolist() == [1, 1, 1]


def test_permutation_matrix_homomorphism_on_s4(s4):
    mats = {p: permutation_matrix(p) for p in s4}
    for a, b in itertools.product(s4, s4):
        np.testing.assert_array_equal(mats[a] @ mats[b], mats[compose(a, b)])
    for a in s4:
        np.testing.assert_array_equal(mats[a].T, mats[inverse(a)])


def test_random_permutation_basics():
    assert random_permutation(1, 0) == from_ranks([1])
    assert random_permutation(50, 7) == random_permutation(50, 7)
    assert random_permutation(50, 7) != random_permutation(50, 8)
    with pytest.raises(Empty):
        random_permutation(0, 1)


def test_random_permutation_uniform_on_s3():
    rng = np.random.default_rng(123)
    draws = 100_000
    counts = Counter(tuple(random_permutation(3, rng).tolist()) for _ in range(draws))
    assert len(counts) == 6
    for c in counts.values():
        assert abs(c / draws - 1 / 6) <= 0.01
