"""Loop-based references written straight from the definitions.

They share no code with the library beyond reading ``Permutation.ranks``.
"""
from itertools import permutations


def r(p):
    return [int(v) for v in p.ranks]


def brute_weighted(s, t, weight):
    """sum over ordered i != j of weight(...) * [s_i < s_j] [t_i < t_j]."""
    s, t = r(s), r(t)
    n = len(s)
    total = 0
    for i in range(n):
        for j in range(n):
            if i != j and s[i] < s[j] and t[i] < t[j]:
                total += weight((s[i], s[j]), (t[i], t[j]))
    return total


def brute_kendall(s, t):
    return brute_weighted(s, t, lambda a, b: 1)


def brute_topk(s, t, k):
    return brute_weighted(s, t, lambda a, b: int(max(a + b) <= k))


def brute_average(s, t):
    n = len(s.ranks)
    return sum(brute_topk(s, t, k) for k in range(1, n + 1)) / n


def brute_matrix(s, t, U):
    return brute_weighted(s, t, lambda a, b: U[a[0] - 1][a[1] - 1] * U[b[0] - 1][b[1] - 1])


def brute_order_d(s, t, d):
    """Distinct index tuples (any index order) increasing under both."""
    s, t = r(s), r(t)
    count = 0
    for idx in permutations(range(len(s)), d):
        if all(s[idx[q]] < s[idx[q + 1]] for q in range(d - 1)) and \
                all(t[idx[q]] < t[idx[q + 1]] for q in range(d - 1)):
            count += 1
    return count
