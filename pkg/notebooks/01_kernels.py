# %% [markdown]
# Kendall-family kernels on small permutations, checked against brute force.

# %%
import itertools

import numpy as np

from permkern import (Additive, Average, Multiplicative, Standard, TopK, from_ranks, gram, identity,
                      kendall_naive, kernel, profile, random_permutation, weighted_naive)
from permkern.kernels import average_closed_form

# %% the standard kernel counts concordant pairs
a, b = from_ranks([2, 1, 3]), identity(3)
print("standard", kernel(a, b, Standard()), "naive", kendall_naive(a, b))

# %% top-k only counts pairs whose items sit in the top k of both rankings
s, t = random_permutation(8, 1), random_permutation(8, 2)
for k in range(1, 9):
    print("k =", k, kernel(s, t, TopK(k)))
print("top-n equals standard:", kernel(s, t, TopK(8)) == kernel(s, t, Standard()))

# %% the average kernel is the mean of the top-k kernels
mean_topk = np.mean([kernel(s, t, TopK(k)) for k in range(1, 9)])
print("average", kernel(s, t, Average()), "mean of top-k", mean_topk)

# %% the min-weight closed form does not agree with that mean
e, q = identity(4), from_ranks([1, 4, 3, 2])
print("definition", kernel(e, q, Average()), "closed form", average_closed_form(e, q))
bad = sum(kernel(x, y, Average()) != average_closed_form(x, y)
          for x, y in itertools.product(map(from_ranks, itertools.permutations(range(1, 5))), repeat=2))
print("pairs of S_4 where they differ:", bad)

# %% position-weighted kernels with relevance profiles
u = profile("hyperbolic", 8)
for spec in (Additive(u), Multiplicative(profile("logarithmic", 8))):
    print(spec.family, kernel(s, t, spec), weighted_naive(s, t, spec))

# %% a Gram matrix is positive semidefinite
perms = [random_permutation(10, [5, i]) for i in range(40)]
G = np.asarray(gram(perms, Average()), dtype=float)
print("smallest eigenvalue / trace:", np.linalg.eigvalsh(G).min() / np.trace(G))
