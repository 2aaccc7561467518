# %% [markdown]
# Permutations acting on weight matrices and tensors, and the kernels they induce.

# %%
import numpy as np

from permkern import (Standard, from_ranks, g_tensor, g_weighted, kernel, linear_eval, order_d_kernel, phi,
                      random_permutation)
from permkern.embedding import increasing_indicator, upper_indicator

# %% phi moves the weight of pair (a, b) to the items ranked at a and b
print(phi(from_ranks([2, 1]), upper_indicator(2)))

# %% with the strict upper indicator the induced kernel is the Kendall kernel
s, t = random_permutation(7, 3), random_permutation(7, 4)
print(g_weighted(s, t, upper_indicator(7)), kernel(s, t, Standard()))

# %% any weight matrix gives a valid kernel, here a random one
rng = np.random.default_rng(0)
U = rng.normal(size=(7, 7))
perms = [random_permutation(7, rng) for _ in range(30)]
G = np.array([[g_weighted(p, q, U) for q in perms] for p in perms])
print("min eigenvalue / trace:", np.linalg.eigvalsh(G).min() / np.trace(G))

# %% order-d kernels count d-subsets placed in the same relative order
for d in (2, 3, 4):
    print("d =", d, order_d_kernel(s, t, d), g_tensor(s, t, increasing_indicator(7, d)))

# %% a linear functional <B, phi(s, U)> evaluated three equivalent ways
B = rng.normal(size=(7, 7))
q = random_permutation(7, rng)
print([linear_eval(q, U, B, mode) for mode in ("embed", "swapped", "kronecker")])
