# %% [markdown]
# Paired comparison of kernels over repeated train/test subsampling.

# %%
from permkern import Additive, Average, LearnedKernel, Standard, TopK, compare_to_baseline, evaluate, profile
from permkern import synth_two_class

data = synth_two_class(10, 60, 120, seed=2)
specs = [Standard(), Average(), TopK(4), Additive(profile("hyperbolic", 10)), LearnedKernel("svd")]
reports = evaluate(data, specs, splits=10, train_size=60, test_size=40, seed=0)

# %% rows sorted by mean accuracy; p-values only where a kernel beats the baseline
for row in compare_to_baseline(reports):
    p = "-" if row["p_value"] is None else f"{row['p_value']:.4f}"
    print(f"{row['spec']:24s} {row['mean']:.3f} +- {row['sd']:.3f}  p={p}")
