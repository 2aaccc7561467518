# %% [markdown]
# Learning the pair weights U together with the classifier coefficients B.

# %%
import numpy as np

from permkern import alternating_learn, suquan_svd_init, synth_two_class
from permkern.embedding import upper_indicator

data = synth_two_class(8, 40, 3, seed=0)

# %% the spectral start: leading singular pair of the class-difference moment
U, B, sv = suquan_svd_init(data)
print("singular value", sv)
print(np.round(U, 3))

# %% alternating fits starting from the Kendall weights
learned = alternating_learn(data, upper_indicator(8), C=1.0, iters=4)
for rec in learned.history:
    print(rec["iteration"], rec["train_accuracy_B"], rec["train_accuracy_U"], round(rec["objective_U"], 4))

# %% the learned classifier on a fresh draw of the same model
test = synth_two_class(8, 100, 3, seed=1)
print("test accuracy", np.mean(learned.predict(test.perms) == test.labels))
