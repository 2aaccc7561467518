"""Weighted Kendall and higher-order kernels for permutations."""

__version__ = "0.1.0"

from .perm import (  # noqa: E402
    Permutation,
    compose,
    from_ranks,
    identity,
    inverse,
    permutation_matrix,
    random_permutation,
    reversal,
)
from .kernels import (  # noqa: E402
    Additive,
    Average,
    GeneralWeight,
    GramMatrix,
    MatrixWeight,
    Multiplicative,
    OrderD,
    Standard,
    TopK,
    WeightedEmbedding,
    cross_gram,
    gram,
    kappa_fast,
    kendall_naive,
    kernel,
    normalize_standard,
    weighted_naive,
)
from .profiles import profile  # noqa: E402
from .embedding import (  # noqa: E402
    g_tensor,
    g_weighted,
    linear_eval,
    linear_eval_tensor,
    order_d_kernel,
    phi,
    phi_tensor,
)
from .svm import SvmModel, svm_predict, svm_train  # noqa: E402
from .learning import (  # noqa: E402
    LabeledDataset,
    LearnedWeights,
    alternating_learn,
    leading_singular_pair,
    suquan_svd_init,
)
from .stats import wilcoxon_signed_rank  # noqa: E402
from .data import (  # noqa: E402
    EvaluationReport,
    LearnedKernel,
    compare_to_baseline,
    evaluate,
    load_rankings,
    synth_two_class,
)
