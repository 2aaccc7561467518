"""Position-relevance vectors ``u`` for additive and multiplicative weights."""
import numpy as np

from .errors import BadK, BadKind

KINDS = ("hard_cutoff", "hyperbolic", "logarithmic")
_ALIASES = {"hb": "hyperbolic", "log": "logarithmic", "cutoff": "hard_cutoff", "top": "hard_cutoff"}


def profile(kind: str, n: int, k: int | None = None) -> np.ndarray:
    """Relevance of positions ``1..n``.

    ``hyperbolic``: ``1/(i+1)``; ``logarithmic``: ``1/log2(i+1)``;
    ``hard_cutoff``: ``1`` for ``i <= k`` else ``0``.
    """
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise BadKind(f"unknown profile {kind!r}; expected one of {KINDS}")
    if n < 1:
        raise BadK(f"n must be >= 1, got {n}")
    i = np.arange(1, n + 1, dtype=np.float64)
    if kind == "hyperbolic":
        return 1.0 / (i + 1.0)
    if kind == "logarithmic":
        return 1.0 / np.log2(i + 1.0)
    if k is None or not 1 <= k <= n:
        raise BadK(f"hard_cutoff needs 1 <= k <= {n}, got {k}")
    return (i <= k).astype(np.float64)
