"""Wall-clock scaling of the fast kernel path against the O(n^2) reference."""
from __future__ import annotations

import gc
import statistics
import time

from .errors import UnsupportedSpec
from .kernels import kappa_fast, weighted_naive
from .perm import identity, random_permutation

NAIVE_MAX = 4096


def _median_time(fn, reps: int) -> float:
    fn()  # warm-up, discarded
    times = []
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(reps):
            t0 = time.perf_counter()
            fn()
            times.append(time.perf_counter() - t0)
    finally:
        if enabled:
            gc.enable()
    return statistics.median(times)


def _interleaved_medians(fns: dict, reps: int) -> dict:
    """Median time per entry, with repetitions taken round-robin.

    Slow drifts of the machine then hit every entry alike instead of
    biasing whichever size happened to be timed during them.
    """
    for fn in fns.values():
        fn()  # warm-up, discarded
    times = {key: [] for key in fns}
    enabled = gc.isenabled()
    gc.disable()
    try:
        for _ in range(reps):
            for key, fn in fns.items():
                t0 = time.perf_counter()
                fn()
                times[key].append(time.perf_counter() - t0)
    finally:
        if enabled:
            gc.enable()
    return {key: statistics.median(v) for key, v in times.items()}


def run_bench(sizes, make_spec, reps: int = 5, seed: int = 0, naive_max: int = NAIVE_MAX) -> list:
    """One row per size: median fast and naive times, speedup, growth ratio.

    ``make_spec(n)`` builds the kernel spec for size ``n``. ``growth`` at
    size ``n`` is ``fast(n) / fast(n / 4)`` when ``n / 4`` was also timed.
    """
    specs = {}
    for n in sizes:
        specs[n] = make_spec(n)
        if not specs[n].fast:
            raise UnsupportedSpec(f"{specs[n].family!r} has no fast path to benchmark")
    perms = {n: random_permutation(n, [seed, n]) for n in sizes}
    # fast timings first, so the large naive allocations cannot disturb them
    fast_times = _interleaved_medians({n: (lambda n=n: kappa_fast(perms[n], specs[n])) for n in sizes}, reps)
    rows = []
    for n in sizes:
        t_fast = fast_times[n]
        t_naive = None
        if n <= naive_max:
            e = identity(n)
            t_naive = _median_time(lambda: weighted_naive(e, perms[n], specs[n]), reps)
        growth = t_fast / fast_times[n // 4] if n % 4 == 0 and n // 4 in fast_times else None
        rows.append({
            "n": n,
            "reps": reps,
            "fast_s": t_fast,
            "naive_s": t_naive,
            "speedup": (t_naive / t_fast) if t_naive is not None else None,
            "growth_4x": growth,
        })
    return rows


def write_bench_csv(path, rows) -> None:
    from ._io import fmt

    cols = ["n", "reps", "fast_s", "naive_s", "speedup", "growth_4x"]
    with open(path, "w") as fh:
        fh.write(",".join(cols) + "\n")
        for r in rows:
            fh.write(",".join("" if r[c] is None else fmt(r[c]) for c in cols) + "\n")
