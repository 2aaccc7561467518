"""Ranking data: CSV ingestion, a synthetic two-class generator, and the
repeated-subsampling evaluation protocol with paired significance tests.
"""
from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._io import fmt
from .embedding import upper_indicator
from .errors import (
    BadLabelValue,
    BadParams,
    BaselineMissing,
    MissingColumn,
    NoValidRows,
    NotEnoughData,
    PermKernError,
    TooFewPairs,
)
from .kernels import (
    Additive,
    Average,
    Multiplicative,
    Standard,
    TopK,
    WeightedEmbedding,
    cross_gram,
    gram,
)
from .learning import LabeledDataset, alternating_learn, suquan_svd_init
from .perm import Permutation, identity, reversal
from .stats import wilcoxon_signed_rank
from .svm import svm_predict, svm_train

log = logging.getLogger(__name__)

DEFAULT_LABEL_MAP = {"+1": 1, "1": 1, "+": 1, "-1": -1, "-": -1}

__all__ = [
    "LabeledDataset",
    "LearnedKernel",
    "EvaluationReport",
    "load_rankings",
    "write_rankings",
    "synth_two_class",
    "evaluate",
    "compare_to_baseline",
    "spec_label",
    "write_report_csv",
    "write_summary_json",
]


def load_rankings(path, label_column: str = "label", label_map: dict | None = None) -> LabeledDataset:
    """Read ``id,<label>,r_1..r_n`` rows into a validated dataset.

    Rows whose ranks are incomplete, tied or out of range are dropped;
    the count is stored in ``dataset.dropped``.
    """
    label_map = DEFAULT_LABEL_MAP if label_map is None else {str(k): int(v) for k, v in label_map.items()}
    if set(label_map.values()) - {1, -1}:
        raise BadParams("label_map must map onto +1 and -1")
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in ("id", label_column):
            if col not in header:
                raise MissingColumn(f"column {col!r} not found in {path}")
        rank_cols = [c for c in header if c.startswith("r_")]
        rank_cols.sort(key=lambda c: int(c[2:]) if c[2:].isdigit() else math.inf)
        if not rank_cols:
            raise MissingColumn(f"no rank columns r_1..r_n in {path}")
        expected = [f"r_{i}" for i in range(1, len(rank_cols) + 1)]
        if rank_cols != expected:
            raise MissingColumn(f"rank columns must be r_1..r_{len(rank_cols)}, got {rank_cols}")
        perms, labels, ids = [], [], []
        dropped = 0
        for lineno, row in enumerate(reader, start=2):
            raw = row[label_column]
            raw = raw.strip() if raw is not None else raw
            if raw not in label_map:
                raise BadLabelValue(f"row {lineno} (id {row['id']!r}): label {raw!r} not in {sorted(label_map)}")
            try:
                ranks = [int(row[c]) for c in rank_cols]
                perm = Permutation(ranks)
            except (TypeError, ValueError):
                dropped += 1
                continue
            perms.append(perm)
            labels.append(label_map[raw])
            ids.append(row["id"])
    if dropped:
        log.info("dropped %d rows with incomplete or tied rankings from %s", dropped, path)
    if not perms:
        raise NoValidRows(f"no complete rankings in {path} ({dropped} dropped)")
    return LabeledDataset(tuple(perms), np.array(labels), tuple(ids), dropped)


def write_rankings(path, data: LabeledDataset, label_names: dict | None = None) -> None:
    names = label_names or {1: "+1", -1: "-1"}
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["id", "label"] + [f"r_{i}" for i in range(1, data.n + 1)])
        for pid, lab, p in zip(data.ids, data.labels, data.perms):
            w.writerow([pid, names[int(lab)]] + p.tolist())


def synth_two_class(n: int, m_per_class: int, noise_swaps: int, seed) -> LabeledDataset:
    """Class +1 around the identity, class -1 around the reversal.

    Each sample applies ``noise_swaps`` uniformly drawn adjacent
    transpositions (items ``k, k+1`` exchange ranks) to its class centre.
    """
    if n < 2 or m_per_class < 1 or noise_swaps < 0:
        raise BadParams(f"need n >= 2, m_per_class >= 1, noise_swaps >= 0; got {n}, {m_per_class}, {noise_swaps}")
    rng = np.random.default_rng(seed)
    perms, labels, ids = [], [], []
    for label, centre, tag in ((1, identity(n), "p"), (-1, reversal(n), "n")):
        for i in range(m_per_class):
            r = centre.ranks.copy()
            for k in rng.integers(0, n - 1, size=noise_swaps):
                r[k], r[k + 1] = r[k + 1], r[k]
            perms.append(Permutation(r, _trusted=True))
            labels.append(label)
            ids.append(f"{tag}{i + 1}")
    return LabeledDataset(tuple(perms), np.array(labels), tuple(ids))


@dataclass(frozen=True)
class LearnedKernel:
    """Kernel whose weight matrix is fitted on each training split.

    ``method="svd"`` uses :func:`suquan_svd_init` then an SVM on ``G_U``;
    ``method="opt"`` uses :func:`alternating_learn` from the
    upper-triangular initial weights and its joint classifier.
    """

    method: str = "svd"
    iters: int = 5
    family = "learned"

    def describe(self):
        return {"family": self.family, "method": self.method, "iters": self.iters}


def spec_label(spec) -> str:
    if isinstance(spec, Standard):
        return "standard"
    if isinstance(spec, TopK):
        return f"top-{spec.k}"
    if isinstance(spec, Average):
        return "average"
    if isinstance(spec, (Additive, Multiplicative)):
        return f"{'add' if isinstance(spec, Additive) else 'mult'} weight"
    if isinstance(spec, LearnedKernel):
        return f"learned weight ({spec.method})"
    return getattr(spec, "family", type(spec).__name__)


@dataclass(eq=False)
class EvaluationReport:
    name: str
    descriptor: dict
    accuracies: np.ndarray
    split_seeds: list
    error: str | None = None

    @property
    def mean(self) -> float:
        return float(np.mean(self.accuracies)) if self.accuracies.size else math.nan

    @property
    def sd(self) -> float:
        if self.accuracies.size < 2:
            return 0.0 if self.accuracies.size else math.nan
        return float(np.std(self.accuracies, ddof=1))


def _draw_split(m, train_size, test_size, labels, seed, s):
    attempt = 0
    while True:
        rng = np.random.default_rng([seed, s, attempt])
        order = rng.permutation(m)
        train = np.sort(order[:train_size])
        test = np.sort(order[train_size:train_size + test_size])
        if np.unique(labels[train]).size == 2:
            return train, test, [int(seed), s, attempt]
        log.warning("split %d attempt %d has a one-class training set; resampling", s, attempt)
        attempt += 1
        if attempt > 1000:
            raise NotEnoughData("could not draw a two-class training set")


def _fit_predict(spec, train: LabeledDataset, test: LabeledDataset, C, tol):
    if isinstance(spec, LearnedKernel):
        if spec.method == "svd":
            U, _, _ = suquan_svd_init(train)
            spec = WeightedEmbedding(U)
        elif spec.method == "opt":
            lw = alternating_learn(train, upper_indicator(train.n), C=C, iters=spec.iters, tol=tol)
            return lw.predict(test.perms)
        else:
            raise BadParams(f"unknown learning method {spec.method!r}")
    G = gram(train.perms, spec, threads=1)
    model = svm_train(G, train.labels, C, tol, spec=spec)
    K = cross_gram(test.perms, train.perms, spec, threads=1)
    return svm_predict(model, K)[1]


def _normalize_specs(specs):
    out = []
    for item in specs:
        if isinstance(item, tuple):
            out.append((str(item[0]), item[1]))
        else:
            out.append((spec_label(item), item))
    names = [n for n, _ in out]
    if len(set(names)) != len(names):
        # disambiguate repeated labels by position
        seen = {}
        fixed = []
        for name, spec in out:
            seen[name] = seen.get(name, 0) + 1
            fixed.append((name if names.count(name) == 1 else f"{name}#{seen[name]}", spec))
        out = fixed
    return out


def evaluate(data: LabeledDataset, specs, splits: int = 10, train_size: int = 60, test_size: int = 30,
             C: float = 1.0, seed: int = 0, tol: float = 1e-3, threads: int | None = 1) -> list:
    """Repeated random train/test subsampling, one SVM per kernel per split.

    ``specs`` holds kernel specs, :class:`LearnedKernel` entries, or
    ``(name, spec)`` pairs. Every kernel sees the same splits, so the
    per-split accuracies are paired across kernels.
    """
    if splits < 1:
        raise BadParams(f"splits must be >= 1, got {splits}")
    if train_size < 2 or test_size < 1 or train_size + test_size > data.m:
        raise NotEnoughData(f"train {train_size} + test {test_size} exceeds {data.m} samples")
    named = _normalize_specs(specs)
    labels = np.asarray(data.labels)
    split_info = [_draw_split(data.m, train_size, test_size, labels, seed, s) for s in range(splits)]

    def run_split(info):
        train_idx, test_idx, _ = info
        train, test = data.subset(train_idx), data.subset(test_idx)
        row = []
        for _, spec in named:
            try:
                pred = _fit_predict(spec, train, test, C, tol)
                row.append(float(np.mean(pred == test.labels)))
            except PermKernError as exc:
                row.append(exc)
        return row

    workers = 1 if threads is None else max(1, int(threads))
    if workers == 1:
        rows = [run_split(info) for info in split_info]
    else:
        with ThreadPoolExecutor(max_workers=workers) as ex:
            rows = list(ex.map(run_split, split_info))
    seeds = [info[2] for info in split_info]
    reports = []
    for j, (name, spec) in enumerate(named):
        column = [r[j] for r in rows]
        errors = [c for c in column if isinstance(c, Exception)]
        if errors:
            reports.append(EvaluationReport(name, spec.describe(), np.array([]), seeds,
                                            error=f"{type(errors[0]).__name__}: {errors[0]}"))
        else:
            reports.append(EvaluationReport(name, spec.describe(), np.array(column), seeds))
    return reports


def compare_to_baseline(reports, baseline_name: str = "standard") -> list:
    """Table rows ``{spec, mean, sd, p_value}`` in decreasing mean accuracy.

    ``p_value`` is the one-sided paired Wilcoxon p for the kernel beating
    the baseline, reported only when its mean is higher; otherwise ``None``.
    """
    base = next((r for r in reports if r.name == baseline_name), None)
    if base is None or base.error:
        raise BaselineMissing(f"baseline {baseline_name!r} not among {[r.name for r in reports]}")
    rows = []
    for r in reports:
        p = None
        if r is not base and not r.error and r.mean > base.mean:
            try:
                p = wilcoxon_signed_rank(r.accuracies, base.accuracies)
            except TooFewPairs:
                p = None
        rows.append({"spec": r.name, "mean": r.mean, "sd": r.sd, "p_value": p,
                     "splits": int(r.accuracies.size), "error": r.error})
    order = sorted(range(len(rows)), key=lambda i: (math.isnan(rows[i]["mean"]), -np.nan_to_num(rows[i]["mean"])))
    return [rows[i] for i in order]


def write_report_csv(path, reports) -> None:
    with open(path, "w", newline="") as fh:
        fh.write("spec,split,accuracy\n")
        for r in reports:
            for s, acc in enumerate(r.accuracies.tolist(), start=1):
                fh.write(f"{r.name},{s},{fmt(acc)}\n")


def write_summary_json(path, table, extra: dict | None = None) -> None:
    doc = {"rows": table}
    if extra:
        doc.update(extra)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, allow_nan=True)
        fh.write("\n")
