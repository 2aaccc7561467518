"""Command-line interface: ``permkern <command> [options]``.

Commands: kernel, gram, train, predict, learn-weights, experiment, bench.
Options may also come from a JSON file given with ``--config``; explicit
flags take precedence. Exit codes: 0 success, 2 I/O, 3 invalid input,
4 numerical failure (``kernel`` reports invalid input with 2).
"""
from __future__ import annotations

import argparse
import hashlib
import json
import os
import platform
import sys
import time

import numpy as np

from . import __version__
from ._io import fmt, read_matrix_csv
from .bench import NAIVE_MAX, run_bench, write_bench_csv
from .data import (
    LearnedKernel,
    compare_to_baseline,
    evaluate,
    load_rankings,
    synth_two_class,
    write_report_csv,
    write_summary_json,
)
from .embedding import upper_indicator
from .errors import PermKernError, ValidationError
from .kernels import (
    Additive,
    Average,
    MatrixWeight,
    Multiplicative,
    OrderD,
    Standard,
    TopK,
    WeightedEmbedding,
    cross_gram,
    gram,
    kernel,
    spec_from_dict,
    write_gram,
)
from .learning import alternating_learn, suquan_svd_init, write_weights
from .perm import from_ranks
from .profiles import profile
from .svm import svm_predict, svm_train

EXIT_IO, EXIT_VALIDATION, EXIT_NUMERIC = 2, 3, 4
FAMILIES = ("standard", "topk", "average", "additive", "multiplicative", "matrix", "embedding", "order_d")

SPEC_DEFAULTS = {"spec": "standard", "k": None, "profile": "hyperbolic", "profile_k": None,
                 "weights": None, "d": 3}
DEFAULTS = {
    "kernel": {**SPEC_DEFAULTS, "a": None, "b": None, "input": None},
    "gram": {**SPEC_DEFAULTS, "input": None, "output": "gram.csv", "label_column": "label", "threads": None},
    "train": {**SPEC_DEFAULTS, "input": None, "model": "model.json", "label_column": "label",
              "C": 1.0, "tol": 1e-3, "threads": None},
    "predict": {"model": None, "input": None, "output": "predictions.csv", "label_column": "label",
                "threads": None},
    "learn-weights": {"input": None, "output_prefix": "learned_", "method": "alternating", "init": "upper",
                      "iters": 5, "C": 1.0, "tol": 1e-3, "label_column": "label"},
    "experiment": {"input": None, "synthetic": None, "specs": "standard,average", "baseline": "standard",
                   "splits": 10, "train": 60, "test": 30, "C": 1.0, "tol": 1e-3, "seed": None,
                   "output_dir": "experiment", "label_column": "label", "threads": 1},
    "bench": {**SPEC_DEFAULTS, "sizes": "1024,4096,16384,65536,262144,1048576", "reps": 5, "seed": None,
              "naive_max": NAIVE_MAX, "output": "bench.csv"},
}


def _add_spec_options(p):
    p.add_argument("--spec", choices=FAMILIES, help="kernel family")
    p.add_argument("--k", type=int, help="cutoff for topk")
    p.add_argument("--profile", help="relevance profile for additive/multiplicative: "
                   "hyperbolic, logarithmic or hard_cutoff")
    p.add_argument("--profile-k", dest="profile_k", type=int, help="k for the hard_cutoff profile")
    p.add_argument("--weights", help="CSV weight matrix for matrix/embedding kernels")
    p.add_argument("--d", type=int, help="tuple order for order_d")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="permkern", description="Kendall-family kernels for permutations.")
    parser.add_argument("--version", action="version", version=f"permkern {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_):
        p = sub.add_parser(name, help=help_, argument_default=argparse.SUPPRESS)
        p.add_argument("--config", help="JSON file of option values; flags win")
        return p

    p = command("kernel", "evaluate the kernel between two rankings")
    _add_spec_options(p)
    p.add_argument("--a", help="first ranking, comma separated")
    p.add_argument("--b", help="second ranking, comma separated")
    p.add_argument("--input", help="rankings CSV; its first two rows are used")

    p = command("gram", "write the Gram matrix of a rankings file")
    _add_spec_options(p)
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--label-column", dest="label_column")
    p.add_argument("--threads", type=int)

    p = command("train", "train a kernel SVM")
    _add_spec_options(p)
    p.add_argument("--input")
    p.add_argument("--model")
    p.add_argument("--label-column", dest="label_column")
    p.add_argument("--C", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--threads", type=int)

    p = command("predict", "score rankings with a trained model")
    p.add_argument("--model")
    p.add_argument("--input")
    p.add_argument("--output")
    p.add_argument("--label-column", dest="label_column")
    p.add_argument("--threads", type=int)

    p = command("learn-weights", "learn a weight matrix U and coefficients B")
    p.add_argument("--input")
    p.add_argument("--output-prefix", dest="output_prefix")
    p.add_argument("--method", choices=("alternating", "svd"))
    p.add_argument("--init", help="'upper' (strict upper-triangular ones) or a CSV matrix")
    p.add_argument("--iters", type=int)
    p.add_argument("--C", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--label-column", dest="label_column")

    p = command("experiment", "repeated-subsampling comparison of kernels")
    p.add_argument("--input", help="rankings CSV")
    p.add_argument("--synthetic", help="N,M_PER_CLASS,NOISE_SWAPS synthetic data instead of --input")
    p.add_argument("--specs", help="comma list: standard, average, topk:K, add:hb, add:log, "
                   "mult:hb, mult:log, svd, opt[:ITERS]")
    p.add_argument("--baseline")
    p.add_argument("--splits", type=int)
    p.add_argument("--train", type=int)
    p.add_argument("--test", type=int)
    p.add_argument("--C", type=float)
    p.add_argument("--tol", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--output-dir", dest="output_dir")
    p.add_argument("--label-column", dest="label_column")
    p.add_argument("--threads", type=int)

    p = command("bench", "time the fast path against the naive reference")
    _add_spec_options(p)
    p.add_argument("--sizes", help="comma separated sizes")
    p.add_argument("--reps", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--naive-max", dest="naive_max", type=int)
    p.add_argument("--output")
    return parser


def resolve_config(command: str, explicit: dict) -> dict:
    """Merge defaults, the optional JSON config, then explicit flags."""
    cfg = dict(DEFAULTS[command])
    path = explicit.pop("config", None)
    if path:
        with open(path) as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValidationError("config file must hold a JSON object")
        unknown = sorted(set(loaded) - set(cfg))
        if unknown:
            raise ValidationError(f"unknown config keys for {command}: {unknown}")
        cfg.update(loaded)
    cfg.update(explicit)
    if "seed" in cfg and cfg["seed"] is None:
        cfg["seed"] = int(os.environ.get("PERMKERN_SEED", "0"))
    return cfg


def parse_ranking(text: str):
    try:
        values = [int(v) for v in str(text).split(",")]
    except ValueError:
        raise ValidationError(f"ranking {text!r} is not a comma separated list of integers") from None
    return from_ranks(values)


def make_spec(cfg: dict, n: int):
    family = cfg["spec"]
    if family == "standard":
        return Standard()
    if family == "topk":
        if cfg.get("k") is None:
            raise ValidationError("--spec topk needs --k")
        return TopK(int(cfg["k"]))
    if family == "average":
        return Average()
    if family in ("additive", "multiplicative"):
        u = profile(cfg.get("profile") or "hyperbolic", n, cfg.get("profile_k"))
        return Additive(u) if family == "additive" else Multiplicative(u)
    if family in ("matrix", "embedding"):
        if not cfg.get("weights"):
            raise ValidationError(f"--spec {family} needs --weights")
        U = read_matrix_csv(cfg["weights"])
        return MatrixWeight(U) if family == "matrix" else WeightedEmbedding(U)
    if family == "order_d":
        return OrderD(int(cfg.get("d") or 3))
    raise ValidationError(f"unknown kernel family {family!r}")


def parse_experiment_specs(text: str, n: int) -> list:
    """Tokens such as ``topk:4`` or ``add:hb`` to ``(label, spec)`` pairs."""
    out = []
    for tok in [t.strip() for t in text.split(",") if t.strip()]:
        head, _, arg = tok.partition(":")
        if head == "standard":
            out.append(("standard", Standard()))
        elif head == "average":
            out.append(("average", Average()))
        elif head == "topk":
            out.append((f"top-{int(arg)}", TopK(int(arg))))
        elif head in ("add", "mult"):
            kind = {"hb": "hyperbolic", "log": "logarithmic"}.get(arg, arg)
            short = {"hyperbolic": "hb", "logarithmic": "log"}.get(kind, kind)
            u = profile(kind, n)
            spec = Additive(u) if head == "add" else Multiplicative(u)
            out.append((f"{head} weight ({short})", spec))
        elif head == "svd":
            out.append(("learned weight (svd)", LearnedKernel("svd")))
        elif head == "opt":
            out.append(("learned weight (opt)", LearnedKernel("opt", int(arg) if arg else 5)))
        else:
            raise ValidationError(f"unknown spec token {tok!r}")
    if not out:
        raise ValidationError("no kernel specs given")
    return out


def _sha256(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def write_manifest(path, command, cfg, outputs, started) -> None:
    """Run record: command, resolved options, seed, versions, timing, output hashes."""
    import numba
    import scipy

    inputs = {}
    for key in ("input", "model", "weights", "init"):
        val = cfg.get(key)
        if val and os.path.isfile(str(val)):
            inputs[key] = {"path": str(val), "sha256": _sha256(val)}
    doc = {
        "command": command,
        "options": {k: v for k, v in cfg.items()},
        "seed": cfg.get("seed"),
        "inputs": inputs,
        "outputs": {str(p): _sha256(p) for p in outputs},
        "versions": {"permkern": __version__, "python": platform.python_version(),
                     "numpy": np.__version__, "scipy": scipy.__version__, "numba": numba.__version__},
        "wall_time_s": time.perf_counter() - started,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _require(cfg, key, flag=None):
    if not cfg.get(key):
        raise ValidationError(f"missing --{flag or key.replace('_', '-')}")
    return cfg[key]


def cmd_kernel(cfg, out):
    if cfg.get("input"):
        data = load_rankings(cfg["input"], "label")
        if data.m < 2:
            raise ValidationError("input needs at least two rankings")
        a, b = data.perms[0], data.perms[1]
    else:
        a = parse_ranking(_require(cfg, "a"))
        b = parse_ranking(_require(cfg, "b"))
    value = kernel(a, b, make_spec(cfg, a.n))
    print(fmt(value), file=out)
    return []


def cmd_gram(cfg, out):
    data = load_rankings(_require(cfg, "input"), cfg["label_column"])
    spec = make_spec(cfg, data.n)
    G = gram(data.perms, spec, threads=cfg.get("threads"))
    write_gram(cfg["output"], G, data.perms, spec)
    print(f"wrote {data.m}x{data.m} Gram matrix to {cfg['output']}", file=out)
    return [cfg["output"], cfg["output"] + ".json"]


def cmd_train(cfg, out):
    data = load_rankings(_require(cfg, "input"), cfg["label_column"])
    spec = make_spec(cfg, data.n)
    G = gram(data.perms, spec, threads=cfg.get("threads"))
    model = svm_train(G, data.labels, cfg["C"], cfg["tol"], spec=spec)
    acc = float(np.mean(svm_predict(model, G)[1] == data.labels))
    doc = {
        "spec": spec.describe(),
        "C": model.C,
        "tol": model.tol,
        "alphas": model.alphas.tolist(),
        "bias": model.bias,
        "labels": model.labels.astype(int).tolist(),
        "train_ranks": [p.tolist() for p in data.perms],
        "train_ids": list(data.ids),
        "iterations": model.iterations,
        "objective": model.objective,
        "train_accuracy": acc,
    }
    with open(cfg["model"], "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    print(f"training accuracy {fmt(acc)}", file=out)
    return [cfg["model"]]


def cmd_predict(cfg, out):
    from .svm import SvmModel

    with open(_require(cfg, "model")) as fh:
        doc = json.load(fh)
    spec = spec_from_dict(doc["spec"])
    train = [from_ranks(r) for r in doc["train_ranks"]]
    model = SvmModel(alphas=np.array(doc["alphas"]), bias=float(doc["bias"]),
                     labels=np.array(doc["labels"], dtype=np.float64), C=doc["C"], tol=doc["tol"], spec=spec)
    data = load_rankings(_require(cfg, "input"), cfg["label_column"])
    K = cross_gram(data.perms, train, spec, threads=cfg.get("threads"))
    scores, labels = svm_predict(model, K)
    with open(cfg["output"], "w") as fh:
        fh.write("id,score,predicted,label\n")
        for pid, s, yhat, y in zip(data.ids, scores, labels, data.labels):
            fh.write(f"{pid},{fmt(s)},{int(yhat):+d},{int(y):+d}\n")
    acc = float(np.mean(labels == data.labels))
    print(f"accuracy {fmt(acc)}", file=out)
    return [cfg["output"]]


def _initial_weights(cfg, n):
    init = cfg.get("init") or "upper"
    if init == "upper":
        return upper_indicator(n)
    U = read_matrix_csv(init)
    if U.shape != (n, n):
        raise ValidationError(f"initial weights have shape {U.shape}, need ({n}, {n})")
    return U


def cmd_learn_weights(cfg, out):
    data = load_rankings(_require(cfg, "input"), cfg["label_column"])
    prefix = cfg["output_prefix"]
    meta = {"method": cfg["method"], "iterations": cfg["iters"], "C": cfg["C"], "tol": cfg["tol"]}
    if cfg["method"] == "svd":
        U, B, s = suquan_svd_init(data)
        meta.update({"iterations": 0, "singular_value": s, "history": []})
    elif int(cfg["iters"]) == 0:
        U = _initial_weights(cfg, data.n)
        B = np.zeros_like(U)
        meta.update({"history": [], "final_objective": None})
    else:
        lw = alternating_learn(data, _initial_weights(cfg, data.n), cfg["C"], int(cfg["iters"]), cfg["tol"])
        U, B = lw.U, lw.B
        hist = [{k: v for k, v in h.items() if k != "U"} for h in lw.history]
        meta.update({"history": hist, "final_objective": hist[-1]["objective_U"],
                     "bias": lw.bias, "scale": lw.scale})
    paths = write_weights(prefix, U, B, meta)
    print(f"wrote {', '.join(paths)}", file=out)
    return paths


def cmd_experiment(cfg, out):
    if cfg.get("synthetic"):
        try:
            n, m, noise = (int(v) for v in str(cfg["synthetic"]).split(","))
        except ValueError:
            raise ValidationError("--synthetic expects N,M_PER_CLASS,NOISE_SWAPS") from None
        data = synth_two_class(n, m, noise, cfg["seed"])
    else:
        data = load_rankings(_require(cfg, "input"), cfg["label_column"])
    specs = parse_experiment_specs(cfg["specs"], data.n)
    reports = evaluate(data, specs, splits=int(cfg["splits"]), train_size=int(cfg["train"]),
                       test_size=int(cfg["test"]), C=float(cfg["C"]), seed=int(cfg["seed"]),
                       tol=float(cfg["tol"]), threads=cfg.get("threads"))
    table = compare_to_baseline(reports, cfg["baseline"])
    outdir = cfg["output_dir"]
    os.makedirs(outdir, exist_ok=True)
    csv_path = os.path.join(outdir, "accuracies.csv")
    json_path = os.path.join(outdir, "summary.json")
    write_report_csv(csv_path, reports)
    write_summary_json(json_path, table, {
        "baseline": cfg["baseline"],
        "splits": [r for r in reports[0].split_seeds],
        "train": int(cfg["train"]),
        "test": int(cfg["test"]),
        "C": float(cfg["C"]),
        "dropped_rows": int(data.dropped),
    })
    width = max(len(r["spec"]) for r in table)
    print(f"{'kernel':<{width}}  mean +- sd      p-value", file=out)
    for r in table:
        p = "---" if r["p_value"] is None else f"{r['p_value']:.3g}"
        if r["error"]:
            print(f"{r['spec']:<{width}}  failed: {r['error']}", file=out)
        else:
            print(f"{r['spec']:<{width}}  {r['mean']:.3f} +- {r['sd']:.3f}  {p}", file=out)
    return [csv_path, json_path]


def cmd_bench(cfg, out):
    sizes = [int(v) for v in str(cfg["sizes"]).split(",")]
    rows = run_bench(sizes, lambda n: make_spec({**cfg, "k": cfg.get("k") or max(1, n // 2)}, n),
                     reps=int(cfg["reps"]), seed=int(cfg["seed"]), naive_max=int(cfg["naive_max"]))
    write_bench_csv(cfg["output"], rows)
    for r in rows:
        naive = "-" if r["naive_s"] is None else f"{r['naive_s']:.4g}s"
        growth = "-" if r["growth_4x"] is None else f"{r['growth_4x']:.2f}"
        print(f"n={r['n']:>8}  fast {r['fast_s']:.4g}s  naive {naive}  growth(4x) {growth}", file=out)
    return [cfg["output"]]


COMMANDS = {
    "kernel": cmd_kernel,
    "gram": cmd_gram,
    "train": cmd_train,
    "predict": cmd_predict,
    "learn-weights": cmd_learn_weights,
    "experiment": cmd_experiment,
    "bench": cmd_bench,
}


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    ns = vars(parser.parse_args(argv))
    command = ns.pop("command")
    started = time.perf_counter()
    try:
        cfg = resolve_config(command, ns)
        outputs = COMMANDS[command](cfg, out)
        if outputs:
            manifest = (os.path.join(cfg["output_dir"], "manifest.json") if command == "experiment"
                        else f"{outputs[0]}.manifest.json")
            write_manifest(manifest, command, cfg, outputs, started)
    except OSError as exc:
        print(f"permkern {command}: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (PermKernError, ValueError) as exc:
        category = getattr(exc, "category", "validation")
        print(f"permkern {command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        if category == "numeric":
            return EXIT_NUMERIC
        return EXIT_IO if command == "kernel" else EXIT_VALIDATION
    return 0


if __name__ == "__main__":
    sys.exit(main())
