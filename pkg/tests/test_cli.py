import io
import json
import subprocess
import sys

import numpy as np
import pytest

from permkern.cli import main, parse_experiment_specs
from permkern.data import synth_two_class, write_rankings
from permkern.embedding import upper_indicator


def run(*argv):
    buf = io.StringIO()
    code = main([str(a) for a in argv], out=buf)
    return code, buf.getvalue()


@pytest.fixture
def ranks_csv(tmp_path):
    path = tmp_path / "train.csv"
    write_rankings(path, synth_two_class(6, 15, 2, seed=1))
    return path


# --- kernel --------------------------------------------------------------------------

def test_kernel_standard():
    assert run("kernel", "--spec", "standard", "--a", "1,2,3", "--b", "1,2,3") == (0, "3\n")


def test_kernel_topk():
    assert run("kernel", "--spec", "topk", "--k", 2, "--a", "1,2,3,4", "--b", "1,2,3,4") == (0, "1\n")


def test_kernel_average_seventeen_digits():
    code, text = run("kernel", "--spec", "average", "--a", "1,2,3", "--b", "1,2,3")
    assert code == 0 and text.strip() == "1.3333333333333333"


def test_kernel_malformed_ranking():
    assert run("kernel", "--a", "1,1,3", "--b", "1,2,3")[0] == 2
    assert run("kernel", "--a", "x,y", "--b", "1,2")[0] == 2
    assert run("kernel", "--spec", "topk", "--a", "1,2", "--b", "1,2")[0] == 2


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "permkern", "kernel", "--a", "2,1,3", "--b", "1,2,3"],
                         capture_output=True, text=True, check=True)
    assert res.stdout == "2\n"


# --- gram -----------------------------------------------------------------------------

def test_gram_topk_n_byte_identical_to_standard(tmp_path, ranks_csv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run("gram", "--input", ranks_csv, "--spec", "standard", "--output", a)[0] == 0
    assert run("gram", "--input", ranks_csv, "--spec", "topk", "--k", 6, "--output", b)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    manifest = json.loads((tmp_path / "a.csv.manifest.json").read_text())
    assert manifest["command"] == "gram" and "sha256" in manifest["inputs"]["input"]
    assert {"numpy", "python", "permkern"} <= set(manifest["versions"])


def test_gram_threads_identical(tmp_path, ranks_csv):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run("gram", "--input", ranks_csv, "--spec", "additive", "--profile", "log", "--output", a, "--threads", 1)
    run("gram", "--input", ranks_csv, "--spec", "additive", "--profile", "log", "--output", b, "--threads", 3)
    assert a.read_bytes() == b.read_bytes()


def test_gram_missing_file_is_io_error(tmp_path):
    assert run("gram", "--input", tmp_path / "nope.csv", "--output", tmp_path / "g.csv")[0] == 2


def test_gram_bad_spec_is_validation_error(tmp_path, ranks_csv):
    assert run("gram", "--input", ranks_csv, "--spec", "topk", "--k", 99, "--output", tmp_path / "g.csv")[0] == 3


# --- config ---------------------------------------------------------------------------

def test_config_merge_flags_win(tmp_path, ranks_csv):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"spec": "topk", "k": 2, "input": str(ranks_csv), "output": str(tmp_path / "c.csv")}))
    assert run("gram", "--config", cfg)[0] == 0
    meta = json.loads((tmp_path / "c.csv.json").read_text())
    assert meta["family"] == "topk" and meta["k"] == 2
    assert run("gram", "--config", cfg, "--k", 3)[0] == 0
    assert json.loads((tmp_path / "c.csv.json").read_text())["k"] == 3


def test_config_unknown_key_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"spec": "standard", "bogus": 1}))
    assert run("gram", "--config", cfg)[0] == 3


# --- train / predict -----------------------------------------------------------------

def test_train_predict_consistent(tmp_path, ranks_csv):
    model = tmp_path / "m.json"
    code, text = run("train", "--input", ranks_csv, "--spec", "average", "--model", model)
    assert code == 0
    train_acc = json.loads(model.read_text())["train_accuracy"]
    code, text2 = run("predict", "--model", model, "--input", ranks_csv, "--output", tmp_path / "p.csv")
    assert code == 0
    assert text.split()[-1] == text2.split()[-1]
    rows = (tmp_path / "p.csv").read_text().splitlines()
    assert rows[0] == "id,score,predicted,label" and len(rows) == 31
    pred = np.array([int(r.split(",")[2]) for r in rows[1:]])
    lab = np.array([int(r.split(",")[3]) for r in rows[1:]])
    assert np.mean(pred == lab) == train_acc


def test_train_one_class_is_validation_error(tmp_path):
    path = tmp_path / "one.csv"
    path.write_text("id,label,r_1,r_2\na,+,1,2\nb,+,2,1\n")
    assert run("train", "--input", path, "--model", tmp_path / "m.json")[0] == 3


# --- learn-weights ---------------------------------------------------------------------

def test_learn_weights_zero_iterations_exports_init(tmp_path, ranks_csv):
    prefix = str(tmp_path / "w_")
    assert run("learn-weights", "--input", ranks_csv, "--iters", 0, "--init", "upper",
               "--output-prefix", prefix)[0] == 0
    U = np.loadtxt(prefix + "U.csv", delimiter=",")
    assert np.array_equal(U, upper_indicator(6))


def test_learn_weights_alternating_and_svd(tmp_path, ranks_csv):
    prefix = str(tmp_path / "w_")
    assert run("learn-weights", "--input", ranks_csv, "--iters", 2, "--output-prefix", prefix)[0] == 0
    meta = json.loads(open(prefix + "weights.json").read())
    assert len(meta["history"]) == 2
    assert np.linalg.norm(np.loadtxt(prefix + "U.csv", delimiter=",")) == pytest.approx(1.0, abs=1e-12)
    assert run("learn-weights", "--input", ranks_csv, "--method", "svd", "--output-prefix", prefix)[0] == 0
    assert json.loads(open(prefix + "weights.json").read())["singular_value"] > 0


# --- experiment -------------------------------------------------------------------------

def test_experiment_end_to_end(tmp_path):
    out = tmp_path / "exp"
    code, text = run("experiment", "--synthetic", "6,30,2", "--specs", "standard,average,topk:3",
                     "--splits", 4, "--train", 30, "--test", 20, "--seed", 3, "--output-dir", out)
    assert code == 0
    doc = json.loads((out / "summary.json").read_text())
    assert sorted(r["spec"] for r in doc["rows"]) == ["average", "standard", "top-3"]
    means = [r["mean"] for r in doc["rows"]]
    assert means == sorted(means, reverse=True)
    assert len(doc["splits"]) == 4
    lines = (out / "accuracies.csv").read_text().splitlines()
    assert len(lines) == 1 + 3 * 4
    assert (out / "manifest.json").exists()
    assert "mean +- sd" in text


def test_experiment_seed_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("PERMKERN_SEED", "5")
    run("experiment", "--synthetic", "5,20,3", "--splits", 2, "--train", 20, "--test", 10,
        "--output-dir", tmp_path / "a")
    run("experiment", "--synthetic", "5,20,3", "--splits", 2, "--train", 20, "--test", 10, "--seed", 5,
        "--output-dir", tmp_path / "b")
    assert (tmp_path / "a" / "accuracies.csv").read_bytes() == (tmp_path / "b" / "accuracies.csv").read_bytes()
    assert json.loads((tmp_path / "a" / "manifest.json").read_text())["seed"] == 5


def test_experiment_spec_tokens(tmp_path):
    names = [n for n, _ in parse_experiment_specs("standard,average,topk:2,add:hb,mult:log,svd,opt:2", 6)]
    assert names == ["standard", "average", "top-2", "add weight (hb)", "mult weight (log)",
                     "learned weight (svd)", "learned weight (opt)"]
    assert run("experiment", "--synthetic", "5,10,1", "--specs", "nonsense",
               "--output-dir", tmp_path / "x")[0] == 3


# --- bench -----------------------------------------------------------------------------

def test_bench_rows(tmp_path):
    out = tmp_path / "b.csv"
    code, _ = run("bench", "--sizes", "64,256", "--reps", 1, "--output", out)
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "n,reps,fast_s,naive_s,speedup,growth_4x"
    assert len(lines) == 3 and lines[1].startswith("64,1,")


def test_bench_unsupported_spec(tmp_path):
    w = tmp_path / "w.csv"
    np.savetxt(w, np.eye(4), delimiter=",")
    assert run("bench", "--spec", "matrix", "--weights", w, "--sizes", "4", "--reps", 1,
               "--output", tmp_path / "b.csv")[0] == 3
