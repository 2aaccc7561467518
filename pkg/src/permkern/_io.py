"""Plain-text numeric output shared by every file writer."""
import csv
import itertools

import numpy as np


def fmt(x) -> str:
    """17 significant digits; integers print without a decimal point."""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return format(float(x), ".17g")


def write_matrix_csv(path, values) -> None:
    values = np.asarray(values)
    with open(path, "w", newline="") as fh:
        for row in np.atleast_2d(values):
            fh.write(",".join(fmt(v) for v in row.tolist()))
            fh.write("\n")


def read_matrix_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        rows = [[float(v) for v in row] for row in csv.reader(fh) if row]
    return np.array(rows, dtype=np.float64)


def write_tensor_csv(path, T) -> None:
    """Flat layout: one row per entry, columns ``i1..id,value`` (1-based)."""
    T = np.asarray(T)
    d = T.ndim
    with open(path, "w", newline="") as fh:
        fh.write(",".join([f"i{k}" for k in range(1, d + 1)] + ["value"]) + "\n")
        for index in itertools.product(*(range(s) for s in T.shape)):
            fh.write(",".join([str(i + 1) for i in index] + [fmt(T[index].item())]) + "\n")


def read_tensor_csv(path) -> np.ndarray:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        d = len(header) - 1
        entries = [(tuple(int(v) - 1 for v in row[:d]), float(row[d])) for row in reader if row]
    side = max(max(idx) for idx, _ in entries) + 1
    T = np.zeros((side,) * d)
    for idx, v in entries:
        T[idx] = v
    return T
