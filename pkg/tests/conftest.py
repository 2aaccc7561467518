import itertools

import numpy as np
import pytest
from hypothesis import settings

from permkern.perm import Permutation

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

CRITERIA = []


def all_perms(n):
    return [Permutation(p) for p in itertools.permutations(range(1, n + 1))]


@pytest.fixture(scope="session")
def s3():
    return all_perms(3)


@pytest.fixture(scope="session")
def s4():
    return all_perms(4)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def criterion():
    """Record a one-line verdict for an acceptance criterion."""

    def record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else "")
        CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in CRITERIA:
            terminalreporter.write_line(line)
