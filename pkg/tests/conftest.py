import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from thetabody import graph as G  # noqa: E402

CORPUS_SEED = 20240601
CORPUS_SIZE = 50

# filled by test_acceptance, printed at the end of the run
ACCEPTANCE_LINES = []


def make_corpus(size=CORPUS_SIZE, seed=CORPUS_SEED):
    """Seeded G(n, 1/2) graphs, n in 4..10, with uniform(0,1) weights."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(size):
        n = int(rng.integers(4, 11))
        g = G.random_graph(n, 0.5, rng)
        out.append((g, rng.random(n)))
    return out


@pytest.fixture(scope="session")
def corpus():
    return make_corpus()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
