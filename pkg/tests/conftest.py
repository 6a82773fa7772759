import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from guesslab import Pmf  # noqa: E402


def random_pmf(rng, k, floor=0.0):
    """Dirichlet(1) PMF on k symbols; ``floor`` keeps every mass strictly positive."""
    w = rng.dirichlet(np.ones(k)) + floor
    return Pmf(w / w.sum())


@pytest.fixture
def rng():
    return np.random.default_rng(20210415)


@pytest.fixture
def p3():
    return Pmf([0.5, 0.25, 0.25])


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
