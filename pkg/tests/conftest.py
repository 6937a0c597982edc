import math

import numpy as np
import pytest

from stopped_clock.harness import ModelConfig, simulate
from stopped_clock.processes import WindowRuleParams

EXAMPLE_P = 1.0 - math.exp(-0.5)
LONG_N = 10**6

_ACCEPTANCE_KEY = pytest.StashKey[list]()


def ks_distance(sample) -> float:
    """Kolmogorov-Smirnov distance to the standard Frechet CDF."""
    x = np.sort(np.asarray(sample, dtype=np.float64))
    n = x.size
    f = np.exp(-1.0 / x)
    hi = np.arange(1, n + 1) / n - f
    lo = f - np.arange(0, n) / n
    return float(max(hi.max(), lo.max()))


@pytest.fixture
def example_window():
    return WindowRuleParams(EXAMPLE_P, 3)


_PATH_CACHE = {}


def long_path(phi, kappa=3, p=EXAMPLE_P, seed=2024, n=LONG_N):
    """Session-cached 10^6-step stopped clock path."""
    key = (phi, kappa, p, seed, n)
    if key not in _PATH_CACHE:
        _PATH_CACHE[key] = simulate(ModelConfig(phi, p, kappa, n, seed), None, 0)
    return _PATH_CACHE[key]


@pytest.fixture
def record_criterion(request):
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(number, passed, detail):
        lines.append(f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {detail}")

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
