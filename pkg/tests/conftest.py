import math

import numpy as np
import pytest

from ringpol.checks import sample_tuples


@pytest.fixture(scope="session")
def random_tuples():
    """200 seeded (gamma1, gamma2, so_ratio, ka, f) tuples."""
    return sample_tuples(seed=42, count=200)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


TWO_PI = 2 * math.pi


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line; the test still asserts on the outcome."""
    def record(number: int, title: str, ok: bool, detail: str) -> bool:
        ACCEPTANCE_LINES.append(f"criterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
        print(ACCEPTANCE_LINES[-1])
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
