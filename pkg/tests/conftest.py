"""Session-scoped code instances shared across test modules.

Construction is deterministic given the seeds below, so every test sees
identical graphs, codewords, and measured constants.
"""

import numpy as np
import pytest

from crlcc.strong import StrongCode
from crlcc.weak import WeakCode

HASH_SEED = bytes(range(32))

# One line per acceptance criterion, echoed after the test summary so a
# plain `pytest -v` run ends with all eleven verdicts in order.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def verdict():
    def record(num: int, name: str, ok: bool, detail: str) -> None:
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {name}: {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def fixed_message(k: int, seed: int = 12345) -> np.ndarray:
    return np.random.default_rng(seed).integers(0, 2, k).astype(np.uint8)


@pytest.fixture(scope="session")
def weak16():
    return WeakCode(k=16 * 128, hash_seed=HASH_SEED)


@pytest.fixture(scope="session")
def weak256():
    return WeakCode(k=256 * 128, hash_seed=HASH_SEED)


@pytest.fixture(scope="session")
def strong128():
    """t = 128, m = 8, relaxed kappa; the theorem kappa is 1600 * fan."""
    return StrongCode(k=128 * 8 * 128, m=8, kappa=8, hash_seed=HASH_SEED)


@pytest.fixture(scope="session")
def strong_small():
    return StrongCode(k=8 * 4 * 128, m=4, kappa=8, hash_seed=HASH_SEED)


@pytest.fixture(scope="session")
def weak16_word(weak16):
    message = fixed_message(weak16.k)
    return message, weak16.encode(message)


@pytest.fixture(scope="session")
def weak256_word(weak256):
    message = fixed_message(weak256.k)
    return message, weak256.encode(message)


@pytest.fixture(scope="session")
def strong128_word(strong128):
    message = fixed_message(strong128.k)
    return message, strong128.encode(message)


@pytest.fixture(scope="session")
def strong_small_word(strong_small):
    message = fixed_message(strong_small.k)
    return message, strong_small.encode(message)
