import numpy as np
import pytest

from besovns import Grid2D

ACCEPTANCE_RESULTS = []


def record_acceptance(name: str, ok: bool, detail: str) -> None:
    ACCEPTANCE_RESULTS.append((name, ok, detail))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_RESULTS:
        terminalreporter.section("acceptance criteria")
        for name, ok, detail in ACCEPTANCE_RESULTS:
            terminalreporter.write_line(
                f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
            )


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def grid16():
    return Grid2D(16)


@pytest.fixture
def grid64():
    return Grid2D(64)
