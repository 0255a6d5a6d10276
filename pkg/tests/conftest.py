import numpy as np
import pytest

from sspc import io

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def tutorial():
    """Ideal and measured PTMs of the two tutorial gates."""
    out = {}
    for gate in ("x", "y"):
        out[gate] = (
            io.load_channel(io.data_path(f"sqrt_{gate}_ideal.json")),
            io.load_channel(io.data_path(f"sqrt_{gate}_experimental.json")),
        )
    return out
