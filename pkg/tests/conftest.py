import numpy as np
import pytest

from optact.systems import dirichlet_laplacian

_CRITERIA: dict[int, list[str]] = {}


@pytest.fixture
def criterion():
    """Record one pass/fail line for the acceptance summary."""

    def record(number: int, title: str, passed: bool, detail: str) -> None:
        status = "PASS" if passed else "FAIL"
        _CRITERIA.setdefault(number, []).append(f"[{status}] criterion {number:2d}: {title} | {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        for line in _CRITERIA[number]:
            terminalreporter.write_line(line)


@pytest.fixture
def heat2():
    return dirichlet_laplacian(2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
