import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from drivenqubits.algebra import DensityMatrix4, projector, random_density_matrix

settings.register_profile(
    "default", max_examples=100, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

BELL = np.array([0, 1, 1, 0]) / np.sqrt(2)  # (|+-> + |-+>)/sqrt2
SINGLET = np.array([0, 1, -1, 0]) / np.sqrt(2)


def bell_state() -> DensityMatrix4:
    return DensityMatrix4(projector(BELL))


def singlet_state() -> DensityMatrix4:
    return DensityMatrix4(projector(SINGLET))


def product_state(rng) -> DensityMatrix4:
    return DensityMatrix4(np.kron(random_density_matrix(rng, 2), random_density_matrix(rng, 2)))


def pure_state(rng) -> DensityMatrix4:
    return DensityMatrix4(random_density_matrix(rng, 4, rank=1))


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def record_criterion(number: int, title: str, passed: bool, detail: str) -> bool:
    line = f"criterion {number:>2} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return passed


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
