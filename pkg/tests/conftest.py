import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60, derandomize=True)
settings.load_profile("default")

# lines collected by the acceptance suite, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_shape_coeffs(rng: np.random.Generator, M: int, radius: float = 0.45) -> np.ndarray:
    """Real coefficients with ``sum n |a_n| = r`` for a random ``r <= radius``."""
    raw = rng.uniform(-1.0, 1.0, M) / np.arange(1, M + 1) ** rng.uniform(1.0, 3.0)
    norm = np.sum(np.arange(1, M + 1) * np.abs(raw))
    return raw * rng.uniform(0.0, radius) / norm


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
