import hypothesis
import numpy as np
import pytest

hypothesis.settings.register_profile("default", max_examples=50, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def small_dict(**over):
    """A desk-fast scenario: 2x2 BS, 3x3 RIS, two users, 7-point range grid."""
    d = {
        "bs": {"rows": 2, "cols": 2},
        "ris": {"rows": 3, "cols": 3},
        "users": [{"center_m": [10.0, 0.0, -5.0]}, {"center_m": [10.0, 4.0, -5.0]}],
        "omega_grid": 7,
        "ao_rounds": 2,
    }
    d.update(over)
    return d


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
