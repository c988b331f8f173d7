import numpy as np
import pytest

from irsa.degree_dist import make_distribution

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def lam_star():
    return make_distribution({2: 0.5, 3: 0.28, 8: 0.22})


def brute_force_peel(transmissions, num_slots):
    """Reference SIC: rescan every slot each round, decode all singletons."""
    remaining = set(range(len(transmissions)))
    decoded = set()
    while True:
        found = set()
        for s in range(num_slots):
            users = [u for u in remaining if s in transmissions[u]]
            if len(users) == 1:
                found.add(users[0])
        if not found:
            return decoded
        decoded |= found
        remaining -= found


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
