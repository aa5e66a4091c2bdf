import numpy as np
import pytest

from nbpadmm.cli import tiny_code
from nbpadmm.codeio import ParityCheckCode
from nbpadmm.codeio import regular_code as _regular_code


def random_code(rng, n, m, q, dmin=3, dmax=6, unit=False):
    """Random sparse code; every check has dmin..dmax distinct columns."""
    rows = []
    for _ in range(m):
        d = int(rng.integers(dmin, min(dmax, n) + 1))
        cols = rng.choice(n, size=d, replace=False)
        coefs = np.ones(d, dtype=int) if unit else rng.integers(1, 1 << q, size=d)
        rows.append(tuple((int(c), int(h)) for c, h in zip(cols, coefs)))
    return ParityCheckCode(n, m, q, tuple(rows))


def regular_code(rng, n, q, dv=3, dc=6):
    return _regular_code(n, q, dv, dc, rng)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def tiny():
    return tiny_code()


# one PASS/FAIL line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: (int(s.split()[1].rstrip("ab:")), s)):
            terminalreporter.write_line(line)
