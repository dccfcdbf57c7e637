import math

import mpmath
import pytest

mpmath.mp.dps = 30

HALF_PI = math.pi / 2


def log2(x):
    """High-precision log2 used to recompute reference values independently."""
    return float(mpmath.log(mpmath.mpf(x), 2))


@pytest.fixture
def mp():
    return mpmath


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULTS):
        passed, detail = RESULTS[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if passed else 'FAIL'} - {detail}")
