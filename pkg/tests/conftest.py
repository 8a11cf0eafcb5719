import numpy as np
import pytest
from scipy.optimize import linear_sum_assignment


def multiset_distance(a, b) -> float:
    """Largest gap after optimally pairing two equal-size multisets of complex numbers."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    assert a.shape == b.shape
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max(initial=0.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# criterion number -> (passed, summary); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def record(criterion: int, checks: dict[str, bool]) -> None:
    """Store and print one verdict line, then fail the test if any named check failed."""
    failed = [name for name, ok in checks.items() if not ok]
    line = "all checks hold" if not failed else "failed: " + ", ".join(failed)
    ACCEPTANCE[criterion] = (not failed, line)
    print(f"criterion {criterion}: {'PASS' if not failed else 'FAIL'} ({line})")
    assert not failed, line


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, line = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {line}")
