import numpy as np
import pytest

_ACCEPTANCE: list[tuple[int, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        number, title = marker.args
        _ACCEPTANCE.append((number, title, "PASS" if rep.passed else "FAIL"))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, status in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{status}] criterion {number:2d}: {title}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# Independent dense oracle: explicit 2x2 matrices and Kronecker products.
SIGMA = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def dense(axes: str) -> np.ndarray:
    m = np.ones((1, 1), dtype=complex)
    for a in axes:
        m = np.kron(m, SIGMA[a])
    return m


def dense_on(n: int, placement: dict) -> np.ndarray:
    """Dense operator with ``placement[qubit] = axis`` (qubits numbered 1..n)."""
    return dense("".join(placement.get(q, "I") for q in range(1, n + 1)))
