import itertools

import numpy as np
import pytest

from nbdesign.designs import Design, load_fixture

_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record one pass/fail line for the acceptance summary."""

    def _report(n, ok, detail):
        _ACCEPTANCE_LINES.append((n, f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def cnbd2_t5():
    return load_fixture("cnbd2_t5.design")


@pytest.fixture(scope="session")
def cnbd2_t4():
    return load_fixture("cnbd2_t4.design")


@pytest.fixture(scope="session")
def cnbd_t5_k4():
    return load_fixture("cnbd_t5_k4.design")


@pytest.fixture(scope="session")
def self_neighbor():
    return load_fixture("self_neighbor_t3.design")


def cyclic_design(initial, t):
    """Develop an initial block (labels 0..t-1) cyclically mod t, relabelled 1..t."""
    return Design.from_blocks([[(x + i) % t + 1 for x in initial] for i in range(t)], t=t)


def find_cyclic_cnbd2(t, k):
    """Initial block whose circular differences at distances 1 and 2 are all distinct."""
    for rest in itertools.permutations(range(1, t), k - 1):
        s = (0,) + rest
        d1 = {(s[(j + 1) % k] - s[j]) % t for j in range(k)}
        d2 = {(s[(j + 1) % k] - s[j - 1]) % t for j in range(k)}
        if len(d1) == k and len(d2) == k and 0 not in d2:
            return s
    return None


@pytest.fixture(scope="session")
def cnbd2_t7_k6():
    return cyclic_design(find_cyclic_cnbd2(7, 6), 7)


def random_design(rng, t, b, k):
    return Design.from_blocks(rng.integers(1, t + 1, size=(b, k)), t=t)


def float_projector(A):
    A = np.asarray(A, dtype=float)
    return A @ np.linalg.pinv(A.T @ A) @ A.T


def float_total_info(d, n_factors):
    """Total-effect information by brute force on the full plot space.

    Independent of the reduced formula in the package: builds the
    ``bk x bk`` projector on ``[B | A M]`` and applies it to ``A K / c``.
    """
    from nbdesign.designs import incidence_matrices

    inc = incidence_matrices(d)
    A = np.hstack([inc.T, inc.L, inc.R][:n_factors]).astype(float)
    t = d.t
    K = np.vstack([np.eye(t)] * n_factors)
    P = K @ K.T / n_factors
    M = np.eye(n_factors * t) - P
    X1 = A @ K / n_factors
    Z = np.hstack([inc.B.astype(float), A @ M])
    W = np.eye(A.shape[0]) - float_projector(Z)
    return X1.T @ W @ X1
