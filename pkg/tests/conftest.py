import numpy as np
import pytest

A3 = np.array([
    [0.00, 0.29, 0.55],
    [0.63, 0.40, 0.12],
    [0.37, 0.31, 0.33],
])


@pytest.fixture
def a3():
    return A3.copy()


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def det3(M):
    """Cofactor expansion, independent of any LU routine."""
    return (M[0, 0] * (M[1, 1] * M[2, 2] - M[1, 2] * M[2, 1])
            - M[0, 1] * (M[1, 0] * M[2, 2] - M[1, 2] * M[2, 0])
            + M[0, 2] * (M[1, 0] * M[2, 1] - M[1, 1] * M[2, 0]))


def a3_nonunit_eigenvalues():
    """Roots of t^2 - (tr - 1) t + det for the column-stochastic A3 (lambda_1 = 1)."""
    s = np.trace(A3) - 1.0
    p = det3(A3)
    disc = np.sqrt(s * s - 4 * p)
    return (s - disc) / 2, (s + disc) / 2
