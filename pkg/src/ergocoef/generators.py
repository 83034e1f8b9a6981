"""Seeded random test matrices."""

from __future__ import annotations

import numpy as np

from . import linalg


def rng_for(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def random_stochastic(n: int, rng=None, sparsity: float = 0.0) -> np.ndarray:
    """Columns of i.i.d. exponentials, normalised to sum to one.

    With ``sparsity > 0`` each entry is zeroed with that probability; one
    random entry per column is always kept so no column vanishes.
    """
    rng = rng_for(rng)
    M = rng.exponential(size=(n, n))
    if sparsity > 0.0:
        mask = rng.random((n, n)) >= sparsity
        mask[rng.integers(0, n, size=n), np.arange(n)] = True
        M = M * mask
    return M / M.sum(axis=0)


def random_stochastic_positive_row(n: int, rng=None, sparsity: float = 0.3) -> np.ndarray:
    """Random stochastic matrix with at least one strictly positive row."""
    rng = rng_for(rng)
    M = rng.exponential(size=(n, n))
    mask = rng.random((n, n)) >= sparsity
    mask[rng.integers(0, n)] = True
    M = M * mask
    for j in np.flatnonzero(M.sum(axis=0) == 0):
        M[rng.integers(0, n), j] = rng.exponential()
    return M / M.sum(axis=0)


def random_irreducible_stochastic(n: int, rng=None, sparsity: float = 0.5,
                                  positive_row: bool = False) -> np.ndarray:
    """Rejection-sample an irreducible stochastic matrix."""
    rng = rng_for(rng)
    while True:
        if positive_row:
            S = random_stochastic_positive_row(n, rng, sparsity)
        else:
            S = random_stochastic(n, rng, sparsity)
        if linalg.is_irreducible(S):
            return S


def random_primitive_with_gap(n: int, rng=None, gap: float = 0.3) -> np.ndarray:
    """Primitive stochastic matrix with ``1 - |lambda_2| >= gap``."""
    rng = rng_for(rng)
    while True:
        S = random_stochastic(n, rng, sparsity=0.3)
        if not linalg.is_primitive(S):
            continue
        if 1.0 - linalg.spectrum(S).modulus(2) >= gap:
            return S


def well_conditioned_basis(n: int, rng=None, max_cond: float = 100.0) -> np.ndarray:
    rng = rng_for(rng)
    while True:
        X = rng.standard_normal((n, n))
        if np.linalg.cond(X) <= max_cond:
            return X


def diagonalizable(eigenvalues, rng=None, max_cond: float = 100.0):
    """``A = X diag(eigenvalues) X^{-1}`` for a random ``X`` with ``cond(X) <= max_cond``.

    Returns ``(A, X)``; column ``i`` of ``X`` is a right eigenvector for
    ``eigenvalues[i]``.
    """
    ev = np.asarray(eigenvalues)
    X = well_conditioned_basis(len(ev), rng, max_cond)
    A = X @ np.diag(ev) @ np.linalg.inv(X)
    return A, X
