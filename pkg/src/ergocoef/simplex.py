"""Two-phase dense tableau simplex for tiny equality-form LPs.

Solves ``max c^T u  s.t.  A u = b, u >= 0`` with Bland's rule, which is
slow but never cycles.  The final vertex is recomputed from the optimal
basis with a direct solve so the returned point is accurate to working
precision rather than to the accumulated pivoting error.
"""

from __future__ import annotations

import numpy as np

from .errors import ConvergenceError, PreconditionError

EPS = 1e-11


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T: np.ndarray, basis: list[int], allowed: int, max_iter: int) -> None:
    # objective row is the last row, holding reduced costs of a maximisation
    for _ in range(max_iter):
        obj = T[-1, :allowed]
        entering = np.flatnonzero(obj > EPS)
        if entering.size == 0:
            return
        c = int(entering[0])
        col = T[:-1, c]
        rows = np.flatnonzero(col > EPS)
        if rows.size == 0:
            raise PreconditionError("linear program is unbounded")
        ratios = T[rows, -1] / col[rows]
        best = ratios.min()
        ties = rows[ratios <= best + EPS * max(1.0, abs(best))]
        r = int(min(ties, key=lambda i: basis[i]))
        _pivot(T, r, c)
        basis[r] = c
    raise ConvergenceError("simplex iteration limit reached")


def solve_lp(c, A, b, max_iter: int = 10_000):
    """Maximise ``c^T u`` over ``{u >= 0 : A u = b}``.

    Returns
    -------
    value : float
    u : (n,) ndarray
        An optimal vertex.
    """
    c = np.asarray(c, dtype=float)
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    m, n = A.shape
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1

    # phase one: artificials a_i, maximise -sum(a)
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = A.sum(axis=0)
    T[-1, -1] = b.sum()
    basis = list(range(n, n + m))
    _run(T, basis, n + m, max_iter)
    if T[-1, -1] > 1e-9 * max(1.0, b.sum()):
        raise PreconditionError("linear program is infeasible")

    # push artificials out of the basis; drop redundant rows
    keep = []
    for r in range(m):
        if basis[r] >= n:
            nz = np.flatnonzero(np.abs(T[r, :n]) > EPS)
            if nz.size == 0:
                continue
            _pivot(T, r, int(nz[0]))
            basis[r] = int(nz[0])
        keep.append(r)
    T = np.vstack([T[keep][:, list(range(n)) + [n + m]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]

    # phase two: last row holds c - c_B B^{-1} A, corner holds minus the objective
    T[-1, :n] = c
    T[-1, -1] = 0.0
    for r, j in enumerate(basis):
        T[-1] -= T[-1, j] * T[r]
    _run(T, basis, n, max_iter)

    u = np.zeros(n)
    Aorig = np.asarray(A)[keep]
    u[basis] = np.linalg.solve(Aorig[:, basis], b[keep])
    u = np.clip(u, 0.0, None)
    return float(c @ u), u


def max_on_cube_section(c, W):
    """Maximise ``c^T x`` over ``{x in [-1, 1]^n : W^T x = 0}``.

    Shifted to standard form with ``u = x + 1`` and slacks ``u + s = 2``.
    """
    c = np.asarray(c, dtype=float)
    W = np.asarray(W, dtype=float)
    n = c.size
    m = W.shape[1]
    A = np.zeros((m + n, 2 * n))
    A[:m, :n] = W.T
    A[m:, :n] = np.eye(n)
    A[m:, n:] = np.eye(n)
    b = np.concatenate([W.T @ np.ones(n), np.full(n, 2.0)])
    cc = np.concatenate([c, np.zeros(n)])
    _, u = solve_lp(cc, A, b)
    x = np.clip(u[:n] - 1.0, -1.0, 1.0)
    return float(c @ x), x
