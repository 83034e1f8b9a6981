"""Stationary vectors through the M-matrix system ``(I - tau B) x = l``.

For a column-stochastic ``S`` with row minima ``l`` and
``tau = tau_n1(S) = 1 - e^T l``, the matrix ``B = (S - l e^T) / tau`` is
again column-stochastic, ``I - tau B`` is a nonsingular M-matrix whenever
``tau < 1``, and its solution against ``l`` is exactly the stationary
distribution.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from . import linalg
from .coefficients import tau_haviv, tau_n1
from .errors import ConvergenceError, InternalError, PreconditionError, ValidationError
from .linalg import StochasticMatrix

NEG_TOL = 1e-14


@dataclass(frozen=True, eq=False)
class DecompositionResult:
    """``S = alpha * B + l e^T``.

    ``B`` is a :class:`StochasticMatrix` when the raw quotient has no entry
    below ``-1e-14``; otherwise ``B`` is ``None`` and only ``raw_B`` is set.
    """

    alpha: float
    ell: np.ndarray
    raw_B: np.ndarray
    h: int
    B: Optional[StochasticMatrix]

    @property
    def stochastic(self) -> bool:
        return self.B is not None

    def reconstruct(self) -> np.ndarray:
        n = len(self.ell)
        return self.alpha * self.raw_B + np.outer(self.ell, np.ones(n))


def decompose(S, alpha: float, h: Optional[int] = None) -> DecompositionResult:
    """Split ``S`` as ``alpha * B + l e^T``.

    ``l_i`` is the minimum of row ``i`` except at row ``h`` (0-based, default
    the last row), where ``l_h = 1 - sum_{i != h} l_i - alpha`` so that
    ``e^T l = 1 - alpha``.  The columns of ``B`` always sum to one; ``B`` is
    nonnegative exactly when ``alpha >= tau_n1(S)``.
    """
    S = linalg.stochastic(S).array
    n = S.shape[0]
    if alpha == 0:
        raise ValidationError("alpha must be nonzero")
    h = n - 1 if h is None else int(h)
    if not 0 <= h < n:
        raise ValidationError(f"h must be a row index in 0..{n - 1}")
    ell = S.min(axis=1)
    others = np.delete(ell, h).sum()
    ell[h] = 1.0 - others - alpha
    raw = (S - ell[:, None]) / alpha
    B = None
    if raw.min() >= -NEG_TOL:
        B = StochasticMatrix(raw, tol=max(NEG_TOL, 1e-12))
    raw.flags.writeable = False
    ell.flags.writeable = False
    return DecompositionResult(float(alpha), ell, raw, h, B)


def deflated_block(B) -> np.ndarray:
    """Block ``Q`` of ``Y B Y^{-1} = [[1, 0], [w, Q]]`` with ``Y`` = identity whose first row is ``e^T``."""
    B = np.asarray(B)
    n = B.shape[0]
    Y = np.eye(n)
    Y[0] = 1.0
    T = Y @ B @ np.linalg.inv(Y)
    return T[1:, 1:]


def _tau_and_ell(S: np.ndarray):
    ell = S.min(axis=1)
    return 1.0 - ell.sum(), ell


def stationary_via_msystem(S) -> np.ndarray:
    """Solve ``(I - tau_n1(S) B) x = l`` by LU with partial pivoting.

    Requires ``max_i min_j s_ij > 0``; at ``tau = 1`` the system is
    singular and :class:`PreconditionError` is raised.
    """
    S = linalg.stochastic(S).array
    n = S.shape[0]
    tau, ell = _tau_and_ell(S)
    if ell.max() <= 0.0:
        raise PreconditionError(
            "every row has a zero entry, so tau_n1 = 1 and I - tau B is singular; "
            "use power iteration instead")
    if tau <= 0.0:
        # S = ee^T/n, B is undefined and the system degenerates to x = l
        return ell / ell.sum()
    dec = decompose(S, tau)
    B = dec.B.array if dec.stochastic else dec.raw_B
    M = np.eye(n) - tau * B
    lu, piv = scipy.linalg.lu_factor(M)
    if np.min(np.abs(np.diag(lu))) == 0.0:
        raise InternalError("M-matrix factorisation hit a zero pivot with tau < 1")
    x = scipy.linalg.lu_solve((lu, piv), ell)
    x = np.clip(x, 0.0, None)
    return x / x.sum()


def stationary_via_power(S, tol: float = 1e-13, max_iter: int = 1_000_000,
                         x0=None) -> np.ndarray:
    """Power iteration ``x <- S x`` until ``||S x - x||_1 <= tol``.

    Starts from ``x0`` (default ``e/n``).  For ``S = I`` the start vector is
    already fixed and is returned unchanged.
    """
    S = linalg.stochastic(S).array
    n = S.shape[0]
    x = np.full(n, 1.0 / n) if x0 is None else np.asarray(x0, dtype=float) / np.sum(x0)
    for _ in range(max_iter):
        y = S @ x
        y /= y.sum()
        if np.abs(y - x).sum() <= tol:
            return y
        x = y
    raise ConvergenceError(f"power iteration did not reach {tol:.1e} in {max_iter} steps")


@dataclass(frozen=True)
class NeumannReport:
    terms: int
    tau: float
    error: float
    tail_bound: float
    partial_mass: float
    mass_defect: float

    def to_dict(self) -> dict:
        return self.__dict__.copy()


def neumann_check(S, terms: int) -> NeumannReport:
    """Compare ``sum_{k < terms} tau^k B^k l`` with the M-matrix solution.

    ``tail_bound`` is ``tau^terms / (1 - tau) * ||l||_1``; ``mass_defect``
    measures ``e^T partial = 1 - tau^terms`` from the telescoping sum.
    """
    S = linalg.stochastic(S).array
    if terms < 1:
        raise ValidationError("terms must be positive")
    tau, ell = _tau_and_ell(S)
    x = stationary_via_msystem(S)
    if tau <= 0.0:
        partial = ell.copy()
    else:
        B = decompose(S, tau).B.array
        partial = np.zeros_like(ell)
        term = ell.copy()
        for _ in range(terms):
            partial += term
            term = tau * (B @ term)
    mass = float(partial.sum())
    expected = 1.0 - tau ** terms
    return NeumannReport(
        terms=terms,
        tau=float(tau),
        error=float(np.abs(partial - x).sum()),
        tail_bound=float(tau ** terms / (1.0 - tau) * np.abs(ell).sum()),
        partial_mass=mass,
        mass_defect=abs(mass - expected),
    )


@dataclass(frozen=True)
class CorollaryCheck:
    irreducible: bool
    max_row_min: float
    primitive: bool

    @property
    def positive_row_min(self) -> bool:
        return self.max_row_min > 0.0

    @property
    def corollary_respected(self) -> bool:
        return not (self.irreducible and self.positive_row_min) or self.primitive

    def to_dict(self) -> dict:
        return {"irreducible": self.irreducible, "max_row_min": self.max_row_min,
                "positive_row_min": self.positive_row_min, "primitive": self.primitive,
                "corollary_respected": self.corollary_respected}


def primitivity_corollary_check(S) -> CorollaryCheck:
    """An irreducible stochastic matrix with a strictly positive row must be primitive."""
    S = linalg.stochastic(S).array
    return CorollaryCheck(linalg.is_irreducible(S), float(S.min(axis=1).max()),
                          linalg.is_primitive(S))


@dataclass(frozen=True, eq=False)
class APlusScaling:
    """``A = mu * D^{-1} S D`` with ``D = diag(y)``, ``y`` the left Perron vector."""

    mu: float
    d: np.ndarray
    S: StochasticMatrix
    roundtrip_error: float
    tau_identity_error: float


def aplus_scaling(A, tol: float = 1e-10) -> APlusScaling:
    """Diagonal similarity taking ``A`` to ``rho(A)`` times a column-stochastic matrix."""
    A = linalg.as_nonnegative(A)
    if not np.any(A > 0):
        raise PreconditionError("A must be nonnull")
    y = linalg.perron_vector(A, "left", tol=1e-14)
    if y.min() <= 1e-10:
        raise PreconditionError("left Perron vector is not strictly positive")
    rho = linalg.spectrum(A).rho
    raw = (y[:, None] * A / y[None, :]) / rho
    S = StochasticMatrix(raw, tol=1e-8)
    back = rho * (S.array * y[None, :] / y[:, None])
    scale = max(np.abs(A).max(), 1e-300)
    rt = float(np.abs(back - A).max() / scale)
    t_err = abs(tau_haviv(A, y, rho) - rho * tau_n1(S))
    if rt > tol:
        raise InternalError(f"diagonal scaling round trip error {rt:.3e}")
    return APlusScaling(float(rho), y, S, rt, float(t_err))
