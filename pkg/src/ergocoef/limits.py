"""Root sequences ``coef(A^k)^(1/k)`` and the bounds they converge to.

Naively forming ``A^k`` loses the subdominant part of the spectrum to
round-off in the dominant part once ``|lambda_2|^k`` drops below machine
epsilon.  Both studies therefore power a matrix from which the dominant
part has been removed exactly:

* ``tau_n1``: with ``Sx = x`` and ``e^T x = 1``,
  ``S^k - x e^T = (S - x e^T)^k`` and ``tau_n1(S^k) = -sum_i min_j (S - x e^T)^k_ij``.
* ``phi``: when ``range(W)`` is ``A``-invariant, ``ker W^*`` is invariant
  under ``x^* -> x^* A``; with ``Q`` an orthonormal basis of it,
  ``Q^* A^k = (Q^* A Q)^k Q^*``, and ``phi`` only sees ``Q^* A^k``.

All powers are carried as ``exp(s) * P`` (see :func:`linalg.power_scaled`)
and roots are taken in log space.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from . import coefficients as coef
from . import linalg
from .coefficients import JordanSelection
from .errors import ValidationError
from .linalg import TWO, NormKind

DEFAULT_KS = tuple(2 ** i for i in range(9))
DEFAULT_TOL = 1e-2
INVARIANCE_TOL = 1e-8


@dataclass
class LimitStudy:
    ks: list
    values: list
    target: float
    tolerance: float = DEFAULT_TOL
    zero: list = field(default_factory=list)
    method: str = ""

    def __post_init__(self):
        if len(self.ks) != len(self.values) or not self.ks:
            raise ValidationError("ks and values must be non-empty and of equal length")
        if any(b <= a for a, b in zip(self.ks, self.ks[1:])):
            raise ValidationError("ks must be strictly increasing")
        if any(v < 0 for v in self.values):
            raise ValidationError("root values are nonnegative")
        if not self.zero:
            self.zero = [v == 0.0 for v in self.values]

    @property
    def final_error(self) -> float:
        return abs(self.values[-1] - self.target)

    @property
    def converged(self) -> bool:
        return self.final_error <= self.tolerance

    @property
    def tail_spread(self) -> float:
        """Spread of the last three values; small when the sequence has settled."""
        tail = self.values[-3:]
        return max(tail) - min(tail)

    def tail_sup(self, start: int = 0) -> float:
        return max(self.values[start:])

    def to_dict(self) -> dict:
        return {
            "ks": list(map(int, self.ks)),
            "values": [float(v) for v in self.values],
            "zero": [bool(z) for z in self.zero],
            "target": float(self.target),
            "final_error": float(self.final_error),
            "tolerance": float(self.tolerance),
            "converged": bool(self.converged),
            "tail_spread": float(self.tail_spread),
            "method": self.method,
        }


def geometric_ks(kmax: int) -> list:
    if kmax < 1:
        raise ValidationError("kmax must be positive")
    ks = [1]
    while ks[-1] * 2 <= kmax:
        ks.append(ks[-1] * 2)
    if ks[-1] != kmax:
        ks.append(kmax)
    return ks


def _root(value: float, log_scale: float, k: int) -> float:
    if value <= 0.0 or not np.isfinite(log_scale):
        return 0.0
    return float(np.exp((np.log(value) + log_scale) / k))


def _check_ks(ks) -> list:
    ks = [int(k) for k in (DEFAULT_KS if ks is None else ks)]
    if not ks or min(ks) < 1:
        raise ValidationError("ks must be a non-empty list of positive integers")
    return ks


def limit_study_phi(sel: JordanSelection, A, kind: NormKind = TWO,
                    ks: Optional[Sequence[int]] = None, tol: float = DEFAULT_TOL,
                    budget: int = 20_000, seed: int = 0) -> LimitStudy:
    """``phi(W, A^k)^(1/k)`` against ``rho`` of the unselected eigenvalues."""
    A = linalg.as_matrix(A, square=True)
    if not isinstance(sel, JordanSelection):
        sel = JordanSelection(sel)
    if sel.n != A.shape[0]:
        raise ValidationError("W and A have different dimensions")
    if sel.rho_complement is None:
        sel = JordanSelection.for_matrix(A, sel.W, sel.selected)
    ks = _check_ks(ks)

    compressed = sel.m < sel.n and sel.invariance_residual(A) <= INVARIANCE_TOL
    if compressed:
        Q = coef.complement_basis(sel.W)
        N = Q.conj().T @ A @ Q
    values = []
    for k in ks:
        if compressed:
            P, s = linalg.power_scaled(N, k)
            P = Q @ P @ Q.conj().T
        else:
            P, s = linalg.power_scaled(A, k)
        v = coef.phi(sel, P, kind, budget=budget, seed=seed).value
        values.append(_root(v, s, k))
    return LimitStudy(ks, values, float(sel.rho_complement), tol,
                      method="compressed" if compressed else "direct")


def limit_study_tau_n1(S, ks: Optional[Sequence[int]] = None, tol: float = DEFAULT_TOL,
                       method: str = "deflated") -> LimitStudy:
    """``tau_n1(S^k)^(1/k)`` against ``|lambda_2(S)|``."""
    S = linalg.stochastic(S).array
    ks = _check_ks(ks)
    sp = linalg.spectrum(S)
    target = sp.modulus(2) if sp.n > 1 else 0.0
    values = []
    if method == "deflated":
        x = linalg.perron_vector(S, "right")
        R = S - np.outer(x, np.ones(S.shape[0]))
        for k in ks:
            P, s = linalg.power_scaled(R, k)
            values.append(_root(float(-P.min(axis=1).sum()), s, k))
    elif method == "direct":
        for k in ks:
            Sk = np.linalg.matrix_power(S, k)
            Sk = np.clip(Sk, 0.0, None)
            values.append(_root(coef.tau_n1(Sk / Sk.sum(axis=0)), 0.0, k))
    else:
        raise ValidationError(f"unknown method {method!r}")
    return LimitStudy(ks, values, target, tol, method=method)


@dataclass(frozen=True)
class BoundCheck:
    lambda2: float
    tau_n1: float
    bound_holds: bool

    def to_dict(self) -> dict:
        return {"lambda2_modulus": self.lambda2, "tau_n1": self.tau_n1,
                "bound_holds": self.bound_holds}


def check_bound_lambda2(S, slack: float = 1e-9) -> BoundCheck:
    """``|lambda_2(S)| <= tau_n1(S)``."""
    S = linalg.stochastic(S)
    sp = linalg.spectrum(S.array)
    lam2 = sp.modulus(2) if sp.n > 1 else 0.0
    t = coef.tau_n1(S)
    return BoundCheck(lam2, t, lam2 <= t + slack)


@dataclass(frozen=True)
class ChainCheck:
    k: int
    subdominant: float
    phi_root: float
    mu_root: float
    lower_holds: bool
    upper_holds: bool

    @property
    def gap(self) -> float:
        return abs(self.mu_root - self.phi_root)

    def to_dict(self) -> dict:
        return {"k": self.k, "subdominant": self.subdominant, "phi_root": self.phi_root,
                "mu_root": self.mu_root, "lower_holds": self.lower_holds,
                "upper_holds": self.upper_holds, "gap": self.gap}


def check_mu_phi_chain(A, x, k: int = 1, kind: NormKind = TWO, slack: float = 1e-9,
                       budget: int = 20_000, seed: int = 0) -> ChainCheck:
    """``max_{lambda != rho}|lambda| <= phi(W_rho, A^k)^(1/k) <= mu(x, A^k)^(1/k)``.

    ``W_rho`` is the single column ``x``.  The set difference removes every
    copy of ``rho``.
    """
    A = linalg.as_nonnegative(A)
    if k < 1:
        raise ValidationError("k must be positive")
    x = np.asarray(x, dtype=float)
    x = x / x.sum()
    sp = linalg.spectrum(A)
    rho = sp.rho
    rest = [abs(l) for l in sp.eigenvalues if abs(l - rho) > 1e-9 * max(1.0, rho)]
    sub = float(max(rest)) if rest else 0.0
    Ak = np.linalg.matrix_power(A, k)
    p = coef.phi(JordanSelection(x[:, None]), Ak, kind, budget=budget, seed=seed).value
    m = coef.mu(x, Ak, kind, budget=budget, seed=seed).value
    p_root, m_root = _root(p, 0.0, k), _root(m, 0.0, k)
    return ChainCheck(k, sub, p_root, m_root, sub <= p_root + slack, p_root <= m_root + slack)
