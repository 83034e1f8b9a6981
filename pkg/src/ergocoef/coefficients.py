"""Ergodicity coefficients.

Two families live here.  The norm-based ones (``phi``, ``mu`` and
``tau_vecnorm``) maximise ``||x^* A||`` over a norm ball cut down to the
subspace orthogonal to a set of right (generalised) eigenvectors.  The
entrywise ones (``tau_n1``, ``tau_m``, ``tau_haviv``) are closed forms in
the entries of a nonnegative matrix.

Method dispatch for the norm-based family::

    two          -> projected_svd        top singular value on the complement
    one (real)   -> support_enumeration  vertices have support <= rank(W) + 1
    inf (real)   -> vertex_enumeration   simplex walk on the cube section
    otherwise    -> monte_carlo          sampled lower bound
"""

from __future__ import annotations

import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg

from . import linalg
from .errors import PreconditionError, ValidationError
from .linalg import INF, ONE, TWO, NormKind, StochasticMatrix
from .simplex import max_on_cube_section

EXACT_DIM = 12
ENUM_DIM = 20
RANK_TOL = 1e-10
PERRON_GATE = 1e-6
CHUNK = 8192


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class JordanSelection:
    """Basis ``W`` (n x m) of the Jordan space of the selected eigenvalues.

    ``rho_complement`` is the largest modulus among the eigenvalues that were
    *not* selected, when known.
    """

    W: np.ndarray
    selected: tuple = ()
    rho_complement: Optional[float] = None

    def __post_init__(self):
        W = np.array(self.W)
        if W.ndim == 1:
            W = W[:, None]
        W = linalg.as_matrix(W, name="W")
        if W.shape[1] > W.shape[0]:
            raise ValidationError("W has more columns than rows")
        if numerical_rank(W) < W.shape[1]:
            raise ValidationError("columns of W are linearly dependent")
        W.flags.writeable = False
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "selected", tuple(complex(s) for s in self.selected))

    @property
    def n(self) -> int:
        return self.W.shape[0]

    @property
    def m(self) -> int:
        return self.W.shape[1]

    @classmethod
    def for_matrix(cls, A, W, selected: Sequence[complex] = ()) -> "JordanSelection":
        """Build a selection and fill in ``rho_complement`` from the spectrum of ``A``.

        Every eigenvalue within ``1e-6`` of a selected value is dropped.  With
        no ``selected`` values, one eigenvalue per column is dropped, nearest
        to that column's Rayleigh quotient.
        """
        sel = cls(W, selected)
        A = linalg.as_matrix(A, square=True)
        ev = list(linalg.spectrum(A).eigenvalues)
        if sel.selected:
            ev = [e for e in ev
                  if min(abs(e - s) for s in sel.selected) > 1e-6 * max(1.0, abs(e))]
        else:
            for w in sel.W.T:
                q = complex(np.vdot(w, A @ w) / np.vdot(w, w))
                ev.pop(int(np.argmin([abs(e - q) for e in ev])))
        rc = float(max(abs(e) for e in ev)) if ev else 0.0
        return cls(sel.W, sel.selected, rc)

    def invariance_residual(self, A) -> float:
        """``||A W - W (W^+ A W)||_F / ||A||_F``; zero for an exact invariant subspace."""
        A = np.asarray(A)
        AW = A @ self.W
        C = np.linalg.lstsq(self.W, AW, rcond=None)[0]
        scale = max(np.linalg.norm(A), 1e-300)
        return float(np.linalg.norm(AW - self.W @ C) / scale)


@dataclass(frozen=True, eq=False)
class CoefficientReport:
    name: str
    value: float
    norm: str
    method: str
    samples: int = 0
    certified_exact: bool = True
    argmax: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if self.value < 0:
            raise ValidationError("coefficient value must be nonnegative")
        if self.method == "monte_carlo" and self.certified_exact:
            raise ValidationError("sampled values cannot be certified exact")

    def to_dict(self) -> dict:
        d = {
            "name": self.name,
            "value": float(self.value),
            "norm": self.norm,
            "method": self.method,
            "samples": int(self.samples),
            "certified_exact": bool(self.certified_exact),
        }
        if self.argmax is not None:
            d["argmax"] = _vec_to_json(self.argmax)
        return d


def _vec_to_json(v):
    v = np.asarray(v)
    if np.iscomplexobj(v) and np.any(v.imag != 0):
        return [[float(z.real), float(z.imag)] for z in v]
    return [float(z) for z in np.real(v)]


def numerical_rank(W, tol: float = RANK_TOL) -> int:
    """Rank from a column-pivoted QR; diagonal entries below ``tol * |R_00|`` count as zero."""
    R = scipy.linalg.qr(np.asarray(W), mode="r", pivoting=True)[0]
    d = np.abs(np.diag(R))
    if d.size == 0 or d[0] == 0.0:
        return 0
    return int(np.sum(d > tol * d[0]))


# ---------------------------------------------------------------------------
# entrywise coefficients on stochastic matrices
# ---------------------------------------------------------------------------

def tau_n1(S) -> float:
    """``1 - sum_i min_j s_ij`` for a column-stochastic matrix."""
    S = linalg.stochastic(S).array
    return float(1.0 - S.min(axis=1).sum())


def deficits(S) -> np.ndarray:
    """Row deficits ``d_ij = s_ij - min_k s_ik``."""
    S = np.asarray(S)
    return S - S.min(axis=1, keepdims=True)


def _check_m(n: int, m: int) -> None:
    if not 1 <= m <= n:
        raise ValidationError(f"m must lie in 1..{n}, got {m}")


def tau_m(S, m: int) -> float:
    """Generalised coefficient ``max_V max_j sum_{i in V} d_ij`` over ``|V| = m``.

    For a fixed column the best ``V`` is the ``m`` rows with the largest
    deficits, so the double maximum is a column-wise partial sort.
    """
    S = linalg.stochastic(S).array
    n = S.shape[0]
    _check_m(n, m)
    D = deficits(S)
    # sum the chosen rows in index order, as a subset scan would
    top = np.sort(np.argsort(-D, axis=0, kind="stable")[:m], axis=0)
    return float(np.take_along_axis(D, top, axis=0).sum(axis=0).max())


def tau_m_min_variant(S, m: int) -> float:
    """``min_V max_j sum_{i in V} d_ij`` over ``|V| = m`` by subset enumeration.

    ``max_j`` of the column-wise ``m`` smallest deficits is a lower bound and
    ends the scan early when some subset attains it.
    """
    S = linalg.stochastic(S).array
    n = S.shape[0]
    _check_m(n, m)
    if n > ENUM_DIM:
        raise ValidationError(f"subset enumeration limited to n <= {ENUM_DIM}")
    D = deficits(S)
    lower = float(np.sort(D, axis=0)[:m].sum(axis=0).max())
    best = math.inf
    for batch in _subset_batches(n, m):
        vals = D[batch].sum(axis=1).max(axis=1)
        best = min(best, float(vals.min()))
        if best <= lower:
            break
    return best


def tau_m_enumerate(S, m: int, variant: str = "max") -> float:
    """Reference evaluation of either variant by scanning every subset."""
    S = linalg.stochastic(S).array
    n = S.shape[0]
    _check_m(n, m)
    D = deficits(S)
    pick = max if variant == "max" else min
    out = None
    for batch in _subset_batches(n, m):
        vals = D[batch].sum(axis=1).max(axis=1)
        v = float(vals.max() if variant == "max" else vals.min())
        out = v if out is None else pick(out, v)
    return out


def _subset_batches(n: int, m: int, size: int = 4096):
    it = itertools.combinations(range(n), m)
    while True:
        chunk = list(itertools.islice(it, size))
        if not chunk:
            return
        yield np.array(chunk, dtype=np.intp)


def tau_haviv(A, y, rho: Optional[float] = None) -> float:
    """``rho(A) - sum_i (min_j a_ij / y_j) y_i`` for a positive left Perron vector ``y``."""
    A = linalg.as_nonnegative(A)
    y = np.asarray(y, dtype=float)
    if y.shape != (A.shape[0],):
        raise ValidationError("y has the wrong length")
    if np.any(y <= 0):
        raise PreconditionError("y must be strictly positive")
    if rho is None:
        rho = linalg.spectrum(A).rho
    y = y / y.sum()
    if linalg.left_residual(A, y, rho) > PERRON_GATE * max(rho, 1e-300):
        raise PreconditionError("y is not a left dominant eigenvector of A")
    return float(rho - ((A / y[None, :]).min(axis=1) * y).sum())


# ---------------------------------------------------------------------------
# norm-based coefficients
# ---------------------------------------------------------------------------

def complement_basis(W) -> np.ndarray:
    """Orthonormal basis of ``ker W^*``, i.e. of the orthogonal complement of range(W)."""
    W = np.asarray(W)
    return scipy.linalg.null_space(W.conj().T, rcond=RANK_TOL)


def _support_enumeration(W: np.ndarray, A: np.ndarray):
    # extreme points of {||x||_1 <= 1, W^T x = 0} have support <= m + 1
    n, m = W.shape
    best, arg = 0.0, np.zeros(n)
    for s in range(1, min(m + 1, n) + 1):
        for supp in itertools.combinations(range(n), s):
            idx = list(supp)
            _, sv, vt = np.linalg.svd(W[idx].T, full_matrices=True)
            rank = int(np.sum(sv > RANK_TOL * max(sv.max(initial=0.0), 1.0)))
            if s - rank != 1:
                continue
            x = np.zeros(n)
            x[idx] = vt[-1]
            x /= np.abs(x).sum()
            v = float(np.abs(x @ A).sum())
            if v > best:
                best, arg = v, x
    return best, arg


def _cube_section(W: np.ndarray, A: np.ndarray):
    # ||x^T A||_inf = max_j |a_j^T x|; the section is symmetric so +a_j suffices
    n = W.shape[0]
    best, arg = 0.0, np.zeros(n)
    for j in range(A.shape[1]):
        v, x = max_on_cube_section(A[:, j], W)
        v = float(np.abs(x @ A).max())
        if v > best:
            best, arg = v, x
    return best, arg


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


def _mc_chunk(Q, A, kind, count, seed, index, complex_field):
    rng = _chunk_rng(seed, index)
    k = Q.shape[1]
    C = rng.standard_normal((count, k))
    if complex_field:
        C = C + 1j * rng.standard_normal((count, k))
    X = C @ Q.T
    X = X / linalg.batch_norms(X, kind)[:, None]
    vals = linalg.batch_norms(X.conj() @ A, kind)
    i = int(np.argmax(vals))
    return float(vals[i]), X[i]


def monte_carlo(Q, A, kind: NormKind, budget: int, seed: int = 0,
                complex_field: bool = True, workers: Optional[int] = None):
    """Best sampled ``||x^* A||`` over unit-sphere points of ``range(Q)``.

    Samples come in fixed chunks with seeds derived from ``(seed, chunk)``,
    so the answer does not depend on ``workers``.
    """
    n = A.shape[0]
    if budget <= 0 or Q.shape[1] == 0:
        return 0.0, np.zeros(n, dtype=complex if complex_field else float)
    sizes = [CHUNK] * (budget // CHUNK) + ([budget % CHUNK] if budget % CHUNK else [])
    jobs = [(Q, A, kind, c, seed, i, complex_field) for i, c in enumerate(sizes)]
    workers = workers or int(os.environ.get("ERGO_THREADS", "1") or 1)
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda a: _mc_chunk(*a), jobs))
    else:
        results = [_mc_chunk(*a) for a in jobs]
    # first chunk wins ties, independent of scheduling
    i = max(range(len(results)), key=lambda r: (results[r][0], -r))
    return results[i]


def _maximize(W, A, kind: NormKind, budget: int, seed: int, complex_field: bool,
              name: str, workers: Optional[int] = None) -> CoefficientReport:
    A = linalg.as_matrix(A, square=True)
    W = np.asarray(W)
    n, m = W.shape
    if A.shape[0] != n:
        raise ValidationError(f"W has {n} rows but A is {A.shape[0]} x {A.shape[0]}")
    label = str(kind)
    if m >= n:
        return CoefficientReport(name, 0.0, label, "closed_form", 0, True, np.zeros(n))

    real_data = linalg.is_real(A) and linalg.is_real(W)
    if real_data:
        A, W = np.real(A), np.real(W)
    Q = complement_basis(W)

    if kind.tag == "two":
        U, s, Vh = np.linalg.svd(Q.conj().T @ A)
        # x = Q c with x^* A = c^* Q^* A, maximised by the top left singular vector
        x = Q @ U[:, 0]
        return CoefficientReport(name, float(s[0]), label, "projected_svd", 0, True, x)

    # complex vectors only enlarge the feasible set for the one-norm once W has
    # two or more columns, and box norms reduce to real only for real vectors
    exact_field_ok = {
        "one": not complex_field or m == 1,
        "inf": True,
        "box": not complex_field,
    }[kind.tag]
    if real_data and exact_field_ok and n <= EXACT_DIM:
        base = kind.inner if kind.is_box else kind
        if base.tag == "two":
            U, s, Vh = np.linalg.svd(Q.T @ A)
            return CoefficientReport(name, float(s[0]), label, "projected_svd", 0, True, Q @ U[:, 0])
        if base.tag == "one":
            v, x = _support_enumeration(W, A)
            return CoefficientReport(name, v, label, "support_enumeration", 0, True, x)
        v, x = _cube_section(W, A)
        return CoefficientReport(name, v, label, "vertex_enumeration", 0, True, x)

    v, x = monte_carlo(Q, A, kind, budget, seed, complex_field or not real_data, workers)
    return CoefficientReport(name, v, label, "monte_carlo", int(max(budget, 0)), False, x)


def phi(sel, A, kind: NormKind = TWO, budget: int = 100_000, seed: int = 0,
        workers: Optional[int] = None) -> CoefficientReport:
    """``max ||x^* A||`` over the complex unit ball of ``kind`` intersected with ``ker W^*``."""
    if not isinstance(sel, JordanSelection):
        sel = JordanSelection(sel)
    return _maximize(sel.W, A, kind, budget, seed, True, "phi", workers)


def _perron_gate(x, A) -> tuple[np.ndarray, np.ndarray]:
    A = linalg.as_nonnegative(A)
    x = np.asarray(x, dtype=float)
    if x.shape != (A.shape[0],):
        raise ValidationError("x has the wrong length")
    if np.any(x < 0) or not np.any(x > 0):
        raise PreconditionError("x must be nonnegative and nonzero")
    x = x / x.sum()
    rho = linalg.spectrum(A).rho
    if linalg.right_residual(A, x, rho) > PERRON_GATE * max(rho, 1.0):
        raise PreconditionError("x is not a right Perron vector of A")
    return x, A


def mu(x, A, kind: NormKind = TWO, budget: int = 100_000, seed: int = 0,
       workers: Optional[int] = None) -> CoefficientReport:
    """``max ||y^T A||`` over complex ``y`` in the unit ball with ``y^T x = 0``.

    Both real and imaginary parts of ``y`` are orthogonal to the real ``x``,
    so the feasible set is ``ker x^*`` and this is ``phi`` with ``W = [x]``
    (conjugation leaves every supported norm unchanged).
    """
    x, A = _perron_gate(x, A)
    return _maximize(x[:, None], A, kind, budget, seed, True, "mu", workers)


def tau_vecnorm(x, A, kind: NormKind = TWO, budget: int = 100_000, seed: int = 0,
                workers: Optional[int] = None) -> CoefficientReport:
    """``max ||y^T A||`` over *real* ``y`` in the unit ball with ``y^T x = 0``."""
    x, A = _perron_gate(x, A)
    return _maximize(x[:, None], A, kind, budget, seed, False, "tau_vecnorm", workers)


def perron_selection(A) -> JordanSelection:
    """Selection of the Perron root of a nonnegative matrix with its right Perron vector."""
    A = linalg.as_nonnegative(A)
    x = linalg.perron_vector(A, "right")
    sp = linalg.spectrum(A)
    return JordanSelection(x[:, None], (sp.rho,), sp.subdominant_modulus())
