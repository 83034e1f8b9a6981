"""Dense linear algebra kernel.

Norms (including the box lift of a real norm to complex vectors), sorted
spectra, Perron vectors, scaled matrix powers and the graph predicates
used to classify nonnegative matrices.  Everything here works on plain
``numpy`` arrays; the only wrapper type is :class:`StochasticMatrix`.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import ConvergenceError, ValidationError

MAX_DIM = 64


# ---------------------------------------------------------------------------
# norms
# ---------------------------------------------------------------------------

_BASE_TAGS = ("one", "two", "inf")


@dataclass(frozen=True)
class NormKind:
    """A vector norm: ``one``, ``two``, ``inf`` or ``box`` over one of those."""

    tag: str
    inner: Optional["NormKind"] = None

    def __post_init__(self):
        if self.tag in _BASE_TAGS:
            if self.inner is not None:
                raise ValidationError(f"norm {self.tag!r} takes no inner norm")
        elif self.tag == "box":
            if self.inner is None:
                raise ValidationError("box norm needs an inner norm")
            if self.inner.tag == "box":
                raise ValidationError("box norm may not nest another box norm")
        else:
            raise ValidationError(f"unknown norm {self.tag!r}")

    @classmethod
    def box(cls, inner: "NormKind") -> "NormKind":
        return cls("box", inner)

    @classmethod
    def parse(cls, text: str) -> "NormKind":
        """Parse ``"two"``, ``"box"`` (inner two) or ``"box:one"``."""
        text = text.strip().lower()
        if text.startswith("box"):
            _, _, inner = text.partition(":")
            return cls.box(cls(inner or "two"))
        return cls(text)

    @property
    def is_box(self) -> bool:
        return self.tag == "box"

    def __str__(self) -> str:
        return f"box:{self.inner.tag}" if self.is_box else self.tag


ONE = NormKind("one")
TWO = NormKind("two")
INF = NormKind("inf")


def vector_norm(x, kind: NormKind) -> float:
    """Norm of a (possibly complex) vector."""
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise ValidationError("vector_norm expects a non-empty 1-D vector")
    return float(batch_norms(x[None, :], kind)[0])


def batch_norms(X, kind: NormKind) -> np.ndarray:
    """Row-wise norms of a 2-D array."""
    X = np.asarray(X)
    if kind.tag == "one":
        return np.abs(X).sum(axis=1)
    if kind.tag == "two":
        return np.linalg.norm(X, axis=1)
    if kind.tag == "inf":
        return np.abs(X).max(axis=1)
    return batch_box_norms(X, kind.inner)


def box_norm(x, inner: NormKind) -> float:
    """``sup_a || Re(x) cos a + Im(x) sin a ||`` under the inner norm.

    Closed forms are used for every inner norm: the top singular value of
    ``[Re x, Im x]`` for two, the largest entry modulus for inf, and the
    best sign pattern ``|s^T x|`` for one (see :func:`batch_box_norms`).
    """
    x = np.asarray(x)
    if x.ndim != 1 or x.size == 0:
        raise ValidationError("box_norm expects a non-empty 1-D vector")
    return float(batch_box_norms(x[None, :], inner)[0])


def batch_box_norms(X, inner: NormKind) -> np.ndarray:
    if inner.is_box:
        raise ValidationError("box norm may not nest another box norm")
    X = np.asarray(X)
    if not np.iscomplexobj(X):
        return batch_norms(X, inner)
    if inner.tag == "inf":
        # sup_a |r cos a + s sin a| = |r + i s| entrywise, and sup/max commute
        return np.abs(X).max(axis=1)
    if inner.tag == "two":
        re, im = X.real, X.imag
        g11 = np.einsum("ij,ij->i", re, re)
        g22 = np.einsum("ij,ij->i", im, im)
        g12 = np.einsum("ij,ij->i", re, im)
        half_tr = 0.5 * (g11 + g22)
        disc = np.sqrt((0.5 * (g11 - g22)) ** 2 + g12 ** 2)
        return np.sqrt(np.maximum(half_tr + disc, 0.0))
    return _box_one(X)


def _box_one(X: np.ndarray) -> np.ndarray:
    # sum_i |x_i||cos(a - arg x_i)| is max_s Re(e^{-ia} s.x) over sign vectors s,
    # so the sup is max_s |s.x|.  Only the sign patterns realised on the arcs
    # between the kinks a = arg x_i + pi/2 (mod pi) can be optimal.
    N, n = X.shape
    theta = np.mod(np.angle(X), np.pi)
    kinks = np.sort(np.mod(theta + 0.5 * np.pi, np.pi), axis=1)
    nxt = np.concatenate([kinks[:, 1:], kinks[:, :1] + np.pi], axis=1)
    mids = 0.5 * (kinks + nxt)  # (N, n) one probe angle per arc
    signs = np.sign(np.cos(mids[:, :, None] - np.angle(X)[:, None, :]))
    vals = np.abs(np.einsum("pkj,pj->pk", signs, X))
    return vals.max(axis=1)


def box_norm_grid(x, inner: NormKind, grid: int = 720, tol: float = 1e-10) -> float:
    """Box norm by angle search: uniform grid, then golden-section refinement.

    Works for any inner norm; used to cross-check the closed forms.
    """
    x = np.asarray(x, dtype=complex)
    re, im = x.real, x.imag

    def f(a):
        return vector_norm(re * np.cos(a) + im * np.sin(a), inner)

    step = 2.0 * np.pi / grid
    angles = np.arange(grid) * step
    vals = np.array([f(a) for a in angles])
    best = float(vals.max())
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    for k in np.flatnonzero(vals >= best - 1e-12 * max(best, 1.0)):
        lo, hi = angles[k] - step, angles[k] + step
        c, d = hi - invphi * (hi - lo), lo + invphi * (hi - lo)
        fc, fd = f(c), f(d)
        while hi - lo > tol:
            if fc > fd:
                hi, d, fd = d, c, fc
                c = hi - invphi * (hi - lo)
                fc = f(c)
            else:
                lo, c, fc = c, d, fd
                d = lo + invphi * (hi - lo)
                fd = f(d)
        best = max(best, fc, fd)
    return best


# ---------------------------------------------------------------------------
# matrices
# ---------------------------------------------------------------------------

def as_matrix(a, *, square: bool = False, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a 2-D float array, or complex if any imaginary part is nonzero."""
    arr = np.array(a)
    if arr.ndim != 2 or arr.size == 0:
        raise ValidationError(f"{name} must be a non-empty 2-D array")
    if square and arr.shape[0] != arr.shape[1]:
        raise ValidationError(f"{name} must be square, got {arr.shape}")
    if np.iscomplexobj(arr):
        if np.all(arr.imag == 0):
            arr = arr.real
        else:
            arr = arr.astype(complex)
    arr = arr if np.iscomplexobj(arr) else arr.astype(float)
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{name} has non-finite entries")
    return arr


def is_real(a) -> bool:
    a = np.asarray(a)
    return not np.iscomplexobj(a) or bool(np.all(a.imag == 0))


def as_nonnegative(a, *, name: str = "matrix") -> np.ndarray:
    arr = as_matrix(a, square=True, name=name)
    if np.iscomplexobj(arr):
        raise ValidationError(f"{name} must be real")
    if np.any(arr < 0):
        raise ValidationError(f"{name} must be entrywise nonnegative")
    return arr


class StochasticMatrix:
    """Nonnegative column-stochastic matrix.

    Columns are renormalised at construction so ``e^T S = e^T`` holds to
    machine precision; the input is kept in :attr:`raw`.  Entries in
    ``[-tol, 0)`` are treated as round-off and clipped to zero.
    """

    __slots__ = ("array", "raw", "tol")

    def __init__(self, a, tol: float = 1e-12):
        raw = as_matrix(a, square=True, name="stochastic matrix")
        if np.iscomplexobj(raw):
            raise ValidationError("stochastic matrix must be real")
        if np.any(raw < -tol):
            raise ValidationError("stochastic matrix has negative entries")
        sums = raw.sum(axis=0)
        if np.any(np.abs(sums - 1.0) > tol):
            worst = float(np.max(np.abs(sums - 1.0)))
            raise ValidationError(f"columns do not sum to 1 (max deviation {worst:.3e})")
        arr = np.clip(raw, 0.0, None)
        arr = arr / arr.sum(axis=0)
        raw = raw.copy()
        raw.flags.writeable = False
        arr.flags.writeable = False
        object.__setattr__(self, "raw", raw)
        object.__setattr__(self, "array", arr)
        object.__setattr__(self, "tol", tol)

    def __setattr__(self, name, value):
        raise AttributeError("StochasticMatrix is immutable")

    @property
    def n(self) -> int:
        return self.array.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.array if dtype is None else self.array.astype(dtype)

    def __repr__(self) -> str:
        return f"StochasticMatrix(n={self.n})"

    @classmethod
    def uniform(cls, n: int) -> "StochasticMatrix":
        return cls(np.full((n, n), 1.0 / n))


def stochastic(a, tol: float = 1e-12) -> StochasticMatrix:
    return a if isinstance(a, StochasticMatrix) else StochasticMatrix(a, tol)


def is_column_stochastic(a, tol: float = 1e-12) -> bool:
    try:
        StochasticMatrix(a, tol)
    except ValidationError:
        return False
    return True


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues sorted by modulus, then real part, then imaginary part, all descending."""

    eigenvalues: np.ndarray

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(self.eigenvalues)

    @property
    def rho(self) -> float:
        return float(self.moduli[0])

    def modulus(self, k: int) -> float:
        """``|lambda_k|`` with 1-based ``k``."""
        return float(self.moduli[k - 1])

    def subdominant_modulus(self) -> float:
        """Largest modulus after removing one copy of the eigenvalue closest to rho."""
        if self.n < 2:
            return 0.0
        ev = self.eigenvalues
        drop = int(np.argmin(np.abs(ev - self.rho)))
        return float(np.abs(np.delete(ev, drop)).max())


def sort_eigenvalues(ev) -> np.ndarray:
    ev = np.asarray(ev, dtype=complex)
    # rounded keys so round-off cannot reorder exact ties such as conjugate pairs
    mod = np.round(np.abs(ev), 12)
    order = np.lexsort((-np.round(ev.imag, 12), -np.round(ev.real, 12), -mod))
    return ev[order]


def spectrum(A) -> Spectrum:
    """All eigenvalues of a square matrix (LAPACK Hessenberg QR)."""
    A = as_matrix(A, square=True)
    if A.shape[0] > MAX_DIM:
        raise ValidationError(f"dimension {A.shape[0]} exceeds the desk-scale limit {MAX_DIM}")
    try:
        ev = scipy.linalg.eigvals(A, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"eigenvalue iteration did not converge: {exc}") from exc
    return Spectrum(sort_eigenvalues(ev))


def dominant_left_eigenvector(A, tol: float = 1e-12, max_iter: int = 100_000) -> np.ndarray:
    """Nonnegative ``y`` with ``||y||_1 = 1`` and ``y^T A ~ rho y^T`` by power iteration.

    Raises :class:`ConvergenceError` when the residual stays above ``tol``;
    this typically means the matrix is not primitive.
    """
    A = as_nonnegative(A)
    n = A.shape[0]
    AT = A.T
    y = np.full(n, 1.0 / n)
    res = np.inf
    for _ in range(max_iter):
        z = AT @ y
        rho = z.sum()
        if rho == 0.0:
            raise ConvergenceError("power iteration collapsed to zero (nilpotent matrix?)")
        res = np.abs(z - rho * y).sum()
        y = z / rho
        if res <= tol * max(rho, 1.0):
            return y
    raise ConvergenceError(f"power iteration residual {res:.3e} after {max_iter} steps")


def perron_vector(A, side: str = "right", tol: float = 1e-12) -> np.ndarray:
    """Nonnegative dominant eigenvector with unit 1-norm.

    Power iteration first; for periodic or otherwise slow matrices fall back
    to the null vector of ``A - rho I`` from a dense eigendecomposition.
    """
    A = as_nonnegative(A)
    M = A if side == "right" else A.T
    try:
        return dominant_left_eigenvector(M.T, tol=tol, max_iter=20_000)
    except ConvergenceError:
        pass
    w, V = scipy.linalg.eig(M)
    rho = np.abs(w).max()
    # rho itself is an eigenvalue of a nonnegative matrix
    k = int(np.argmin(np.abs(w - rho)))
    v = V[:, k]
    v = v * np.exp(-1j * np.angle(v[np.argmax(np.abs(v))]))
    v = np.abs(v.real)
    return v / v.sum()


def left_residual(A, y, rho: float) -> float:
    return float(np.abs(np.asarray(y) @ A - rho * np.asarray(y)).sum())


def right_residual(A, x, rho: float) -> float:
    return float(np.abs(A @ np.asarray(x) - rho * np.asarray(x)).sum())


def spectral_radius(A) -> float:
    return spectrum(A).rho


def power_scaled(A, k: int) -> tuple[np.ndarray, float]:
    """``A^k`` as ``(P, s)`` with ``A^k = exp(s) * P`` and ``max|P| = 1``.

    Repeated squaring with renormalisation after every product, so the
    result neither overflows nor underflows for k in the thousands.
    """
    if k < 0:
        raise ValidationError("power must be nonnegative")
    A = np.asarray(A)
    n = A.shape[0]
    result = np.eye(n, dtype=A.dtype)
    log_r = 0.0
    base = A.copy()
    log_b = 0.0
    m = np.abs(base).max()
    if m == 0.0:
        if k == 0:
            return result, 0.0
        return np.zeros_like(A), -np.inf
    base, log_b = base / m, np.log(m)
    while k:
        if k & 1:
            result = result @ base
            log_r += log_b
            m = np.abs(result).max()
            if m == 0.0:
                return result, -np.inf
            result, log_r = result / m, log_r + np.log(m)
        k >>= 1
        if k:
            base = base @ base
            log_b *= 2
            m = np.abs(base).max()
            if m == 0.0:
                return np.zeros_like(A), -np.inf
            base, log_b = base / m, log_b + np.log(m)
    return result, log_r


# ---------------------------------------------------------------------------
# graph structure
# ---------------------------------------------------------------------------

def _reaches_all(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    queue = deque([0])
    while queue:
        i = queue.popleft()
        for j in np.flatnonzero(adj[i] & ~seen):
            seen[j] = True
            queue.append(j)
    return bool(seen.all())


def is_irreducible(A) -> bool:
    """Strong connectivity of the digraph with an edge i -> j when a_ij > 0."""
    adj = as_nonnegative(A) > 0
    return _reaches_all(adj) and _reaches_all(adj.T)


def primitivity_index(A) -> Optional[int]:
    """Smallest ``k <= (n-1)^2 + 1`` with ``A^k > 0`` (boolean powers), else ``None``."""
    M = (as_nonnegative(A) > 0).astype(np.int64)
    n = M.shape[0]
    bound = n * n - 2 * n + 2
    P = M.copy()
    for k in range(1, bound + 1):
        if P.all():
            return k
        P = ((P @ M) > 0).astype(np.int64)
    return None


def is_primitive(A) -> bool:
    return primitivity_index(A) is not None
