"""Randomised search for ``|lambda_k(S)| > tau_{n-k+1}(S)``.

For ``k = 2`` and the max variant this is a theorem, so a hit there is an
internal error.  For larger ``k`` the max variant is open; the min variant
is known to fail (a 3 x 3 witness is in :data:`MIN_VARIANT_WITNESS`).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import mpmath
import numpy as np

from . import linalg
from .coefficients import tau_m, tau_m_min_variant
from .errors import InternalError, ValidationError
from .generators import random_stochastic

SLACK = 1e-9
DEFAULT_SPARSITY = 0.2

MIN_VARIANT_WITNESS = np.array([
    [0.00, 0.29, 0.55],
    [0.63, 0.40, 0.12],
    [0.37, 0.31, 0.33],
])


@dataclass(frozen=True, eq=False)
class ConjectureFinding:
    matrix: np.ndarray
    n: int
    k: int
    lambda_k_modulus: float
    tau_value: float
    variant: str
    violated: bool
    seed: Optional[int]
    trial: int
    sparsity: float = DEFAULT_SPARSITY

    def to_dict(self) -> dict:
        return {
            "trial": self.trial,
            "seed": self.seed,
            "n": self.n,
            "k": self.k,
            "variant": self.variant,
            "lambda_k_modulus": self.lambda_k_modulus,
            "tau_value": self.tau_value,
            "violated": self.violated,
            "sparsity": self.sparsity,
            "matrix": [[float(v) for v in row] for row in self.matrix],
        }


def trial_seed(seed: int, trial: int) -> int:
    return int(np.random.SeedSequence([seed, trial]).generate_state(1)[0])


def trial_matrix(n: int, seed: int, sparsity: float = DEFAULT_SPARSITY) -> np.ndarray:
    """The matrix of a finding, rebuilt from its stored seed."""
    return random_stochastic(n, np.random.default_rng(seed), sparsity)


def _precise_moduli(S: np.ndarray, dps: int = 50) -> np.ndarray:
    with mpmath.workdps(dps):
        ev = mpmath.eig(mpmath.matrix(S.tolist()), left=False, right=False)
        mods = sorted((float(abs(e)) for e in ev), reverse=True)
    return np.array(mods)


def _tau(S, m, variant):
    return tau_m(S, m) if variant == "max" else tau_m_min_variant(S, m)


def evaluate(S, variant: str = "max", *, seed: Optional[int] = None, trial: int = 0,
             sparsity: float = DEFAULT_SPARSITY) -> list:
    """One finding per ``k = 2..n`` comparing ``|lambda_k|`` with ``tau_{n-k+1}``."""
    if variant not in ("max", "min"):
        raise ValidationError("variant must be 'max' or 'min'")
    S = linalg.stochastic(S).array
    n = S.shape[0]
    mods = linalg.spectrum(S).moduli
    precise = None
    out = []
    for k in range(2, n + 1):
        t = _tau(S, n - k + 1, variant)
        lam = float(mods[k - 1])
        if abs(lam - t) <= 10 * SLACK:
            if precise is None:
                precise = _precise_moduli(S)
            lam = float(precise[k - 1])
        violated = lam > t + SLACK
        if violated and k == 2 and variant == "max":
            raise InternalError(f"|lambda_2| = {lam!r} exceeds tau_n1 = {t!r}")
        out.append(ConjectureFinding(S, n, k, lam, float(t), variant, violated,
                                     seed, trial, sparsity))
    return out


def fuzz_conjecture(n: int, trials: int, seed: int = 0, variant: str = "max",
                    inject=None, sparsity: float = DEFAULT_SPARSITY,
                    workers: int = 1) -> list:
    """Evaluate ``trials`` random ``n x n`` stochastic matrices, plus ``inject`` as trial 0.

    Returns every finding, violations first, each group ordered by
    ``(trial, k)``.  Random trials are numbered from 1 when a matrix is
    injected.  Output depends only on the arguments.
    """
    if not 2 <= n <= 10:
        raise ValidationError("n must lie in 2..10")
    if trials < 0:
        raise ValidationError("trials must be nonnegative")
    findings = []
    offset = 0
    if inject is not None:
        findings.extend(evaluate(inject, variant, seed=None, trial=0, sparsity=0.0))
        offset = 1

    def run(t):
        s = trial_seed(seed, t)
        return evaluate(trial_matrix(n, s, sparsity), variant, seed=s,
                        trial=t + offset, sparsity=sparsity)

    if workers > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(run, range(trials)))
    else:
        batches = [run(t) for t in range(trials)]
    for b in batches:
        findings.extend(b)
    return [f for f in findings if f.violated] + [f for f in findings if not f.violated]
