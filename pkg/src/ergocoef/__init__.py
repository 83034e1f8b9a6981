"""Ergodicity coefficients, their spectral bounds, and M-matrix stationary solves."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    ConvergenceError,
    ErgoError,
    InternalError,
    PreconditionError,
    ValidationError,
)
from .linalg import (  # noqa: E402
    INF,
    ONE,
    TWO,
    NormKind,
    Spectrum,
    StochasticMatrix,
    box_norm,
    dominant_left_eigenvector,
    is_irreducible,
    is_primitive,
    spectrum,
    vector_norm,
)
from .coefficients import (  # noqa: E402
    CoefficientReport,
    JordanSelection,
    mu,
    phi,
    tau_haviv,
    tau_m,
    tau_m_min_variant,
    tau_n1,
    tau_vecnorm,
)
from .limits import (  # noqa: E402
    LimitStudy,
    check_bound_lambda2,
    check_mu_phi_chain,
    limit_study_phi,
    limit_study_tau_n1,
)
from .stationary import (  # noqa: E402
    DecompositionResult,
    aplus_scaling,
    decompose,
    neumann_check,
    primitivity_corollary_check,
    stationary_via_msystem,
    stationary_via_power,
)
from .conjecture import ConjectureFinding, fuzz_conjecture  # noqa: E402
