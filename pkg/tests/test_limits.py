import numpy as np
import pytest

from ergocoef import linalg
from ergocoef.coefficients import JordanSelection
from ergocoef.errors import ValidationError
from ergocoef.generators import (diagonalizable, random_irreducible_stochastic,
                                 random_primitive_with_gap, random_stochastic)
from ergocoef.limits import (LimitStudy, check_bound_lambda2, check_mu_phi_chain,
                             geometric_ks, limit_study_phi, limit_study_tau_n1)
from ergocoef.linalg import ONE, TWO

from conftest import A3, a3_nonunit_eigenvalues


def test_geometric_schedule():
    assert geometric_ks(256) == [1, 2, 4, 8, 16, 32, 64, 128, 256]
    assert geometric_ks(100) == [1, 2, 4, 8, 16, 32, 64, 100]
    with pytest.raises(ValidationError):
        geometric_ks(0)


def test_study_validation():
    with pytest.raises(ValidationError):
        LimitStudy([2, 1], [0.1, 0.2], 0.1)
    with pytest.raises(ValidationError):
        LimitStudy([1], [-0.1], 0.1)
    s = LimitStudy([1, 2], [0.0, 0.5], 0.5)
    assert s.zero == [True, False] and s.converged


def test_phi_study_diagonal_is_flat():
    A = np.diag([1.0, 0.5, 0.25])
    sel = JordanSelection.for_matrix(A, np.eye(3)[:, :1], [1.0])
    study = limit_study_phi(sel, A, TWO, ks=range(1, 21))
    assert study.target == 0.5
    np.testing.assert_allclose(study.values, 0.5, rtol=1e-14)


def _constructed(eigs, seed):
    rng = np.random.default_rng(seed)
    A, X = diagonalizable(eigs, rng)
    return A, X


@pytest.mark.parametrize("seed", range(5))
def test_phi_study_constructed_error_within_conditioning_bound(seed):
    # phi(W, A^k) <= rho_c^k * cond(X), so the root overshoots by at most cond^(1/k)
    A, X = _constructed([1.0, 0.6, 0.2], seed)
    sel = JordanSelection.for_matrix(A, X[:, :1], [1.0])
    study = limit_study_phi(sel, A, TWO, ks=[1, 10, 50, 100])
    assert study.method == "compressed"
    assert study.target == pytest.approx(0.6, abs=1e-10)
    cond = np.linalg.cond(X)
    for k, v in zip(study.ks, study.values):
        assert 0.6 * (1 - 1e-12) <= v <= 0.6 * cond ** (1 / k) * (1 + 1e-12)


def test_phi_study_constructed_fixture_converges():
    A, X = _constructed([1.0, 0.6, 0.2], 11)
    sel = JordanSelection.for_matrix(A, X[:, :1], [1.0])
    study = limit_study_phi(sel, A, TWO, ks=[100])
    assert study.final_error <= 1e-2


def test_phi_study_two_selected_values():
    A, X = _constructed([1.0, 0.6, 0.2], 3)
    sel = JordanSelection.for_matrix(A, X[:, :2], [1.0, 0.6])
    study = limit_study_phi(sel, A, TWO, ks=geometric_ks(128))
    assert study.target == pytest.approx(0.2, abs=1e-10)
    assert study.converged


def test_phi_study_non_invariant_w_uses_direct_powers(rng):
    S = random_stochastic(4, rng)
    study = limit_study_phi(JordanSelection(rng.standard_normal((4, 1))), S, TWO, ks=[1, 2, 4])
    assert study.method == "direct"


def test_phi_study_one_norm():
    A = np.diag([1.0, 0.5, 0.25])
    sel = JordanSelection.for_matrix(A, np.eye(3)[:, :1], [1.0])
    study = limit_study_phi(sel, A, ONE, ks=[1, 8, 64])
    np.testing.assert_allclose(study.values, 0.5, rtol=1e-13)


def test_phi_lower_bound_every_k():
    for seed in range(5):
        A, X = _constructed([1.0, 0.7, -0.3, 0.1], seed)
        sel = JordanSelection.for_matrix(A, X[:, :1], [1.0])
        study = limit_study_phi(sel, A, TWO, ks=geometric_ks(64))
        for v in study.values:
            assert v >= study.target * (1 - 1e-12)


def test_phi_tail_sup_approaches_target():
    A, X = _constructed([1.0, 0.6, 0.2, 0.1], 2)
    sel = JordanSelection.for_matrix(A, X[:, :1], [1.0])
    study = limit_study_phi(sel, A, TWO, ks=geometric_ks(256))
    assert study.tail_sup(len(study.ks) - 1) <= study.target + 1e-2


@pytest.mark.parametrize("c", [1e-3, 0.5, 7.0, 1e4])
def test_root_sequence_scales_with_matrix(c):
    A, X = _constructed([1.0, 0.6, 0.2], 4)
    sel = JordanSelection.for_matrix(A, X[:, :1], [1.0])
    ks = geometric_ks(128)
    base = limit_study_phi(sel, A, TWO, ks=ks).values
    scaled = limit_study_phi(JordanSelection.for_matrix(c * A, X[:, :1], [c]), c * A, TWO, ks=ks)
    np.testing.assert_allclose(np.array(scaled.values) / c, base, rtol=1e-12)
    assert scaled.target == pytest.approx(0.6 * c, rel=1e-10)


def test_tau_study_uniform_and_identity():
    u = limit_study_tau_n1(np.full((4, 4), 0.25), ks=[1, 2, 4])
    assert u.target == pytest.approx(0.0, abs=1e-12)
    assert max(u.values) <= 1e-12
    i = limit_study_tau_n1(np.eye(2), ks=[1, 2, 4])
    assert i.target == 1.0
    np.testing.assert_allclose(i.values, 1.0)


def test_tau_study_primitive_converges(rng):
    S = random_primitive_with_gap(5, rng)
    study = limit_study_tau_n1(S, ks=geometric_ks(200))
    assert study.final_error <= 1e-2


def test_tau_study_methods_agree_for_small_k(rng):
    S = random_stochastic(5, rng)
    ks = [1, 2, 3, 5, 8]
    a = limit_study_tau_n1(S, ks=ks)
    b = limit_study_tau_n1(S, ks=ks, method="direct")
    np.testing.assert_allclose(a.values, b.values, rtol=1e-9)


def test_tau_study_on_a3():
    study = limit_study_tau_n1(A3)
    lam2 = max(abs(v) for v in a3_nonunit_eigenvalues())
    assert study.target == pytest.approx(lam2, abs=1e-12)
    assert study.converged


def test_bound_lambda2_examples():
    c = check_bound_lambda2(A3)
    assert c.bound_holds and c.tau_n1 == pytest.approx(0.57)
    u = check_bound_lambda2(np.full((3, 3), 1 / 3))
    assert u.bound_holds and u.lambda2 == pytest.approx(0.0, abs=1e-12)


def test_bound_lambda2_fuzz(rng):
    for _ in range(300):
        n = int(rng.integers(2, 9))
        assert check_bound_lambda2(random_stochastic(n, rng, sparsity=0.3)).bound_holds


def test_chain_diagonal():
    c = check_mu_phi_chain(np.diag([1.0, 0.5]), np.array([1.0, 0.0]), k=1)
    assert (c.subdominant, c.phi_root, c.mu_root) == pytest.approx((0.5, 0.5, 0.5))
    assert c.lower_holds and c.upper_holds


@pytest.mark.parametrize("k", [1, 2, 4])
def test_chain_irreducible_equality(k, rng):
    for _ in range(10):
        S = random_irreducible_stochastic(5, rng)
        x = linalg.perron_vector(S, "right")
        c = check_mu_phi_chain(S, x, k)
        assert c.lower_holds and c.upper_holds
        assert c.gap <= 1e-9


def test_chain_reducible_block_diagonal(rng):
    S = np.zeros((4, 4))
    S[:2, :2] = random_stochastic(2, rng)
    S[2:, 2:] = random_stochastic(2, rng)
    x = linalg.perron_vector(S, "right")
    c = check_mu_phi_chain(S, x, 1)
    assert c.lower_holds and c.upper_holds
