import numpy as np
import pytest

from ergocoef import coefficients as coef
from ergocoef import linalg
from ergocoef.errors import PreconditionError, ValidationError
from ergocoef.generators import (random_irreducible_stochastic, random_stochastic,
                                 random_stochastic_positive_row)
from ergocoef.stationary import (aplus_scaling, decompose, deflated_block, neumann_check,
                                 primitivity_corollary_check, stationary_via_msystem,
                                 stationary_via_power)

from conftest import A3

S2 = np.array([[0.9, 0.2], [0.1, 0.8]])


def _eig_stationary(S):
    w, V = np.linalg.eig(S)
    v = np.real(V[:, np.argmin(np.abs(w - 1))])
    return v / v.sum()


def test_decompose_two_by_two():
    d = decompose(S2, 0.7)
    np.testing.assert_allclose(d.ell, [0.2, 0.1], atol=1e-15)
    assert d.stochastic
    np.testing.assert_allclose(d.B.array, np.eye(2), atol=1e-14)
    np.testing.assert_allclose(d.reconstruct(), S2, atol=1e-15)


def test_decompose_alpha_one_and_uniform():
    d = decompose(A3, 1.0)
    assert abs(d.ell.sum()) <= 1e-14
    np.testing.assert_allclose(d.reconstruct(), A3, atol=1e-14)
    if not d.stochastic:
        assert d.raw_B.min() < -1e-14
    U = np.full((3, 3), 1 / 3)
    with pytest.raises(ValidationError):
        decompose(U, 0.0)
    d = decompose(U, 0.5)
    assert d.ell.sum() == pytest.approx(0.5, abs=1e-15) and d.stochastic


def test_decompose_bad_row_index():
    with pytest.raises(ValidationError):
        decompose(A3, 0.7, h=3)


def test_decompose_stochastic_iff_alpha_above_tau(rng):
    for _ in range(200):
        n = int(rng.integers(2, 8))
        S = random_stochastic(n, rng, sparsity=0.2)
        t = coef.tau_n1(S)
        h = int(rng.integers(0, n))
        alpha = rng.uniform(t, 1.0) if t < 1 else 1.0
        d = decompose(S, alpha, h)
        assert np.abs(d.reconstruct() - S).max() <= 1e-14
        assert abs(d.ell.sum() - (1 - alpha)) <= 1e-14
        assert d.stochastic
        if t > 0.05:
            low = decompose(S, rng.uniform(0.01, t - 0.01), h)
            assert low.stochastic == (low.raw_B.min() >= -1e-14)


def test_spectrum_splits_off_one(rng):
    for _ in range(50):
        n = int(rng.integers(2, 7))
        S = random_stochastic(n, rng)
        t = coef.tau_n1(S)
        d = decompose(S, t)
        block = linalg.spectrum(t * deflated_block(d.B.array)).eigenvalues
        expected = np.sort_complex(linalg.spectrum(S).eigenvalues)
        got = np.sort_complex(np.concatenate([[1.0], block]))
        np.testing.assert_allclose(got, expected, atol=1e-6)


def test_msystem_examples():
    np.testing.assert_allclose(stationary_via_msystem(S2), [2 / 3, 1 / 3], atol=1e-15)
    np.testing.assert_allclose(stationary_via_msystem(np.full((4, 4), 0.25)), 0.25)
    with pytest.raises(PreconditionError):
        stationary_via_msystem(np.eye(3))


def test_msystem_matches_power_and_eig(rng):
    for _ in range(100):
        n = int(rng.integers(2, 9))
        S = random_stochastic_positive_row(n, rng)
        x = stationary_via_msystem(S)
        y = stationary_via_power(S)
        assert np.abs(x - y).sum() <= 1e-8
        assert np.abs(S @ x - x).sum() <= 1e-10
        assert np.abs(S @ y - y).sum() <= 1e-10
        np.testing.assert_allclose(x, _eig_stationary(S), atol=1e-10)


def test_power_fixed_point_solves_msystem(rng):
    for _ in range(50):
        S = random_stochastic_positive_row(6, rng)
        t = coef.tau_n1(S)
        d = decompose(S, t)
        y = stationary_via_power(S)
        assert np.abs((np.eye(6) - t * d.B.array) @ y - d.ell).sum() <= 1e-10


def test_power_iteration_examples():
    x0 = np.array([0.3, 0.7])
    np.testing.assert_array_equal(stationary_via_power(np.eye(2), x0=x0), x0)
    np.testing.assert_allclose(stationary_via_power(np.full((3, 3), 1 / 3)), 1 / 3)
    np.testing.assert_allclose(stationary_via_power(S2, tol=1e-14), [2 / 3, 1 / 3], atol=1e-13)


def test_neumann_uniform_exact_after_one_term():
    r = neumann_check(np.full((3, 3), 1 / 3), 1)
    assert r.error <= 1e-15


def test_neumann_tail_bound_two_by_two():
    for terms in (1, 5, 20, 50):
        r = neumann_check(S2, terms)
        # the 2x2 case attains the geometric bound, so allow round-off relative slack
        assert r.error <= r.tail_bound * (1 + 1e-6) + 1e-16
        assert r.mass_defect <= 1e-14


def test_neumann_random(rng):
    done = 0
    while done < 20:
        S = random_stochastic_positive_row(5, rng)
        if coef.tau_n1(S) > 0.9:
            continue
        assert neumann_check(S, 200).error <= 1e-8
        done += 1


def test_corollary_examples():
    c = primitivity_corollary_check(A3)
    assert c.irreducible and c.max_row_min == pytest.approx(0.31) and c.primitive
    P = np.roll(np.eye(4), 1, axis=0)
    c = primitivity_corollary_check(P)
    assert c.irreducible and not c.positive_row_min and c.corollary_respected


def test_corollary_fuzz(rng):
    for _ in range(200):
        n = int(rng.integers(2, 9))
        S = random_irreducible_stochastic(n, rng, positive_row=True)
        assert linalg.is_primitive(S)


def test_aplus_stochastic_input():
    r = aplus_scaling(A3)
    assert r.mu == pytest.approx(1.0)
    np.testing.assert_allclose(r.d, 1 / 3)
    np.testing.assert_allclose(r.S.array, A3, atol=1e-12)


def test_aplus_homogeneity():
    r = aplus_scaling(2 * A3)
    assert r.mu == pytest.approx(2.0)
    np.testing.assert_allclose(r.S.array, A3, atol=1e-12)


def test_aplus_diagonal_similarity():
    D0 = np.diag([1.0, 2.0, 5.0])
    A = 3 * D0 @ A3 @ np.linalg.inv(D0)
    r = aplus_scaling(A)
    assert r.mu == pytest.approx(3.0, abs=1e-12)
    assert linalg.is_column_stochastic(r.S.array)
    back = r.mu * np.diag(1 / r.d) @ r.S.array @ np.diag(r.d)
    np.testing.assert_allclose(back, A, atol=1e-10)
    assert r.roundtrip_error <= 1e-10 and r.tau_identity_error <= 1e-10


def test_aplus_rejects_reducible():
    # left Perron vector (1, 0) is not strictly positive
    A = np.array([[1.0, 0.0], [1.0, 0.5]])
    with pytest.raises(PreconditionError):
        aplus_scaling(A)
    with pytest.raises(PreconditionError):
        aplus_scaling(np.zeros((2, 2)))
