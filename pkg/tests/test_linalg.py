import numpy as np
import numpy.testing as npt
import pytest

from qoctrl.linalg import (
    IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z, SIGMA_MINUS, SIGMA_PLUS,
    TWO_QUBIT_BASIS, TWO_QUBIT_BASIS_LABELS,
    assert_density_matrix, bloch_from_state, dagger, generalized_bloch,
    hermitian_eigendecomposition, is_hermitian, matrix_exponential,
    psd_matrix_sqrt, state_from_bloch, state_from_generalized_bloch,
    tensor_product,
)

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
PLUS = (KET0 + KET1) / np.sqrt(2.0)


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def test_tensor_product_identity():
    npt.assert_allclose(tensor_product(IDENTITY_2, IDENTITY_2), np.eye(4))


def test_tensor_product_z_identity():
    npt.assert_allclose(tensor_product(SIGMA_Z, IDENTITY_2),
                        np.diag([1.0, 1.0, -1.0, -1.0]))


def test_tensor_product_xx_antidiagonal():
    expected = np.zeros((4, 4))
    expected[0, 3] = expected[1, 2] = expected[2, 1] = expected[3, 0] = 1.0
    npt.assert_allclose(tensor_product(SIGMA_X, SIGMA_X), expected)


def test_eigendecomposition_sigma_z():
    w, v = hermitian_eigendecomposition(SIGMA_Z)
    npt.assert_allclose(w, [-1.0, 1.0])
    npt.assert_allclose(SIGMA_Z @ v, v @ np.diag(w), atol=1e-14)


def test_eigendecomposition_sigma_x():
    w, v = hermitian_eigendecomposition(SIGMA_X)
    npt.assert_allclose(w, [-1.0, 1.0])
    # eigenvectors (|0> -/+ |1>)/sqrt(2) up to phase
    minus = (KET0 - KET1) / np.sqrt(2.0)
    plus = PLUS
    assert abs(abs(minus.conj() @ v[:, 0]) - 1.0) < 1e-12
    assert abs(abs(plus.conj() @ v[:, 1]) - 1.0) < 1e-12


def test_eigendecomposition_mixed_state_spectrum():
    rho = 0.5 * (IDENTITY_2 + 0.6 * SIGMA_X)
    w, _ = hermitian_eigendecomposition(rho)
    npt.assert_allclose(w, [0.2, 0.8], atol=1e-14)


def test_eigendecomposition_rejects_non_hermitian():
    with pytest.raises(ValueError):
        hermitian_eigendecomposition(SIGMA_MINUS)


def test_eigendecomposition_reconstructs_random_hermitian():
    rng = np.random.default_rng(7)
    for _ in range(20):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        h = a + a.conj().T
        w, v = hermitian_eigendecomposition(h)
        npt.assert_allclose((v * w) @ v.conj().T, h, atol=1e-12)


def test_matrix_exponential_zero():
    npt.assert_allclose(matrix_exponential(np.zeros((3, 3))), np.eye(3))


def test_matrix_exponential_diagonal_rotation():
    theta = 0.7
    expected = np.diag([np.exp(-1j * theta / 2), np.exp(1j * theta / 2)])
    npt.assert_allclose(matrix_exponential(-1j * theta * SIGMA_Z / 2), expected,
                        atol=1e-14)


def test_matrix_exponential_pauli_euler():
    npt.assert_allclose(matrix_exponential(-1j * np.pi * SIGMA_X / 2),
                        -1j * SIGMA_X, atol=1e-14)


def test_psd_sqrt_maximally_mixed():
    npt.assert_allclose(psd_matrix_sqrt(IDENTITY_2 / 2), IDENTITY_2 / np.sqrt(2.0))


def test_psd_sqrt_projector_idempotent():
    p = projector(PLUS)
    npt.assert_allclose(psd_matrix_sqrt(p), p, atol=1e-12)


def test_psd_sqrt_diagonal():
    npt.assert_allclose(psd_matrix_sqrt(np.diag([0.2, 0.8])),
                        np.diag([np.sqrt(0.2), np.sqrt(0.8)]))


def test_psd_sqrt_squares_back():
    rng = np.random.default_rng(11)
    for _ in range(10):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        s = psd_matrix_sqrt(rho)
        npt.assert_allclose(s @ s, rho, atol=1e-12)


def test_psd_sqrt_clamps_small_negative():
    rho = np.diag([1.0 + 1e-10, -1e-10])
    s = psd_matrix_sqrt(rho)
    assert s[1, 1].real == 0.0


def test_psd_sqrt_rejects_large_negative():
    with pytest.raises(ValueError):
        psd_matrix_sqrt(np.diag([1.1, -0.1]))


def test_bloch_from_state_plus():
    npt.assert_allclose(bloch_from_state(projector(PLUS)), [1.0, 0.0, 0.0],
                        atol=1e-14)


def test_bloch_from_state_mixed_and_zero():
    npt.assert_allclose(bloch_from_state(IDENTITY_2 / 2), [0.0, 0.0, 0.0])
    npt.assert_allclose(bloch_from_state(projector(KET0)), [0.0, 0.0, 1.0])


def test_bloch_round_trip():
    for rho in (projector(PLUS), IDENTITY_2 / 2, projector(KET0)):
        npt.assert_allclose(state_from_bloch(bloch_from_state(rho)), rho,
                            atol=1e-14)


def test_state_from_bloch_rejects_long_vector():
    with pytest.raises(ValueError):
        state_from_bloch([1.1, 0.0, 0.0])


def test_two_qubit_basis_orthonormal():
    assert len(TWO_QUBIT_BASIS) == 15
    assert len(TWO_QUBIT_BASIS_LABELS) == 15
    gram = np.einsum("aij,bji->ab", TWO_QUBIT_BASIS, TWO_QUBIT_BASIS).real
    npt.assert_allclose(gram, np.eye(15), atol=1e-14)


def test_generalized_bloch_maximally_mixed():
    npt.assert_allclose(generalized_bloch(np.eye(4) / 4), np.zeros(15),
                        atol=1e-14)


def test_generalized_bloch_product_state_length():
    c = generalized_bloch(projector(np.kron(KET0, KET0)))
    npt.assert_allclose(np.linalg.norm(c), np.sqrt(3.0) / 2, atol=1e-14)


def test_generalized_bloch_bell_state():
    bell = (np.kron(KET0, KET0) + np.kron(KET1, KET1)) / np.sqrt(2.0)
    c = generalized_bloch(projector(bell))
    npt.assert_allclose(np.linalg.norm(c), np.sqrt(3.0) / 2, atol=1e-14)
    comps = dict(zip(TWO_QUBIT_BASIS_LABELS, c))
    assert abs(comps["xx"]) > 0.1
    assert abs(comps["yy"]) > 0.1
    assert abs(comps["zz"]) > 0.1


def test_generalized_bloch_purity_identity():
    rng = np.random.default_rng(3)
    for _ in range(10):
        a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
        rho = a @ a.conj().T
        rho /= np.trace(rho).real
        c = generalized_bloch(rho)
        purity = np.trace(rho @ rho).real
        npt.assert_allclose(c @ c, purity - 0.25, atol=1e-12)


def test_generalized_bloch_round_trip():
    rng = np.random.default_rng(5)
    a = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = a @ a.conj().T
    rho /= np.trace(rho).real
    npt.assert_allclose(state_from_generalized_bloch(generalized_bloch(rho)),
                        rho, atol=1e-12)


def test_assert_density_matrix_accepts_valid():
    assert_density_matrix(projector(PLUS))
    assert_density_matrix(np.eye(4) / 4)


def test_assert_density_matrix_rejects_bad_trace():
    with pytest.raises(ValueError):
        assert_density_matrix(2.0 * IDENTITY_2)


def test_assert_density_matrix_rejects_non_hermitian():
    with pytest.raises(ValueError):
        assert_density_matrix(np.array([[0.5, 0.5], [0.0, 0.5]]))


def test_assert_density_matrix_rejects_negative():
    with pytest.raises(ValueError):
        assert_density_matrix(np.diag([1.5, -0.5]))


def test_dagger_and_is_hermitian():
    npt.assert_allclose(dagger(SIGMA_MINUS), SIGMA_PLUS)
    assert is_hermitian(SIGMA_Y)
    assert not is_hermitian(SIGMA_MINUS)
