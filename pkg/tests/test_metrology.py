import numpy as np
import numpy.testing as npt
import pytest

from qoctrl.linalg import IDENTITY_2, SIGMA_X, SIGMA_Y, state_from_bloch
from qoctrl.metrology import (
    StatePair, bloch_pair_diagnostics, bures_distance,
    central_difference_tangent, concurrence, fidelity, hs_terminal_cost,
    qfi_bloch_single_qubit, qfi_from_pair, qfi_sld,
)

KET0 = np.array([1.0, 0.0], dtype=complex)
KET1 = np.array([0.0, 1.0], dtype=complex)
PLUS = (KET0 + KET1) / np.sqrt(2.0)


def projector(psi):
    psi = np.asarray(psi, dtype=complex)
    return np.outer(psi, psi.conj())


def random_state(rng, dim=2):
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def dephased_plus(b, t, gamma):
    """Bloch path of |+> precessing at rate b under pure dephasing."""
    r = np.exp(-gamma * t) * np.array([np.cos(b * t), -np.sin(b * t), 0.0])
    return state_from_bloch(r)


# ---------------------------------------------------------------- HS cost

def test_hs_cost_identical_states():
    rho = projector(PLUS)
    assert hs_terminal_cost(StatePair(rho, rho, 1e-3)) == pytest.approx(1.0)


def test_hs_cost_orthogonal_pure():
    pair = StatePair(projector(KET0), projector(KET1), 1e-3)
    assert hs_terminal_cost(pair) == pytest.approx(0.0)


def test_hs_cost_pure_vs_mixed():
    pair = StatePair(projector(KET0), IDENTITY_2 / 2, 1e-3)
    assert hs_terminal_cost(pair) == pytest.approx(0.75)


def test_state_pair_validation():
    with pytest.raises(ValueError):
        StatePair(projector(KET0), np.eye(4) / 4, 1e-3)
    with pytest.raises(ValueError):
        StatePair(projector(KET0), projector(KET1), 0.0)


# ---------------------------------------------------------------- fidelity

def test_fidelity_equal_states():
    rng = np.random.default_rng(0)
    for _ in range(5):
        rho = random_state(rng)
        assert fidelity(rho, rho) == pytest.approx(1.0, abs=1e-12)


def test_fidelity_orthogonal():
    assert fidelity(projector(KET0), projector(KET1)) == pytest.approx(0.0, abs=1e-8)


def test_fidelity_pure_vs_maximally_mixed():
    assert fidelity(IDENTITY_2 / 2, projector(KET0)) == pytest.approx(1 / np.sqrt(2.0))


def test_fidelity_symmetric():
    rng = np.random.default_rng(1)
    for _ in range(10):
        a, b = random_state(rng), random_state(rng)
        assert fidelity(a, b) == pytest.approx(fidelity(b, a), abs=1e-10)


def test_bures_distance_values():
    assert bures_distance(projector(KET0), projector(KET0)) == pytest.approx(0.0)
    assert bures_distance(projector(KET0), projector(KET1)) == pytest.approx(np.sqrt(2.0), abs=1e-7)
    assert bures_distance(IDENTITY_2 / 2, projector(KET0)) == pytest.approx(np.sqrt(2.0 - np.sqrt(2.0)))


# ---------------------------------------------------------------- QFI estimators

def test_qfi_from_pair_identical():
    rho = random_state(np.random.default_rng(2))
    assert qfi_from_pair(StatePair(rho, rho, 1e-3)) == pytest.approx(0.0, abs=1e-6)


def test_qfi_from_pair_noiseless_phase():
    # |+> precessing for time T at two neighbouring rates: QFI approaches T^2
    t, delta = 7.0, 1e-3
    pair = StatePair(dephased_plus(1.0, t, 0.0),
                     dephased_plus(1.0 + delta, t, 0.0), delta)
    assert qfi_from_pair(pair) == pytest.approx(t * t, rel=1e-3)


def test_qfi_from_pair_dephasing_t10():
    t, gamma, delta = 10.0, 0.1, 1e-3
    pair = StatePair(dephased_plus(1.0, t, gamma),
                     dephased_plus(1.0 + delta, t, gamma), delta)
    assert qfi_from_pair(pair) == pytest.approx(100.0 * np.exp(-2.0), rel=1e-3)


def test_qfi_bloch_dephasing_formula():
    for t in (2.0, 10.0, 25.0):
        gamma, b = 0.1, 1.0
        e = np.exp(-gamma * t)
        r = e * np.array([np.cos(b * t), -np.sin(b * t), 0.0])
        dr = t * e * np.array([-np.sin(b * t), -np.cos(b * t), 0.0])
        assert qfi_bloch_single_qubit(r, dr) == pytest.approx(t * t * e * e, rel=1e-12)


def test_qfi_bloch_relaxation_formula():
    for t in (3.0, 10.0):
        gm, b = 0.2, 1.0
        e = np.exp(-gm * t / 2)
        r = np.array([e * np.cos(b * t), -e * np.sin(b * t), np.exp(-gm * t) - 1.0])
        dr = t * e * np.array([-np.sin(b * t), -np.cos(b * t), 0.0])
        assert qfi_bloch_single_qubit(r, dr) == pytest.approx(t * t * np.exp(-gm * t), rel=1e-12)


def test_qfi_bloch_zero_tangent():
    assert qfi_bloch_single_qubit([0.3, 0.0, 0.2], [0.0, 0.0, 0.0]) == 0.0


def test_qfi_bloch_pure_state_tangent_rule():
    # tangent derivative on the sphere surface drops the radial term
    assert qfi_bloch_single_qubit([1.0, 0.0, 0.0], [0.0, 2.0, 0.0]) == pytest.approx(4.0)
    with pytest.raises(ValueError):
        qfi_bloch_single_qubit([1.0, 0.0, 0.0], [1.0, 0.0, 0.0])


def test_qfi_sld_zero_tangent():
    rho = random_state(np.random.default_rng(3))
    assert qfi_sld(rho, np.zeros((2, 2))) == 0.0


def test_qfi_sld_dephasing_path():
    t, gamma, b, delta = 10.0, 0.1, 1.0, 1e-5
    rho = dephased_plus(b, t, gamma)
    drho = central_difference_tangent(dephased_plus(b - delta, t, gamma),
                                      dephased_plus(b + delta, t, gamma), delta)
    assert qfi_sld(rho, drho) == pytest.approx(100.0 * np.exp(-2.0), rel=1e-3)


def test_qfi_sld_matches_pair_on_random_states():
    rng = np.random.default_rng(4)
    delta = 1e-4
    for _ in range(20):
        r = rng.uniform(-1, 1, 3)
        r *= rng.uniform(0.1, 0.95) / np.linalg.norm(r)
        dr = rng.uniform(-1, 1, 3)
        rho = state_from_bloch(r)
        lo = state_from_bloch(r - delta * dr)
        hi = state_from_bloch(r + delta * dr)
        f_pair = qfi_from_pair(StatePair(lo, hi, 2 * delta))
        f_sld = qfi_sld(rho, central_difference_tangent(lo, hi, delta))
        assert f_sld == pytest.approx(f_pair, rel=5e-3)
        assert f_sld == pytest.approx(qfi_bloch_single_qubit(r, dr), rel=1e-6)


# ---------------------------------------------------------------- concurrence

def test_concurrence_bell_state():
    bell = (np.kron(KET0, KET0) + np.kron(KET1, KET1)) / np.sqrt(2.0)
    assert concurrence(projector(bell)) == pytest.approx(1.0, abs=1e-12)


def test_concurrence_product_state():
    assert concurrence(projector(np.kron(PLUS, PLUS))) == pytest.approx(0.0, abs=1e-12)


def test_concurrence_werner_state():
    bell = (np.kron(KET0, KET0) + np.kron(KET1, KET1)) / np.sqrt(2.0)
    for p, expected in ((0.5, 0.25), (0.2, 0.0), (1.0, 1.0)):
        rho = p * projector(bell) + (1 - p) * np.eye(4) / 4
        assert concurrence(rho) == pytest.approx(expected, abs=1e-12)


def test_concurrence_requires_two_qubits():
    with pytest.raises(ValueError):
        concurrence(IDENTITY_2 / 2)


# ---------------------------------------------------------------- diagnostics

def test_bloch_pair_diagnostics_equal():
    rho = projector(np.kron(KET0, KET0))
    npt.assert_allclose(bloch_pair_diagnostics(rho, rho), (0.0, 0.0))


def test_bloch_pair_diagnostics_zero_vector_convention():
    length, angle = bloch_pair_diagnostics(projector(np.kron(KET0, KET0)),
                                           np.eye(4) / 4)
    assert length == pytest.approx(np.sqrt(3.0) / 2)
    assert angle == 0.0


def test_bloch_pair_diagnostics_basis_states():
    length, angle = bloch_pair_diagnostics(projector(np.kron(KET0, KET0)),
                                           projector(np.kron(KET0, KET1)))
    assert length == pytest.approx(0.0, abs=1e-14)
    # Tr(rho_a rho_b) = 0 for orthogonal projectors, so 1/4 + c_a.c_b = 0 and
    # cos(angle) = (-1/4)/(3/4) = -1/3
    assert angle == pytest.approx(np.arccos(-1.0 / 3.0), abs=1e-12)
