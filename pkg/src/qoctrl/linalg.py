"""Dense complex linear algebra for one- and two-qubit states.

Pauli matrices, Kronecker products, Hermitian eigendecompositions, matrix
functions and the (generalized) Bloch maps used by all higher-level modules.
Everything operates on plain numpy arrays; density matrices are d x d complex
arrays with d in {2, 4}.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

IDENTITY_2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |0><1| lowering
SIGMA_PLUS = SIGMA_MINUS.conj().T

PAULIS = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-9
POSITIVITY_TOL = -1e-9


def tensor_product(a, b):
    """Kronecker product of two matrices."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def dagger(m):
    return np.asarray(m).conj().T


def is_hermitian(m, tol=1e-12):
    m = np.asarray(m)
    return bool(np.max(np.abs(m - m.conj().T)) <= tol)


def assert_density_matrix(rho, trace_tol=TRACE_TOL, herm_tol=HERMITICITY_TOL,
                          pos_tol=POSITIVITY_TOL):
    """Raise ValueError unless rho is Hermitian, unit-trace and positive.

    Tolerances follow the module-wide state contract: Hermiticity 1e-10,
    trace 1e-9, minimum eigenvalue >= -1e-9.
    """
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError("density matrix must be square, got shape %s" % (rho.shape,))
    if not is_hermitian(rho, herm_tol):
        raise ValueError("density matrix is not Hermitian within %g" % herm_tol)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > trace_tol:
        raise ValueError("density matrix trace %.3e deviates from 1" % tr)
    w = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))
    if w.min() < pos_tol:
        raise ValueError("density matrix has eigenvalue %.3e below tolerance" % w.min())
    return rho


def hermitian_eigendecomposition(h, tol=1e-12):
    """Eigendecomposition h = V diag(w) V^dag with w ascending.

    Rejects non-Hermitian input; use numpy directly for general matrices.
    """
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, tol):
        raise ValueError("input is not Hermitian within %g" % tol)
    w, v = np.linalg.eigh(h)
    return w, v


def matrix_exponential(m):
    """exp(m) for a square complex matrix (scaling-and-squaring Pade)."""
    return scipy.linalg.expm(np.asarray(m, dtype=complex))


def psd_matrix_sqrt(rho, clamp=-1e-9):
    """Principal square root of a positive-semidefinite Hermitian matrix.

    Eigenvalues in [clamp, 0) are clamped to zero so that tiny negativity
    accumulated during propagation does not leak imaginary parts into
    fidelities. Eigenvalues below clamp raise.
    """
    w, v = hermitian_eigendecomposition(0.5 * (np.asarray(rho) + dagger(rho)), tol=1e-8)
    if w.min() < clamp:
        raise ValueError("matrix eigenvalue %.3e below clamping threshold" % w.min())
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ v.conj().T


def bloch_from_state(rho):
    """Bloch vector (r1, r2, r3) of a single-qubit state, r_i = Tr(rho sigma_i)."""
    rho = np.asarray(rho)
    if rho.shape != (2, 2):
        raise ValueError("bloch_from_state requires a 2x2 state")
    return np.array([np.trace(rho @ SIGMA_X).real,
                     np.trace(rho @ SIGMA_Y).real,
                     np.trace(rho @ SIGMA_Z).real])


def state_from_bloch(r):
    """Single-qubit state (I + r.sigma)/2; requires |r| <= 1."""
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise ValueError("Bloch vector must have 3 components")
    if np.linalg.norm(r) > 1.0 + 1e-9:
        raise ValueError("Bloch vector length %.6f exceeds 1" % np.linalg.norm(r))
    return 0.5 * (IDENTITY_2 + r[0] * SIGMA_X + r[1] * SIGMA_Y + r[2] * SIGMA_Z)


def _two_qubit_basis():
    # Orthonormal traceless Hermitian basis: kron(sigma_a, sigma_b)/2 for
    # (a, b) != (0, 0), with sigma_0 = I. Tr(G_i G_j) = delta_ij.
    singles = [IDENTITY_2, SIGMA_X, SIGMA_Y, SIGMA_Z]
    labels = ["0", "x", "y", "z"]
    basis = []
    names = []
    for a in range(4):
        for b in range(4):
            if a == 0 and b == 0:
                continue
            basis.append(np.kron(singles[a], singles[b]) / 2.0)
            names.append(labels[a] + labels[b])
    return np.array(basis), names


TWO_QUBIT_BASIS, TWO_QUBIT_BASIS_LABELS = _two_qubit_basis()


def generalized_bloch(rho):
    """15 real coordinates of a 4x4 state in the orthonormal Pauli-product basis.

    With this normalization |c|^2 = Tr(rho^2) - 1/4, so the Euclidean length
    tracks the state's purity.
    """
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError("generalized_bloch requires a 4x4 state")
    return np.einsum("kij,ji->k", TWO_QUBIT_BASIS, rho).real


def state_from_generalized_bloch(c):
    """Inverse of generalized_bloch (no positivity check)."""
    c = np.asarray(c, dtype=float)
    if c.shape != (15,):
        raise ValueError("generalized Bloch vector must have 15 components")
    return np.eye(4, dtype=complex) / 4.0 + np.einsum("k,kij->ij", c, TWO_QUBIT_BASIS)
