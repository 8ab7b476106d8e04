"""Distinguishability and information measures.

Hilbert-Schmidt terminal cost, fidelity, Bures distance, three quantum Fisher
information estimators (finite-difference Bures pair, single-qubit Bloch
formula, symmetric logarithmic derivative), Wootters concurrence and
generalized-Bloch diagnostics for two-qubit states.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import (SIGMA_Y, generalized_bloch, hermitian_eigendecomposition,
                     psd_matrix_sqrt, tensor_product)

SLD_EIGENVALUE_CUTOFF = 1e-12
DEFAULT_PARAMETER_STEP = 1e-3


@dataclass(frozen=True)
class StatePair:
    """States evolved at two neighbouring parameter values separated by delta."""

    rho_minus: np.ndarray
    rho_plus: np.ndarray
    delta: float

    def __post_init__(self):
        if np.asarray(self.rho_minus).shape != np.asarray(self.rho_plus).shape:
            raise ValueError("pair members must share a dimension")
        if self.delta <= 0:
            raise ValueError("delta must be positive")


def hs_terminal_cost(pair):
    """1 - Tr[(rho_minus - rho_plus)^2]/2; 1 for equal states, 0 for orthogonal pure ones."""
    diff = np.asarray(pair.rho_minus) - np.asarray(pair.rho_plus)
    return float(1.0 - 0.5 * np.trace(diff @ diff).real)


def hs_distance_squared(a, b):
    diff = np.asarray(a) - np.asarray(b)
    return float(np.trace(diff @ diff).real)


def fidelity(a, b):
    """Uhlmann fidelity Tr sqrt(sqrt(a) b sqrt(a)), clamped into [0, 1]."""
    sa = psd_matrix_sqrt(a)
    inner = sa @ np.asarray(b, dtype=complex) @ sa
    w = np.linalg.eigvalsh(0.5 * (inner + inner.conj().T))
    w = np.clip(w, 0.0, None)
    return float(min(np.sum(np.sqrt(w)), 1.0))


def bures_distance(a, b):
    """sqrt(2 - 2 F(a, b)), in [0, sqrt(2)]."""
    return float(np.sqrt(max(2.0 - 2.0 * fidelity(a, b), 0.0)))


def qfi_from_pair(pair):
    """Finite-difference QFI 4 D_Bures(rho_minus, rho_plus)^2 / delta^2."""
    d = bures_distance(pair.rho_minus, pair.rho_plus)
    return 4.0 * d * d / pair.delta ** 2


def qfi_bloch_single_qubit(r, dr, tangency_tol=1e-8):
    """Single-qubit QFI |dr|^2 + (r.dr)^2/(1-|r|^2) from a Bloch path tangent.

    On the pure-state boundary |r| = 1 the second term is taken as zero for
    tangent derivatives (|r.dr| < tangency_tol); a non-tangent derivative
    there is unphysical and raises.
    """
    r = np.asarray(r, dtype=float)
    dr = np.asarray(dr, dtype=float)
    r2 = float(r @ r)
    radial = float(r @ dr)
    qfi = float(dr @ dr)
    if 1.0 - r2 < 1e-12:
        if abs(radial) > tangency_tol:
            raise ValueError("non-tangent Bloch derivative on a pure state")
        return qfi
    return qfi + radial * radial / (1.0 - r2)


def qfi_sld(rho, drho, cutoff=SLD_EIGENVALUE_CUTOFF):
    """QFI via the symmetric logarithmic derivative, in the eigenbasis of rho.

    F = sum over eigenvalue pairs with l_i + l_j > cutoff of
    2 |<i|drho|j>|^2 / (l_i + l_j); null directions are excluded.
    """
    w, v = hermitian_eigendecomposition(0.5 * (np.asarray(rho) + np.asarray(rho).conj().T),
                                        tol=1e-8)
    drho_eig = v.conj().T @ np.asarray(drho, dtype=complex) @ v
    pair_sums = w[:, None] + w[None, :]
    mask = pair_sums > cutoff
    terms = np.zeros_like(pair_sums)
    terms[mask] = 2.0 * np.abs(drho_eig[mask]) ** 2 / pair_sums[mask]
    return float(terms.sum())


def central_difference_tangent(rho_minus, rho_plus, delta):
    """(rho_plus - rho_minus) / (2 delta) for use with qfi_sld."""
    return (np.asarray(rho_plus, dtype=complex) - np.asarray(rho_minus, dtype=complex)) / (2.0 * delta)


_SPIN_FLIP = tensor_product(SIGMA_Y, SIGMA_Y)


def concurrence(rho):
    """Wootters concurrence of a two-qubit state, in [0, 1]."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("concurrence requires a 4x4 state")
    rho_tilde = _SPIN_FLIP @ rho.conj() @ _SPIN_FLIP
    w = np.linalg.eigvals(rho @ rho_tilde)
    # eigenvalues are non-negative up to roundoff
    lam = np.sqrt(np.clip(np.sort(w.real)[::-1], 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def bloch_pair_diagnostics(a, b):
    """Length difference and angle between two generalized Bloch vectors.

    The angle is 0 by convention when either vector vanishes.
    """
    ca = generalized_bloch(a)
    cb = generalized_bloch(b)
    la = float(np.linalg.norm(ca))
    lb = float(np.linalg.norm(cb))
    length_diff = abs(la - lb)
    if la < 1e-12 or lb < 1e-12:
        return length_diff, 0.0
    cosang = float(np.clip(ca @ cb / (la * lb), -1.0, 1.0))
    return length_diff, float(np.arccos(cosang))
