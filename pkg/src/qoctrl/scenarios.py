"""Catalog of physical configurations for control-enhanced estimation.

Each scenario names a system (one or two qubits), a noise model, the
parameter of interest with its true value, a probe state and a control mask,
and knows how to build the corresponding Lindblad model at any parameter
value. Scenarios with a closed-form uncontrolled QFI also expose it as an
analytic oracle.

Rate convention: Lindblad pairs (L, rate) generate rate*(L rho L+ - {L+L, rho}/2),
so dephasing written as (gamma/2)(sigma_z rho sigma_z - rho) is stored as
(sigma_z, gamma/2).
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

from .dynamics import LindbladModel
from .linalg import IDENTITY_2, PAULIS, SIGMA_MINUS, SIGMA_X, SIGMA_Z, tensor_product

SCENARIO_NAMES = (
    "sq-amp-dephasing",
    "sq-amp-relaxation",
    "sq-dir-noiseless",
    "sq-dir-noisy",
    "tq-freq-zz",
    "tq-freq-xx",
    "tq-int-zz",
    "tq-int-xx",
)

PROBE_NAMES = ("plus", "zero", "field_axis", "plus_plus", "bell_phi_plus",
               "custom")


@dataclass(frozen=True)
class ScenarioSpec:
    name: str
    system: str                      # "single_qubit" | "two_qubit"
    parameter: str                   # "B" | "omega" | "phi" | "g"
    nominal_value: float             # true parameter value x0
    dephasing_rate: float = 0.0      # gamma (per qubit for two-qubit systems)
    relaxation_rate: float = 0.0     # gamma_minus
    coupling: str = "none"           # "none" | "zz" | "xx"
    coupling_strength: float = 0.0   # g when estimating phi
    local_frequency: float = 1.0     # phi when estimating g
    probe: str = "plus"
    control_mask: tuple = (("x", "y", "z"),)   # axes per qubit
    custom_probe: np.ndarray | None = None

    def __post_init__(self):
        if self.system not in ("single_qubit", "two_qubit"):
            raise ValueError("unknown system %r" % self.system)
        if self.parameter not in ("B", "omega", "phi", "g"):
            raise ValueError("unknown parameter %r" % self.parameter)
        if self.system == "single_qubit" and self.parameter not in ("B", "omega"):
            raise ValueError("single-qubit scenarios estimate B or omega")
        if self.system == "two_qubit" and self.parameter not in ("phi", "g"):
            raise ValueError("two-qubit scenarios estimate phi or g")
        if self.dephasing_rate < 0 or self.relaxation_rate < 0:
            raise ValueError("noise rates must be non-negative")
        if self.coupling not in ("none", "zz", "xx"):
            raise ValueError("unknown coupling %r" % self.coupling)
        if self.system == "two_qubit" and self.coupling == "none":
            raise ValueError("two-qubit scenarios require a coupling")
        if self.probe not in PROBE_NAMES:
            raise ValueError("unknown probe %r" % self.probe)
        n_qubits = 1 if self.system == "single_qubit" else 2
        if len(self.control_mask) != n_qubits:
            raise ValueError("control_mask must list axes for each of %d qubit(s)"
                             % n_qubits)
        for axes in self.control_mask:
            for ax in axes:
                if ax not in ("x", "y", "z"):
                    raise ValueError("unknown control axis %r" % ax)

    @property
    def dim(self):
        return 2 if self.system == "single_qubit" else 4

    @property
    def control_labels(self):
        labels = []
        for i, axes in enumerate(self.control_mask):
            for ax in axes:
                labels.append("u_%s_q%d" % (ax, i + 1))
        return labels


_CATALOG = {
    "sq-amp-dephasing": dict(system="single_qubit", parameter="B", nominal_value=1.0,
                             dephasing_rate=0.1),
    "sq-amp-relaxation": dict(system="single_qubit", parameter="B", nominal_value=1.0,
                              relaxation_rate=0.2),
    "sq-dir-noiseless": dict(system="single_qubit", parameter="omega",
                             nominal_value=np.pi / 4, probe="field_axis"),
    "sq-dir-noisy": dict(system="single_qubit", parameter="omega",
                         nominal_value=np.pi / 4, dephasing_rate=0.1,
                         relaxation_rate=0.2, probe="field_axis"),
    "tq-freq-zz": dict(system="two_qubit", parameter="phi", nominal_value=1.0,
                       coupling="zz", coupling_strength=0.1, dephasing_rate=0.1,
                       probe="plus_plus",
                       control_mask=(("x", "y", "z"), ("x", "y", "z"))),
    "tq-freq-xx": dict(system="two_qubit", parameter="phi", nominal_value=1.0,
                       coupling="xx", coupling_strength=0.1, dephasing_rate=0.1,
                       probe="plus_plus",
                       control_mask=(("x", "y", "z"), ("x", "y", "z"))),
    "tq-int-zz": dict(system="two_qubit", parameter="g", nominal_value=0.1,
                      coupling="zz", local_frequency=1.0, dephasing_rate=0.1,
                      probe="plus_plus",
                      control_mask=(("x", "y", "z"), ("x", "y", "z"))),
    "tq-int-xx": dict(system="two_qubit", parameter="g", nominal_value=0.1,
                      coupling="xx", local_frequency=1.0, dephasing_rate=0.1,
                      probe="plus_plus",
                      control_mask=(("x", "y", "z"), ("x", "y", "z"))),
}


def get_scenario(name, **overrides):
    """Look up a catalog scenario by name, optionally overriding fields."""
    if name not in _CATALOG:
        raise KeyError("unknown scenario %r; known: %s"
                       % (name, ", ".join(SCENARIO_NAMES)))
    spec = ScenarioSpec(name=name, **_CATALOG[name])
    if overrides:
        spec = dataclasses.replace(spec, **overrides)
    return spec


def _embed(op, qubit):
    if qubit == 0:
        return tensor_product(op, IDENTITY_2)
    return tensor_product(IDENTITY_2, op)


def _interaction(coupling):
    if coupling == "zz":
        return tensor_product(SIGMA_Z, SIGMA_Z)
    if coupling == "xx":
        return tensor_product(SIGMA_X, SIGMA_X)
    raise ValueError("unknown coupling %r" % coupling)


def build_model(spec, x):
    """LindbladModel for the scenario at parameter value x."""
    if spec.system == "single_qubit":
        if spec.parameter == "B":
            drift = 0.5 * x * SIGMA_Z
        else:  # omega: field of unit magnitude in the x-z plane
            drift = np.sin(x) * SIGMA_X + np.cos(x) * SIGMA_Z
        lindblads = []
        if spec.dephasing_rate > 0:
            lindblads.append((SIGMA_Z, spec.dephasing_rate / 2.0))
        if spec.relaxation_rate > 0:
            lindblads.append((SIGMA_MINUS, spec.relaxation_rate))
        controls = [PAULIS[ax] for ax in spec.control_mask[0]]
        return LindbladModel(drift, controls, lindblads)

    # two qubits
    if spec.parameter == "phi":
        phi, g = x, spec.coupling_strength
    else:
        phi, g = spec.local_frequency, x
    drift = (phi * _embed(SIGMA_Z, 0) + phi * _embed(SIGMA_Z, 1)
             + g * _interaction(spec.coupling))
    lindblads = []
    if spec.dephasing_rate > 0:
        lindblads.append((_embed(SIGMA_Z, 0), spec.dephasing_rate / 2.0))
        lindblads.append((_embed(SIGMA_Z, 1), spec.dephasing_rate / 2.0))
    if spec.relaxation_rate > 0:
        lindblads.append((_embed(SIGMA_MINUS, 0), spec.relaxation_rate))
        lindblads.append((_embed(SIGMA_MINUS, 1), spec.relaxation_rate))
    controls = []
    for qubit, axes in enumerate(spec.control_mask):
        for ax in axes:
            controls.append(_embed(PAULIS[ax], qubit))
    return LindbladModel(drift, controls, lindblads)


def drift_derivative(spec, x):
    """Analytic d(drift)/dx at parameter value x."""
    if spec.system == "single_qubit":
        if spec.parameter == "B":
            return 0.5 * SIGMA_Z
        return np.cos(x) * SIGMA_X - np.sin(x) * SIGMA_Z
    if spec.parameter == "phi":
        return _embed(SIGMA_Z, 0) + _embed(SIGMA_Z, 1)
    return _interaction(spec.coupling)


def default_probe(spec):
    """Probe density matrix named by the scenario."""
    plus = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2.0)
    zero = np.array([1.0, 0.0], dtype=complex)
    if spec.probe == "custom":
        if spec.custom_probe is None:
            raise ValueError("custom probe selected but no state supplied")
        return np.asarray(spec.custom_probe, dtype=complex)
    if spec.probe == "plus":
        psi = plus
    elif spec.probe == "zero":
        psi = zero
    elif spec.probe == "field_axis":
        # spin aligned with the field direction (sin x, 0, cos x); for
        # direction estimation this probe attains the optimal uncontrolled
        # QFI 4 sin^2 T because the phase-accumulation generator averages
        # to zero on it at every duration
        if spec.parameter != "omega":
            raise ValueError("field_axis probe requires a direction scenario")
        x = spec.nominal_value
        psi = np.array([np.cos(x / 2), np.sin(x / 2)], dtype=complex)
    elif spec.probe == "plus_plus":
        psi = np.kron(plus, plus)
    elif spec.probe == "bell_phi_plus":
        psi = np.array([1.0, 0.0, 0.0, 1.0], dtype=complex) / np.sqrt(2.0)
    else:
        raise ValueError("unknown probe %r" % spec.probe)
    if psi.shape[0] != spec.dim:
        raise ValueError("probe %r does not fit a %d-dimensional system"
                         % (spec.probe, spec.dim))
    return np.outer(psi, psi.conj())


def analytic_uncontrolled_qfi(spec, T):
    """Closed-form uncontrolled QFI, or None when no closed form exists.

    Covered: amplitude estimation under parallel dephasing (T^2 e^{-2 gamma T},
    which reduces to the Heisenberg T^2 when gamma = 0), under relaxation
    (T^2 e^{-gamma_minus T}), and noiseless field-direction estimation
    (4 sin^2 T).
    """
    if T < 0:
        raise ValueError("T must be non-negative")
    if spec.system == "single_qubit" and spec.parameter == "B":
        if spec.relaxation_rate == 0:
            return T * T * np.exp(-2.0 * spec.dephasing_rate * T)
        if spec.dephasing_rate == 0:
            return T * T * np.exp(-spec.relaxation_rate * T)
        return None
    if (spec.system == "single_qubit" and spec.parameter == "omega"
            and spec.dephasing_rate == 0 and spec.relaxation_rate == 0):
        return 4.0 * np.sin(T) ** 2
    return None


def n_rotation_qfi(N, T):
    """QFI of the N-rotation sequential scheme, 4 N^2 sin^2(T/N)."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if T < 0:
        raise ValueError("T must be non-negative")
    return 4.0 * N * N * np.sin(T / N) ** 2
