"""Lindblad propagation with piecewise-constant controls.

The master equation is

    drho/dt = -i[H0 + sum_j u_j H_j, rho] + sum_k g_k (L rho L+ - {L+L, rho}/2)

and its adjoint (for costates)

    dchi/dt = -i[H, chi] - sum_k g_k (L+ chi L - {L+L, chi}/2).

Each constant-control interval is realized as an exact superoperator
exponential acting on the column-vectorized state, which keeps every forward
step exactly trace-preserving and completely positive regardless of dt.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .linalg import assert_density_matrix, dagger


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid on [0, T]: states at the n_steps+1 nodes, controls at midpoints."""

    t_final: float
    n_steps: int

    def __post_init__(self):
        if self.t_final <= 0:
            raise ValueError("t_final must be positive")
        if self.n_steps < 1:
            raise ValueError("n_steps must be >= 1")

    @property
    def dt(self):
        return self.t_final / self.n_steps

    @property
    def nodes(self):
        return np.linspace(0.0, self.t_final, self.n_steps + 1)

    @property
    def midpoints(self):
        return (np.arange(self.n_steps) + 0.5) * self.dt


@dataclass
class LindbladModel:
    """Drift Hamiltonian, control Hamiltonians and (operator, rate) Lindblad pairs."""

    drift: np.ndarray
    controls: list = field(default_factory=list)
    lindblads: list = field(default_factory=list)  # [(operator, rate >= 0)]

    def __post_init__(self):
        self.drift = np.asarray(self.drift, dtype=complex)
        self.controls = [np.asarray(h, dtype=complex) for h in self.controls]
        self.lindblads = [(np.asarray(op, dtype=complex), float(rate))
                          for op, rate in self.lindblads]
        d = self.drift.shape[0]
        if self.drift.shape != (d, d):
            raise ValueError("drift must be square")
        for h in self.controls:
            if h.shape != (d, d):
                raise ValueError("control Hamiltonian dimension mismatch")
        for op, rate in self.lindblads:
            if op.shape != (d, d):
                raise ValueError("Lindblad operator dimension mismatch")
            if rate < 0:
                raise ValueError("Lindblad rates must be non-negative")

    @property
    def dim(self):
        return self.drift.shape[0]

    @property
    def n_controls(self):
        return len(self.controls)

    def hamiltonian(self, u):
        h = self.drift.copy()
        for uj, hj in zip(u, self.controls):
            h = h + uj * hj
        return h


def lindbladian_apply(model, u, rho):
    """Right-hand side of the master equation at control values u."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (model.dim, model.dim):
        raise ValueError("state dimension mismatch")
    h = model.hamiltonian(u)
    out = -1j * (h @ rho - rho @ h)
    for op, rate in model.lindblads:
        opd = dagger(op)
        opdop = opd @ op
        out = out + rate * (op @ rho @ opd - 0.5 * (opdop @ rho + rho @ opdop))
    return out


def adjoint_generator_apply(model, u, chi):
    """Adjoint generator for costates: -i[H, chi] - L_D^dag(chi)."""
    chi = np.asarray(chi, dtype=complex)
    if chi.shape != (model.dim, model.dim):
        raise ValueError("costate dimension mismatch")
    h = model.hamiltonian(u)
    out = -1j * (h @ chi - chi @ h)
    for op, rate in model.lindblads:
        opd = dagger(op)
        opdop = opd @ op
        out = out - rate * (opd @ chi @ op - 0.5 * (opdop @ chi + chi @ opdop))
    return out


def vectorize(rho):
    """Column-stacking vectorization (Fortran order)."""
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(vec, dim):
    return np.asarray(vec).reshape((dim, dim), order="F")


def _hamiltonian_superop(h):
    d = h.shape[0]
    eye = np.eye(d)
    return -1j * (np.kron(eye, h) - np.kron(h.T, eye))


def _dissipator_superop(op, rate):
    d = op.shape[0]
    eye = np.eye(d)
    opdop = dagger(op) @ op
    return rate * (np.kron(op.conj(), op)
                   - 0.5 * np.kron(eye, opdop)
                   - 0.5 * np.kron(opdop.T, eye))


def _adjoint_dissipator_superop(op, rate):
    # vec(L+ chi L) = kron(L.T, L+) vec(chi)
    d = op.shape[0]
    eye = np.eye(d)
    opdop = dagger(op) @ op
    return rate * (np.kron(op.T, dagger(op))
                   - 0.5 * np.kron(eye, opdop)
                   - 0.5 * np.kron(opdop.T, eye))


class Propagator:
    """Cached per-interval superoperator exponentials for one model and dt.

    Intervals sharing the same control values (uncontrolled baselines, flat
    guess plateaus) reuse one exponential. Caches are cleared wholesale once
    they exceed cache_limit entries; optimization loops churn through fresh
    amplitudes every iteration and would otherwise grow without bound.
    """

    cache_limit = 10000

    def __init__(self, model, dt):
        if dt <= 0:
            raise ValueError("dt must be positive")
        self.model = model
        self.dt = float(dt)
        self._drift_super = _hamiltonian_superop(model.drift)
        self._control_supers = [_hamiltonian_superop(h) for h in model.controls]
        self._diss_super = sum((_dissipator_superop(op, g) for op, g in model.lindblads),
                               np.zeros_like(self._drift_super))
        self._adj_diss_super = sum((_adjoint_dissipator_superop(op, g)
                                    for op, g in model.lindblads),
                                   np.zeros_like(self._drift_super))
        self._forward_cache = {}
        self._backward_cache = {}

    def generator(self, u):
        gen = self._drift_super + self._diss_super
        for uj, sj in zip(u, self._control_supers):
            gen = gen + uj * sj
        return gen

    def step_matrix(self, u):
        """exp(dt * L_u) on the vectorized state."""
        key = np.asarray(u, dtype=float).tobytes()
        mat = self._forward_cache.get(key)
        if mat is None:
            if len(self._forward_cache) >= self.cache_limit:
                self._forward_cache.clear()
            mat = scipy.linalg.expm(self.dt * self.generator(u))
            self._forward_cache[key] = mat
        return mat

    def backward_step_matrix(self, u):
        """Hilbert-Schmidt adjoint of step_matrix(u); maps chi(t+dt) to chi(t)."""
        key = np.asarray(u, dtype=float).tobytes()
        mat = self._backward_cache.get(key)
        if mat is None:
            if len(self._backward_cache) >= self.cache_limit:
                self._backward_cache.clear()
            mat = self.step_matrix(u).conj().T
            self._backward_cache[key] = mat
        return mat

    def step(self, u, rho):
        return unvectorize(self.step_matrix(u) @ vectorize(rho), self.model.dim)

    def backward_step(self, u, chi):
        return unvectorize(self.backward_step_matrix(u) @ vectorize(chi),
                           self.model.dim)


def step_propagator(model, u, dt):
    """One-interval superoperator exp(dt * L_u) (column-vectorized convention)."""
    return Propagator(model, dt).step_matrix(u)


def _check_schedule(model, schedule, grid):
    schedule = np.asarray(schedule, dtype=float)
    expected = (model.n_controls, grid.n_steps)
    if schedule.shape != expected:
        raise ValueError("schedule shape %s does not match model/grid %s"
                         % (schedule.shape, expected))
    if not np.all(np.isfinite(schedule)):
        raise ValueError("schedule contains non-finite amplitudes")
    return schedule


def propagate_forward(model, schedule, grid, rho0, validate=False, propagator=None):
    """Evolve rho0 through the full grid; returns array of n_steps+1 states."""
    schedule = _check_schedule(model, schedule, grid)
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (model.dim, model.dim):
        raise ValueError("initial state dimension mismatch")
    prop = propagator or Propagator(model, grid.dt)
    states = np.empty((grid.n_steps + 1, model.dim, model.dim), dtype=complex)
    states[0] = rho0
    for k in range(grid.n_steps):
        states[k + 1] = prop.step(schedule[:, k], states[k])
        if validate:
            assert_density_matrix(states[k + 1])
    return states


def propagate_backward(model, schedule, grid, chiT, propagator=None):
    """Evolve a costate from t=T back to t=0; returns array with states[-1]=chiT."""
    schedule = _check_schedule(model, schedule, grid)
    chiT = np.asarray(chiT, dtype=complex)
    if chiT.shape != (model.dim, model.dim):
        raise ValueError("costate dimension mismatch")
    prop = propagator or Propagator(model, grid.dt)
    states = np.empty((grid.n_steps + 1, model.dim, model.dim), dtype=complex)
    states[grid.n_steps] = chiT
    for k in range(grid.n_steps - 1, -1, -1):
        states[k] = prop.backward_step(schedule[:, k], states[k + 1])
    return states
