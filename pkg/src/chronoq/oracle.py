"""Reference solutions used to check the Runge-Kutta integrator.

Three independent routes:

* ``evolve_diagonal``: closed form when the drive is off.
* ``evolve_propagator``: product of midpoint slice unitaries, each built from
  a cyclic-Jacobi eigendecomposition. Shares nothing with the RK code except
  the Hamiltonian assembly.
* ``evolve_exact``: closed form for any drive strength. The generator obeys
  M(t) = R(t) M(0) R(t)^H with R(t) = diag(exp(-i a_k t)),
  a = (0, -w2, -w1, -(w1 + w2)), so in the co-rotating frame the generator
  is the constant matrix M(0) - diag(a).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import NumericalError, UsageError
from .integrate import Direction, Trajectory
from .model import TwoQubitState, hamiltonian

__all__ = [
    "PropagatorConfig",
    "MAX_SLICES",
    "jacobi_eigh",
    "slice_unitary",
    "evolve_diagonal",
    "evolve_propagator",
    "propagator_trajectory",
    "evolve_exact",
    "exact_samples",
]

MAX_SLICES = 10**9


@dataclass(frozen=True)
class PropagatorConfig:
    """Slice width of the piecewise-constant propagator (Hamiltonian frozen at slice midpoints)."""

    slice_dt: float = 0.001
    midpoint_rule: bool = True

    def __post_init__(self):
        if not (math.isfinite(self.slice_dt) and self.slice_dt > 0):
            raise UsageError(f"slice_dt must be positive, got {self.slice_dt}")
        if not self.midpoint_rule:
            raise UsageError("only the midpoint rule is supported")

    def to_dict(self):
        return {"slice_dt": self.slice_dt, "midpoint_rule": self.midpoint_rule}


def jacobi_eigh(matrix):
    """Eigenvalues and column eigenvectors of a Hermitian matrix by cyclic Jacobi.

    Only the upper triangle is read.
    """
    a = np.array(matrix, dtype=np.complex128)
    w, v, sweeps = _kernels.jacobi_eigh(a)
    if sweeps < 0:
        raise NumericalError("Jacobi iteration did not converge")
    return w, v


def slice_unitary(params, t_mid, delta):
    """exp(-i M(t_mid) delta) for a single slice."""
    u, sweeps = _kernels.slice_unitary(params.as_array(), float(t_mid), float(delta))
    if sweeps < 0:
        raise NumericalError("Jacobi iteration did not converge")
    return u


def _amplitudes(initial):
    if isinstance(initial, TwoQubitState):
        return initial.as_array()
    return np.asarray(initial, dtype=np.complex128).reshape(4)


def evolve_diagonal(params, initial, t):
    """Closed-form evolution from time 0 to ``t`` with the drive switched off."""
    if params.omega != 0:
        raise UsageError("evolve_diagonal requires omega == 0")
    energies = params.energies()
    return TwoQubitState.from_array(np.exp(-1j * energies * t) * _amplitudes(initial))


def _slice_count(t_start, t_end, slice_dt):
    n = math.ceil(abs(t_end - t_start) / slice_dt * (1.0 - 1e-12))
    if n > MAX_SLICES:
        raise UsageError(f"{n} slices exceeds the limit of {MAX_SLICES}")
    return max(n, 1)


def propagator_trajectory(params, initial, t_start, t_end, config=None, sample_stride=1):
    """Slice propagation with intermediate samples every ``sample_stride`` slices.

    The interval is cut into equal slices no wider than ``config.slice_dt``.
    """
    config = config or PropagatorConfig()
    t_start = float(t_start)
    t_end = float(t_end)
    if t_start == t_end:
        raise UsageError("t_start and t_end must differ")
    n = _slice_count(t_start, t_end, config.slice_dt)
    times, amps, max_err, status = _kernels.propagate(
        params.as_array(), _amplitudes(initial), t_start, t_end, n, int(sample_stride))
    if status == _kernels.NO_CONVERGENCE:
        raise NumericalError("Jacobi iteration did not converge")
    if status != _kernels.OK:
        raise NumericalError(f"propagation failed near t={times[-1]}")
    direction = Direction.FORWARD if t_end > t_start else Direction.BACKWARD
    return Trajectory(times, amps, params, direction, config, float(max_err))


def evolve_propagator(params, initial, t_start, t_end, config=None):
    """State at ``t_end`` from the midpoint slice propagator."""
    if float(t_start) == float(t_end):
        return TwoQubitState.from_array(_amplitudes(initial))
    config = config or PropagatorConfig()
    n = _slice_count(float(t_start), float(t_end), config.slice_dt)
    traj = propagator_trajectory(params, initial, t_start, t_end, config, sample_stride=n)
    return traj.final_state


def _frame_rates(params):
    return np.array([0.0, -params.w2, -params.w1, -(params.w1 + params.w2)])


def evolve_exact(params, initial, t_start, t_end):
    """Closed-form state at ``t_end`` via the co-rotating frame (numpy eigh)."""
    rates = _frame_rates(params)
    generator = np.array(hamiltonian(params, 0.0)) - np.diag(rates)
    lam, vecs = np.linalg.eigh(generator)
    t_start = float(t_start)
    t_end = float(t_end)
    b = np.exp(1j * rates * t_start) * _amplitudes(initial)
    b = vecs @ (np.exp(-1j * lam * (t_end - t_start)) * (vecs.conj().T @ b))
    return TwoQubitState.from_array(np.exp(-1j * rates * t_end) * b)


def exact_samples(params, initial, times, t_start=0.0):
    """Closed-form amplitudes at many times at once, shape ``(len(times), 4)``."""
    rates = _frame_rates(params)
    generator = np.array(hamiltonian(params, 0.0)) - np.diag(rates)
    lam, vecs = np.linalg.eigh(generator)
    times = np.asarray(times, dtype=float)
    b0 = vecs.conj().T @ (np.exp(1j * rates * t_start) * _amplitudes(initial))
    coeffs = np.exp(-1j * np.outer(times - t_start, lam)) * b0
    return np.exp(-1j * np.outer(times, rates)) * (coeffs @ vecs.T)
