"""Time stepping of the amplitude equations in either time direction.

Negative-time evolution is plain signed-step integration of the same ODE:
``t_end < t_start`` simply makes every step negative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DivergenceError, InconclusiveError, NumericalError, UsageError
from .model import SystemParameters, TwoQubitState

__all__ = [
    "Method",
    "Direction",
    "IntegratorConfig",
    "Trajectory",
    "evolve",
    "roundtrip_residual",
    "step_errors",
    "convergence_order",
    "NORM_TOLERANCE",
    "ROUNDING_FLOOR",
]

# initial states must be normalised to this before evolution
NORM_TOLERANCE = 1e-12
# errors below this are treated as rounding noise in order fits
ROUNDING_FLOOR = 1e-13


class Method(str, enum.Enum):
    FIXED_RK4 = "fixed_rk4"
    ADAPTIVE_45 = "adaptive_45"


class Direction(str, enum.Enum):
    FORWARD = "forward"
    BACKWARD = "backward"


@dataclass(frozen=True)
class IntegratorConfig:
    """Stepper settings.

    ``dt`` is the fixed step for RK4 and the initial trial step for the
    adaptive pair; ``sample_stride`` keeps every k-th accepted step.
    """

    method: Method = Method.FIXED_RK4
    dt: float = 0.01
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    sample_stride: int = 1

    def __post_init__(self):
        try:
            object.__setattr__(self, "method", Method(self.method))
        except ValueError:
            raise UsageError(f"unknown integration method {self.method!r}") from None
        for name in ("dt", "rel_tol", "abs_tol"):
            value = float(getattr(self, name))
            if not (math.isfinite(value) and value > 0):
                raise UsageError(f"{name} must be a positive finite number, got {value}")
            object.__setattr__(self, name, value)
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise UsageError(f"sample_stride must be a positive integer, got {self.sample_stride}")
        object.__setattr__(self, "sample_stride", int(self.sample_stride))

    def to_dict(self):
        return {
            "method": self.method.value,
            "dt": self.dt,
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "sample_stride": self.sample_stride,
        }


@dataclass(frozen=True, eq=False)
class Trajectory:
    """Recorded samples of one evolution.

    ``times`` is monotone in the direction of travel and ``amplitudes`` has
    shape ``(len(times), 4)``. ``max_norm_error`` covers every step taken,
    including those that were not recorded.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    params: SystemParameters
    direction: Direction
    config: object
    max_norm_error: float = field(default=0.0)

    def __post_init__(self):
        for arr in (self.times, self.amplitudes):
            arr.flags.writeable = False

    def __len__(self):
        return len(self.times)

    def state(self, index):
        return TwoQubitState.from_array(self.amplitudes[index])

    def samples(self):
        """Iterate over ``(t, TwoQubitState)`` pairs."""
        for t, amps in zip(self.times, self.amplitudes):
            yield float(t), TwoQubitState.from_array(amps)

    @property
    def final_state(self):
        return self.state(-1)

    @property
    def final_time(self):
        return float(self.times[-1])

    def populations(self):
        return np.abs(self.amplitudes) ** 2

    def norm2(self):
        return self.populations().sum(axis=1)


def _as_state(initial):
    if isinstance(initial, TwoQubitState):
        return initial.as_array()
    return np.asarray(initial, dtype=np.complex128).reshape(4)


def _raise_for_status(status, t_reached):
    if status == _kernels.NONFINITE:
        raise NumericalError(f"non-finite amplitude encountered near t={t_reached}")
    if status == _kernels.UNDERFLOW:
        raise DivergenceError(f"adaptive step underflow near t={t_reached}")
    if status != _kernels.OK:
        raise NumericalError(f"integrator failed with status {status}")


def evolve(params, initial, t_start, t_end, config=None, *, check_norm=True):
    """Integrate from ``t_start`` to ``t_end``; ``t_end < t_start`` runs backward.

    The final sample sits exactly at ``t_end`` (the last step is shortened).
    Set ``check_norm=False`` to evolve unnormalised vectors, e.g. for
    linearity checks.
    """
    config = config or IntegratorConfig()
    t_start = float(t_start)
    t_end = float(t_end)
    if not (math.isfinite(t_start) and math.isfinite(t_end)):
        raise UsageError("start and end times must be finite")
    if t_start == t_end:
        raise UsageError("t_start and t_end must differ")
    c0 = _as_state(initial)
    if not np.all(np.isfinite(c0)):
        raise UsageError("initial state must be finite")
    if check_norm and abs(float(np.sum(np.abs(c0) ** 2)) - 1.0) > NORM_TOLERANCE:
        raise UsageError("initial state is not normalised")

    p = params.as_array()
    if config.method is Method.FIXED_RK4:
        times, amps, max_err, status = _kernels.rk4_fixed(
            p, c0, t_start, t_end, config.dt, config.sample_stride)
    else:
        times, amps, max_err, status = _kernels.dopri45(
            p, c0, t_start, t_end, config.dt, config.rel_tol, config.abs_tol,
            config.sample_stride)
    _raise_for_status(status, times[-1])
    if not check_norm:
        max_err = float("nan")
    direction = Direction.FORWARD if t_end > t_start else Direction.BACKWARD
    return Trajectory(times, amps, params, direction, config, float(max_err))


def _endpoint_config(config):
    # round trips only need the endpoint
    config = config or IntegratorConfig()
    return IntegratorConfig(config.method, config.dt, config.rel_tol, config.abs_tol,
                            sample_stride=2**62)


def roundtrip_residual(params, initial, T, config=None):
    """Largest amplitude error after evolving 0 -> T and back T -> 0."""
    if not T > 0:
        raise UsageError("T must be positive")
    cfg = _endpoint_config(config)
    c0 = _as_state(initial)
    there = evolve(params, c0, 0.0, T, cfg).amplitudes[-1]
    back = evolve(params, there, T, 0.0, cfg, check_norm=False).amplitudes[-1]
    return float(np.max(np.abs(back - c0)))


def step_errors(params, initial, T, dt_sequence, reference, method=Method.FIXED_RK4):
    """Final-state amplitude error at time ``T`` for each step size.

    ``reference`` is the trusted state at ``T`` (a TwoQubitState or array).
    """
    ref = _as_state(reference)
    errors = []
    for dt in dt_sequence:
        cfg = _endpoint_config(IntegratorConfig(method=method, dt=dt))
        final = evolve(params, initial, 0.0, T, cfg).amplitudes[-1]
        errors.append(float(np.max(np.abs(final - ref))))
    return np.array(errors)


def convergence_order(params, initial, T, dt_sequence, *, reference=None,
                      method=Method.FIXED_RK4):
    """Least-squares slope of log(error) against log(dt).

    The reference defaults to the closed-form rotating-frame solution.
    Errors under ``ROUNDING_FLOOR`` are dropped; with fewer than two usable
    points the fit is refused with :class:`InconclusiveError`.
    """
    dts = np.asarray(dt_sequence, dtype=float)
    if dts.size < 3:
        raise UsageError("need at least three step sizes")
    if np.any(np.diff(dts) >= 0):
        raise UsageError("dt_sequence must be strictly decreasing")
    if reference is None:
        from .oracle import evolve_exact

        reference = evolve_exact(params, initial, 0.0, T)
    errors = step_errors(params, initial, T, dts, reference, method)
    usable = errors >= ROUNDING_FLOOR
    if usable.sum() < 2:
        raise InconclusiveError(
            f"only {int(usable.sum())} error values above the rounding floor: {errors.tolist()}")
    slope, _ = np.polyfit(np.log(dts[usable]), np.log(errors[usable]), 1)
    return float(slope)
