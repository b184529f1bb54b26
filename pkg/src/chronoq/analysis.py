"""Populations, CNOT-style transfer detection and forward/backward comparison.

The probe starts in |10> and watches the population of |11>. The gate time
T is the first local maximum of that population whose sampled value
reaches ``threshold``; the backward run is then evaluated at exactly -T.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import NamedTuple

import numpy as np

from .errors import GateNotFoundError, UsageError
from .integrate import IntegratorConfig, evolve
from .model import BASIS_LABELS, TwoQubitState

__all__ = [
    "DEFAULT_THRESHOLD",
    "DEFAULT_HORIZON",
    "PeakScan",
    "GateProbeReport",
    "BasisRow",
    "populations",
    "cnot_initial",
    "scan_first_peak",
    "find_gate_time",
    "cnot_probe",
    "basis_sweep",
    "mirror_residual",
]

DEFAULT_THRESHOLD = 0.95
DEFAULT_HORIZON = 1000.0
TARGET = 3  # index of |11>


def populations(state):
    """(|c0|^2, |c1|^2, |c2|^2, |c3|^2) as a float array."""
    if isinstance(state, TwoQubitState):
        state = state.as_array()
    return np.abs(np.asarray(state, dtype=np.complex128)) ** 2


def cnot_initial():
    """The |10> input: c2 = 1, all other amplitudes zero."""
    return TwoQubitState(0, 0, 1, 0)


class PeakScan(NamedTuple):
    time: float | None
    peak: float | None
    best_time: float
    best_peak: float

    @property
    def found(self):
        return self.time is not None


def _parabola_vertex(ts, ys):
    """Vertex of the parabola through three points with distinct abscissae."""
    (t0, t1, t2), (y0, y1, y2) = ts, ys
    d0, d2 = t0 - t1, t2 - t1
    # y = y1 + b (t - t1) + a (t - t1)^2
    denom = d0 * d2 * (d0 - d2)
    a = (d2 * (y0 - y1) - d0 * (y2 - y1)) / denom
    b = (d0 * d0 * (y2 - y1) - d2 * d2 * (y0 - y1)) / denom
    if a >= 0:
        return t1, y1
    shift = -b / (2 * a)
    lo, hi = min(d0, d2), max(d0, d2)
    shift = min(max(shift, lo), hi)
    return t1 + shift, y1 + b * shift + a * shift * shift


def scan_first_peak(times, values, threshold):
    """First interior local maximum of ``values`` whose sample reaches ``threshold``.

    The location and height are refined with a three-point parabola, clamped
    to the neighbouring samples. Also reports the largest sample seen, which
    is what callers quote when nothing qualifies.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    best = int(np.argmax(values))
    best_time, best_peak = float(times[best]), float(values[best])
    if len(values) >= 3:
        mid = values[1:-1]
        candidates = np.flatnonzero((mid > values[:-2]) & (mid >= values[2:]) & (mid >= threshold))
        if candidates.size:
            i = int(candidates[0]) + 1
            t, y = _parabola_vertex(times[i - 1:i + 2], values[i - 1:i + 2])
            return PeakScan(float(t), float(y), best_time, best_peak)
    return PeakScan(None, None, best_time, best_peak)


def _check_threshold(threshold):
    if not 0 < threshold <= 1:
        raise UsageError(f"threshold must lie in (0, 1], got {threshold}")


def _forward_scan(params, config, horizon, threshold):
    if not horizon > 0:
        raise UsageError("horizon must be positive")
    _check_threshold(threshold)
    traj = evolve(params, cnot_initial(), 0.0, horizon, config)
    return scan_first_peak(traj.times, traj.populations()[:, TARGET], threshold), traj


def find_gate_time(params, config=None, horizon=DEFAULT_HORIZON, threshold=DEFAULT_THRESHOLD):
    """(T, peak) of the first qualifying |11> maximum from |10>, or None."""
    scan, _ = _forward_scan(params, config or IntegratorConfig(), horizon, threshold)
    if not scan.found:
        return None
    return scan.time, scan.peak


@dataclass(frozen=True)
class GateProbeReport:
    gate_time: float
    peak_population_forward: float
    peak_population_backward: float
    residual_populations_forward: tuple
    residual_populations_backward: tuple
    max_norm_error: float
    mirror_residual: float
    threshold: float
    refined_peak: float

    def to_dict(self):
        d = asdict(self)
        d["residual_populations_forward"] = list(self.residual_populations_forward)
        d["residual_populations_backward"] = list(self.residual_populations_backward)
        return d


def mirror_residual(forward_populations, backward_populations):
    return float(np.max(np.abs(np.asarray(backward_populations) - np.asarray(forward_populations))))


def cnot_probe(params, config=None, horizon=DEFAULT_HORIZON, threshold=DEFAULT_THRESHOLD):
    """Locate T, then evolve |10> to +T and to -T and compare the endpoints.

    Raises :class:`GateNotFoundError` (carrying the best |11> population
    seen) when no maximum within ``horizon`` reaches ``threshold``.
    """
    config = config or IntegratorConfig()
    scan, traj = _forward_scan(params, config, horizon, threshold)
    if not scan.found:
        raise GateNotFoundError(
            f"|11> population never reached {threshold} within t <= {horizon}"
            f" (best {scan.best_peak:.9f} at t={scan.best_time:.6g})",
            best_peak=scan.best_peak, best_time=scan.best_time,
            max_norm_error=traj.max_norm_error)
    T = scan.time
    fwd = evolve(params, cnot_initial(), 0.0, T, config)
    bwd = evolve(params, cnot_initial(), 0.0, -T, config)
    pf = populations(fwd.final_state)
    pb = populations(bwd.final_state)
    return GateProbeReport(
        gate_time=T,
        peak_population_forward=float(pf[TARGET]),
        peak_population_backward=float(pb[TARGET]),
        residual_populations_forward=tuple(float(x) for x in pf[:TARGET]),
        residual_populations_backward=tuple(float(x) for x in pb[:TARGET]),
        max_norm_error=max(fwd.max_norm_error, bwd.max_norm_error),
        mirror_residual=mirror_residual(pf, pb),
        threshold=float(threshold),
        refined_peak=scan.peak,
    )


@dataclass(frozen=True)
class BasisRow:
    """Endpoint populations at +T and -T for one basis input."""

    initial: str
    forward_populations: tuple
    backward_populations: tuple
    max_norm_error: float
    mirror_residual: float

    @property
    def dominant_forward(self):
        return BASIS_LABELS[int(np.argmax(self.forward_populations))]

    def to_dict(self):
        d = asdict(self)
        d["forward_populations"] = list(self.forward_populations)
        d["backward_populations"] = list(self.backward_populations)
        d["dominant_forward"] = self.dominant_forward
        return d


def basis_sweep(params, T, config=None):
    """Evolve every computational basis state to +T and -T.

    This only records what happens to each input; it makes no judgement
    about which rows of a CNOT truth table are realised.
    """
    if not T > 0:
        raise UsageError("T must be positive")
    config = config or IntegratorConfig()
    rows = []
    for label in BASIS_LABELS:
        start = TwoQubitState.basis(label)
        fwd = evolve(params, start, 0.0, T, config)
        bwd = evolve(params, start, 0.0, -T, config)
        pf = populations(fwd.final_state)
        pb = populations(bwd.final_state)
        rows.append(BasisRow(
            initial=label,
            forward_populations=tuple(float(x) for x in pf),
            backward_populations=tuple(float(x) for x in pb),
            max_norm_error=max(fwd.max_norm_error, bwd.max_norm_error),
            mirror_residual=mirror_residual(pf, pb),
        ))
    return rows
