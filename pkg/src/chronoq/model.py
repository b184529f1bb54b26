"""Domain types and the time-dependent Hamiltonian of the driven two-spin system.

Amplitudes are ordered (|00>, |01>, |10>, |11>) and obey ``i dC/dt = M(t) C``
with hbar = 1. The diagonal energies are

    E0 = -(w1 + w2) - J      E1 = -(w1 - w2) + J
    E2 = -(-w1 + w2) + J     E3 = -(-w1 - w2) - J

and the drive couples states that differ by one spin flip through
``(omega / 2) exp(-i theta_k)`` with ``theta_k = w_k t + phi_k``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import _kernels
from .errors import UsageError

__all__ = [
    "SystemParameters",
    "TwoQubitState",
    "DEFAULT_PARAMS",
    "BASIS_LABELS",
    "drive_phase",
    "hamiltonian",
    "rhs",
]

BASIS_LABELS = ("00", "01", "10", "11")


@dataclass(frozen=True)
class SystemParameters:
    """Physical constants in natural units (hbar = 1).

    ``j`` may take either sign; ``omega`` must be non-negative.
    """

    w1: float = 0.2
    w2: float = 0.0015
    j: float = 0.0015
    omega: float = 0.01
    phi1: float = math.pi / 2
    phi2: float = math.pi / 4

    def __post_init__(self):
        for name, value in asdict(self).items():
            value = float(value)
            if not math.isfinite(value):
                raise UsageError(f"parameter {name} must be finite, got {value}")
            object.__setattr__(self, name, value)
        if self.omega < 0:
            raise UsageError(f"omega must be >= 0, got {self.omega}")

    @classmethod
    def field_names(cls):
        return ("w1", "w2", "j", "omega", "phi1", "phi2")

    def as_array(self):
        return np.array([self.w1, self.w2, self.j, self.omega, self.phi1, self.phi2])

    def to_dict(self):
        return asdict(self)

    def with_(self, **changes):
        return replace(self, **changes)

    def energies(self):
        """Diagonal of the Hamiltonian, independent of time."""
        return np.real(np.diag(hamiltonian(self, 0.0)))


DEFAULT_PARAMS = SystemParameters()


@dataclass(frozen=True)
class TwoQubitState:
    """Four complex amplitudes on the computational basis."""

    c0: complex = 0j
    c1: complex = 0j
    c2: complex = 0j
    c3: complex = 0j

    def __post_init__(self):
        for name in ("c0", "c1", "c2", "c3"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_array(cls, amplitudes):
        a = np.asarray(amplitudes, dtype=np.complex128).reshape(4)
        return cls(*(complex(x) for x in a))

    @classmethod
    def basis(cls, label):
        """Computational basis state from ``"00"``.. ``"11"`` or an index 0..3."""
        if isinstance(label, str):
            label = label.strip().lstrip("|").rstrip(">")
            if label not in BASIS_LABELS:
                raise UsageError(f"unknown basis label {label!r}")
            index = BASIS_LABELS.index(label)
        else:
            index = int(label)
            if not 0 <= index < 4:
                raise UsageError(f"basis index must be 0..3, got {index}")
        amps = [0j] * 4
        amps[index] = 1.0
        return cls(*amps)

    def as_array(self):
        return np.array([self.c0, self.c1, self.c2, self.c3], dtype=np.complex128)

    def norm2(self):
        return float(np.sum(np.abs(self.as_array()) ** 2))

    def populations(self):
        return np.abs(self.as_array()) ** 2

    def is_finite(self):
        return bool(np.all(np.isfinite(self.as_array())))

    def distance(self, other):
        """Largest amplitude-wise modulus difference."""
        return float(np.max(np.abs(self.as_array() - other.as_array())))

    def __add__(self, other):
        return TwoQubitState.from_array(self.as_array() + other.as_array())

    def __mul__(self, scalar):
        return TwoQubitState.from_array(self.as_array() * scalar)

    __rmul__ = __mul__


def drive_phase(params, qubit_index, t):
    """Drive phase ``w_i t + phi_i`` for qubit 1 or 2."""
    if qubit_index == 1:
        return params.w1 * t + params.phi1
    if qubit_index == 2:
        return params.w2 * t + params.phi2
    raise UsageError(f"qubit_index must be 1 or 2, got {qubit_index!r}")


def hamiltonian(params, t):
    """4x4 Hermitian generator M(t), returned as a read-only complex array.

    Only the upper triangle is evaluated; the lower triangle is its
    conjugate mirror, so Hermiticity holds bit-for-bit.
    """
    t = float(t)
    if not math.isfinite(t):
        raise UsageError("t must be finite")
    out = np.empty((4, 4), dtype=np.complex128)
    _kernels.fill_hamiltonian(params.as_array(), t, out)
    out.flags.writeable = False
    return out


def rhs(params, t, state):
    """Time derivative ``-i M(t) C``.

    Accepts a :class:`TwoQubitState` (returns one) or a length-4 array
    (returns an array).
    """
    if isinstance(state, TwoQubitState):
        return TwoQubitState.from_array(-1j * (hamiltonian(params, t) @ state.as_array()))
    c = np.asarray(state, dtype=np.complex128)
    return -1j * (hamiltonian(params, t) @ c)
