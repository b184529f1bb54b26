"""Forward and backward time evolution of a driven two-qubit spin system."""

__version__ = "0.1.0"

from .errors import (ChronoqError, DivergenceError, GateNotFoundError, InconclusiveError,
                     NumericalError, UsageError)
from .model import (DEFAULT_PARAMS, SystemParameters, TwoQubitState, drive_phase, hamiltonian,
                    rhs)
from .integrate import (Direction, IntegratorConfig, Method, Trajectory, convergence_order,
                        evolve, roundtrip_residual)
from .oracle import (PropagatorConfig, evolve_diagonal, evolve_exact, evolve_propagator,
                     jacobi_eigh, slice_unitary)
from .analysis import (GateProbeReport, basis_sweep, cnot_initial, cnot_probe, find_gate_time,
                       populations)
