"""
Measuring the order of the integrator
=====================================

Halving the step of a fourth-order method should cut the error by about 16.
"""

import numpy as np

from chronoq import DEFAULT_PARAMS, cnot_initial, convergence_order, evolve_exact
from chronoq.integrate import step_errors

dts = [0.1, 0.05, 0.025, 0.0125]
ref = evolve_exact(DEFAULT_PARAMS, cnot_initial(), 0.0, 100.0)
errs = step_errors(DEFAULT_PARAMS, cnot_initial(), 100.0, dts, ref)
for dt, e in zip(dts, errs):
    print(f"dt = {dt:<7} error = {e:.3e}")
print("successive ratios:", np.round(errs[:-1] / errs[1:], 2))
print(f"fitted order: {convergence_order(DEFAULT_PARAMS, cnot_initial(), 100.0, dts):.3f}")
