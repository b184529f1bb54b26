"""
Three independent routes to the same state
==========================================

The Runge-Kutta integrator, a product of slice unitaries built with a
Jacobi eigensolver, and the closed form obtained in the frame rotating
with the drive.
"""

from chronoq import (DEFAULT_PARAMS, PropagatorConfig, cnot_initial, evolve, evolve_diagonal,
                     evolve_exact, evolve_propagator)

t = 500.0
rk4 = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, t).final_state
exact = evolve_exact(DEFAULT_PARAMS, cnot_initial(), 0.0, t)
for slice_dt in (0.01, 0.001):
    prop = evolve_propagator(DEFAULT_PARAMS, cnot_initial(), 0.0, t, PropagatorConfig(slice_dt))
    print(f"propagator (slice {slice_dt}) vs closed form: {prop.distance(exact):.2e}")
print(f"RK4 (dt 0.01) vs closed form: {rk4.distance(exact):.2e}")

# the undriven system is a pure phase rotation
free = DEFAULT_PARAMS.with_(omega=0.0)
closed = evolve_diagonal(free, cnot_initial(), t)
stepped = evolve(free, cnot_initial(), 0.0, t).final_state
print(f"undriven, diagonal formula vs RK4: {closed.distance(stepped):.2e}")
