"""
Norm conservation and running the clock back
=============================================

Evolution is unitary, so the total population stays at 1 and a trip
0 -> T -> 0 returns the starting amplitudes.
"""

from chronoq import DEFAULT_PARAMS, IntegratorConfig, TwoQubitState, evolve, roundtrip_residual

# a superposition start, taken far into the past
start = TwoQubitState(0.5, 0.5j, -0.5, 0.5)
traj = evolve(DEFAULT_PARAMS, start, 0.0, -5000.0, IntegratorConfig(dt=0.01, sample_stride=1000))
print(f"{len(traj)} samples recorded, max |norm^2 - 1| = {traj.max_norm_error:.2e}")

# fixed step versus adaptive Dormand-Prince pair
for cfg in (IntegratorConfig(dt=0.01), IntegratorConfig(method="adaptive_45", rel_tol=1e-11)):
    res = roundtrip_residual(DEFAULT_PARAMS, start, 2000.0, cfg)
    print(f"{cfg.method.value:12s} round trip residual over T=2000: {res:.2e}")
