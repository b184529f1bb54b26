"""
How transfer depends on coupling and drive strength
===================================================

Scan the drive amplitude and report the first qualifying |11> peak.
"""

import numpy as np

from chronoq import DEFAULT_PARAMS, find_gate_time

for omega in np.linspace(0.0025, 0.02, 8):
    found = find_gate_time(DEFAULT_PARAMS.with_(omega=omega), horizon=1500.0, threshold=0.9)
    if found is None:
        print(f"omega = {omega:.4f}: no peak above 0.9")
    else:
        print(f"omega = {omega:.4f}: T = {found[0]:9.3f}, peak = {found[1]:.6f}")

# reversing the sign of the coupling changes the detuning of the transition
for j in (-0.0015, 0.0015):
    found = find_gate_time(DEFAULT_PARAMS.with_(j=j), horizon=1500.0, threshold=0.5)
    print(f"j = {j:+.4f}:", "none" if found is None else f"T = {found[0]:.3f}, peak = {found[1]:.6f}")
