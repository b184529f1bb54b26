import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronoq import (DEFAULT_PARAMS, DivergenceError, InconclusiveError, IntegratorConfig,
                     NumericalError, SystemParameters, TwoQubitState, UsageError, cnot_initial,
                     convergence_order, evolve, roundtrip_residual)
from chronoq.integrate import Direction, Method
from chronoq.oracle import evolve_exact, exact_samples

from golden import GOLDEN_GATE_TIME, GOLDEN_PEAK

ADAPTIVE = Method.ADAPTIVE_45


def test_config_validation():
    with pytest.raises(UsageError):
        IntegratorConfig(dt=0)
    with pytest.raises(UsageError):
        IntegratorConfig(rel_tol=-1)
    with pytest.raises(UsageError):
        IntegratorConfig(sample_stride=0)
    with pytest.raises(UsageError):
        IntegratorConfig(method="euler")
    assert IntegratorConfig(method="adaptive_45").method is ADAPTIVE


def test_undriven_evolution_keeps_populations_and_rotates_phase():
    p = DEFAULT_PARAMS.with_(omega=0.0)
    traj = evolve(p, TwoQubitState.basis("10"), 0.0, 100.0, IntegratorConfig(dt=0.01))
    np.testing.assert_allclose(traj.populations(), np.tile([0, 0, 1, 0], (len(traj), 1)),
                               atol=1e-12)
    e2 = -(-p.w1 + p.w2) + p.j
    np.testing.assert_allclose(traj.amplitudes[:, 2], np.exp(-1j * e2 * traj.times), atol=1e-9)


@pytest.mark.parametrize("t_end", [37.123, -37.123])
def test_trajectory_contract(t_end):
    start = TwoQubitState(0.5, 0.5, 0.5j, -0.5)
    traj = evolve(DEFAULT_PARAMS, start, 1.5, t_end, IntegratorConfig(dt=0.01, sample_stride=7))
    steps = np.diff(traj.times)
    if t_end > 1.5:
        assert traj.direction is Direction.FORWARD and np.all(steps > 0)
    else:
        assert traj.direction is Direction.BACKWARD and np.all(steps < 0)
    assert traj.times[0] == 1.5
    assert traj.state(0) == start
    assert traj.final_time == t_end
    t, s = next(traj.samples())
    assert t == 1.5 and s == start


def test_sample_stride_counts():
    traj = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, 1.0, IntegratorConfig(dt=0.01, sample_stride=30))
    # 100 steps: recorded after steps 30, 60, 90 and the final step
    np.testing.assert_allclose(traj.times, [0, 0.3, 0.6, 0.9, 1.0])


def test_rejects_bad_inputs():
    with pytest.raises(UsageError):
        evolve(DEFAULT_PARAMS, cnot_initial(), 2.0, 2.0)
    with pytest.raises(UsageError):
        evolve(DEFAULT_PARAMS, TwoQubitState(1, 1, 0, 0), 0.0, 1.0)
    traj = evolve(DEFAULT_PARAMS, TwoQubitState(1, 1, 0, 0), 0.0, 1.0, check_norm=False)
    assert traj.state(-1).norm2() == pytest.approx(2.0, rel=1e-12)


def test_nonfinite_state_is_reported():
    wild = SystemParameters(w1=1e200, w2=0, j=0, omega=0)
    with pytest.raises(NumericalError):
        evolve(wild, cnot_initial(), 0.0, 10.0, IntegratorConfig(dt=1.0))


def test_adaptive_step_underflow():
    cfg = IntegratorConfig(method=ADAPTIVE, rel_tol=1e-300, abs_tol=1e-300)
    with pytest.raises(DivergenceError):
        evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, 10.0, cfg)


def test_forward_and_backward_reach_golden_peak():
    cfg = IntegratorConfig(dt=0.01)
    fwd = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, GOLDEN_GATE_TIME, cfg)
    bwd = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, -GOLDEN_GATE_TIME, cfg)
    assert fwd.final_time == GOLDEN_GATE_TIME and bwd.final_time == -GOLDEN_GATE_TIME
    assert abs(fwd.populations()[-1, 3] - GOLDEN_PEAK) <= 1e-6
    assert abs(bwd.populations()[-1, 3] - GOLDEN_PEAK) <= 1e-6


@pytest.mark.parametrize("method", list(Method))
@pytest.mark.parametrize("t_end", [400.0, -400.0])
def test_matches_closed_form(method, t_end):
    cfg = IntegratorConfig(method=method, dt=0.01, rel_tol=1e-11, abs_tol=1e-13)
    start = TwoQubitState(0.5, 0.5, 0.5, 0.5)
    traj = evolve(DEFAULT_PARAMS, start, 0.0, t_end, cfg)
    exact = exact_samples(DEFAULT_PARAMS, start, traj.times)
    assert np.max(np.abs(traj.amplitudes - exact)) <= 1e-8


def test_adaptive_meets_requested_tolerance():
    ref = evolve_exact(DEFAULT_PARAMS, cnot_initial(), 0.0, 100.0)
    for rel_tol in (1e-8, 1e-10):
        cfg = IntegratorConfig(method=ADAPTIVE, rel_tol=rel_tol, abs_tol=rel_tol * 1e-2)
        final = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, 100.0, cfg).final_state
        assert final.distance(ref) <= 10 * rel_tol


def test_norm_conserved_both_directions():
    cfg = IntegratorConfig(dt=0.01, sample_stride=50)
    for t_end in (1000.0, -1000.0):
        traj = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, t_end, cfg)
        assert traj.max_norm_error <= 1e-8
        assert np.max(np.abs(traj.norm2() - 1)) <= traj.max_norm_error


def test_roundtrip_examples():
    undriven = DEFAULT_PARAMS.with_(omega=0.0)
    assert roundtrip_residual(undriven, TwoQubitState.basis("10"), 50.0) <= 1e-12
    assert roundtrip_residual(DEFAULT_PARAMS, cnot_initial(), 2000.0) <= 1e-8
    assert roundtrip_residual(DEFAULT_PARAMS, TwoQubitState(0.5, 0.5, 0.5, 0.5), 500.0) <= 1e-8


def test_convergence_order_rk4():
    order = convergence_order(DEFAULT_PARAMS, cnot_initial(), 100.0, [0.1, 0.05, 0.025])
    assert 3.7 <= order <= 4.3


def test_convergence_order_rejects_bad_sequences():
    with pytest.raises(UsageError):
        convergence_order(DEFAULT_PARAMS, cnot_initial(), 10.0, [0.1, 0.05])
    with pytest.raises(UsageError):
        convergence_order(DEFAULT_PARAMS, cnot_initial(), 10.0, [0.1, 0.2, 0.05])


def test_convergence_order_inconclusive_at_rounding_floor():
    null = SystemParameters(w1=0, w2=0, j=0, omega=0, phi1=0, phi2=0)
    with pytest.raises(InconclusiveError):
        convergence_order(null, cnot_initial(), 100.0, [0.1, 0.05, 0.025])


def test_determinism():
    cfg = IntegratorConfig(dt=0.01)
    a = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, -123.4, cfg)
    b = evolve(DEFAULT_PARAMS, cnot_initial(), 0.0, -123.4, cfg)
    assert a.times.tobytes() == b.times.tobytes()
    assert a.amplitudes.tobytes() == b.amplitudes.tobytes()


params_st = st.builds(
    SystemParameters,
    w1=st.floats(-1, 1), w2=st.floats(-1, 1), j=st.floats(-0.01, 0.01),
    omega=st.floats(0, 0.05), phi1=st.floats(-4, 4), phi2=st.floats(-4, 4))


@settings(max_examples=25, deadline=None)
@given(p=params_st, k=st.integers(0, 3))
def test_population_mirror_symmetry(p, k):
    cfg = IntegratorConfig(dt=0.01)
    start = TwoQubitState.basis(k)
    fwd = evolve(p, start, 0.0, 200.0, cfg)
    bwd = evolve(p, start, 0.0, -200.0, cfg)
    np.testing.assert_array_equal(fwd.times, -bwd.times)
    assert np.max(np.abs(fwd.populations() - bwd.populations())) <= 1e-6
