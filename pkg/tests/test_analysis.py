import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronoq import (DEFAULT_PARAMS, GateNotFoundError, IntegratorConfig, TwoQubitState,
                     UsageError, basis_sweep, cnot_initial, cnot_probe, find_gate_time,
                     populations)
from chronoq.analysis import scan_first_peak

from conftest import random_params
from golden import GOLDEN_GATE_TIME, GOLDEN_PEAK

SAMPLE_INTERVAL = 0.01


def test_populations_examples():
    np.testing.assert_array_equal(populations(TwoQubitState.basis("10")), [0, 0, 1, 0])
    np.testing.assert_allclose(populations(TwoQubitState(0.5, 0.5, 0.5, 0.5)), [0.25] * 4)
    np.testing.assert_allclose(populations(TwoQubitState(0.6, 0.8j, 0, 0)), [0.36, 0.64, 0, 0])


def test_cnot_initial():
    s = cnot_initial()
    assert s.as_array().tolist() == [0, 0, 1, 0]
    assert s.norm2() == 1


def test_gate_time_defaults():
    found = find_gate_time(DEFAULT_PARAMS, horizon=600.0, threshold=0.95)
    assert found is not None
    T, peak = found
    assert abs(T - GOLDEN_GATE_TIME) <= SAMPLE_INTERVAL
    assert abs(peak - GOLDEN_PEAK) <= 1e-6


def test_unit_population_is_not_reached():
    # first maximum sits near 0.978, so the 0.99 criterion never triggers
    assert find_gate_time(DEFAULT_PARAMS, horizon=600.0, threshold=0.99) is None
    assert find_gate_time(DEFAULT_PARAMS, horizon=600.0, threshold=1.0) is None


def test_gate_absent_before_half_period():
    assert find_gate_time(DEFAULT_PARAMS, horizon=GOLDEN_GATE_TIME / 2, threshold=0.95) is None


def test_gate_absent_without_drive():
    assert find_gate_time(DEFAULT_PARAMS.with_(omega=0.0), horizon=300.0, threshold=0.9) is None


def test_probe_defaults():
    r = cnot_probe(DEFAULT_PARAMS, horizon=600.0, threshold=0.95)
    assert abs(r.gate_time - GOLDEN_GATE_TIME) <= SAMPLE_INTERVAL
    assert abs(r.peak_population_forward - GOLDEN_PEAK) <= 1e-6
    assert abs(r.peak_population_forward - r.peak_population_backward) <= 1e-6
    assert r.mirror_residual <= 1e-6
    assert r.max_norm_error <= 1e-8
    total_f = r.peak_population_forward + sum(r.residual_populations_forward)
    total_b = r.peak_population_backward + sum(r.residual_populations_backward)
    assert abs(total_f - 1) <= r.max_norm_error + 1e-15
    assert abs(total_b - 1) <= r.max_norm_error + 1e-15


def test_probe_without_drive_reports_best_peak():
    with pytest.raises(GateNotFoundError) as info:
        cnot_probe(DEFAULT_PARAMS.with_(omega=0.0), horizon=100.0)
    assert info.value.best_peak == 0.0


def test_probe_argument_checks():
    with pytest.raises(UsageError):
        cnot_probe(DEFAULT_PARAMS, horizon=-1.0)
    with pytest.raises(UsageError):
        cnot_probe(DEFAULT_PARAMS, threshold=1.5)


def test_probe_mirror_for_random_parameters(rng):
    for _ in range(5):
        p = random_params(rng)
        try:
            r = cnot_probe(p, horizon=300.0, threshold=1e-3)
        except GateNotFoundError:
            continue
        assert r.mirror_residual <= 1e-6


def test_basis_sweep_undriven_is_identity():
    rows = basis_sweep(DEFAULT_PARAMS.with_(omega=0.0), 50.0)
    for k, row in enumerate(rows):
        expected = np.eye(4)[k]
        np.testing.assert_allclose(row.forward_populations, expected, atol=1e-12)
        np.testing.assert_allclose(row.backward_populations, expected, atol=1e-12)


def test_basis_sweep_defaults():
    rows = {row.initial: row for row in basis_sweep(DEFAULT_PARAMS, GOLDEN_GATE_TIME)}
    assert rows["10"].dominant_forward == "11"
    assert rows["10"].forward_populations[3] == pytest.approx(GOLDEN_PEAK, abs=1e-6)
    for row in rows.values():
        assert row.mirror_residual <= 1e-6
        assert row.max_norm_error <= 1e-8


def test_basis_sweep_random_mirror(rng):
    for _ in range(3):
        for row in basis_sweep(random_params(rng), 150.0):
            assert row.mirror_residual <= 1e-6


sequences = st.lists(st.floats(0, 1), min_size=3, max_size=60)


@given(values=sequences, lo=st.floats(0.01, 1), hi=st.floats(0.01, 1))
def test_threshold_monotone(values, lo, hi):
    lo, hi = min(lo, hi), max(lo, hi)
    times = np.arange(len(values)) * 0.5
    a = scan_first_peak(times, values, lo)
    b = scan_first_peak(times, values, hi)
    if b.found:
        assert a.found and a.time <= b.time + 0.5


@given(values=sequences, threshold=st.floats(0.01, 1))
def test_refinement_stays_within_one_sample(values, threshold):
    times = np.cumsum(np.r_[0.0, np.full(len(values) - 1, 0.25)])
    scan = scan_first_peak(times, values, threshold)
    if scan.found:
        nearest = np.abs(times - scan.time).min()
        assert nearest <= 0.25
        assert scan.peak >= max(v for v, t in zip(values, times) if abs(t - scan.time) <= 0.25) - 1e-12


def test_refinement_recovers_parabola_vertex():
    times = np.linspace(0, 10, 41)
    values = 0.9 - 0.01 * (times - 4.13) ** 2
    scan = scan_first_peak(times, values, 0.5)
    assert scan.time == pytest.approx(4.13, abs=1e-12)
    assert scan.peak == pytest.approx(0.9, abs=1e-12)
