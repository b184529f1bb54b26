import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chronoq import (DEFAULT_PARAMS, SystemParameters, TwoQubitState, UsageError, drive_phase,
                     hamiltonian, rhs)

finite = st.floats(-5, 5, allow_nan=False)
params_st = st.builds(
    SystemParameters,
    w1=finite, w2=finite, j=st.floats(-0.1, 0.1),
    omega=st.floats(0, 1), phi1=st.floats(-7, 7), phi2=st.floats(-7, 7))
times = st.floats(-1e4, 1e4, allow_nan=False)
amp = st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False)


def literal_matrix(p, t):
    """Independent transcription of the amplitude equations, entry by entry."""
    th1 = p.w1 * t + p.phi1
    th2 = p.w2 * t + p.phi2
    h = p.omega / 2
    return np.array([
        [-(p.w1 + p.w2) - p.j, h * cmath.exp(-1j * th2), h * cmath.exp(-1j * th1), 0],
        [h * cmath.exp(1j * th2), -(p.w1 - p.w2) + p.j, 0, h * cmath.exp(-1j * th1)],
        [h * cmath.exp(1j * th1), 0, -(-p.w1 + p.w2) + p.j, h * cmath.exp(-1j * th2)],
        [0, h * cmath.exp(1j * th1), h * cmath.exp(1j * th2), -(-p.w1 - p.w2) - p.j],
    ])


def test_defaults():
    p = DEFAULT_PARAMS
    assert (p.w1, p.w2, p.j, p.omega) == (0.2, 0.0015, 0.0015, 0.01)
    assert p.phi1 == math.pi / 2
    assert p.phi2 == math.pi / 4


@pytest.mark.parametrize("field,value", [("omega", -0.1), ("w1", math.nan), ("j", math.inf)])
def test_parameter_validation(field, value):
    with pytest.raises(UsageError):
        DEFAULT_PARAMS.with_(**{field: value})


def test_negative_coupling_allowed():
    assert DEFAULT_PARAMS.with_(j=-0.0015).j == -0.0015


def test_drive_phase_at_zero():
    assert drive_phase(DEFAULT_PARAMS, 1, 0.0) == math.pi / 2
    assert drive_phase(DEFAULT_PARAMS, 2, 0.0) == math.pi / 4


@given(t=times)
def test_drive_phase_zero_frequency_and_offset(t):
    p = SystemParameters(w1=0, w2=0, phi1=0, phi2=0)
    assert drive_phase(p, 1, t) == 0
    assert drive_phase(p, 2, t) == 0


def test_drive_phase_bad_index():
    with pytest.raises(UsageError):
        drive_phase(DEFAULT_PARAMS, 3, 0.0)


def test_hamiltonian_hand_values():
    m = hamiltonian(DEFAULT_PARAMS, 0.0)
    np.testing.assert_allclose(np.diag(m).real, [-0.203, -0.197, 0.2, 0.2], rtol=0, atol=1e-15)
    assert abs(m[0, 2] - (-0.005j)) <= 1e-15
    assert m[0, 3] == 0 and m[1, 2] == 0


def test_hamiltonian_is_read_only():
    m = hamiltonian(DEFAULT_PARAMS, 1.0)
    with pytest.raises(ValueError):
        m[0, 0] = 1


@settings(max_examples=200)
@given(p=params_st, t=times)
def test_hamiltonian_structure(p, t):
    m = hamiltonian(p, t)
    assert np.array_equal(m, m.conj().T)
    assert np.all(np.diag(m).imag == 0)
    assert m[0, 3] == 0 and m[3, 0] == 0 and m[1, 2] == 0 and m[2, 1] == 0
    assert abs(np.trace(m)) <= 1e-14 * (1 + abs(p.w1) + abs(p.w2))
    np.testing.assert_allclose(m, literal_matrix(p, t), rtol=0, atol=1e-12)


def test_rhs_diagonal_case():
    p = DEFAULT_PARAMS.with_(omega=0.0)
    e2 = -(-p.w1 + p.w2) + p.j
    d = rhs(p, 17.3, TwoQubitState.basis("10"))
    np.testing.assert_allclose(d.as_array(), [0, 0, -1j * e2, 0], atol=1e-17)


def test_rhs_zero_state():
    assert rhs(DEFAULT_PARAMS, 3.0, TwoQubitState()).as_array().tolist() == [0, 0, 0, 0]


def test_rhs_coupling_into_target():
    d = rhs(DEFAULT_PARAMS, 0.0, TwoQubitState.basis("10"))
    assert abs(d.c3 - (-1j * 0.005 * cmath.exp(1j * math.pi / 4))) <= 1e-17


@settings(max_examples=100)
@given(p=params_st, t=times, x=st.lists(amp, min_size=4, max_size=4),
       y=st.lists(amp, min_size=4, max_size=4), a=amp, b=amp)
def test_rhs_is_linear(p, t, x, y, a, b):
    x, y = np.array(x), np.array(y)
    lhs = rhs(p, t, a * x + b * y)
    rhs_ = a * rhs(p, t, x) + b * rhs(p, t, y)
    scale = 1 + np.max(np.abs(hamiltonian(p, t))) * (abs(a) + abs(b)) * 2
    np.testing.assert_allclose(lhs, rhs_, rtol=0, atol=1e-13 * scale)


@settings(max_examples=100)
@given(p=params_st, t=times, x=st.lists(amp, min_size=4, max_size=4))
def test_norm_is_stationary(p, t, x):
    c = np.array(x)
    rate = np.vdot(c, rhs(p, t, c)).real
    assert abs(rate) <= 1e-13 * (1 + np.sum(np.abs(c) ** 2)) * (1 + abs(p.w1) + abs(p.w2))


def test_state_helpers():
    s = TwoQubitState(0.6, 0.8j, 0, 0)
    np.testing.assert_allclose(s.populations(), [0.36, 0.64, 0, 0])
    assert s.norm2() == pytest.approx(1.0, abs=1e-15)
    assert TwoQubitState.basis("|11>") == TwoQubitState(0, 0, 0, 1)
    with pytest.raises(UsageError):
        TwoQubitState.basis("12")
