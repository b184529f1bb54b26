"""Compiled inner loops.

Everything here works on a flat float64 parameter vector
``p = (w1, w2, j, omega, phi1, phi2)`` and complex128 amplitude vectors of
length 4, so the loops stay inside numba without object boxing.

The Runge-Kutta steppers and the slice propagator share only
``fill_hamiltonian``; no stepping code is common to both.
"""

import numpy as np
from numba import njit

OK = 0
NONFINITE = 1
UNDERFLOW = 2
NO_CONVERGENCE = 3

JACOBI_MAX_SWEEPS = 100


@njit(cache=True, nogil=True)
def fill_hamiltonian(p, t, out):
    w1, w2, j, omega, phi1, phi2 = p[0], p[1], p[2], p[3], p[4], p[5]
    theta1 = w1 * t + phi1
    theta2 = w2 * t + phi2
    half = 0.5 * omega
    a1 = half * complex(np.cos(theta1), -np.sin(theta1))
    a2 = half * complex(np.cos(theta2), -np.sin(theta2))

    out[0, 0] = -(w1 + w2) - j
    out[1, 1] = -(w1 - w2) + j
    out[2, 2] = -(-w1 + w2) + j
    out[3, 3] = -(-w1 - w2) - j

    out[0, 1] = a2
    out[0, 2] = a1
    out[0, 3] = 0.0
    out[1, 2] = 0.0
    out[1, 3] = a1
    out[2, 3] = a2
    for r in range(4):
        for c in range(r):
            out[r, c] = out[c, r].conjugate()


@njit(cache=True, nogil=True)
def _deriv(p, t, c, h, out):
    fill_hamiltonian(p, t, h)
    for r in range(4):
        acc = 0j
        for k in range(4):
            acc += h[r, k] * c[k]
        out[r] = -1j * acc


@njit(cache=True, nogil=True)
def _norm_error(c):
    s = 0.0
    for k in range(4):
        s += c[k].real * c[k].real + c[k].imag * c[k].imag
    return abs(s - 1.0)


@njit(cache=True, nogil=True)
def _all_finite(c):
    for k in range(4):
        if not (np.isfinite(c[k].real) and np.isfinite(c[k].imag)):
            return False
    return True


@njit(cache=True, nogil=True)
def fixed_step_count(span, dt):
    n = int(np.ceil(span / dt * (1.0 - 1e-12)))
    return max(n, 1)


@njit(cache=True, nogil=True)
def rk4_fixed(p, c0, t0, t1, dt, stride):
    """Classical RK4 from t0 to t1 (either direction), landing exactly on t1.

    Returns (times, amplitudes, max_norm_error, status). ``max_norm_error``
    is taken over every step, not only recorded samples.
    """
    span = abs(t1 - t0)
    h = dt if t1 > t0 else -dt
    n = fixed_step_count(span, dt)
    n_samples = n // stride + 1
    if n % stride != 0:
        n_samples += 1

    times = np.empty(n_samples)
    amps = np.empty((n_samples, 4), dtype=np.complex128)
    ham = np.empty((4, 4), dtype=np.complex128)
    k1 = np.empty(4, dtype=np.complex128)
    k2 = np.empty(4, dtype=np.complex128)
    k3 = np.empty(4, dtype=np.complex128)
    k4 = np.empty(4, dtype=np.complex128)
    tmp = np.empty(4, dtype=np.complex128)
    c = c0.copy()

    times[0] = t0
    amps[0] = c
    rec = 1
    max_err = _norm_error(c)
    t = t0
    for step in range(1, n + 1):
        if step == n:
            t_next = t1
        else:
            t_next = t0 + step * h
        hh = t_next - t
        _deriv(p, t, c, ham, k1)
        for r in range(4):
            tmp[r] = c[r] + 0.5 * hh * k1[r]
        _deriv(p, t + 0.5 * hh, tmp, ham, k2)
        for r in range(4):
            tmp[r] = c[r] + 0.5 * hh * k2[r]
        _deriv(p, t + 0.5 * hh, tmp, ham, k3)
        for r in range(4):
            tmp[r] = c[r] + hh * k3[r]
        _deriv(p, t_next, tmp, ham, k4)
        for r in range(4):
            c[r] = c[r] + hh / 6.0 * (k1[r] + 2.0 * k2[r] + 2.0 * k3[r] + k4[r])
        t = t_next

        if not _all_finite(c):
            return times[:rec], amps[:rec], max_err, NONFINITE
        err = _norm_error(c)
        if err > max_err:
            max_err = err
        if step % stride == 0 or step == n:
            times[rec] = t
            amps[rec] = c
            rec += 1
    return times[:rec], amps[:rec], max_err, OK


# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0
_A21 = 1.0 / 5.0
_A31, _A32 = 3.0 / 40.0, 9.0 / 40.0
_A41, _A42, _A43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
_A51, _A52, _A53, _A54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
_A61, _A62, _A63, _A64, _A65 = (
    9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0)
_B1, _B3, _B4, _B5, _B6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
# fifth-order weights minus embedded fourth-order weights
_E1, _E3, _E4, _E5, _E6, _E7 = (
    71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0, -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)


@njit(cache=True, nogil=True)
def dopri45(p, c0, t0, t1, dt0, rtol, atol, stride):
    """Adaptive Dormand-Prince 5(4) with FSAL, signed steps, exact landing on t1."""
    direction = 1.0 if t1 > t0 else -1.0
    span = abs(t1 - t0)
    floor = 1e-14 * span

    cap = 1024
    times = np.empty(cap)
    amps = np.empty((cap, 4), dtype=np.complex128)
    ham = np.empty((4, 4), dtype=np.complex128)
    k1 = np.empty(4, dtype=np.complex128)
    k2 = np.empty(4, dtype=np.complex128)
    k3 = np.empty(4, dtype=np.complex128)
    k4 = np.empty(4, dtype=np.complex128)
    k5 = np.empty(4, dtype=np.complex128)
    k6 = np.empty(4, dtype=np.complex128)
    k7 = np.empty(4, dtype=np.complex128)
    tmp = np.empty(4, dtype=np.complex128)
    y_new = np.empty(4, dtype=np.complex128)
    c = c0.copy()

    times[0] = t0
    amps[0] = c
    rec = 1
    max_err = _norm_error(c)
    t = t0
    h = min(dt0, span)
    accepted = 0
    _deriv(p, t, c, ham, k1)
    while True:
        remaining = abs(t1 - t)
        last = h >= remaining * (1.0 - 1e-12)
        if last:
            h = remaining
        hh = direction * h

        for r in range(4):
            tmp[r] = c[r] + hh * _A21 * k1[r]
        _deriv(p, t + _C2 * hh, tmp, ham, k2)
        for r in range(4):
            tmp[r] = c[r] + hh * (_A31 * k1[r] + _A32 * k2[r])
        _deriv(p, t + _C3 * hh, tmp, ham, k3)
        for r in range(4):
            tmp[r] = c[r] + hh * (_A41 * k1[r] + _A42 * k2[r] + _A43 * k3[r])
        _deriv(p, t + _C4 * hh, tmp, ham, k4)
        for r in range(4):
            tmp[r] = c[r] + hh * (_A51 * k1[r] + _A52 * k2[r] + _A53 * k3[r] + _A54 * k4[r])
        _deriv(p, t + _C5 * hh, tmp, ham, k5)
        for r in range(4):
            tmp[r] = c[r] + hh * (_A61 * k1[r] + _A62 * k2[r] + _A63 * k3[r]
                                  + _A64 * k4[r] + _A65 * k5[r])
        t_next = t1 if last else t + hh
        _deriv(p, t_next, tmp, ham, k6)
        for r in range(4):
            y_new[r] = c[r] + hh * (_B1 * k1[r] + _B3 * k3[r] + _B4 * k4[r]
                                    + _B5 * k5[r] + _B6 * k6[r])
        _deriv(p, t_next, y_new, ham, k7)

        err = 0.0
        for r in range(4):
            e = hh * (_E1 * k1[r] + _E3 * k3[r] + _E4 * k4[r] + _E5 * k5[r]
                      + _E6 * k6[r] + _E7 * k7[r])
            scale = atol + rtol * max(abs(c[r]), abs(y_new[r]))
            ratio = abs(e) / scale
            if ratio > err:
                err = ratio
        if not np.isfinite(err):
            return times[:rec], amps[:rec], max_err, NONFINITE

        if err <= 1.0:
            t = t_next
            for r in range(4):
                c[r] = y_new[r]
                k1[r] = k7[r]
            if not _all_finite(c):
                return times[:rec], amps[:rec], max_err, NONFINITE
            ne = _norm_error(c)
            if ne > max_err:
                max_err = ne
            accepted += 1
            if accepted % stride == 0 or last:
                if rec == cap:
                    cap *= 2
                    nt = np.empty(cap)
                    na = np.empty((cap, 4), dtype=np.complex128)
                    nt[:rec] = times[:rec]
                    na[:rec] = amps[:rec]
                    times = nt
                    amps = na
                times[rec] = t
                amps[rec] = c
                rec += 1
            if last:
                break
            factor = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
        else:
            factor = max(0.2, 0.9 * err ** -0.2)
        h = h * factor
        if h < floor:
            return times[:rec], amps[:rec], max_err, UNDERFLOW
    return times[:rec], amps[:rec], max_err, OK


@njit(cache=True, nogil=True)
def jacobi_inplace(a, v, w):
    """Cyclic Jacobi eigendecomposition of a complex Hermitian matrix.

    Only the upper triangle of ``a`` is read and it is destroyed. Eigenvectors
    go into the columns of ``v`` and eigenvalues into ``w``. Each rotation
    strips the pivot's phase with a diagonal unitary and then applies a real
    symmetric Schur rotation. Returns the sweep count, or -1 if the
    off-diagonal mass is still above tolerance after ``JACOBI_MAX_SWEEPS``.
    """
    n = a.shape[0]
    total = 0.0
    for r in range(n):
        for k in range(n):
            v[r, k] = 0.0
        v[r, r] = 1.0
        w[r] = a[r, r].real
        total += w[r] * w[r]
        for c in range(r + 1, n):
            x = a[r, c]
            total += 2.0 * (x.real * x.real + x.imag * x.imag)
    tol = 1e-30 * total

    sweeps = 0
    while True:
        off = 0.0
        for r in range(n):
            for c in range(r + 1, n):
                x = a[r, c]
                off += x.real * x.real + x.imag * x.imag
        if off <= tol:
            break
        if sweeps == JACOBI_MAX_SWEEPS:
            return -1
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                m2 = apq.real * apq.real + apq.imag * apq.imag
                if m2 == 0.0:
                    continue
                mag = np.sqrt(m2)
                phc = complex(apq.real / mag, -apq.imag / mag)
                tau = (w[q] - w[p]) / (2.0 * mag)
                if tau >= 0.0:
                    tt = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    tt = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                cs = 1.0 / np.sqrt(1.0 + tt * tt)
                sn = tt * cs
                # W = I except W[p,p]=cs, W[p,q]=sn, W[q,p]=-sn e^{-i phi}, W[q,q]=cs e^{-i phi}
                wqp = -sn * phc
                wqq = cs * phc
                w[p] -= tt * mag
                w[q] += tt * mag
                a[p, q] = 0.0
                for r in range(n):
                    if r == p or r == q:
                        continue
                    arp = a[p, r].conjugate() if r > p else a[r, p]
                    arq = a[q, r].conjugate() if r > q else a[r, q]
                    nrp = arp * cs + arq * wqp
                    nrq = arp * sn + arq * wqq
                    if r < p:
                        a[r, p] = nrp
                    else:
                        a[p, r] = nrp.conjugate()
                    if r < q:
                        a[r, q] = nrq
                    else:
                        a[q, r] = nrq.conjugate()
                for r in range(n):
                    vrp = v[r, p]
                    vrq = v[r, q]
                    v[r, p] = vrp * cs + vrq * wqp
                    v[r, q] = vrp * sn + vrq * wqq
    return sweeps


@njit(cache=True, nogil=True)
def jacobi_eigh(a_in):
    n = a_in.shape[0]
    a = a_in.copy()
    v = np.empty((n, n), dtype=np.complex128)
    w = np.empty(n)
    sweeps = jacobi_inplace(a, v, w)
    return w, v, sweeps


@njit(cache=True, nogil=True)
def _phase_minus_one(x):
    # exp(-i x) - 1 without cancellation
    s = np.sin(0.5 * x)
    return complex(-2.0 * s * s, -np.sin(x))


@njit(cache=True, nogil=True)
def slice_unitary(p, t_mid, delta):
    """exp(-i M(t_mid) delta) assembled as I + V (exp(-i w delta) - 1) V^H."""
    a = np.empty((4, 4), dtype=np.complex128)
    v = np.empty((4, 4), dtype=np.complex128)
    w = np.empty(4)
    fill_hamiltonian(p, t_mid, a)
    sweeps = jacobi_inplace(a, v, w)
    u = np.zeros((4, 4), dtype=np.complex128)
    for k in range(4):
        f = _phase_minus_one(w[k] * delta)
        for r in range(4):
            vr = v[r, k] * f
            for c in range(4):
                u[r, c] += vr * v[c, k].conjugate()
    for i in range(4):
        u[i, i] += 1.0
    return u, sweeps


@njit(cache=True, nogil=True)
def propagate(p, c0, t0, t1, n_slices, stride):
    """Midpoint piecewise-constant propagation with ``n_slices`` equal slices.

    Each slice adds V (exp(-i w delta) - 1) V^H c to c rather than forming
    the slice unitary, so rounding scales with the (small) increment and the
    norm does not drift systematically. Returns (times, amplitudes,
    max_norm_error, status) with a sample every ``stride`` slices plus the
    endpoint.
    """
    delta = (t1 - t0) / n_slices
    n_samples = n_slices // stride + 1
    if n_slices % stride != 0:
        n_samples += 1
    times = np.empty(n_samples)
    amps = np.empty((n_samples, 4), dtype=np.complex128)
    a = np.empty((4, 4), dtype=np.complex128)
    v = np.empty((4, 4), dtype=np.complex128)
    w = np.empty(4)
    y = np.empty(4, dtype=np.complex128)
    c = c0.copy()
    times[0] = t0
    amps[0] = c
    rec = 1
    max_err = _norm_error(c)
    for k in range(n_slices):
        fill_hamiltonian(p, t0 + (k + 0.5) * delta, a)
        if jacobi_inplace(a, v, w) < 0:
            return times[:rec], amps[:rec], max_err, NO_CONVERGENCE
        for m in range(4):
            acc = 0j
            for r in range(4):
                acc += v[r, m].conjugate() * c[r]
            y[m] = acc * _phase_minus_one(w[m] * delta)
        for r in range(4):
            acc = 0j
            for m in range(4):
                acc += v[r, m] * y[m]
            c[r] += acc
        if not _all_finite(c):
            return times[:rec], amps[:rec], max_err, NONFINITE
        ne = _norm_error(c)
        if ne > max_err:
            max_err = ne
        step = k + 1
        if step % stride == 0 or step == n_slices:
            times[rec] = t1 if step == n_slices else t0 + step * delta
            amps[rec] = c
            rec += 1
    return times[:rec], amps[:rec], max_err, OK
