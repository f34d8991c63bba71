# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled Dormand-Prince 5(4) kernel for the 9-level two-atom system.

Mirrors ``_rk_py.propagate_adaptive`` step for step; the parameter vector
layout is documented there.  Only the adaptive path is compiled: it is the
one that dominates Monte Carlo sweeps.
"""

from libc.math cimport exp, fabs, sqrt, pow

import numpy as np

DEF DIM = 9

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_TOO_MANY_STEPS = 2

cdef long MAX_STEPS = 20000000

# Dormand-Prince tableau
cdef double C2 = 0.2, C3 = 0.3, C4 = 0.8, C5 = 8.0 / 9.0
cdef double A21 = 0.2
cdef double A31 = 3.0 / 40.0, A32 = 9.0 / 40.0
cdef double A41 = 44.0 / 45.0, A42 = -56.0 / 15.0, A43 = 32.0 / 9.0
cdef double A51 = 19372.0 / 6561.0, A52 = -25360.0 / 2187.0
cdef double A53 = 64448.0 / 6561.0, A54 = -212.0 / 729.0
cdef double A61 = 9017.0 / 3168.0, A62 = -355.0 / 33.0, A63 = 46732.0 / 5247.0
cdef double A64 = 49.0 / 176.0, A65 = -5103.0 / 18656.0
cdef double B1 = 35.0 / 384.0, B3 = 500.0 / 1113.0, B4 = 125.0 / 192.0
cdef double B5 = -2187.0 / 6784.0, B6 = 11.0 / 84.0
cdef double E1 = 71.0 / 57600.0, E3 = -71.0 / 16695.0, E4 = 71.0 / 1920.0
cdef double E5 = -17253.0 / 339200.0, E6 = 22.0 / 525.0, E7 = -1.0 / 40.0


cdef inline void _envelope(const double* p, double t, double* omega, double* delta) nogil:
    cdef double u, mag
    if t < p[1]:
        u = (t - p[1]) / p[4]
        omega[0] = p[5] + (p[6] - p[5]) * exp(-0.5 * u * u)
        mag = p[8] - (p[8] - p[7]) * (t - p[0]) / (p[1] - p[0])
    elif t <= p[2]:
        omega[0] = p[6]
        mag = p[7]
    else:
        u = (t - p[2]) / p[4]
        omega[0] = p[5] + (p[6] - p[5]) * exp(-0.5 * u * u)
        mag = p[7] + (p[8] - p[7]) * (t - p[2]) / (p[3] - p[2])
    delta[0] = p[9] * mag


cdef inline void _rhs(const double* p, double t, const double complex* y,
                      double complex* out, double* pr, double* prr) nogil:
    cdef double omega, delta, oa, da, ob, db, v_dd, hg
    cdef double complex da_c, db_c, dab_c
    cdef double m2, psum
    cdef int i
    _envelope(p, t, &omega, &delta)
    oa = 0.5 * p[10] * omega
    da = delta + p[11]
    ob = 0.5 * p[12] * omega
    db = delta + p[13]
    v_dd = p[14]
    hg = 0.5 * p[15]

    da_c = -da - 0.5j * p[15]
    db_c = -db - 0.5j * p[15]
    dab_c = -da - db + v_dd - 1j * p[15]

    out[0] = 0
    out[1] = ob * y[2]
    out[2] = db_c * y[2] + ob * y[1]
    out[3] = oa * y[6]
    out[4] = oa * y[7] + ob * y[5]
    out[5] = db_c * y[5] + ob * y[4] + oa * y[8]
    out[6] = da_c * y[6] + oa * y[3]
    out[7] = da_c * y[7] + oa * y[4] + ob * y[8]
    out[8] = dab_c * y[8] + oa * y[5] + ob * y[7]
    for i in range(DIM):
        out[i] = out[i] * (-1j)

    psum = 0.0
    m2 = y[2].real * y[2].real + y[2].imag * y[2].imag
    psum += m2
    m2 = y[5].real * y[5].real + y[5].imag * y[5].imag
    psum += m2
    m2 = y[6].real * y[6].real + y[6].imag * y[6].imag
    psum += m2
    m2 = y[7].real * y[7].real + y[7].imag * y[7].imag
    psum += m2
    pr[0] = psum
    prr[0] = y[8].real * y[8].real + y[8].imag * y[8].imag


def propagate_adaptive(double[:] params, double complex[:] y0, double rtol,
                       double atol, double max_step, double[:] event_times,
                       signed char[:] event_record,
                       double complex[:, :] out_samples):
    """Compiled twin of ``_rk_py.propagate_adaptive`` (same contract)."""
    cdef double complex y[DIM]
    cdef double complex y5[DIM]
    cdef double complex ytmp[DIM]
    cdef double complex k[7][DIM]
    cdef double complex errv
    cdef double qd[7][2]
    cdef double p[16]
    cdef double t, t_end, duration, h, tiny, target
    cdef double q_r = 0.0, q_rr = 0.0
    cdef double err_norm, sc, aerr, m_y, m_y5, factor, dq0, dq1
    cdef long n_steps = 0, n_rejected = 0
    cdef int i, ei, n_events, row = 0, status = 0
    cdef int done

    for i in range(16):
        p[i] = params[i]
    for i in range(DIM):
        y[i] = y0[i]

    t = p[0]
    t_end = p[3]
    duration = t_end - t
    n_events = event_times.shape[0]

    _rhs(p, t, y, k[0], &qd[0][0], &qd[0][1])
    h = duration * 1e-3
    if h > max_step:
        h = max_step
    tiny = 2.3e-16 * max(fabs(t_end), duration)

    for ei in range(n_events):
        target = event_times[ei]
        while t < target - tiny:
            if n_steps + n_rejected > MAX_STEPS:
                return _result(y, q_r, q_rr, n_steps, n_rejected, STATUS_TOO_MANY_STEPS, t)
            if h > max_step:
                h = max_step
            if h > target - t:
                h = target - t
            if h < 16.0 * tiny:
                return _result(y, q_r, q_rr, n_steps, n_rejected, STATUS_UNDERFLOW, t)

            for i in range(DIM):
                ytmp[i] = y[i] + (h * A21) * k[0][i]
            _rhs(p, t + C2 * h, ytmp, k[1], &qd[1][0], &qd[1][1])
            for i in range(DIM):
                ytmp[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i])
            _rhs(p, t + C3 * h, ytmp, k[2], &qd[2][0], &qd[2][1])
            for i in range(DIM):
                ytmp[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i])
            _rhs(p, t + C4 * h, ytmp, k[3], &qd[3][0], &qd[3][1])
            for i in range(DIM):
                ytmp[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i]
                                      + A54 * k[3][i])
            _rhs(p, t + C5 * h, ytmp, k[4], &qd[4][0], &qd[4][1])
            for i in range(DIM):
                ytmp[i] = y[i] + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i]
                                      + A64 * k[3][i] + A65 * k[4][i])
            _rhs(p, t + h, ytmp, k[5], &qd[5][0], &qd[5][1])
            for i in range(DIM):
                y5[i] = y[i] + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i]
                                    + B5 * k[4][i] + B6 * k[5][i])
            _rhs(p, t + h, y5, k[6], &qd[6][0], &qd[6][1])

            err_norm = 0.0
            for i in range(DIM):
                errv = h * (E1 * k[0][i] + E3 * k[2][i] + E4 * k[3][i]
                            + E5 * k[4][i] + E6 * k[5][i] + E7 * k[6][i])
                aerr = sqrt(errv.real * errv.real + errv.imag * errv.imag)
                m_y = sqrt(y[i].real * y[i].real + y[i].imag * y[i].imag)
                m_y5 = sqrt(y5[i].real * y5[i].real + y5[i].imag * y5[i].imag)
                sc = atol + rtol * (m_y if m_y > m_y5 else m_y5)
                err_norm += (aerr / sc) * (aerr / sc)
            err_norm = sqrt(err_norm / DIM)

            if err_norm <= 1.0:
                t = t + h
                for i in range(DIM):
                    y[i] = y5[i]
                    k[0][i] = k[6][i]
                dq0 = B1 * qd[0][0] + B3 * qd[2][0] + B4 * qd[3][0] \
                    + B5 * qd[4][0] + B6 * qd[5][0]
                dq1 = B1 * qd[0][1] + B3 * qd[2][1] + B4 * qd[3][1] \
                    + B5 * qd[4][1] + B6 * qd[5][1]
                q_r += h * dq0
                q_rr += h * dq1
                qd[0][0] = qd[6][0]
                qd[0][1] = qd[6][1]
                n_steps += 1
                if err_norm == 0.0:
                    factor = 5.0
                else:
                    factor = 0.9 * pow(err_norm, -0.2)
                    if factor > 5.0:
                        factor = 5.0
                if factor < 0.2:
                    factor = 0.2
                h = h * factor
            else:
                n_rejected += 1
                factor = 0.9 * pow(err_norm, -0.2)
                if factor < 0.2:
                    factor = 0.2
                h = h * factor
        t = target
        _rhs(p, t, y, k[0], &qd[0][0], &qd[0][1])
        if event_record[ei]:
            for i in range(DIM):
                out_samples[row, i] = y[i]
            row += 1

    return _result(y, q_r, q_rr, n_steps, n_rejected, STATUS_OK, t)


cdef _result(double complex* y, double q_r, double q_rr, long n_steps,
             long n_rejected, int status, double t):
    out = np.empty(DIM, dtype=complex)
    cdef int i
    for i in range(DIM):
        out[i] = y[i]
    return out, q_r, q_rr, n_steps, n_rejected, status, t
