"""Pure-Python propagation kernels for the 9-level two-atom system.

Reference implementation of the adaptive embedded Runge-Kutta pair (Dormand-
Prince 5(4)) and of the piecewise-constant-exponential stepper.  The compiled
module ``_rk_cy`` mirrors ``propagate_adaptive`` exactly; this file is the
import-time fallback and the ground truth the extension is tested against.

Parameter vector layout (shared with the compiled kernel, see test suite):

    0..3   t1, t2, t3, t4      ramp breakpoints (s)
    4      t_w                 Gaussian edge width (s)
    5..6   omega_min, omega_max (rad/s)
    7..8   delta_min, delta_max magnitudes (rad/s)
    9      delta_sign          -1 blue start, +1 red start
    10,11  scale_omega_a, offset_delta_a   per-atom inhomogeneity
    12,13  scale_omega_b, offset_delta_b
    14     v_dd                (rad/s)
    15     gamma_r             (rad/s)

State vector: 9 complex amplitudes in the fixed two-atom basis order.  Two
real quadratures ride along on the same stage grid: integrated single-Rydberg
population and integrated |rr> population.
"""

import numpy as np

N_PARAMS = 16

# Dormand-Prince 5(4) tableau
_C = (0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0)
_A = (
    (0.2,),
    (3.0 / 40.0, 9.0 / 40.0),
    (44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0),
    (19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0),
    (9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0),
    (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0),
)
_B = (35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0)
_E = (
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
)

# index masks for the structured 9x9 matvec
_MASK_RA = np.array([0, 0, 0, 0, 0, 0, 1, 1, 1], dtype=float)  # atom a in |r>
_MASK_RB = np.array([0, 0, 1, 0, 0, 1, 0, 0, 1], dtype=float)  # atom b in |r>
_RYD_COUNT = _MASK_RA + _MASK_RB
_I1A = np.array([3, 4, 5])
_IRA = np.array([6, 7, 8])
_I1B = np.array([1, 4, 7])
_IRB = np.array([2, 5, 8])

_SINGLE_R = np.array([2, 5, 6, 7])

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_TOO_MANY_STEPS = 2

_MAX_STEPS = 20_000_000


def envelope_at(params, t):
    """Drive envelopes at time t: (omega, signed delta) before per-atom offsets."""
    t1, t2, t3, t4 = params[0], params[1], params[2], params[3]
    t_w, omin, omax = params[4], params[5], params[6]
    dmin, dmax, sign = params[7], params[8], params[9]
    if t < t2:
        u = (t - t2) / t_w
        omega = omin + (omax - omin) * np.exp(-0.5 * u * u)
        mag = dmax - (dmax - dmin) * (t - t1) / (t2 - t1)
    elif t <= t3:
        omega = omax
        mag = dmin
    else:
        u = (t - t3) / t_w
        omega = omin + (omax - omin) * np.exp(-0.5 * u * u)
        mag = dmin + (dmax - dmin) * (t - t3) / (t4 - t3)
    return omega, sign * mag


def _rhs(params, t, y, out):
    """out <- -i H(t) y; returns (P_r, P_rr) of y for the quadratures."""
    omega, delta = envelope_at(params, t)
    oa = 0.5 * params[10] * omega
    da = delta + params[11]
    ob = 0.5 * params[12] * omega
    db = delta + params[13]
    v_dd = params[14]
    gamma = params[15]

    hpsi = (-da * _MASK_RA - db * _MASK_RB - 0.5j * gamma * _RYD_COUNT) * y
    hpsi[8] += v_dd * y[8]
    hpsi[_I1A] += oa * y[_IRA]
    hpsi[_IRA] += oa * y[_I1A]
    hpsi[_I1B] += ob * y[_IRB]
    hpsi[_IRB] += ob * y[_I1B]
    out[:] = -1j * hpsi

    mod2 = y.real * y.real + y.imag * y.imag
    return mod2[_SINGLE_R].sum(), mod2[8]


def propagate_adaptive(
    params,
    y0,
    rtol,
    atol,
    max_step,
    event_times,
    event_record,
    out_samples,
):
    """Integrate from t1 to t4 with dense output at flagged event times.

    ``event_times`` must be strictly increasing, lie in ``(t1, t4]`` and end
    at ``t4``; the step size is capped so each event is hit exactly.  Rows of
    ``out_samples`` are filled for events with ``event_record`` set (the
    caller records the initial state itself).

    Returns ``(y_final, q_r, q_rr, n_steps, n_rejected, status, t_fail)``.
    """
    params = np.asarray(params, dtype=float)
    y = np.array(y0, dtype=complex)
    t = params[0]
    t_end = params[3]
    duration = t_end - t

    ks = [np.zeros(9, dtype=complex) for _ in range(7)]
    qdots = np.zeros((7, 2))
    ytmp = np.zeros(9, dtype=complex)
    y5 = np.zeros(9, dtype=complex)

    qdots[0] = _rhs(params, t, y, ks[0])
    q_r = 0.0
    q_rr = 0.0
    n_steps = 0
    n_rejected = 0
    h = min(max_step, duration * 1e-3)
    tiny = 2.3e-16 * max(abs(t_end), duration)

    row = 0
    for ei in range(len(event_times)):
        target = event_times[ei]
        while t < target - tiny:
            if n_steps + n_rejected > _MAX_STEPS:
                return y, q_r, q_rr, n_steps, n_rejected, STATUS_TOO_MANY_STEPS, t
            h = min(h, max_step, target - t)
            if h < 16.0 * tiny:
                return y, q_r, q_rr, n_steps, n_rejected, STATUS_UNDERFLOW, t

            for s in range(1, 7):
                ytmp[:] = y
                for j, a in enumerate(_A[s - 1]):
                    if a != 0.0:
                        ytmp += (h * a) * ks[j]
                qdots[s] = _rhs(params, t + _C[s - 1] * h, ytmp, ks[s])
            # ytmp now holds the 5th-order solution (last A row equals B)
            y5[:] = ytmp

            err = np.zeros(9, dtype=complex)
            for j, e in enumerate(_E):
                if e != 0.0:
                    err += (h * e) * ks[j]
            scale = atol + rtol * np.maximum(np.abs(y), np.abs(y5))
            err_norm = np.sqrt(np.mean((np.abs(err) / scale) ** 2))

            if err_norm <= 1.0:
                t = t + h
                y[:] = y5
                dq = np.zeros(2)
                for j, b in enumerate(_B):
                    if b != 0.0:
                        dq += (h * b) * qdots[j]
                q_r += dq[0]
                q_rr += dq[1]
                ks[0][:] = ks[6]
                qdots[0] = qdots[6]
                n_steps += 1
                factor = 5.0 if err_norm == 0.0 else min(5.0, 0.9 * err_norm ** -0.2)
                h = h * max(0.2, factor)
            else:
                n_rejected += 1
                h = h * max(0.2, 0.9 * err_norm ** -0.2)
        t = target
        # the RHS is evaluated piecewise; refresh the FSAL stage at breakpoints
        qdots[0] = _rhs(params, t, y, ks[0])
        if event_record[ei]:
            out_samples[row] = y
            row += 1

    return y, q_r, q_rr, n_steps, n_rejected, STATUS_OK, t


def hamiltonian_at(params, t):
    """Dense 9x9 Hamiltonian at time t (used by the exponential stepper)."""
    omega, delta = envelope_at(params, t)
    oa = 0.5 * params[10] * omega
    da = delta + params[11]
    ob = 0.5 * params[12] * omega
    db = delta + params[13]
    h = np.zeros((9, 9), dtype=complex)
    np.fill_diagonal(
        h, -da * _MASK_RA - db * _MASK_RB - 0.5j * params[15] * _RYD_COUNT
    )
    h[8, 8] += params[14]
    h[_I1A, _IRA] = oa
    h[_IRA, _I1A] = oa
    h[_I1B, _IRB] += ob
    h[_IRB, _I1B] += ob
    return h


def propagate_expm(params, y0, max_phase, event_times, event_record, out_samples):
    """Unconditionally stable stepper: exact exponential of a frozen H.

    Each interval between events is split so that ``||H|| * h <= max_phase``
    (spectral norm bounded by a cheap overestimate), then advanced with the
    eigendecomposition of the midpoint Hamiltonian.  The Rydberg-time
    quadratures use Simpson's rule with the half-step state, which the
    decomposition yields for free.
    """
    params = np.asarray(params, dtype=float)
    y = np.array(y0, dtype=complex)
    t = params[0]

    bound = (
        abs(params[14])
        + 2.0 * (params[8] + max(abs(params[11]), abs(params[13])))
        + (params[10] + params[12]) * params[6]
        + params[15]
    )
    h_max = max_phase / bound
    n_steps = 0

    def populations(psi):
        mod2 = psi.real**2 + psi.imag**2
        return mod2[_SINGLE_R].sum(), mod2[8]

    q_r = 0.0
    q_rr = 0.0
    row = 0
    for ei in range(len(event_times)):
        target = event_times[ei]
        n_sub = max(1, int(np.ceil((target - t) / h_max)))
        dt = (target - t) / n_sub
        for k in range(n_sub):
            tm = t + (k + 0.5) * dt
            w, vecs = np.linalg.eig(hamiltonian_at(params, tm))
            vinv_y = np.linalg.solve(vecs, y)
            y_half = vecs @ (np.exp(-0.5j * w * dt) * vinv_y)
            y_full = vecs @ (np.exp(-1j * w * dt) * vinv_y)
            p0 = populations(y)
            ph = populations(y_half)
            p1 = populations(y_full)
            q_r += dt / 6.0 * (p0[0] + 4.0 * ph[0] + p1[0])
            q_rr += dt / 6.0 * (p0[1] + 4.0 * ph[1] + p1[1])
            y = y_full
            n_steps += 1
        t = target
        if event_record[ei]:
            out_samples[row] = y
            row += 1

    return y, q_r, q_rr, n_steps, 0, STATUS_OK, t
