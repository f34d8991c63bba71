"""Time-dependent Schrodinger propagation of the two-atom system along a ramp.

The hot path is the adaptive embedded Runge-Kutta kernel (compiled when the
extension is built, pure Python otherwise); a piecewise-constant-exponential
stepper is available as an unconditionally stable alternative for stiff
parameter choices.  Per-trajectory observables (integrated Rydberg times,
norm) accumulate on the integrator's own grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .core import (
    LOGICAL_INDICES,
    PhysicsParams,
    basis_index,
    basis_state,
)
from .errors import DegeneracyWarning, IntegrationError
from .ramps import RampSchedule

METHOD_ADAPTIVE = "adaptive-embedded-pair"
METHOD_EXPM = "piecewise-constant-exponential"


@dataclass(frozen=True)
class PropagationSettings:
    """Integrator knobs.

    ``max_step`` defaults to 1/16 of the window when unset.  The exponential
    method ignores the tolerances and instead bounds the per-step phase
    ``||H||*h`` by ``max_phase`` (unconditional stability for large v_dd).
    """

    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float | None = None
    method: str = METHOD_ADAPTIVE
    backend: str = "auto"
    max_phase: float = 0.1

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-3):
                raise ValueError(f"{name} must be in (0, 1e-3], got {value}")
        if self.max_step is not None and self.max_step <= 0:
            raise ValueError(f"max_step must be > 0, got {self.max_step}")
        if self.method not in (METHOD_ADAPTIVE, METHOD_EXPM):
            raise ValueError(f"unknown method {self.method!r}")
        if self.max_phase <= 0:
            raise ValueError(f"max_phase must be > 0, got {self.max_phase}")


@dataclass(frozen=True)
class TrajectoryResult:
    """One propagated initial state with its dense samples and observables.

    ``amplitudes[i]`` is the 9-component state at ``times[i]``; ``t_r`` and
    ``t_rr`` are the integrated single-Rydberg and doubly-excited populations
    (seconds).  ``run_key`` identifies the (schedule, physics, offsets,
    settings) combination so blocks built from mismatched runs are rejected.
    """

    times: np.ndarray
    amplitudes: np.ndarray
    final_state: np.ndarray
    t_r: float
    t_rr: float
    final_norm: float
    n_steps: int
    n_rejected: int
    backend: str
    run_key: tuple = field(repr=False)

    @property
    def population_series(self) -> np.ndarray:
        """|amplitude|^2 at the sample times, shape (n_samples, 9)."""
        return np.abs(self.amplitudes) ** 2


def _unpack_offsets(offsets):
    """Accept None, a 4-tuple, or any object with the four offset attributes."""
    if offsets is None:
        return 0.0, 0.0, 0.0, 0.0
    if hasattr(offsets, "delta_a"):
        return (
            float(offsets.delta_a),
            float(offsets.omega_a),
            float(offsets.delta_b),
            float(offsets.omega_b),
        )
    da, oa, db, ob = offsets
    return float(da), float(oa), float(db), float(ob)


def schedule_params(
    schedule: RampSchedule, offsets, physics: PhysicsParams
) -> np.ndarray:
    """Pack schedule, per-atom offsets, and physics into the kernel layout."""
    d_a, o_a, d_b, o_b = _unpack_offsets(offsets)
    omega_ref = physics.omega_max if physics.omega_max > 0 else schedule.omega_max
    return np.array(
        [
            schedule.t1,
            schedule.t2,
            schedule.t3,
            schedule.t4,
            schedule.t_w,
            schedule.omega_min,
            schedule.omega_max,
            schedule.delta_min,
            schedule.delta_max,
            schedule.delta_sign,
            1.0 + o_a / omega_ref,
            d_a,
            1.0 + o_b / omega_ref,
            d_b,
            physics.v_dd,
            physics.gamma_r,
        ]
    )


def _resolve_initial(initial) -> np.ndarray:
    if isinstance(initial, str):
        return basis_state(initial)
    psi = np.asarray(initial, dtype=complex)
    if psi.shape != (9,):
        raise ValueError(f"initial state must have 9 components, got shape {psi.shape}")
    norm = np.linalg.norm(psi)
    if not (0.0 < norm <= 1.0 + 1e-9):
        raise ValueError(f"initial state norm must be in (0, 1], got {norm:g}")
    return psi.copy()


def propagate(
    schedule: RampSchedule,
    offsets,
    physics: PhysicsParams,
    initial,
    settings: PropagationSettings | None = None,
    n_samples: int = 512,
) -> TrajectoryResult:
    """Solve i d(psi)/dt = H(t) psi along the schedule for one initial state.

    Parameters
    ----------
    schedule : RampSchedule
        Pulse shape; per-atom drives are the envelope with ``offsets`` applied
        (Rabi offsets scale the envelope, detuning offsets add to it).
    offsets : NoiseRealization | tuple | None
        Per-atom static inhomogeneities ``(delta_a, omega_a, delta_b, omega_b)``
        in rad/s; None means the fiducial drive.
    physics : PhysicsParams
        Interaction strength, decay rate, and the reference Rabi frequency
        that normalizes relative Rabi offsets.
    initial : str | ndarray
        Basis label like ``"11"`` or a 9-component amplitude vector with norm
        at most 1 (sub-unit norms allowed for protocol chaining).
    n_samples : int
        Dense-output count: the state is recorded at this many uniform times
        across the window (0 records endpoints only).

    Raises
    ------
    IntegrationError
        On step-size underflow or unreachable tolerance, with the failure
        time attached.
    """
    settings = settings or PropagationSettings()
    psi0 = _resolve_initial(initial)
    params = schedule_params(schedule, offsets, physics)

    if n_samples >= 2:
        sample_times = np.linspace(schedule.t1, schedule.t4, n_samples)
    else:
        sample_times = np.array([schedule.t1, schedule.t4])

    # events: every sample time plus the plateau breakpoints, deduplicated
    interior = np.array([schedule.t2, schedule.t3])
    events = np.union1d(sample_times[1:], interior)
    record = np.isin(events, sample_times[1:], assume_unique=False).astype(np.int8)
    n_record = int(record.sum())
    out = np.zeros((n_record, 9), dtype=complex)

    max_step = settings.max_step or schedule.duration / 16.0
    d_a, o_a, d_b, o_b = _unpack_offsets(offsets)
    run_key = (
        tuple(params.tolist()),
        settings.rel_tol,
        settings.abs_tol,
        settings.method,
    )

    if settings.method == METHOD_EXPM:
        result = _kernels.propagate_expm(
            params, psi0, settings.max_phase, events, record, out
        )
        backend = "python"
    else:
        kernel, backend = _kernels.get_adaptive_kernel(settings.backend)
        result = kernel(
            params,
            psi0,
            settings.rel_tol,
            settings.abs_tol,
            max_step,
            events,
            record,
            out,
        )
    y_final, t_r, t_rr, n_steps, n_rejected, status, t_last = result

    if status == _kernels.STATUS_UNDERFLOW:
        raise IntegrationError(
            f"step size underflow at t={t_last:g} s (tolerance unreachable)",
            t_fail=t_last,
        )
    if status == _kernels.STATUS_TOO_MANY_STEPS:
        raise IntegrationError(
            f"step budget exhausted at t={t_last:g} s", t_fail=t_last
        )

    times = np.concatenate(([schedule.t1], events[record.astype(bool)]))
    amplitudes = np.concatenate(([psi0], out), axis=0)
    return TrajectoryResult(
        times=times,
        amplitudes=amplitudes,
        final_state=np.asarray(y_final),
        t_r=float(t_r),
        t_rr=float(t_rr),
        final_norm=float(np.linalg.norm(y_final)),
        n_steps=int(n_steps),
        n_rejected=int(n_rejected),
        backend=backend,
        run_key=run_key,
    )


LOGICAL_LABELS = ("00", "01", "10", "11")


def _check_same_run(trajectories: dict) -> None:
    keys = {label: trajectories[label].run_key for label in LOGICAL_LABELS}
    first = keys[LOGICAL_LABELS[0]]
    for label, key in keys.items():
        if key != first:
            raise ValueError(
                f"trajectory {label!r} was produced by a different run "
                "(schedule/physics/offsets/settings mismatch)"
            )


def logical_block(trajectories: dict) -> np.ndarray:
    """4x4 computational-subspace block from the four basis-input trajectories.

    Column j is the projection of the final state of input j onto
    ``{|00>, |01>, |10>, |11>}``; sub-unitary when population leaked or
    decayed.  All four trajectories must come from the same run.
    """
    _check_same_run(trajectories)
    block = np.zeros((4, 4), dtype=complex)
    for j, label in enumerate(LOGICAL_LABELS):
        block[:, j] = trajectories[label].final_state[list(LOGICAL_INDICES)]
    return block


def logical_block_series(trajectories: dict) -> tuple[np.ndarray, np.ndarray]:
    """Logical blocks at every shared sample time, shape (n_times, 4, 4)."""
    _check_same_run(trajectories)
    times = trajectories[LOGICAL_LABELS[0]].times
    n = len(times)
    series = np.zeros((n, 4, 4), dtype=complex)
    for j, label in enumerate(LOGICAL_LABELS):
        amps = trajectories[label].amplitudes
        if amps.shape[0] != n:
            raise ValueError("trajectories were sampled on different grids")
        series[:, :, j] = amps[:, list(LOGICAL_INDICES)]
    return times, series


def blockaded_block(omega: float, delta: float, v_dd: float) -> np.ndarray:
    """3x3 symmetric-sector Hamiltonian {|11>, |b>, |rr>} (decay off)."""
    c = math.sqrt(2.0) * omega / 2.0
    return np.array(
        [
            [0.0, c, 0.0],
            [c, -delta, c],
            [0.0, c, v_dd - 2.0 * delta],
        ]
    )


def adiabaticity_metric(
    schedule: RampSchedule, physics: PhysicsParams, n_points: int = 257
) -> float:
    """Worst-case nonadiabatic coupling of the dressed ground state.

    On a uniform grid the instantaneous eigensystem of the blockaded
    ``{|11>, |b>, |rr>}`` sector is computed, the dressed ground state is
    tracked (largest |11> weight), and the dimensionless ratio
    ``|<e| d/dt |g>| / gap`` is maximized over grid points and excited
    states.  Eigenvector derivatives use central finite differences with a
    gauge fixed by overlap sign.  Values well below 1 indicate an adiabatic
    ramp; the calibration guard uses 0.1.
    """
    import warnings

    from .ramps import delta_at, omega_at

    ts = np.linspace(schedule.t1, schedule.t4, n_points)
    dt = 1e-7 * schedule.duration
    worst = 0.0
    scale = physics.omega_max + schedule.delta_max

    for t in ts:
        ta = max(schedule.t1, t - dt)
        tb = min(schedule.t4, t + dt)
        h0 = blockaded_block(omega_at(schedule, t), delta_at(schedule, t), physics.v_dd)
        ha = blockaded_block(omega_at(schedule, ta), delta_at(schedule, ta), physics.v_dd)
        hb = blockaded_block(omega_at(schedule, tb), delta_at(schedule, tb), physics.v_dd)
        evals, evecs = np.linalg.eigh(h0)
        g = int(np.argmax(np.abs(evecs[0, :])))
        _, va = np.linalg.eigh(ha)
        _, vb = np.linalg.eigh(hb)
        ga = va[:, int(np.argmax(np.abs(va[0, :])))]
        gb = vb[:, int(np.argmax(np.abs(vb[0, :])))]
        # gauge: align both neighbors with the center eigenvector
        if np.dot(ga, evecs[:, g]) < 0:
            ga = -ga
        if np.dot(gb, evecs[:, g]) < 0:
            gb = -gb
        dg = (gb - ga) / (tb - ta)
        for k in range(3):
            if k == g:
                continue
            gap = abs(evals[k] - evals[g])
            if gap < 1e-9 * scale:
                warnings.warn(
                    f"degenerate gap at t={t:g} s; adiabaticity metric unreliable",
                    DegeneracyWarning,
                    stacklevel=2,
                )
                continue
            ratio = abs(np.dot(evecs[:, k], dg)) / gap
            worst = max(worst, ratio)
    return worst
