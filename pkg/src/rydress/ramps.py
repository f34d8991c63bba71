"""Pulse schedules: Gaussian Rabi edges, linear detuning sweep, hold plateau.

A schedule dresses the atoms between ``t1`` and ``t2`` (Rabi envelope rises
on a Gaussian centered at ``t2`` while the detuning magnitude falls linearly
from ``delta_max`` to ``delta_min``), holds both constant until ``t3``, and
undresses on the mirror image of the entry edge until ``t4``.  The detuning
keeps one sign for the whole ramp, set by ``start_side``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np
from scipy.integrate import quad

from .core import AtomDrive, kappa_perfect_blockade, light_shift_one
from .errors import ConfigError


@dataclass(frozen=True)
class RampSchedule:
    """Piecewise dressing pulse: Gaussian edges, linear sweep, hold plateau.

    Times are absolute (s); ``delta_min``/``delta_max`` are magnitudes and
    the signed detuning is negative for ``start_side="blue"``.  The two edges
    must mirror each other: ``t4 - t3 == t2 - t1``.
    """

    t1: float
    t2: float
    t3: float
    t4: float
    omega_min: float
    omega_max: float
    delta_min: float
    delta_max: float
    t_w: float
    start_side: str = "blue"

    def __post_init__(self):
        if not (self.t1 < self.t2 <= self.t3 < self.t4):
            raise ConfigError(
                f"times must satisfy t1 < t2 <= t3 < t4, got "
                f"({self.t1}, {self.t2}, {self.t3}, {self.t4})"
            )
        edge_in = self.t2 - self.t1
        edge_out = self.t4 - self.t3
        if abs(edge_in - edge_out) > 1e-9 * (self.t4 - self.t1):
            raise ConfigError(
                f"edges must mirror: t2-t1={edge_in:g} vs t4-t3={edge_out:g}"
            )
        if not (0 <= self.omega_min < self.omega_max):
            raise ConfigError(
                f"need 0 <= omega_min < omega_max, got ({self.omega_min}, {self.omega_max})"
            )
        if not (0 < self.delta_min < self.delta_max):
            raise ConfigError(
                f"need 0 < delta_min < delta_max, got ({self.delta_min}, {self.delta_max})"
            )
        if self.t_w <= 0:
            raise ConfigError(f"t_w must be > 0, got {self.t_w}")
        if self.start_side not in ("blue", "red"):
            raise ConfigError(f"start_side must be 'blue' or 'red', got {self.start_side!r}")

    @property
    def delta_sign(self) -> float:
        return -1.0 if self.start_side == "blue" else 1.0

    @property
    def duration(self) -> float:
        return self.t4 - self.t1

    @property
    def hold(self) -> float:
        return self.t3 - self.t2

    @property
    def edge(self) -> float:
        return self.t2 - self.t1

    def with_hold(self, hold: float) -> "RampSchedule":
        """Copy with a new plateau duration (edges unchanged)."""
        if hold < 0:
            raise ConfigError(f"hold must be >= 0, got {hold}")
        t3 = self.t2 + hold
        return replace(self, t3=t3, t4=t3 + self.edge)

    def with_edge(self, edge: float) -> "RampSchedule":
        """Copy with rescaled edges; t_w keeps its fraction of the edge."""
        if edge <= 0:
            raise ConfigError(f"edge must be > 0, got {edge}")
        scale = edge / self.edge
        t2 = self.t1 + edge
        t3 = t2 + self.hold
        return replace(self, t2=t2, t3=t3, t4=t3 + edge, t_w=self.t_w * scale)


def standard_schedule(
    omega_max: float,
    *,
    edge_cycles: float = 4.0,
    hold_cycles: float = 0.4,
    delta_max_over_omega: float = 6.0,
    delta_min_over_omega: float = 0.1,
    omega_min_over_omega: float = 1e-3,
    t_w_fraction: float = 0.25,
    start_side: str = "blue",
    t_start: float = 0.0,
) -> RampSchedule:
    """Schedule template with durations in units of the Rabi cycle 2*pi/omega_max."""
    cycle = 2.0 * math.pi / omega_max
    edge = edge_cycles * cycle
    hold = hold_cycles * cycle
    t2 = t_start + edge
    t3 = t2 + hold
    return RampSchedule(
        t1=t_start,
        t2=t2,
        t3=t3,
        t4=t3 + edge,
        omega_min=omega_min_over_omega * omega_max,
        omega_max=omega_max,
        delta_min=delta_min_over_omega * omega_max,
        delta_max=delta_max_over_omega * omega_max,
        t_w=t_w_fraction * edge,
        start_side=start_side,
    )


def _check_window(schedule: RampSchedule, t: float) -> None:
    if t < schedule.t1 or t > schedule.t4:
        raise ValueError(
            f"t={t:g} outside the schedule window [{schedule.t1:g}, {schedule.t4:g}]"
        )


def omega_at(schedule: RampSchedule, t: float) -> float:
    """Rabi envelope at time t: Gaussian entry edge, plateau, mirrored exit."""
    _check_window(schedule, t)
    s = schedule
    if t < s.t2:
        u = (t - s.t2) / s.t_w
    elif t <= s.t3:
        return s.omega_max
    else:
        u = (t - s.t3) / s.t_w
    return s.omega_min + (s.omega_max - s.omega_min) * math.exp(-0.5 * u * u)


def delta_at(schedule: RampSchedule, t: float) -> float:
    """Signed detuning at time t; magnitude sweeps linearly, sign is fixed."""
    _check_window(schedule, t)
    s = schedule
    if t < s.t2:
        mag = s.delta_max - (s.delta_max - s.delta_min) * (t - s.t1) / (s.t2 - s.t1)
    elif t <= s.t3:
        mag = s.delta_min
    else:
        mag = s.delta_min + (s.delta_max - s.delta_min) * (t - s.t3) / (s.t4 - s.t3)
    return s.delta_sign * mag


def drive_at(schedule: RampSchedule, t: float) -> AtomDrive:
    return AtomDrive(omega=omega_at(schedule, t), delta=delta_at(schedule, t))


class KappaProfile(NamedTuple):
    """Entangling-energy time series along a schedule."""

    t: np.ndarray
    omega: np.ndarray
    delta: np.ndarray
    kappa: np.ndarray


def kappa_profile(schedule: RampSchedule, n_points: int) -> KappaProfile:
    """Sample (t, omega, delta, kappa) on a uniform grid over the window."""
    if n_points < 2:
        raise ValueError(f"n_points must be >= 2, got {n_points}")
    ts = np.linspace(schedule.t1, schedule.t4, n_points)
    omegas = np.array([omega_at(schedule, t) for t in ts])
    deltas = np.array([delta_at(schedule, t) for t in ts])
    side = schedule.start_side
    kappas = np.array(
        [kappa_perfect_blockade(AtomDrive(o, d), side) for o, d in zip(omegas, deltas)]
    )
    return KappaProfile(t=ts, omega=omegas, delta=deltas, kappa=kappas)


def _integrate_piecewise(schedule: RampSchedule, func, plateau_value: float, tol: float):
    """Adaptive quadrature of func over both edges plus the exact plateau term."""
    s = schedule
    total = plateau_value * (s.t3 - s.t2)
    for a, b in ((s.t1, s.t2), (s.t3, s.t4)):
        value, abserr = quad(func, a, b, epsabs=0.1 * tol, epsrel=1e-10, limit=200)
        if abserr > tol:
            raise ArithmeticError(
                f"quadrature did not converge on [{a:g}, {b:g}]: "
                f"error estimate {abserr:g} exceeds {tol:g}"
            )
        total += value
    return total


def predicted_theta2(schedule: RampSchedule, tol: float = 1e-6) -> float:
    """Twist angle predicted by the blockaded entangling energy: integral of kappa.

    Uses adaptive quadrature on the edges and the exact plateau contribution;
    ``tol`` bounds the absolute quadrature error in radians.
    """
    side = schedule.start_side
    hold_drive = AtomDrive(schedule.omega_max, schedule.delta_sign * schedule.delta_min)
    return _integrate_piecewise(
        schedule,
        lambda t: kappa_perfect_blockade(drive_at(schedule, t), side),
        kappa_perfect_blockade(hold_drive, side),
        tol,
    )


def predicted_phi1(schedule: RampSchedule, tol: float = 1e-6) -> float:
    """Integral of the one-atom light shift along the ramp (fiducial phase)."""
    side = schedule.start_side
    hold_drive = AtomDrive(schedule.omega_max, schedule.delta_sign * schedule.delta_min)
    return _integrate_piecewise(
        schedule,
        lambda t: light_shift_one(drive_at(schedule, t), side),
        light_shift_one(hold_drive, side),
        tol,
    )
