"""Internal-state Hamiltonians and dressed-state analytics for two driven atoms.

Each atom is a three-level system ``{|0>, |1>, |r>}``: two long-lived qubit
states and one highly excited state reached by an off-resonant laser that
drives ``|1> <-> |r>`` with Rabi frequency ``omega`` and detuning ``delta``.
The two-atom basis is the tensor product in fixed lexicographic order::

    index:  0     1     2     3     4     5     6     7     8
    state: |00>  |01>  |0r>  |10>  |11>  |1r>  |r0>  |r1>  |rr>

All frequencies are angular (rad/s) and hbar = 1, so Hamiltonian entries are
rates.  The single-atom Hamiltonian is

    H = -delta |r><r| + (omega/2)(|1><r| + |r><1|) - i(gamma_r/2)|r><r|

with ``delta`` signed.  Radiative loss from ``|r>`` enters as the
non-Hermitian sink term; norm decay of a propagated state is irretrievable
population loss.

Branch convention
-----------------
Away from resonance the dressed level connected to the bare ``|1>`` (or
``|11>``) state is fixed by the sign of ``delta``.  A sweep that starts on
the *blue* side runs at ``delta <= 0`` in this convention and its connected
branch carries a negative light shift (``-omega/2`` at resonance); the *red*
side is the mirror image.  Functions that need the branch at ``delta == 0``
take a ``side`` argument; elsewhere the sign of ``delta`` decides and
``side`` is only consulted as a tie-break.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import BlockadeWarning, DegeneracyWarning

DIM = 9

BASIS_LABELS = ("00", "01", "0r", "10", "11", "1r", "r0", "r1", "rr")

#: indices of the computational (logical) two-qubit states within the 9-state basis
LOGICAL_INDICES = (0, 1, 3, 4)

#: indices of states with exactly one atom in |r>
SINGLE_RYDBERG_INDICES = (2, 5, 6, 7)

#: index of the doubly excited state
RR_INDEX = 8

#: number of Rydberg excitations per basis state, in basis order
RYDBERG_COUNT = np.array([0, 0, 1, 0, 0, 1, 1, 1, 2], dtype=float)


def basis_index(label: str) -> int:
    """Map a two-character state label like ``"11"`` or ``"1r"`` to its index."""
    try:
        return BASIS_LABELS.index(label)
    except ValueError:
        raise ValueError(f"unknown basis label {label!r}; expected one of {BASIS_LABELS}") from None


def basis_state(label: str) -> np.ndarray:
    """Unit amplitude vector for a basis label."""
    psi = np.zeros(DIM, dtype=complex)
    psi[basis_index(label)] = 1.0
    return psi


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class AtomDrive:
    """Rabi frequency and signed detuning of the dressing laser on one atom.

    Parameters
    ----------
    omega : float
        Rabi frequency of the ``|1> <-> |r>`` coupling, rad/s, >= 0.
    delta : float
        Signed detuning, rad/s.  Negative values are the blue-start side in
        this package's convention (see module docstring).
    """

    omega: float
    delta: float

    def __post_init__(self):
        omega = _require_finite("omega", self.omega)
        _require_finite("delta", self.delta)
        if omega < 0:
            raise ValueError(f"omega must be >= 0, got {omega}")


@dataclass(frozen=True)
class PhysicsParams:
    """Fixed physical parameters of the atom pair and its environment.

    Parameters
    ----------
    omega_max : float
        Peak Rabi frequency of the dressing laser, rad/s.
    v_dd : float
        Dipole-dipole shift of the doubly excited state, rad/s.
    gamma_r : float
        Radiative decay rate of ``|r>``, rad/s (inverse lifetime).
    k_1r : float
        Wavenumber of the dressing laser, rad/m.
    mass : float
        Single-atom mass, kg.
    temperature : float
        Kinetic temperature of the released atoms, K.
    """

    omega_max: float
    v_dd: float
    gamma_r: float = 0.0
    k_1r: float = 0.0
    mass: float = 0.0
    temperature: float = 0.0

    def __post_init__(self):
        for name in ("omega_max", "v_dd", "gamma_r", "k_1r", "mass", "temperature"):
            value = _require_finite(name, getattr(self, name))
            if value < 0:
                raise ValueError(f"{name} must be >= 0, got {value}")
        if self.omega_max > 0 and self.gamma_r >= self.omega_max:
            raise ValueError(
                "gamma_r must be well below omega_max; "
                f"got gamma_r={self.gamma_r:g}, omega_max={self.omega_max:g}"
            )
        if self.v_dd <= self.omega_max:
            warnings.warn(
                f"v_dd={self.v_dd:g} does not exceed omega_max={self.omega_max:g}; "
                "the blockade assumption is marginal",
                BlockadeWarning,
                stacklevel=2,
            )

    @property
    def tau_r(self) -> float:
        """Radiative lifetime 1/gamma_r (inf when decay is off)."""
        return math.inf if self.gamma_r == 0 else 1.0 / self.gamma_r


def _branch_sign(delta: float, side: str | None) -> float:
    """+1 on the upper (red-connected) branch, -1 on the lower (blue) branch."""
    if delta < 0:
        return -1.0
    if delta > 0:
        return 1.0
    if side is None:
        side = "blue"
    if side == "blue":
        return -1.0
    if side == "red":
        return 1.0
    raise ValueError(f"side must be 'blue' or 'red', got {side!r}")


def build_single_hamiltonian(drive: AtomDrive, gamma_r: float = 0.0) -> np.ndarray:
    """Single-atom 3x3 Hamiltonian in the ``{|0>, |1>, |r>}`` basis.

    The ``|0>`` row and column are zero: that state is dark to the laser.
    With ``gamma_r > 0`` the matrix is non-Hermitian through the decay sink
    on ``|r>``.
    """
    gamma_r = _require_finite("gamma_r", gamma_r)
    h = np.zeros((3, 3), dtype=complex)
    h[2, 2] = -drive.delta - 0.5j * gamma_r
    h[1, 2] = h[2, 1] = 0.5 * drive.omega
    return h


def build_two_atom_hamiltonian(
    drive_a: AtomDrive, drive_b: AtomDrive, physics: PhysicsParams
) -> np.ndarray:
    """Two-atom 9x9 Hamiltonian: both single-atom drives plus the |rr> shift."""
    ha = build_single_hamiltonian(drive_a, physics.gamma_r)
    hb = build_single_hamiltonian(drive_b, physics.gamma_r)
    eye = np.eye(3)
    h = np.kron(ha, eye) + np.kron(eye, hb)
    h[RR_INDEX, RR_INDEX] += physics.v_dd
    return h


def light_shift_one(drive: AtomDrive, side: str | None = None) -> float:
    """Light shift of the dressed level connected to bare ``|1>``.

    Exact two-level result ``(-delta + s*sqrt(omega^2 + delta^2))/2`` with the
    branch sign ``s`` fixed by the sign of ``delta`` (``side`` breaks the tie
    at resonance).  Zero for an undriven atom.
    """
    if drive.omega == 0.0:
        return 0.0
    s = _branch_sign(drive.delta, side)
    return 0.5 * (-drive.delta + s * math.hypot(drive.omega, drive.delta))


def light_shift_two(drive: AtomDrive, side: str | None = None) -> float:
    """Blockaded two-atom light shift of the level connected to ``|11>``.

    With the doubly excited state pushed far away, ``|11>`` couples only to
    the symmetric singly excited combination with strength ``sqrt(2)*omega``,
    so the shift is ``(-delta + s*sqrt(2*omega^2 + delta^2))/2``.
    """
    if drive.omega == 0.0:
        return 0.0
    s = _branch_sign(drive.delta, side)
    return 0.5 * (-drive.delta + s * math.hypot(math.sqrt(2.0) * drive.omega, drive.delta))


def kappa_perfect_blockade(drive: AtomDrive, side: str | None = None) -> float:
    """Entangling energy: blockaded pair shift minus twice the one-atom shift.

    Shares subexpressions with the light-shift functions so the identity
    ``kappa = light_shift_two - 2*light_shift_one`` holds exactly.
    """
    return light_shift_two(drive, side) - 2.0 * light_shift_one(drive, side)


def kappa_finite_blockade(drive: AtomDrive, v_dd: float, side: str | None = None) -> float:
    """Entangling energy with a finite doubly-excited-state shift.

    Diagonalizes the three-state chain ``|11> -- |b> -- |rr>`` (couplings
    ``sqrt(2)*omega/2``, diagonal ``{0, -delta, v_dd - 2*delta}``), follows
    the eigenvalue whose eigenvector is dominated by ``|11>``, and subtracts
    twice the one-atom shift.  Near the accidental resonance
    ``v_dd ~ 2*delta`` the branch assignment degenerates; a
    ``DegeneracyWarning`` is emitted rather than failing silently.
    """
    v_dd = _require_finite("v_dd", v_dd)
    if v_dd <= 0:
        raise ValueError(f"v_dd must be > 0, got {v_dd}")
    if drive.omega == 0.0:
        return 0.0
    if abs(v_dd - 2.0 * drive.delta) < drive.omega:
        warnings.warn(
            f"v_dd={v_dd:g} is within one Rabi frequency of 2*delta={2 * drive.delta:g}; "
            "the dressed branch is nearly degenerate with the doubly excited state",
            DegeneracyWarning,
            stacklevel=2,
        )
    c = math.sqrt(2.0) * drive.omega / 2.0
    block = np.array(
        [
            [0.0, c, 0.0],
            [c, -drive.delta, c],
            [0.0, c, v_dd - 2.0 * drive.delta],
        ]
    )
    evals, evecs = np.linalg.eigh(block)
    ground = int(np.argmax(np.abs(evecs[0, :])))
    return float(evals[ground]) - 2.0 * light_shift_one(drive, side)


def kappa_two_atom(
    drive_a: AtomDrive, drive_b: AtomDrive, v_dd: float, side: str | None = None
) -> float:
    """Entangling energy from the full 9-level spectrum, per-atom drives allowed.

    Follows the eigenvalue of the two-atom Hamiltonian (decay off) whose
    eigenvector has the largest ``|11>`` weight and subtracts both one-atom
    shifts.  Reduces to :func:`kappa_finite_blockade` for equal drives and to
    :func:`kappa_perfect_blockade` as ``v_dd -> inf``.
    """
    physics = PhysicsParams(
        omega_max=max(drive_a.omega, drive_b.omega), v_dd=v_dd, gamma_r=0.0
    )
    h = build_two_atom_hamiltonian(drive_a, drive_b, physics).real
    evals, evecs = np.linalg.eigh(h)
    ground = int(np.argmax(np.abs(evecs[basis_index("11"), :])))
    return (
        float(evals[ground])
        - light_shift_one(drive_a, side)
        - light_shift_one(drive_b, side)
    )


@dataclass(frozen=True)
class DressedAnalytics:
    """Closed-form dressed-state quantities at one drive point.

    ``theta1`` and ``theta2`` are the one- and two-atom mixing angles,
    ``tan(theta1) = omega/delta`` and ``tan(theta2) = sqrt(2)*omega/delta``,
    taken in ``(0, pi)`` so they vary continuously through resonance.
    """

    e_ls1: float
    e_ls2: float
    kappa: float
    theta1: float
    theta2: float


def dressed_analytics(drive: AtomDrive, side: str | None = None) -> DressedAnalytics:
    """Bundle light shifts, entangling energy, and mixing angles for a drive."""
    e1 = light_shift_one(drive, side)
    e2 = light_shift_two(drive, side)
    return DressedAnalytics(
        e_ls1=e1,
        e_ls2=e2,
        kappa=e2 - 2.0 * e1,
        theta1=math.atan2(drive.omega, drive.delta),
        theta2=math.atan2(math.sqrt(2.0) * drive.omega, drive.delta),
    )


@dataclass(frozen=True)
class BDModelParams:
    """Inputs for the momentum-resolved bright/dark four-level model.

    Atom momenta enter through the center-of-mass momentum ``p_cm`` (uniform
    detuning error) and the relative momentum ``p_rel`` (bright-dark
    coupling); per-atom Rabi frequencies may differ.
    """

    omega_a: float
    omega_b: float
    delta: float
    p_cm: float = 0.0
    p_rel: float = 0.0
    mass: float = 1.0
    total_mass: float = field(default=0.0)

    def __post_init__(self):
        if self.mass <= 0:
            raise ValueError(f"mass must be > 0, got {self.mass}")
        if self.total_mass == 0.0:
            object.__setattr__(self, "total_mass", 2.0 * self.mass)
        if self.total_mass <= 0:
            raise ValueError(f"total_mass must be > 0, got {self.total_mass}")


def build_bd_hamiltonian(params: BDModelParams, v_dd: float, k_1r: float) -> np.ndarray:
    """4x4 Hamiltonian over ``{|G>, |B>, |D>, |rr>}`` with momentum effects.

    ``|B>``/``|D>`` are the symmetric/antisymmetric singly excited states.
    Center-of-mass motion shifts the effective detuning by ``k*p_cm/M``;
    relative motion couples bright and dark with ``k*p_rel/m``; unequal Rabi
    frequencies couple ``|G>`` and ``|rr>`` to the dark state.
    """
    delta_eff = params.delta - k_1r * params.p_cm / params.total_mass
    cb = (params.omega_a + params.omega_b) / (2.0 * math.sqrt(2.0))
    cd = (params.omega_a - params.omega_b) / (2.0 * math.sqrt(2.0))
    bd = k_1r * params.p_rel / params.mass
    h = np.zeros((4, 4), dtype=complex)
    h[1, 1] = -delta_eff
    h[2, 2] = -delta_eff
    h[3, 3] = v_dd - 2.0 * delta_eff
    h[0, 1] = h[1, 0] = cb
    h[1, 3] = h[3, 1] = cb
    h[0, 2] = h[2, 0] = cd
    h[2, 3] = h[3, 2] = cd
    h[1, 2] = h[2, 1] = bd
    return h
