"""Pulse-level simulation of a trapped-ion controlled gate.

Each ion contributes three levels — the |0>,|1> qubit pair plus an
auxiliary |2> used for a conditional phase flip — and all ions couple to a
single truncated center-of-mass phonon mode that serves as the quantum bus.
Two resonant interaction-picture Hamiltonians drive everything:

* node coupling (red sideband, ion at a node of the standing wave)::

      H = (eta/sqrt(N)) * (Omega/2) * (|u><0| a e^{i phi} + |0><u| a† e^{-i phi})

  which exchanges an internal excitation (0 <-> u, u = 1 or 2) against a
  phonon, with the sqrt(n+1) bosonic factor on the n <-> n+1 rung;

* antinode coupling (carrier)::

      H = (Omega/2) * (|1><0| e^{i phi} + |0><1| e^{-i phi})

  which rotates the qubit levels and leaves the phonon number alone.

Laser frequency, trap frequency and ion mass never appear: they are
absorbed into the resonance conditions and the Lamb-Dicke parameter eta.
Time is measured in units of 1/Omega (Omega defaults to 1).

The controlled-phase gate is three node pulses: a pi pulse on the control
(parking its |1> population in the phonon), a 2*pi pulse on the target's
0 <-> 2 transition (a sign flip exactly when the phonon is excited), and a
pi pulse returning the phonon to the control.  Sandwiching it between a
pi/2 and a 3*pi/2 carrier pulse on the target (phase -pi/2) rotates the
phase flip into a CNOT.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, InvalidPulse, PhononLeakage, ValueOutOfRange
from .numerics import matrix_exp_hermitian

NODE = "node"
ANTINODE = "antinode"

LEVELS_PER_ION = 3
LEAKAGE_ATOL = 1e-6
NORM_ATOL = 1e-10


@dataclass(frozen=True)
class IonTrapSystem:
    """Trap configuration: ion count, phonon cutoff, laser parameters."""

    n_ions: int = 2
    phonon_cutoff: int = 2
    omega: float = 1.0
    eta: float = 0.1

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueOutOfRange("need at least one ion")
        if self.phonon_cutoff < 1:
            raise ValueOutOfRange("phonon cutoff must be >= 1")
        if self.omega <= 0 or self.eta <= 0:
            raise ValueOutOfRange("omega and eta must be positive")
        if self.eta > 0.3:
            warnings.warn(
                f"eta={self.eta} is outside the well-localized regime "
                "(the node/antinode Hamiltonians are leading-order in eta)",
                stacklevel=2,
            )

    @property
    def phonon_dim(self) -> int:
        return self.phonon_cutoff + 1

    @property
    def dim(self) -> int:
        return LEVELS_PER_ION**self.n_ions * self.phonon_dim

    def index(self, levels: Sequence[int], phonon: int) -> int:
        """Flat index of |levels[0], levels[1], ...> x |phonon>."""
        if len(levels) != self.n_ions:
            raise DimensionMismatch(f"need {self.n_ions} ion levels")
        idx = 0
        for lv in levels:
            if not 0 <= lv < LEVELS_PER_ION:
                raise ValueOutOfRange(f"ion level {lv} out of range")
            idx = idx * LEVELS_PER_ION + lv
        if not 0 <= phonon <= self.phonon_cutoff:
            raise ValueOutOfRange(f"phonon number {phonon} above cutoff")
        return idx * self.phonon_dim + phonon


@dataclass(frozen=True)
class Pulse:
    """One laser pulse: which ion, which coupling, which transition.

    ``transition`` is (0, 1) or (0, 2); driving 0 <-> 2 is only meaningful
    at a node (that is the conditional-phase step).  ``duration`` is in
    units of 1/Omega with hbar = 1.
    """

    ion: int
    coupling: str
    transition: tuple[int, int] = (0, 1)
    phase: float = 0.0
    duration: float = 0.0

    def __post_init__(self):
        if self.coupling not in (NODE, ANTINODE):
            raise InvalidPulse(f"unknown coupling {self.coupling!r}")
        if self.transition not in ((0, 1), (0, 2)):
            raise InvalidPulse(f"unsupported transition {self.transition}")
        if self.transition == (0, 2) and self.coupling != NODE:
            raise InvalidPulse("the auxiliary 0<->2 transition is driven at a node")
        if not self.duration > 0:
            raise InvalidPulse("pulse duration must be positive")
        if not math.isfinite(self.phase):
            raise InvalidPulse("pulse phase must be finite")


class IonTrapState:
    """Amplitudes over (ion levels) x (phonon number), unit norm."""

    __slots__ = ("system", "amps")

    def __init__(self, system: IonTrapSystem, amps, *, copy: bool = True):
        arr = np.array(amps, dtype=np.complex128, copy=copy).reshape(-1)
        if arr.size != system.dim:
            raise DimensionMismatch(
                f"expected {system.dim} amplitudes, got {arr.size}"
            )
        norm = float(np.linalg.norm(arr))
        if abs(norm - 1.0) > NORM_ATOL:
            raise ValueOutOfRange(f"state norm {norm!r} deviates from 1")
        self.system = system
        self.amps = arr

    @classmethod
    def basis(
        cls, system: IonTrapSystem, levels: Sequence[int], phonon: int = 0
    ) -> "IonTrapState":
        amps = np.zeros(system.dim, dtype=np.complex128)
        amps[system.index(levels, phonon)] = 1.0
        return cls(system, amps, copy=False)

    def phonon_population(self, phonon: int) -> float:
        tensor = self.amps.reshape(-1, self.system.phonon_dim)
        return float(np.sum(np.abs(tensor[:, phonon]) ** 2))

    def level_population(self, ion: int, level: int) -> float:
        sys = self.system
        shape = (LEVELS_PER_ION,) * sys.n_ions + (sys.phonon_dim,)
        tensor = np.abs(self.amps.reshape(shape)) ** 2
        return float(np.take(tensor, level, axis=ion).sum())

    def top_phonon_population(self) -> float:
        """Population parked at the truncation boundary of the phonon ladder."""
        return self.phonon_population(self.system.phonon_cutoff)


def _lowering(ion_dim: int, upper: int) -> np.ndarray:
    op = np.zeros((ion_dim, ion_dim), dtype=np.complex128)
    op[upper, 0] = 1.0  # |upper><0|
    return op


def build_hamiltonian(system: IonTrapSystem, pulse: Pulse) -> np.ndarray:
    """Hermitian Hamiltonian of one pulse on the full composite space."""
    if not 0 <= pulse.ion < system.n_ions:
        raise InvalidPulse(f"ion {pulse.ion} outside 0..{system.n_ions - 1}")
    upper = pulse.transition[1]
    raise_op = _lowering(LEVELS_PER_ION, upper)  # |upper><0| on one ion
    if pulse.coupling == NODE:
        g = system.eta * system.omega / (2.0 * math.sqrt(system.n_ions))
        a_op = np.diag(
            np.sqrt(np.arange(1, system.phonon_dim, dtype=np.float64)), k=1
        ).astype(np.complex128)
        phonon_part = a_op
    else:
        g = system.omega / 2.0
        phonon_part = np.eye(system.phonon_dim, dtype=np.complex128)

    half = np.array([[g * np.exp(1j * pulse.phase)]], dtype=np.complex128)
    for ion in range(system.n_ions):
        factor = raise_op if ion == pulse.ion else np.eye(LEVELS_PER_ION)
        half = np.kron(half, factor)
    half = np.kron(half, phonon_part)
    return half + half.conj().T


def apply_pulse(
    state: IonTrapState, pulse: Pulse, *, check_leakage: bool = True
) -> IonTrapState:
    """Evolve through one pulse: state <- exp(-i H t) state.

    With ``check_leakage`` (default), population reaching the top rung of
    the truncated phonon ladder beyond 1e-6 raises PhononLeakage, since
    dynamics there are no longer faithful to the untruncated mode.
    """
    u = matrix_exp_hermitian(build_hamiltonian(state.system, pulse), pulse.duration)
    out = IonTrapState(state.system, u @ state.amps, copy=False)
    if check_leakage:
        leak = out.top_phonon_population()
        if leak > LEAKAGE_ATOL:
            raise PhononLeakage(
                f"top phonon level holds {leak:.3e} population; "
                "raise the cutoff"
            )
    return out


def apply_sequence(
    state: IonTrapState, pulses: Iterable[Pulse], *, check_leakage: bool = True
) -> IonTrapState:
    for pulse in pulses:
        state = apply_pulse(state, pulse, check_leakage=check_leakage)
    return state


def node_pulse_duration(system: IonTrapSystem, angle: float) -> float:
    """Duration of a node pulse of the given rotation angle; a pi pulse
    takes t = pi / (Omega * eta / sqrt(N))."""
    return angle / (system.omega * system.eta / math.sqrt(system.n_ions))


def carrier_pulse_duration(system: IonTrapSystem, angle: float) -> float:
    """Duration of a carrier pulse: a pi/2 pulse takes t = pi/(2 Omega)."""
    return angle / system.omega


def controlled_phase_sequence(
    system: IonTrapSystem, control: int = 0, target: int = 1
) -> list[Pulse]:
    """Three node pulses realizing diag(1, 1, 1, -1) on |control, target>
    with the phonon mode starting and ending in its ground state."""
    if system.n_ions < 2:
        raise InvalidPulse("controlled phase needs two ions")
    t_pi = node_pulse_duration(system, math.pi)
    return [
        Pulse(control, NODE, (0, 1), phase=0.0, duration=t_pi),
        Pulse(target, NODE, (0, 2), phase=0.0, duration=2.0 * t_pi),
        Pulse(control, NODE, (0, 1), phase=0.0, duration=t_pi),
    ]


def cnot_sequence(
    system: IonTrapSystem, control: int = 0, target: int = 1
) -> list[Pulse]:
    """Five pulses whose qubit-subspace action is CNOT up to global phase:
    carrier pi/2 on the target (phase -pi/2), the controlled-phase triple,
    then carrier 3*pi/2 on the target (same phase)."""
    quarter = carrier_pulse_duration(system, math.pi / 2.0)
    return (
        [Pulse(target, ANTINODE, (0, 1), phase=-math.pi / 2, duration=quarter)]
        + controlled_phase_sequence(system, control, target)
        + [Pulse(target, ANTINODE, (0, 1), phase=-math.pi / 2, duration=3 * quarter)]
    )


def qubit_subspace_unitary(
    system: IonTrapSystem,
    pulses: Sequence[Pulse],
    control: int = 0,
    target: int = 1,
    *,
    check_leakage: bool = True,
) -> np.ndarray:
    """4x4 matrix of a pulse sequence on span{|00>,|01>,|10>,|11>} x |0>.

    Column (2*c + t) is the evolved image of |control=c, target=t> with the
    phonon in its ground state, projected back onto that subspace.  Any
    population the sequence leaves outside the subspace shows up as a
    non-unitary column, which the gate-synthesis tests check against.
    """
    u = np.zeros((4, 4), dtype=np.complex128)
    for col in range(4):
        levels = [0] * system.n_ions
        levels[control] = (col >> 1) & 1
        levels[target] = col & 1
        final = apply_sequence(
            IonTrapState.basis(system, levels, phonon=0),
            pulses,
            check_leakage=check_leakage,
        )
        for row in range(4):
            levels_out = [0] * system.n_ions
            levels_out[control] = (row >> 1) & 1
            levels_out[target] = row & 1
            u[row, col] = final.amps[system.index(levels_out, 0)]
    return u


def align_global_phase(u: np.ndarray, reference: np.ndarray) -> np.ndarray:
    """Rotate u by the global phase that best matches the reference."""
    overlap = np.trace(reference.conj().T @ u)
    if abs(overlap) < 1e-12:
        return u
    return u * (overlap.conjugate() / abs(overlap))
