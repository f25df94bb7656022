"""Decoherence channels, a system-environment error model, and 3-qubit codes.

Collision dephasing: a qubit bumping into background gas at rate gamma
loses its off-diagonal coherence as exp(-gamma*t) while the populations
stay put.  As a completely positive map this is

    rho -> p rho + (1-p) Z rho Z,   p = (1 + exp(-gamma*t)) / 2,

implemented below by scaling the coherences directly (same map, exactly
trace preserving).  A Monte Carlo trajectory mode draws Poisson collision
times and applies discrete phase kicks; its ensemble average converges to
the channel.  Cat states |0..0> + |1..1> decohere at n*gamma — any one of
the n qubits flips the joint phase.

The three-qubit codes protect one logical qubit against a single bit flip
(amplitude code: |0> -> |000|, |1> -> |111> via two CNOTs) or a single
phase flip (same network conjugated by Hadamards, where a Z error looks
like a bit flip).  Recovery is either a Toffoli on the decoded data qubit
or a measurement of the two ancillas followed by a conditional flip.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UncorrectableError, ValueOutOfRange
from .gates import Circuit, apply_gate, cnot, generic_1q, h, run_circuit, toffoli, x
from .numerics import fidelity_pure, partial_trace
from .state import (
    DensityMatrix,
    StateVector,
    basis_state,
    make_rng,
    measure,
    pure_density,
)

SIGMA_0 = np.eye(2, dtype=np.complex128)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
# +i in the upper-right corner; only sigma_y rho sigma_y ever appears here,
# so the overall sign convention drops out of every observable.
SIGMA_Y = np.array([[0, 1j], [-1j, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

PAULI = {"i": SIGMA_0, "x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}

AMPLITUDE_3 = "AMPLITUDE-3"
PHASE_3 = "PHASE-3"
UNITARY_TOFFOLI = "UNITARY-TOFFOLI"
MEASURE_AND_FLIP = "MEASURE-AND-FLIP"


@dataclass(frozen=True)
class PauliError:
    """A discrete error on one qubit: identity, bit flip, phase flip, or both."""

    kind: str
    qubit: int

    def __post_init__(self):
        if self.kind not in PAULI:
            raise ValueOutOfRange(f"unknown Pauli kind {self.kind!r}")

    @property
    def matrix(self) -> np.ndarray:
        return PAULI[self.kind]


@dataclass(frozen=True)
class DephasingChannel:
    """Collision dephasing at rate gamma for a duration t."""

    gamma: float
    t: float

    def __post_init__(self):
        if self.gamma < 0 or self.t < 0:
            raise ValueOutOfRange("gamma and t must be nonnegative")

    @property
    def coherence_factor(self) -> float:
        return math.exp(-self.gamma * self.t)

    @property
    def flip_probability(self) -> float:
        """Weight of the Z branch in the Kraus form."""
        return (1.0 - self.coherence_factor) / 2.0

    def kraus_operators(self) -> list[np.ndarray]:
        p = 1.0 - self.flip_probability
        return [math.sqrt(p) * SIGMA_0, math.sqrt(1.0 - p) * SIGMA_Z]


def apply_dephasing(
    rho: DensityMatrix, channel: DephasingChannel, qubits
) -> DensityMatrix:
    """Dephase each listed qubit independently.

    Every coherence between basis states differing on qubit i picks up one
    factor exp(-gamma*t) per listed qubit; diagonal entries are untouched
    (bit for bit — the factor multiplies only off-diagonal blocks).
    """
    dim = rho.mat.shape[0]
    factor = channel.coherence_factor
    idx = np.arange(dim)
    mat = rho.mat.copy()
    for q in qubits:
        if not 0 <= q < rho.n_qubits:
            raise ValueOutOfRange(f"qubit {q} outside state")
        bits = (idx >> q) & 1
        differs = bits[:, None] != bits[None, :]
        mat[differs] *= factor
    return DensityMatrix(rho.n_qubits, mat, copy=False)


def dephasing_trajectories(
    psi: StateVector,
    channel: DephasingChannel,
    qubits,
    n_trajectories: int,
    seed,
) -> DensityMatrix:
    """Monte Carlo dephasing: average projector over collision histories.

    Per trajectory and per qubit, a Poisson(gamma*t) number of collisions
    is drawn and each collision randomizes the relative phase — a Z kick
    applied with probability 1/2 — so the surviving coherence averages to
    exp(-gamma*t), matching the channel.
    """
    rng = make_rng(seed)
    qubits = list(qubits)
    dim = psi.amps.size
    acc = np.zeros((dim, dim), dtype=np.complex128)
    lam = channel.gamma * channel.t
    idx = np.arange(dim)
    for _ in range(n_trajectories):
        amps = psi.amps.copy()
        for q in qubits:
            collisions = rng.poisson(lam)
            kicks = int(rng.binomial(collisions, 0.5)) if collisions else 0
            if kicks % 2:
                amps = np.where((idx >> q) & 1, -amps, amps)
        acc += np.outer(amps, amps.conj())
    return DensityMatrix(psi.n_qubits, acc / n_trajectories, copy=False)


def ghz_state(n: int) -> StateVector:
    """(|0...0> + |1...1>)/sqrt(2); for n = 1 this is |+>."""
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = amps[-1] = 1.0 / math.sqrt(2.0)
    return StateVector(n, amps, copy=False)


@dataclass(frozen=True)
class EnvironmentRecord:
    """Joint pure state of qubit + 2-qubit environment and its marginals."""

    joint: StateVector
    reduced: DensityMatrix
    weights: tuple[float, float, float, float]  # sigma_0, x, y, z branches


def entangle_with_environment(
    psi: StateVector, seed, weights=None
) -> EnvironmentRecord:
    """Couple one qubit to a 4-dimensional environment through all four
    Pauli branches.

    The joint unitary sends |psi>|e> to sum_i sqrt(w_i) sigma_i|psi> |e_i>
    with orthonormal environment records |e_i> (here: the four basis states
    of two environment qubits).  The joint state stays pure while the
    reduced qubit state is mixed unless a single branch carries all the
    weight — losing track of the environment is what destroys coherence.
    """
    if psi.n_qubits != 1:
        raise ValueOutOfRange("the error model couples a single qubit")
    if weights is None:
        rng = make_rng(seed)
        raw = rng.random(4)
        weights = tuple(float(w) for w in raw / raw.sum())
    else:
        weights = tuple(float(w) for w in weights)
        if len(weights) != 4 or any(w < 0 for w in weights):
            raise ValueOutOfRange("need four nonnegative branch weights")
        total = sum(weights)
        if total <= 0:
            raise ValueOutOfRange("branch weights must not all vanish")
        weights = tuple(w / total for w in weights)

    order = (SIGMA_0, SIGMA_X, SIGMA_Y, SIGMA_Z)
    # system qubit is qubit 2 (most significant); environment qubits 1, 0
    joint = np.zeros(8, dtype=np.complex128)
    for i, (w, sigma) in enumerate(zip(weights, order)):
        branch = sigma @ psi.amps
        for s in (0, 1):
            joint[4 * s + i] += math.sqrt(w) * branch[s]
    joint_state = StateVector(3, joint, copy=False)
    reduced = partial_trace(pure_density(joint_state), keep=[2])
    return EnvironmentRecord(joint=joint_state, reduced=reduced, weights=weights)


# ---------------------------------------------------------------------------
# three-qubit codes


@dataclass(frozen=True)
class CodeInstance:
    """A logical qubit alpha|0> + beta|1> to be protected by a 3-qubit code."""

    kind: str
    alpha: complex
    beta: complex

    def __post_init__(self):
        if self.kind not in (AMPLITUDE_3, PHASE_3):
            raise ValueOutOfRange(f"unknown code kind {self.kind!r}")
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > 1e-10:
            raise ValueOutOfRange("|alpha|^2 + |beta|^2 must be 1")

    def logical_state(self) -> StateVector:
        return StateVector(1, [self.alpha, self.beta])


@dataclass(frozen=True)
class QecCycleResult:
    recovered: StateVector  # the decoded data qubit
    syndrome: str  # ancilla readout, first ancilla left
    fidelity: float  # to the logical input
    corrected: bool
    pre_correction: StateVector  # 3-qubit state after decode, before recovery
    final_state: StateVector  # 3-qubit state after recovery (and any reset)

    def raise_if_failed(self) -> "QecCycleResult":
        if not self.corrected:
            raise UncorrectableError(
                f"recovery left fidelity {self.fidelity:.6f}", result=self
            )
        return self


def _encode_circuit(kind: str) -> Circuit:
    # data qubit 0, ancillas 1 and 2
    ops = [cnot(0, 1), cnot(0, 2)]
    if kind == PHASE_3:
        ops += [h(0), h(1), h(2)]
    return Circuit(3, tuple(ops))


def qec_cycle(
    code: CodeInstance,
    error=None,
    recovery: str = UNITARY_TOFFOLI,
    seed: int = 0,
) -> QecCycleResult:
    """Encode, optionally inject Pauli errors, decode, correct.

    ``error`` is a PauliError, a sequence of them, or None.  The amplitude
    code corrects a single x error on any qubit and the phase code a single
    z error.  Anything else (wrong error type, two bit flips) is simulated
    all the same and reported through the fidelity, never masked: the
    result's ``corrected`` flag is False when the logical state came back
    wrong, and ``raise_if_failed`` turns that into UncorrectableError.
    ``recovery`` picks the Toffoli correction or the measure-and-flip
    variant; after the latter the ancillas are reset to |00>.
    """
    if recovery not in (UNITARY_TOFFOLI, MEASURE_AND_FLIP):
        raise ValueOutOfRange(f"unknown recovery {recovery!r}")
    if error is None:
        errors = []
    elif isinstance(error, PauliError):
        errors = [error]
    else:
        errors = list(error)
    for err in errors:
        if not 0 <= err.qubit < 3:
            raise ValueOutOfRange("error qubit must be 0, 1, or 2")

    logical = code.logical_state()
    amps = np.zeros(8, dtype=np.complex128)
    amps[0], amps[1] = code.alpha, code.beta
    state = StateVector(3, amps)

    state = run_circuit(state, _encode_circuit(code.kind))
    for err in errors:
        if err.kind != "i":
            state = apply_gate(state, generic_1q(err.qubit, err.matrix))
    state = run_circuit(state, _decode_circuit(code.kind))

    pre_correction = state
    if recovery == UNITARY_TOFFOLI:
        state = apply_gate(state, toffoli(1, 2, 0))
        # ancilla readout for the report; the ancillas stay as they are
        rec = measure(state, [1, 2], seed)
        a1, a2 = rec.outcome_value & 1, (rec.outcome_value >> 1) & 1
        syndrome = f"{a1}{a2}"
        final = rec.post_state
    else:
        rec = measure(state, [1, 2], seed)
        a1, a2 = rec.outcome_value & 1, (rec.outcome_value >> 1) & 1
        syndrome = f"{a1}{a2}"
        final = rec.post_state
        if a1 and a2:
            final = apply_gate(final, x(0))
        # reset the ancillas to the standard state for the next round
        if a1:
            final = apply_gate(final, x(1))
        if a2:
            final = apply_gate(final, x(2))
        a1 = a2 = 0

    data = _extract_data_qubit(final, a1, a2)
    fid = fidelity_pure(data, logical)
    return QecCycleResult(
        recovered=data,
        syndrome=syndrome,
        fidelity=fid,
        corrected=bool(fid > 1.0 - 1e-9),
        pre_correction=pre_correction,
        final_state=final,
    )


def _decode_circuit(kind: str) -> Circuit:
    ops = []
    if kind == PHASE_3:
        ops += [h(0), h(1), h(2)]
    ops += [cnot(0, 1), cnot(0, 2)]
    return Circuit(3, tuple(ops))


def _extract_data_qubit(state: StateVector, a1: int, a2: int) -> StateVector:
    """Data qubit given the (measured) ancilla values; exact because the
    ancillas are in a definite basis state after either recovery."""
    base = (a2 << 2) | (a1 << 1)
    vec = np.array([state.amps[base], state.amps[base | 1]])
    return StateVector(1, vec / np.linalg.norm(vec), copy=False)


def cnot_error_propagation_check(seed: int = 0, n_random: int = 50) -> bool:
    """Identity check: a bit flip on the control before a CNOT equals the
    same CNOT followed by bit flips on both wires.

    Verified on all four basis states and ``n_random`` random two-qubit
    states to 1e-12; errors during two-qubit gates multiply.
    """
    rng = make_rng(seed)
    gate_cnot = cnot(1, 0)  # control qubit 1, target qubit 0
    flip_control = x(1)
    flip_target = x(0)

    def left(state: StateVector) -> StateVector:
        return apply_gate(apply_gate(state, flip_control), gate_cnot)

    def right(state: StateVector) -> StateVector:
        out = apply_gate(state, gate_cnot)
        return apply_gate(apply_gate(out, flip_control), flip_target)

    states = [basis_state(2, v) for v in range(4)]
    for _ in range(n_random):
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        states.append(StateVector(2, amps / np.linalg.norm(amps)))
    for st in states:
        if np.max(np.abs(left(st).amps - right(st).amps)) > 1e-12:
            return False
    return True
