"""Elementary gate set and a reversible circuit IR.

Gate kinds are a fixed enumeration: X, H, CNOT, TOFFOLI, PHASE(theta),
CPHASE(theta) and GENERIC1Q (an arbitrary validated 1-qubit unitary, the
escape hatch for pulse-derived gates).  TOFFOLI is primitive — the error
correction cycle uses it directly.  Controls are listed before the target,
and the first listed qubit is the most significant bit of the gate matrix
index.

Circuits serialize to a one-gate-per-line text format::

    X 0
    H 2
    CNOT 0 1
    TOFFOLI 0 1 2
    PHASE 0 0.785398
    CPHASE 0 1 1.5707963
    GENERIC1Q 0 re00 im00 re01 im01 re10 im10 re11 im11

Blank lines and ``#`` comments are ignored.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionMismatch, DuplicateTarget, TargetOutOfRange
from .numerics import apply_k_local_unitary, require_unitary
from .state import StateVector

X_MATRIX = np.array([[0, 1], [1, 0]], dtype=np.complex128)
H_MATRIX = np.array([[1, 1], [1, -1]], dtype=np.complex128) / math.sqrt(2)

_ARITY = {"X": 1, "H": 1, "CNOT": 2, "TOFFOLI": 3, "PHASE": 1, "CPHASE": 2,
          "GENERIC1Q": 1}
#: Gate kinds whose action permutes the computational basis without phases.
CLASSICAL_KINDS = frozenset({"X", "CNOT", "TOFFOLI"})


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    angle: float | None = None
    matrix: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(self.targets) != _ARITY[self.kind]:
            raise DuplicateTarget(
                f"{self.kind} takes {_ARITY[self.kind]} targets, "
                f"got {self.targets}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise DuplicateTarget(f"duplicate target in {self.targets}")
        if self.kind in ("PHASE", "CPHASE"):
            if self.angle is None or not math.isfinite(self.angle):
                raise ValueError(f"{self.kind} needs a finite angle")
        if self.kind == "GENERIC1Q":
            if self.matrix is None:
                raise ValueError("GENERIC1Q needs a matrix")
            mat = require_unitary(self.matrix)
            if mat.shape != (2, 2):
                raise DimensionMismatch("GENERIC1Q matrix must be 2x2")
            object.__setattr__(self, "matrix", mat)


def x(t: int) -> Gate:
    return Gate("X", (t,))


def h(t: int) -> Gate:
    return Gate("H", (t,))


def cnot(control: int, target: int) -> Gate:
    return Gate("CNOT", (control, target))


def toffoli(c1: int, c2: int, target: int) -> Gate:
    return Gate("TOFFOLI", (c1, c2, target))


def phase(t: int, angle: float) -> Gate:
    return Gate("PHASE", (t,), angle=angle)


def cphase(control: int, target: int, angle: float) -> Gate:
    return Gate("CPHASE", (control, target), angle=angle)


def generic_1q(t: int, matrix: np.ndarray) -> Gate:
    return Gate("GENERIC1Q", (t,), matrix=matrix)


def gate_matrix(g: Gate) -> np.ndarray:
    """Dense unitary of the gate on its own targets (first target = MSB)."""
    if g.kind == "X":
        return X_MATRIX.copy()
    if g.kind == "H":
        return H_MATRIX.copy()
    if g.kind == "PHASE":
        return np.diag([1.0, np.exp(1j * g.angle)]).astype(np.complex128)
    if g.kind == "CNOT":
        m = np.eye(4, dtype=np.complex128)
        m[[2, 3]] = m[[3, 2]]
        return m
    if g.kind == "CPHASE":
        return np.diag([1.0, 1.0, 1.0, np.exp(1j * g.angle)]).astype(
            np.complex128
        )
    if g.kind == "TOFFOLI":
        m = np.eye(8, dtype=np.complex128)
        m[[6, 7]] = m[[7, 6]]
        return m
    return np.array(g.matrix, dtype=np.complex128, copy=True)


def inverse_gate(g: Gate) -> Gate:
    """Exact inverse: self-inverse kinds unchanged, angles negated,
    generic matrices conjugate-transposed."""
    if g.kind in ("X", "H", "CNOT", "TOFFOLI"):
        return g
    if g.kind in ("PHASE", "CPHASE"):
        return Gate(g.kind, g.targets, angle=-g.angle)
    return Gate("GENERIC1Q", g.targets, matrix=g.matrix.conj().T)


@dataclass(frozen=True)
class Circuit:
    """Ordered gate list over qubits 0..n_qubits-1."""

    n_qubits: int
    ops: tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for g in self.ops:
            for t in g.targets:
                if not 0 <= t < self.n_qubits:
                    raise TargetOutOfRange(
                        f"gate {g.kind}{g.targets} outside {self.n_qubits} qubits"
                    )

    def __len__(self) -> int:
        return len(self.ops)

    def then(self, other: "Circuit") -> "Circuit":
        if other.n_qubits != self.n_qubits:
            raise DimensionMismatch("circuit widths differ")
        return Circuit(self.n_qubits, self.ops + other.ops)


def _axis_slicer(n: int, fixed: dict[int, int]) -> tuple:
    slicer: list = [slice(None)] * n
    for qubit, bit in fixed.items():
        slicer[n - 1 - qubit] = bit
    return tuple(slicer)


def _apply_permutation_gate(state: StateVector, g: Gate) -> StateVector:
    """X/CNOT/TOFFOLI via an amplitude-block swap instead of a matmul."""
    n = state.n_qubits
    amps = state.amps.copy()
    tensor = amps.reshape((2,) * n)
    *controls, target = g.targets
    fixed = {c: 1 for c in controls}
    lo = _axis_slicer(n, {**fixed, target: 0})
    hi = _axis_slicer(n, {**fixed, target: 1})
    saved = tensor[lo].copy()
    tensor[lo] = tensor[hi]
    tensor[hi] = saved
    return StateVector(n, amps, copy=False)


def _apply_diagonal_gate(state: StateVector, g: Gate) -> StateVector:
    """PHASE/CPHASE: scale the all-controls-and-target-set block."""
    n = state.n_qubits
    amps = state.amps.copy()
    tensor = amps.reshape((2,) * n)
    tensor[_axis_slicer(n, {t: 1 for t in g.targets})] *= np.exp(1j * g.angle)
    return StateVector(n, amps, copy=False)


def apply_gate(state: StateVector, g: Gate) -> StateVector:
    for t in g.targets:
        if not 0 <= t < state.n_qubits:
            raise TargetOutOfRange(
                f"gate {g.kind}{g.targets} outside {state.n_qubits} qubits"
            )
    if g.kind in CLASSICAL_KINDS:
        return _apply_permutation_gate(state, g)
    if g.kind in ("PHASE", "CPHASE"):
        return _apply_diagonal_gate(state, g)
    return apply_k_local_unitary(state, gate_matrix(g), g.targets)


def run_circuit(state: StateVector, c: Circuit) -> StateVector:
    if state.n_qubits != c.n_qubits:
        raise DimensionMismatch(
            f"state has {state.n_qubits} qubits, circuit {c.n_qubits}"
        )
    for g in c.ops:
        state = apply_gate(state, g)
    return state


def reverse_circuit(c: Circuit) -> Circuit:
    """Gates in reversed order, each replaced by its inverse."""
    return Circuit(c.n_qubits, tuple(inverse_gate(g) for g in reversed(c.ops)))


def remap_circuit(c: Circuit, mapping: Sequence[int], n_qubits: int) -> Circuit:
    """Rewire: qubit i of ``c`` becomes ``mapping[i]`` of a wider circuit."""
    ops = tuple(
        Gate(g.kind, tuple(mapping[t] for t in g.targets),
             angle=g.angle, matrix=g.matrix)
        for g in c.ops
    )
    return Circuit(n_qubits, ops)


def apply_to_basis_index(c: Circuit, index: int) -> int:
    """Track a computational basis state through a classical-reversible circuit.

    Exact shortcut for circuits built only from X/CNOT/TOFFOLI: those gates
    map basis states to basis states with unit amplitude, so the full action
    reduces to bit operations on the index.  Raises on any other gate kind.
    """
    if not 0 <= index < (1 << c.n_qubits):
        raise TargetOutOfRange(f"index {index} outside {c.n_qubits} qubits")
    for g in c.ops:
        if g.kind not in CLASSICAL_KINDS:
            raise ValueError(
                f"{g.kind} is not a classical permutation gate"
            )
        *controls, target = g.targets
        if all((index >> q) & 1 for q in controls):
            index ^= 1 << target
    return index


def circuit_to_text(c: Circuit) -> str:
    """Serialize to the one-gate-per-line text format."""
    lines = [f"# qubits: {c.n_qubits}"]
    for g in c.ops:
        parts = [g.kind, *map(str, g.targets)]
        if g.kind in ("PHASE", "CPHASE"):
            parts.append(repr(g.angle))
        elif g.kind == "GENERIC1Q":
            for entry in g.matrix.reshape(-1):
                parts.append(repr(float(entry.real)))
                parts.append(repr(float(entry.imag)))
        lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def circuit_from_text(text: str, n_qubits: int | None = None) -> Circuit:
    """Parse the text format; width comes from the header comment, the
    ``n_qubits`` argument, or the highest target seen."""
    ops: list[Gate] = []
    width = n_qubits
    for raw in text.splitlines():
        line = raw.strip()
        if line.startswith("# qubits:") and n_qubits is None:
            width = int(line.split(":", 1)[1])
            continue
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0].upper()
        if kind not in _ARITY:
            raise ValueError(f"unknown gate {parts[0]!r} in line {raw!r}")
        arity = _ARITY[kind]
        targets = tuple(int(p) for p in parts[1 : 1 + arity])
        rest = parts[1 + arity :]
        if kind in ("PHASE", "CPHASE"):
            ops.append(Gate(kind, targets, angle=float(rest[0])))
        elif kind == "GENERIC1Q":
            vals = [float(v) for v in rest]
            if len(vals) != 8:
                raise ValueError(f"GENERIC1Q needs 8 matrix numbers: {raw!r}")
            mat = (np.array(vals[0::2]) + 1j * np.array(vals[1::2])).reshape(2, 2)
            ops.append(Gate(kind, targets, matrix=mat))
        else:
            ops.append(Gate(kind, targets))
    if width is None:
        width = 1 + max((t for g in ops for t in g.targets), default=0)
    return Circuit(width, tuple(ops))


def epr_circuit() -> Circuit:
    """Two-gate entangler: Hadamard on the left qubit, then CNOT onto the
    right qubit.  From |01> it produces (|01> + |10>)/sqrt(2)."""
    return Circuit(2, (h(1), cnot(1, 0)))


def gates_of(ops: Iterable[Gate], n_qubits: int) -> Circuit:
    return Circuit(n_qubits, tuple(ops))
