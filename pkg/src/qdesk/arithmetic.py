"""Reversible arithmetic networks built from X/CNOT/TOFFOLI.

The plain adder maps |a, b, carries=0> to |a, a+b, carries=0> with the sum
on n+1 bits.  It has the characteristic V shape of reversible computation:
a forward cascade that writes all carries, a top-bit step, then the mirror
cascade that uncomputes every carry while depositing the sum bits.  Because
every carry returns to |0>, the same temporary register can be reused by
repeated additions — which is exactly how the modular multiplier and
exponentiator below work.

Running the adder backwards subtracts: with the minuend loaded into the
result register, the reversed network leaves a-b there when a >= b and
2^(n+1)-(b-a) when a < b, with the top qubit of the result register acting
as an overflow flag.  That comparison drives the modular adder's
conditional correction.

All networks here are permutations of the computational basis, so a basis
input can also be traced exactly as bit operations on the index
(:func:`qdesk.gates.apply_to_basis_index`); the modular multiply/power
helpers use that path, and the tests pin it against full state-vector runs.
"""
from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping

import numpy as np

from .errors import (
    IndexOutOfRange,
    InvalidOperand,
    ModulusTooLarge,
    WidthOutOfRange,
)
from .gates import (
    Circuit,
    apply_to_basis_index,
    cnot,
    remap_circuit,
    reverse_circuit,
    run_circuit,
    toffoli,
    x,
)
from .state import StateVector, basis_state

MAX_ADDER_BITS = 6  # 3n+1 <= 19 qubits
MAX_MODULUS_BITS = 5  # 4n+2 <= 22 qubits


@dataclass(frozen=True)
class RegisterLayout:
    """Named, disjoint qubit ranges; each register lists its qubits LSB first."""

    registers: Mapping[str, tuple[int, ...]]
    total_qubits: int

    def __post_init__(self):
        object.__setattr__(
            self,
            "registers",
            MappingProxyType({k: tuple(v) for k, v in self.registers.items()}),
        )
        seen: set[int] = set()
        for name, qs in self.registers.items():
            for q in qs:
                if not 0 <= q < self.total_qubits:
                    raise IndexOutOfRange(f"{name} qubit {q} out of range")
                if q in seen:
                    raise IndexOutOfRange(f"qubit {q} in two registers")
                seen.add(q)

    def qubits(self, name: str) -> tuple[int, ...]:
        return self.registers[name]

    def width(self, name: str) -> int:
        return len(self.registers[name])

    def pack(self, **values: int) -> int:
        """Basis index with each named register loaded with its value."""
        index = 0
        for name, value in values.items():
            qs = self.registers[name]
            if not 0 <= value < (1 << len(qs)):
                raise InvalidOperand(
                    f"{value} does not fit in register {name} ({len(qs)} bits)"
                )
            for bit, q in enumerate(qs):
                index |= ((value >> bit) & 1) << q
        return index

    def unpack(self, index: int) -> dict[str, int]:
        """Register values encoded in a basis index."""
        out = {}
        for name, qs in self.registers.items():
            out[name] = sum(((index >> q) & 1) << bit for bit, q in enumerate(qs))
        return out


@dataclass(frozen=True)
class ArithmeticNetwork:
    layout: RegisterLayout
    circuit: Circuit
    tag: str  # ADD, MODADD(N), ...

    def on_basis(self, **values: int) -> dict[str, int]:
        """Run the network on a basis input via exact bit tracing."""
        out = apply_to_basis_index(self.circuit, self.layout.pack(**values))
        return self.layout.unpack(out)

    def on_state(self, state: StateVector) -> StateVector:
        """Run the network as a full state-vector circuit."""
        return run_circuit(state, self.circuit)


def adder_layout(n: int) -> RegisterLayout:
    """reg_a (n), reg_b (n+1, top qubit = final carry), reg_carry (n).

    The result register carries one extra qubit so a+b never overflows; the
    highest carry is written straight into that top qubit rather than into
    a separate slot, which is why reg_carry needs only n qubits.
    """
    if not 1 <= n <= MAX_ADDER_BITS:
        raise WidthOutOfRange(f"adder width must be 1..{MAX_ADDER_BITS}, got {n}")
    return RegisterLayout(
        {
            "a": tuple(range(n)),
            "b": tuple(range(n, 2 * n + 1)),
            "carry": tuple(range(2 * n + 1, 3 * n + 1)),
        },
        total_qubits=3 * n + 1,
    )


def _carry_out(layout: RegisterLayout, i: int) -> int:
    a = layout.qubits("a")
    carry = layout.qubits("carry")
    b = layout.qubits("b")
    return carry[i + 1] if i + 1 < len(a) else b[len(a)]


def build_carry_block(layout: RegisterLayout, i: int) -> Circuit:
    """Carry block at bit i: c_{i+1} ^= MAJ(a_i, b_i, c_i), b_i ^= a_i.

    Realized as TOFFOLI(a_i, b_i -> c_{i+1}), CNOT(a_i -> b_i),
    TOFFOLI(c_i, b_i -> c_{i+1}); at the top bit the carry-out slot is the
    extra qubit of reg_b.
    """
    n = layout.width("a")
    if not 0 <= i < n:
        raise IndexOutOfRange(f"carry position {i} outside 0..{n - 1}")
    ai = layout.qubits("a")[i]
    bi = layout.qubits("b")[i]
    ci = layout.qubits("carry")[i]
    co = _carry_out(layout, i)
    return Circuit(
        layout.total_qubits,
        (toffoli(ai, bi, co), cnot(ai, bi), toffoli(ci, bi, co)),
    )


def build_sum_block(layout: RegisterLayout, i: int) -> Circuit:
    """Sum block at bit i: b_i ^= a_i ^ c_i (three-bit sum modulo 2)."""
    n = layout.width("a")
    if not 0 <= i < n:
        raise IndexOutOfRange(f"sum position {i} outside 0..{n - 1}")
    ai = layout.qubits("a")[i]
    bi = layout.qubits("b")[i]
    ci = layout.qubits("carry")[i]
    return Circuit(layout.total_qubits, (cnot(ai, bi), cnot(ci, bi)))


def build_adder(n: int) -> ArithmeticNetwork:
    """Plain adder network: |a, b, 0> -> |a, a+b, 0> with a+b on n+1 bits."""
    layout = adder_layout(n)
    a = layout.qubits("a")
    b = layout.qubits("b")
    circuit = Circuit(layout.total_qubits, ())
    for i in range(n):
        circuit = circuit.then(build_carry_block(layout, i))
    circuit = circuit.then(
        Circuit(layout.total_qubits, (cnot(a[n - 1], b[n - 1]),))
    )
    circuit = circuit.then(build_sum_block(layout, n - 1))
    for i in range(n - 2, -1, -1):
        circuit = circuit.then(reverse_circuit(build_carry_block(layout, i)))
        circuit = circuit.then(build_sum_block(layout, i))
    return ArithmeticNetwork(layout, circuit, "ADD")


def run_adder(n: int, a: int, b: int) -> tuple[int, int]:
    """(a, a+b) through the full state-vector simulation of the network."""
    net = build_adder(n)
    _require_operand(a, n, "a")
    _require_operand(b, n, "b")
    state = basis_state(net.layout.total_qubits, net.layout.pack(a=a, b=b))
    final = net.on_state(state)
    values = net.layout.unpack(_single_basis_index(final))
    return values["a"], values["b"]


def run_reversed_adder(n: int, a: int, b: int) -> tuple[int, int]:
    """Subtraction by running the adder backwards.

    Returns (a, result) with result = a-b when a >= b, and
    2^(n+1)-(b-a) when a < b; in the wrapped case the top bit of the result
    (the overflow bit, ``result >> n``) is 1.  The subtrahend is loaded into
    the input register and the minuend into the result register, since the
    reversed network subtracts the input register from the result register.
    """
    net = build_adder(n)
    _require_operand(a, n, "a")
    _require_operand(b, n, "b")
    reversed_net = reverse_circuit(net.circuit)
    state = basis_state(net.layout.total_qubits, net.layout.pack(a=b, b=a))
    final = run_circuit(state, reversed_net)
    values = net.layout.unpack(_single_basis_index(final))
    return a, values["b"]


def modadd_layout(n: int) -> RegisterLayout:
    """Adder layout plus a modulus register (n qubits) and a wrap flag."""
    if not 1 <= n <= MAX_MODULUS_BITS:
        raise ModulusTooLarge(
            f"modular networks support widths 1..{MAX_MODULUS_BITS}, got {n}"
        )
    return RegisterLayout(
        {
            "a": tuple(range(n)),
            "b": tuple(range(n, 2 * n + 1)),
            "carry": tuple(range(2 * n + 1, 3 * n + 1)),
            "modulus": tuple(range(3 * n + 1, 4 * n + 1)),
            "flag": (4 * n + 1,),
        },
        total_qubits=4 * n + 2,
    )


def _adder_on(layout: RegisterLayout, input_name: str) -> Circuit:
    """Plain adder embedded in ``layout``, adding ``input_name`` into b."""
    n = layout.width("a")
    base = build_adder(n)
    mapping = list(range(base.layout.total_qubits))
    src = base.layout.qubits("a")
    dst = layout.qubits(input_name)
    for s, d in zip(src, dst):
        mapping[s] = d
    for s, d in zip(base.layout.qubits("b"), layout.qubits("b")):
        mapping[s] = d
    for s, d in zip(base.layout.qubits("carry"), layout.qubits("carry")):
        mapping[s] = d
    return remap_circuit(base.circuit, mapping, layout.total_qubits)


def build_modadd(n: int, modulus: int) -> ArithmeticNetwork:
    """Modular adder: |a, b, 0...> -> |a, (a+b) mod N, 0...> for a, b < N.

    Structure: add a; subtract N by the reversed adder; the overflow bit of
    that comparison sets a flag qubit; conditioned on the flag, N is added
    back (the modulus register is conditionally zeroed for the correction
    add, then restored); finally a subtract/re-add of a clears the flag.
    The modulus register is loaded from |0> at the start and returned to
    |0> at the end, so every non-data qubit starts and ends cleared.
    """
    if modulus < 2:
        raise InvalidOperand(f"modulus must be >= 2, got {modulus}")
    n_needed = max(1, (modulus - 1).bit_length())
    if n < n_needed:
        raise InvalidOperand(
            f"width {n} cannot hold values below modulus {modulus}"
        )
    layout = modadd_layout(n)
    total = layout.total_qubits
    b = layout.qubits("b")
    mod_reg = layout.qubits("modulus")
    flag = layout.qubits("flag")[0]
    overflow = b[n]

    load_modulus = Circuit(
        total,
        tuple(x(mod_reg[i]) for i in range(n) if (modulus >> i) & 1),
    )
    # flips the modulus register to zero exactly when the flag is 0
    gate_modulus = Circuit(
        total,
        (x(flag),)
        + tuple(cnot(flag, mod_reg[i]) for i in range(n) if (modulus >> i) & 1)
        + (x(flag),),
    )
    add_a = _adder_on(layout, "a")
    add_mod = _adder_on(layout, "modulus")

    circuit = load_modulus
    circuit = circuit.then(add_a)  # b = a + b
    circuit = circuit.then(reverse_circuit(add_mod))  # b = a + b - N (may wrap)
    circuit = circuit.then(Circuit(total, (cnot(overflow, flag),)))
    circuit = circuit.then(gate_modulus)
    circuit = circuit.then(add_mod)  # add N back iff the subtraction wrapped
    circuit = circuit.then(gate_modulus)
    # clear the flag: b - a wraps exactly when the correction did not fire
    circuit = circuit.then(reverse_circuit(add_a))
    circuit = circuit.then(
        Circuit(total, (x(overflow), cnot(overflow, flag), x(overflow)))
    )
    circuit = circuit.then(add_a)
    circuit = circuit.then(load_modulus)  # return modulus register to |0>
    return ArithmeticNetwork(layout, circuit, f"MODADD({modulus})")


def _require_operand(value: int, n: int, name: str) -> None:
    if not 0 <= value < (1 << n):
        raise InvalidOperand(f"{name}={value} does not fit in {n} bits")


def _require_mod_operand(value: int, modulus: int, name: str) -> None:
    if not 0 <= value < modulus:
        raise InvalidOperand(f"{name}={value} not in [0, {modulus})")


def _single_basis_index(state: StateVector) -> int:
    """Index of the single populated basis state (permutation-network output)."""
    idx = int(np.argmax(np.abs(state.amps)))
    if abs(abs(state.amps[idx]) - 1.0) > 1e-9:
        raise InvalidOperand("state is not a computational basis state")
    return idx


def width_for_modulus(modulus: int) -> int:
    n = max(1, (modulus - 1).bit_length())
    if n > MAX_MODULUS_BITS:
        raise ModulusTooLarge(
            f"modulus {modulus} needs {n} bits, cap is {MAX_MODULUS_BITS}"
        )
    return n


def run_modadd(a: int, b: int, modulus: int) -> int:
    """(a+b) mod N through the modular network (exact basis tracing)."""
    n = width_for_modulus(modulus)
    _require_mod_operand(a, modulus, "a")
    _require_mod_operand(b, modulus, "b")
    net = build_modadd(n, modulus)
    return net.on_basis(a=a, b=b)["b"]


def modmul_by_repeated_add(a: int, b: int, modulus: int) -> int:
    """a*b mod N as b successive runs of the modular adder.

    Multiplication is literally repeated addition here; the accumulator
    register threads through every pass while the addend register is
    reloaded with a.  Correct for all operands below N, with every ancilla
    back in |0> after each pass.
    """
    n = width_for_modulus(modulus)
    _require_mod_operand(a, modulus, "a")
    _require_mod_operand(b, modulus, "b")
    net = build_modadd(n, modulus)
    acc = 0
    for _ in range(b):
        acc = net.on_basis(a=a, b=acc)["b"]
    return acc


def modexp_by_repeated_mul(a: int, exponent: int, modulus: int) -> int:
    """a^x mod N as x successive modular multiplications (each itself a
    chain of modular additions)."""
    _require_mod_operand(a, modulus, "a")
    if exponent < 0:
        raise InvalidOperand(f"exponent must be >= 0, got {exponent}")
    acc = 1 % modulus
    for _ in range(exponent):
        acc = modmul_by_repeated_add(acc, a, modulus)
    return acc


# ---------------------------------------------------------------------------
# compute / copy / uncompute


def increment_circuit(width: int) -> Circuit:
    """|x>|y> -> |x>|y xor (x+1 mod 2^w)> on 2w qubits (x low, y high).

    Output bit j of x+1 is x_j xor AND(x_0..x_{j-1}), so widths above 3
    would need more than two controls; the garbage-disposal demo only needs
    w = 3 (increment mod 8).
    """
    if not 1 <= width <= 3:
        raise WidthOutOfRange(f"increment supports widths 1..3, got {width}")
    ops = []
    for j in range(width):
        ops.append(cnot(j, width + j))  # y_j ^= x_j
    ops.append(x(width))  # y_0 ^= 1
    if width >= 2:
        ops.append(cnot(0, width + 1))  # y_1 ^= x_0
    if width >= 3:
        ops.append(toffoli(0, 1, width + 2))  # y_2 ^= x_0 x_1
    return Circuit(2 * width, tuple(ops))


def copy_function_circuit(width: int) -> Circuit:
    """|x>|y> -> |x>|y xor x>: the identity function in XOR form."""
    return Circuit(
        2 * width, tuple(cnot(j, width + j) for j in range(width))
    )


@dataclass(frozen=True)
class PipelineResult:
    """Outcome of the compute-copy-uncompute pipeline.

    ``registers`` maps 'input', 'work1'.., 'output' to their qubit ranges in
    the final state; ``pre_copy_state`` is the state after the forward
    passes only, with every intermediate result still sitting in its work
    register.
    """

    state: StateVector
    pre_copy_state: StateVector
    registers: Mapping[str, tuple[int, ...]]
    width: int

    def register_value(self, name: str, state: StateVector | None = None) -> int:
        """Value of a register when the (basis) state determines one."""
        target = self.state if state is None else state
        index = _single_basis_index(target)
        qs = self.registers[name]
        return sum(((index >> q) & 1) << bit for bit, q in enumerate(qs))


def compute_copy_uncompute(
    f_circuit: Circuit,
    width: int,
    x_input,
    stages: int = 4,
    uncompute: bool = True,
) -> PipelineResult:
    """Iterate |x>|0> -> |x>|f(x)> ``stages`` times, copy the final value out,
    then run the whole forward computation backwards.

    ``f_circuit`` must act on 2*width qubits with the XOR-output convention
    of :func:`increment_circuit`.  ``x_input`` is either an integer or a
    width-qubit StateVector (superpositions allowed).  With ``uncompute``
    the work registers all return to |0> and the copied result ends up
    correlated only with the input register; without it the intermediate
    values stay behind as garbage.
    """
    if f_circuit.n_qubits != 2 * width:
        raise WidthOutOfRange(
            f"function circuit must span {2 * width} qubits, "
            f"got {f_circuit.n_qubits}"
        )
    total = (stages + 2) * width
    registers: dict[str, tuple[int, ...]] = {
        "input": tuple(range(width)),
    }
    for s in range(1, stages + 1):
        registers[f"work{s}"] = tuple(range(s * width, (s + 1) * width))
    registers["output"] = tuple(range((stages + 1) * width, total))
    layout_regs = ["input"] + [f"work{s}" for s in range(1, stages + 1)]

    forward = Circuit(total, ())
    for s in range(stages):
        mapping = list(registers[layout_regs[s]]) + list(
            registers[layout_regs[s + 1]]
        )
        forward = forward.then(remap_circuit(f_circuit, mapping, total))

    if isinstance(x_input, StateVector):
        if x_input.n_qubits != width:
            raise WidthOutOfRange("input state width mismatch")
        amps = np.zeros(1 << total, dtype=np.complex128)
        amps[: 1 << width] = x_input.amps
        start = StateVector(total, amps, copy=False)
    else:
        _require_operand(int(x_input), width, "x")
        start = basis_state(total, int(x_input))

    pre_copy = run_circuit(start, forward)
    copy_out = Circuit(
        total,
        tuple(
            cnot(src, dst)
            for src, dst in zip(registers[f"work{stages}"], registers["output"])
        ),
    )
    state = run_circuit(pre_copy, copy_out)
    if uncompute:
        state = run_circuit(state, reverse_circuit(forward))
    return PipelineResult(
        state=state,
        pre_copy_state=pre_copy,
        registers=MappingProxyType(registers),
        width=width,
    )
