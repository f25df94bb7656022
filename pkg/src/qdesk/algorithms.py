"""Deutsch's problem and factoring by quantum period finding.

The factoring pipeline follows the standard two-stage structure: a quantum
stage that prepares sum_n |n>|a^n mod N>, measures the function register,
Fourier-transforms the argument register and measures it; and a classical
stage that turns the measured value y into a period candidate r (reducing
y/M, with continued-fraction convergents as fallback when r does not
divide M) and then into factors gcd(a^(r/2) +- 1, N).

The modular-exponentiation step acts as a direct basis permutation of the
amplitude array rather than as a gate network: a gate-level exponentiator
wide enough for period finding needs far more ancilla qubits than the
desk-scale cap allows, and :mod:`qdesk.arithmetic` already demonstrates the
gate-level construction at small widths.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import (
    BothZero,
    NotComposite,
    NotCoprime,
    RegisterTooNarrow,
    RetriesExhausted,
    TargetOutOfRange,
)
from .gates import Circuit, cnot, cphase, h, run_circuit
from .numerics import apply_k_local_unitary
from .state import StateVector, basis_state, make_rng, measure

CONSTANT = "CONSTANT"
VARYING = "VARYING"


@dataclass(frozen=True)
class BinaryFunction:
    """A function {0,1} -> {0,1}, one of the four possible truth tables."""

    f0: int
    f1: int

    def __post_init__(self):
        if self.f0 not in (0, 1) or self.f1 not in (0, 1):
            raise ValueError("table entries must be bits")

    def __call__(self, x_bit: int) -> int:
        return self.f1 if x_bit else self.f0

    @property
    def classification(self) -> str:
        return CONSTANT if self.f0 == self.f1 else VARYING


BINARY_FUNCTIONS = {
    "const0": BinaryFunction(0, 0),
    "const1": BinaryFunction(1, 1),
    "identity": BinaryFunction(0, 1),
    "negation": BinaryFunction(1, 0),
}


@dataclass(frozen=True)
class DeutschResult:
    classification: str
    outcome_bit: int
    probability: float
    oracle_calls: int


def deutsch(f: BinaryFunction) -> DeutschResult:
    """Classify f as constant or varying with a single oracle call.

    The two qubits are prepared in (|0>+|1>)(|0>-|1>)/2, the reversible
    oracle |x>|y> -> |x>|y xor f(x)> is applied exactly once as a 4x4
    permutation unitary, and a Hadamard on the argument qubit turns the
    resulting relative phase into a deterministic 0/1 readout.
    """
    # argument qubit 0, work qubit 1
    state = basis_state(2, 0b10)
    state = run_circuit(state, Circuit(2, (h(0), h(1))))

    oracle = np.zeros((4, 4), dtype=np.complex128)
    for x_bit in (0, 1):
        for y_bit in (0, 1):
            col = 2 * x_bit + y_bit
            row = 2 * x_bit + (y_bit ^ f(x_bit))
            oracle[row, col] = 1.0
    calls = 0
    state = apply_k_local_unitary(state, oracle, (0, 1))
    calls += 1

    state = run_circuit(state, Circuit(2, (h(0),)))
    prob_one = float(np.sum(np.abs(state.amps[[1, 3]]) ** 2))
    outcome = int(prob_one > 0.5)
    probability = prob_one if outcome else 1.0 - prob_one
    return DeutschResult(
        classification=VARYING if outcome else CONSTANT,
        outcome_bit=outcome,
        probability=probability,
        oracle_calls=calls,
    )


def qft_circuit(register: Sequence[int], n_qubits: int) -> Circuit:
    """Fourier-transform circuit on the given register qubits.

    ``register[k]`` carries weight 2^k of the register value.  The circuit
    is the usual cascade: a Hadamard on each qubit from the top down, each
    followed by controlled phase rotations pi/2, pi/4, ... from the lower
    qubits, and a final qubit-order reversal (swaps as CNOT triples).
    """
    regs = tuple(int(q) for q in register)
    if len(set(regs)) != len(regs) or any(
        not 0 <= q < n_qubits for q in regs
    ):
        raise TargetOutOfRange(f"bad register {regs} for {n_qubits} qubits")
    m = len(regs)
    ops = []
    for i in range(m - 1, -1, -1):
        ops.append(h(regs[i]))
        for j in range(i - 1, -1, -1):
            ops.append(cphase(regs[j], regs[i], math.pi / (1 << (i - j))))
    for i in range(m // 2):
        lo, hi = regs[i], regs[m - 1 - i]
        ops.extend((cnot(lo, hi), cnot(hi, lo), cnot(lo, hi)))
    return Circuit(n_qubits, tuple(ops))


def qft(state: StateVector, register: Sequence[int]) -> StateVector:
    """x -> (1/sqrt(M)) sum_y exp(2*pi*i*x*y/M) |y> on the register."""
    return run_circuit(state, qft_circuit(register, state.n_qubits))


def modexp_oracle(
    state: StateVector,
    reg1: Sequence[int],
    reg2: Sequence[int],
    a: int,
    modulus: int,
) -> StateVector:
    """Basis permutation |n>|z> -> |n>|z xor (a^n mod N)> across two registers.

    Applied with reg2 = |0> this loads a^n mod N alongside every branch n
    of the argument register.  Implemented directly on the amplitude array.
    """
    reg1 = tuple(int(q) for q in reg1)
    reg2 = tuple(int(q) for q in reg2)
    for q in reg1 + reg2:
        if not 0 <= q < state.n_qubits:
            raise TargetOutOfRange(f"qubit {q} out of range")
    if len(set(reg1 + reg2)) != len(reg1) + len(reg2):
        raise TargetOutOfRange("registers overlap")
    if (1 << len(reg2)) < modulus:
        raise RegisterTooNarrow(
            f"{len(reg2)} qubits cannot hold values up to {modulus - 1}"
        )
    if math.gcd(a, modulus) != 1:
        raise NotCoprime(f"gcd({a}, {modulus}) != 1")

    m = len(reg1)
    powers = np.empty(1 << m, dtype=np.int64)
    acc = 1 % modulus
    for n in range(1 << m):
        powers[n] = acc
        acc = (acc * a) % modulus

    idx = np.arange(state.amps.size, dtype=np.int64)
    n_values = np.zeros_like(idx)
    for bit, q in enumerate(reg1):
        n_values |= ((idx >> q) & 1) << bit
    f_values = powers[n_values]
    target = idx.copy()
    for bit, q in enumerate(reg2):
        target ^= ((f_values >> bit) & 1) << q
    out = np.empty_like(state.amps)
    out[target] = state.amps
    return StateVector(state.n_qubits, out, copy=False)


def gcd(a: int, b: int) -> int:
    """Greatest common divisor by Euclid's algorithm (math.gcd)."""
    if a == 0 and b == 0:
        raise BothZero("gcd(0, 0) is undefined")
    if a < 0 or b < 0:
        raise ValueError("gcd arguments must be nonnegative")
    return math.gcd(a, b)


def reduce_fraction(y: int, m_total: int) -> tuple[int, int]:
    """Cancel y/M down to an irreducible fraction (j, r)."""
    if y == 0 and m_total == 0:
        raise BothZero("0/0 cannot be reduced")
    g = gcd(y, m_total)
    return y // g, m_total // g


def continued_fraction_denominators(y: int, m_total: int, limit: int) -> list[int]:
    """Denominators of the continued-fraction convergents of y/M, up to limit.

    The right period candidates when the true period does not divide M.
    """
    denoms = []
    frac = Fraction(y, m_total)
    for depth in range(1, 64):
        approx = frac.limit_denominator(limit)
        if approx.denominator not in denoms and approx.denominator > 1:
            denoms.append(approx.denominator)
        # walk down through coarser convergents
        limit = approx.denominator - 1
        if limit < 2:
            break
    return denoms


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, int(math.isqrt(n)) + 1):
        if n % p == 0:
            return False
    return True


def _prime_power_root(n: int) -> int | None:
    """The prime p when n = p^k for some k >= 2, else None."""
    for k in range(2, n.bit_length() + 1):
        root = round(n ** (1.0 / k))
        for cand in (root - 1, root, root + 1):
            if cand >= 2 and cand**k == n:
                return cand
    return None


@dataclass
class ShorRun:
    """Record of one factoring run (possibly several quantum attempts)."""

    n_to_factor: int
    base: int
    m_bits: int
    m_total: int
    measured_y: int | None
    inferred_r: int | None
    factors: tuple[int, int] | None
    seed: int
    attempts: int
    success: bool
    log: list[str] = field(default_factory=list)


def default_first_register_bits(n_to_factor: int) -> int:
    """First-register width: twice the value width plus headroom, so that
    M comfortably exceeds N^2 (11 bits for N = 15)."""
    return 2 * max(1, (n_to_factor - 1).bit_length()) + 3


def _quantum_order_measurement(
    n_to_factor: int, base: int, m_bits: int, rng
) -> tuple[int, list[str]]:
    """One pass of the quantum stage; returns the measured y and log lines."""
    w = max(1, (n_to_factor - 1).bit_length())
    reg1 = tuple(range(m_bits))
    reg2 = tuple(range(m_bits, m_bits + w))
    lines = [f"prepare reg1_bits={m_bits} reg2_bits={w}"]
    state = basis_state(m_bits + w, 0)
    state = run_circuit(
        state, Circuit(m_bits + w, tuple(h(q) for q in reg1))
    )
    state = modexp_oracle(state, reg1, reg2, base, n_to_factor)
    lines.append(f"modexp base={base} modulus={n_to_factor}")
    rec2 = measure(state, reg2, rng)
    lines.append(
        f"measure-reg2 outcome={rec2.outcome_value} "
        f"probability={rec2.probability:.6f}"
    )
    state = qft(rec2.post_state, reg1)
    lines.append("qft applied")
    rec1 = measure(state, reg1, rng)
    lines.append(
        f"measure-reg1 y={rec1.outcome_value} "
        f"probability={rec1.probability:.6f}"
    )
    return rec1.outcome_value, lines


def _infer_period(
    y: int, m_total: int, base: int, n_to_factor: int, lines: list[str]
) -> int | None:
    """Period candidate from the measured y, or None."""
    if y == 0:
        lines.append("infer-period degenerate=0/M")
        return None
    j, r = reduce_fraction(y, m_total)
    lines.append(f"reduce-fraction j={j} r={r}")
    if pow(base, r, n_to_factor) == 1:
        return r
    # r does not divide M (or y carried a common factor): fall back to
    # continued-fraction convergents of y/M with denominators below N.
    for cand in continued_fraction_denominators(y, m_total, n_to_factor):
        if pow(base, cand, n_to_factor) == 1:
            lines.append(f"continued-fraction r={cand}")
            return cand
    lines.append("infer-period no-candidate")
    return None


def shor_factor(
    n_to_factor: int,
    base: int | None = None,
    m_bits: int | None = None,
    seed: int = 0,
    max_attempts: int = 10,
) -> ShorRun:
    """Factor an odd composite (not a prime power) by period finding.

    Retries with a fresh measurement (and a fresh random base when none was
    pinned) up to ``max_attempts`` times; raises RetriesExhausted, carrying
    the run record, if every attempt fails.
    """
    if n_to_factor < 4 or n_to_factor % 2 == 0:
        raise NotComposite(f"{n_to_factor} must be an odd composite")
    if is_prime(n_to_factor):
        raise NotComposite(f"{n_to_factor} is prime")
    root = _prime_power_root(n_to_factor)
    if root is not None:
        raise NotComposite(
            f"{n_to_factor} is a prime power ({root}^k); "
            "period finding needs two distinct prime factors"
        )
    if base is not None and math.gcd(base, n_to_factor) != 1:
        raise NotCoprime(f"gcd({base}, {n_to_factor}) != 1")
    if m_bits is None:
        m_bits = default_first_register_bits(n_to_factor)
    m_total = 1 << m_bits

    rng = make_rng(seed)
    run = ShorRun(
        n_to_factor=n_to_factor,
        base=base if base is not None else -1,
        m_bits=m_bits,
        m_total=m_total,
        measured_y=None,
        inferred_r=None,
        factors=None,
        seed=seed,
        attempts=0,
        success=False,
    )
    run.log.append(f"config N={n_to_factor} m={m_bits} M={m_total} seed={seed}")

    for attempt in range(1, max_attempts + 1):
        run.attempts = attempt
        if base is None:
            while True:
                cand = int(rng.integers(2, n_to_factor))
                if math.gcd(cand, n_to_factor) == 1:
                    break
            a = cand
        else:
            a = base
        run.base = a
        lines = [f"attempt {attempt} base={a}"]
        y, stage_lines = _quantum_order_measurement(n_to_factor, a, m_bits, rng)
        lines.extend(stage_lines)
        run.measured_y = y
        r = _infer_period(y, m_total, a, n_to_factor, lines)
        run.inferred_r = r
        if r is None:
            lines.append("attempt-failed reason=no-period")
            run.log.extend(lines)
            continue
        if r % 2 == 1:
            lines.append(f"attempt-failed reason=odd-period r={r}")
            run.log.extend(lines)
            continue
        half = pow(a, r // 2, n_to_factor)
        if half == n_to_factor - 1:
            lines.append("attempt-failed reason=trivial-root")
            run.log.extend(lines)
            continue
        p = math.gcd(half - 1, n_to_factor)
        q = math.gcd(half + 1, n_to_factor)
        if 1 < p < n_to_factor:
            factors = tuple(sorted((p, n_to_factor // p)))
        elif 1 < q < n_to_factor:
            factors = tuple(sorted((q, n_to_factor // q)))
        else:
            lines.append("attempt-failed reason=trivial-gcd")
            run.log.extend(lines)
            continue
        run.factors = factors
        run.success = True
        lines.append(f"factors {factors[0]}x{factors[1]}")
        run.log.extend(lines)
        return run

    run.log.append(f"retries-exhausted attempts={max_attempts}")
    raise RetriesExhausted(
        f"no factors of {n_to_factor} after {max_attempts} attempts", run=run
    )
