"""Command-line front end: every construction as a seedable, reproducible demo.

Output comes in two modes.  Text mode prints a human-readable account of
each pipeline stage.  Records mode (``--records``) prints one
``<stage> <key>=<value>`` line per fact and nothing else, so identical
seeds and flags give byte-identical output.

Exit codes: 0 success, 1 usage error, 2 for an exhausted factoring retry
budget or an uncorrectable error-correction cycle.
"""
from __future__ import annotations

import argparse
import math
import sys

import numpy as np

from . import __version__
from .algorithms import (
    BINARY_FUNCTIONS,
    default_first_register_bits,
    deutsch,
    shor_factor,
)
from .arithmetic import (
    build_adder,
    compute_copy_uncompute,
    increment_circuit,
    modexp_by_repeated_mul,
    run_reversed_adder,
    width_for_modulus,
)
from .errors import QdeskError, RetriesExhausted, UncorrectableError
from .gates import circuit_to_text, epr_circuit, reverse_circuit, run_circuit
from .iontrap import (
    IonTrapState,
    IonTrapSystem,
    align_global_phase,
    apply_sequence,
    cnot_sequence,
    controlled_phase_sequence,
    qubit_subspace_unitary,
)
from .noise_qec import (
    AMPLITUDE_3,
    MEASURE_AND_FLIP,
    PHASE_3,
    UNITARY_TOFFOLI,
    CodeInstance,
    DephasingChannel,
    PauliError,
    apply_dephasing,
    cnot_error_propagation_check,
    dephasing_trajectories,
    ghz_state,
    qec_cycle,
)
from .state import (
    RNG_ALGORITHM,
    StateVector,
    basis_state,
    is_product_across,
    measure,
    pure_density,
    purity,
)
from .numerics import reduced_density_from_state

#: Every physical and algorithmic default in one place.
DEFAULTS = {
    "seed": 0,
    "adder_bits": 3,
    "shor_attempts": 10,
    "eta": 0.1,
    "omega": 1.0,
    "phonon_cutoff": 2,
    "gamma": 0.5,
    "time": 1.0,
    "ghz_qubits": 3,
    "trajectories": 10000,
    "qec_alpha": 0.6,
    "qec_beta": 0.8,
    "garbage_width": 3,
    "garbage_x": 3,
}


class Emitter:
    """Collects stage-tagged facts; prints them per the output mode."""

    def __init__(self, records: bool):
        self.records = records

    def fact(self, stage: str, **kv) -> None:
        pairs = []
        for key, value in kv.items():
            if isinstance(value, float):
                value = f"{value:.12g}"
            pairs.append(f"{key}={value}")
            if self.records:
                print(f"{stage} {pairs[-1]}")
        if not self.records:
            print(f"  [{stage}] " + " ".join(pairs))

    def text(self, message: str) -> None:
        if not self.records:
            print(message)


class _Parser(argparse.ArgumentParser):
    """argparse's default usage-error exit code is 2; this front end
    reserves 2 for runtime failures, so usage errors exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _preamble(emit: Emitter, seed: int) -> None:
    emit.fact("config", seed=seed, rng=RNG_ALGORITHM)


def cmd_epr(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    start = basis_state(2, 0b01)
    emit.text(f"start state {start.ket_string()}")
    final = run_circuit(start, epr_circuit())
    emit.fact("entangle", state=final.ket_string())
    split = is_product_across(final, [0])
    emit.fact(
        "entangle",
        product=split.product,
        schmidt=",".join(f"{c:.6f}" for c in split.coefficients),
    )
    rec = measure(final, [0, 1], args.seed)
    emit.fact(
        "measure",
        outcome=rec.outcome,
        probability=f"{rec.probability:.6f}",
    )
    emit.text(f"measured |{rec.outcome}> with probability {rec.probability:.3f}")
    return 0


def cmd_deutsch(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    f = BINARY_FUNCTIONS[args.function]
    emit.fact("oracle", f0=f.f0, f1=f.f1)
    result = deutsch(f)
    emit.fact(
        "classify",
        classification=result.classification,
        measured=result.outcome_bit,
        probability=f"{result.probability:.6f}",
        oracle_calls=result.oracle_calls,
    )
    emit.text(
        f"{result.classification} (measured {result.outcome_bit}, "
        f"probability {result.probability:.6f})"
    )
    return 0


def _dump_circuit(args, circuit) -> None:
    if args.dump_circuit is not None:
        text = circuit_to_text(circuit)
        if args.dump_circuit == "-":
            sys.stdout.write(text)
        else:
            with open(args.dump_circuit, "w") as fh:
                fh.write(text)


def cmd_add(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    net = build_adder(args.bits)
    _dump_circuit(args, net.circuit)
    state = basis_state(
        net.layout.total_qubits, net.layout.pack(a=args.a, b=args.b)
    )
    out = net.on_state(state)
    values = net.layout.unpack(int(np.argmax(np.abs(out.amps))))
    clean = values["carry"] == 0
    emit.fact("add", a=values["a"], sum=values["b"], carries_clean=clean)
    emit.text(
        f"({values['a']}, {values['b']}), "
        + ("carries clean" if clean else "CARRIES DIRTY")
    )
    return 0


def cmd_sub(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    net = build_adder(args.bits)
    _dump_circuit(args, reverse_circuit(net.circuit))
    a, result = run_reversed_adder(args.bits, args.a, args.b)
    overflow = (result >> args.bits) & 1
    emit.fact("subtract", a=a, result=result, overflow_bit=overflow)
    if overflow:
        emit.text(
            f"({a}, {result}) = 2^{args.bits + 1} - ({args.b} - {a}); "
            f"overflow bit 1 flags {a} < {args.b}"
        )
    else:
        emit.text(f"({a}, {result}) = ({a}, {a} - {args.b}), overflow bit 0")
    return 0


def cmd_modexp(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    width_for_modulus(args.modulus)  # width/operand validation up front
    if not 0 <= args.a < args.modulus:
        raise QdeskError(f"base {args.a} must lie in [0, {args.modulus})")
    acc = 1 % args.modulus
    emit.fact("power", exponent=0, value=acc)
    for i in range(1, args.x + 1):
        acc = modexp_by_repeated_mul(args.a, i, args.modulus)
        emit.fact("power", exponent=i, value=acc)
    emit.text(f"{args.a}^{args.x} mod {args.modulus} = {acc}")
    return 0


def cmd_garbage_demo(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    f_circ = increment_circuit(args.width)
    result = compute_copy_uncompute(f_circ, args.width, args.x)
    work_names = [f"work{i}" for i in range(1, 5)]
    pre = [
        result.register_value(name, result.pre_copy_state)
        for name in work_names
    ]
    emit.fact("compute", **{n: v for n, v in zip(work_names, pre)})
    emit.text(f"before copy, work registers hold {pre}")
    post = [result.register_value(name) for name in work_names]
    emit.fact("uncompute", **{n: v for n, v in zip(work_names, post)})
    emit.fact("uncompute", output=result.register_value("output"))
    emit.text(
        f"after uncompute, work registers hold {post}; "
        f"result register holds {result.register_value('output')}"
    )

    # superposition input: the copied result stays tied to the input only
    width = args.width
    amps = np.zeros(1 << width, dtype=np.complex128)
    amps[1] = amps[3] = 1 / math.sqrt(2)
    sup = compute_copy_uncompute(f_circ, width, StateVector(width, amps))
    garbage = [q for name in work_names for q in sup.registers[name]]
    split = is_product_across(sup.state, garbage)
    emit.fact("superposition", garbage_disentangled=split.product)
    naive = compute_copy_uncompute(
        f_circ, width, StateVector(width, amps), uncompute=False
    )
    kept = list(naive.registers["input"]) + list(naive.registers["output"])
    mixed = purity(reduced_density_from_state(naive.state, kept))
    emit.fact("superposition", skipped_uncompute_purity=f"{mixed:.6f}")
    emit.text(
        "superposed input: garbage disentangled after uncompute; "
        f"skipping uncompute leaves traced-out purity {mixed:.3f}"
    )
    return 0


def cmd_shor(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    m_bits = args.width or default_first_register_bits(args.n)
    emit.fact("config", n=args.n, m_bits=m_bits, m_total=1 << m_bits)
    try:
        run = shor_factor(
            args.n,
            base=args.base,
            m_bits=m_bits,
            seed=args.seed,
            max_attempts=args.attempts,
        )
    except RetriesExhausted as exc:
        for line in exc.run.log:
            emit.fact("shor", log=f"'{line}'")
        emit.text(f"no factors found after {exc.run.attempts} attempts")
        return 2
    for line in run.log:
        emit.fact("shor", log=f"'{line}'")
    emit.fact(
        "result",
        base=run.base,
        y=run.measured_y,
        r=run.inferred_r,
        attempts=run.attempts,
        factors=f"{run.factors[0]}x{run.factors[1]}",
    )
    emit.text(
        f"measured y={run.measured_y}, period r={run.inferred_r}: "
        f"factors {run.factors[0]} x {run.factors[1]}"
    )
    return 0


def cmd_iontrap_cnot(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    system = IonTrapSystem(
        phonon_cutoff=args.cutoff, omega=args.omega, eta=args.eta
    )
    emit.fact(
        "config",
        eta=system.eta,
        omega=system.omega,
        phonon_cutoff=system.phonon_cutoff,
    )
    phase_diag = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)
    got_cz = qubit_subspace_unitary(system, controlled_phase_sequence(system))
    aligned_cz = align_global_phase(got_cz, phase_diag)
    emit.text("controlled phase, achieved diagonal vs target:")
    labels = ["|00>", "|01>", "|10>", "|11>"]
    for k, label in enumerate(labels):
        achieved = aligned_cz[k, k]
        target = phase_diag[k, k].real
        emit.fact(
            "cphase",
            basis=label,
            achieved=f"{achieved.real:+.9f}{achieved.imag:+.9f}i",
            target=f"{target:+.0f}",
            deviation=f"{abs(achieved - target):.3e}",
        )

    ideal_cnot = np.eye(4, dtype=complex)
    ideal_cnot[[2, 3]] = ideal_cnot[[3, 2]]
    got = qubit_subspace_unitary(system, cnot_sequence(system))
    aligned = align_global_phase(got, ideal_cnot)
    dev = float(np.max(np.abs(aligned - ideal_cnot)))
    emit.fact("cnot", max_deviation=f"{dev:.3e}")

    leak = 0.0
    aux = 0.0
    for basis_value in range(4):
        start = IonTrapState.basis(
            system, [basis_value >> 1, basis_value & 1], 0
        )
        final = apply_sequence(start, cnot_sequence(system))
        leak = max(leak, final.top_phonon_population())
        aux = max(
            aux,
            final.level_population(0, 2),
            final.level_population(1, 2),
        )
    emit.fact("cnot", aux_level_population=f"{aux:.3e}")
    emit.fact("cnot", top_phonon_population=f"{leak:.3e}")
    emit.text(
        f"five-pulse CNOT within {dev:.2e} of ideal; "
        f"auxiliary-level population {aux:.2e}"
    )
    return 0


def cmd_dephase(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    channel = DephasingChannel(args.gamma, args.time)
    emit.fact("config", gamma=args.gamma, t=args.time)
    plus = ghz_state(1)
    rho = apply_dephasing(pure_density(plus), channel, [0])
    expected = 0.5 * channel.coherence_factor
    emit.fact(
        "single",
        offdiag=f"{rho.mat[0, 1].real:.10f}",
        expected=f"{expected:.10f}",
    )
    for n in range(1, args.qubits + 1):
        cat = ghz_state(n)
        rho = apply_dephasing(pure_density(cat), channel, range(n))
        off = rho.mat[0, (1 << n) - 1].real
        expected = 0.5 * math.exp(-n * args.gamma * args.time)
        emit.fact(
            "cat",
            n=n,
            offdiag=f"{off:.10f}",
            expected=f"{expected:.10f}",
        )
    if args.trajectories:
        mc = dephasing_trajectories(
            plus, channel, [0], args.trajectories, args.seed
        )
        exact = apply_dephasing(pure_density(plus), channel, [0])
        dev = float(np.max(np.abs(mc.mat - exact.mat)))
        emit.fact(
            "trajectories", count=args.trajectories, deviation=f"{dev:.6f}"
        )
        emit.text(
            f"{args.trajectories} collision trajectories reproduce the "
            f"channel within {dev:.4f}"
        )
    return 0


def cmd_qec(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    kind = AMPLITUDE_3 if args.code == "amplitude" else PHASE_3
    norm = math.hypot(args.alpha, args.beta)
    code = CodeInstance(kind, args.alpha / norm, args.beta / norm)
    error = None
    if args.error != "none":
        error = PauliError(args.error, args.qubit - 1)
    recovery = (
        UNITARY_TOFFOLI if args.recovery == "toffoli" else MEASURE_AND_FLIP
    )
    result = qec_cycle(code, error, recovery, args.seed)
    emit.fact(
        "cycle",
        code=args.code,
        error=args.error,
        qubit=args.qubit,
        recovery=args.recovery,
        syndrome=result.syndrome,
        fidelity=f"{result.fidelity:.10f}",
        corrected=result.corrected,
    )
    emit.text(
        f"syndrome {result.syndrome}, recovered fidelity {result.fidelity:.6f}"
    )

    # fidelity against every single-qubit error the cycle might face
    emit.text("fidelity by error kind and location:")
    emit.text("  kind   qubit1   qubit2   qubit3")
    for kind_name in ("x", "z"):
        row = []
        for qubit in range(3):
            res = qec_cycle(code, PauliError(kind_name, qubit), recovery, args.seed)
            row.append(res.fidelity)
            emit.fact(
                "matrix",
                kind=kind_name,
                qubit=qubit + 1,
                fidelity=f"{res.fidelity:.10f}",
            )
        emit.text(
            f"  {kind_name}      " + "  ".join(f"{v:7.4f}" for v in row)
        )
    if not result.corrected:
        emit.text("requested error was NOT corrected by this code")
        return 2
    return 0


def cmd_error_prop(args, emit: Emitter) -> int:
    _preamble(emit, args.seed)
    ok = cnot_error_propagation_check(seed=args.seed)
    emit.fact("identity", holds=ok)
    emit.text(
        "bit flip on the control before a CNOT "
        + ("equals" if ok else "DOES NOT equal")
        + " the CNOT followed by flips on both qubits"
    )
    return 0 if ok else 2


def build_parser() -> _Parser:
    parser = _Parser(prog="qdesk", description=__doc__)
    parser.add_argument(
        "--version", action="version", version=f"qdesk {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=DEFAULTS["seed"],
                       help="RNG seed (echoed in output)")
        p.add_argument("--records", action="store_true",
                       help="machine-readable key=value output")

    p = sub.add_parser("epr", help="create and measure an entangled pair")
    common(p)
    p.set_defaults(handler=cmd_epr)

    p = sub.add_parser("deutsch", help="classify a one-bit function with one query")
    p.add_argument("function", choices=sorted(BINARY_FUNCTIONS))
    common(p)
    p.set_defaults(handler=cmd_deutsch)

    p = sub.add_parser("add", help="reversible addition network")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--bits", type=int, default=DEFAULTS["adder_bits"])
    p.add_argument("--dump-circuit", metavar="FILE",
                   help="write the gate list ('-' for stdout)")
    common(p)
    p.set_defaults(handler=cmd_add)

    p = sub.add_parser("sub", help="subtraction by the reversed adder")
    p.add_argument("a", type=int)
    p.add_argument("b", type=int)
    p.add_argument("--bits", type=int, default=DEFAULTS["adder_bits"])
    p.add_argument("--dump-circuit", metavar="FILE")
    common(p)
    p.set_defaults(handler=cmd_sub)

    p = sub.add_parser("modexp", help="modular power by repeated addition")
    p.add_argument("a", type=int)
    p.add_argument("x", type=int)
    p.add_argument("modulus", type=int)
    common(p)
    p.set_defaults(handler=cmd_modexp)

    p = sub.add_parser("garbage-demo",
                       help="compute-copy-uncompute a four-fold iterate")
    p.add_argument("--width", type=int, default=DEFAULTS["garbage_width"])
    p.add_argument("--x", type=int, default=DEFAULTS["garbage_x"])
    common(p)
    p.set_defaults(handler=cmd_garbage_demo)

    p = sub.add_parser("shor", help="factor an odd composite by period finding")
    p.add_argument("n", type=int)
    p.add_argument("--base", type=int, default=None,
                   help="fixed coprime base (default: random per attempt)")
    p.add_argument("--width", type=int, default=None,
                   help="first-register bits (default: 2*log2(N)+3)")
    p.add_argument("--attempts", type=int, default=DEFAULTS["shor_attempts"])
    common(p)
    p.set_defaults(handler=cmd_shor)

    p = sub.add_parser("iontrap-cnot",
                       help="synthesize CNOT from five laser pulses")
    p.add_argument("--eta", type=float, default=DEFAULTS["eta"])
    p.add_argument("--omega", type=float, default=DEFAULTS["omega"])
    p.add_argument("--cutoff", type=int, default=DEFAULTS["phonon_cutoff"])
    common(p)
    p.set_defaults(handler=cmd_iontrap_cnot)

    p = sub.add_parser("dephase", help="collision dephasing of cat states")
    p.add_argument("--qubits", type=int, default=DEFAULTS["ghz_qubits"])
    p.add_argument("--gamma", type=float, default=DEFAULTS["gamma"])
    p.add_argument("--time", type=float, default=DEFAULTS["time"])
    p.add_argument("--trajectories", type=int, default=0,
                   help="also run a Monte Carlo cross-check")
    common(p)
    p.set_defaults(handler=cmd_dephase)

    p = sub.add_parser("qec", help="three-qubit error correction cycle")
    p.add_argument("--code", choices=("amplitude", "phase"),
                   default="amplitude")
    p.add_argument("--error", choices=("none", "x", "y", "z"), default="x")
    p.add_argument("--qubit", type=int, choices=(1, 2, 3), default=1,
                   help="error location (1 = data qubit)")
    p.add_argument("--recovery", choices=("toffoli", "measure"),
                   default="toffoli")
    p.add_argument("--alpha", type=float, default=DEFAULTS["qec_alpha"])
    p.add_argument("--beta", type=float, default=DEFAULTS["qec_beta"])
    common(p)
    p.set_defaults(handler=cmd_qec)

    p = sub.add_parser("error-prop",
                       help="error multiplication through a CNOT")
    common(p)
    p.set_defaults(handler=cmd_error_prop)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    emit = Emitter(records=args.records)
    try:
        return args.handler(args, emit)
    except (RetriesExhausted, UncorrectableError) as exc:
        print(f"qdesk: {exc}", file=sys.stderr)
        return 2
    except QdeskError as exc:
        print(f"qdesk: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
