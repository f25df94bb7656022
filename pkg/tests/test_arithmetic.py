import math

import numpy as np
import pytest

from qdesk.arithmetic import (
    ArithmeticNetwork,
    adder_layout,
    build_adder,
    build_carry_block,
    build_modadd,
    build_sum_block,
    compute_copy_uncompute,
    copy_function_circuit,
    increment_circuit,
    modadd_layout,
    modexp_by_repeated_mul,
    modmul_by_repeated_add,
    run_adder,
    run_modadd,
    run_reversed_adder,
    width_for_modulus,
)
from qdesk.errors import (
    IndexOutOfRange,
    InvalidOperand,
    ModulusTooLarge,
    WidthOutOfRange,
)
from qdesk.gates import apply_to_basis_index, reverse_circuit, run_circuit
from qdesk.numerics import reduced_density_from_state
from qdesk.state import StateVector, basis_state, is_product_across, purity

from oracles import classical_carry, classical_sum


class TestCarryAndSumBlocks:
    def test_carry_truth_table_exhaustive(self):
        layout = adder_layout(2)
        block = build_carry_block(layout, 0)
        c0 = layout.qubits("carry")[0]
        a0 = layout.qubits("a")[0]
        b0 = layout.qubits("b")[0]
        c1 = layout.qubits("carry")[1]
        for bits in range(16):
            c, a, b, co = bits & 1, (bits >> 1) & 1, (bits >> 2) & 1, (bits >> 3) & 1
            index = (c << c0) | (a << a0) | (b << b0) | (co << c1)
            out = apply_to_basis_index(block, index)
            ec, ea, eb, eco = classical_carry(c, a, b, co)
            assert (out >> c0) & 1 == ec
            assert (out >> a0) & 1 == ea
            assert (out >> b0) & 1 == eb
            assert (out >> c1) & 1 == eco

    def test_carry_spec_row(self):
        layout = adder_layout(1)
        block = build_carry_block(layout, 0)
        a0 = layout.qubits("a")[0]
        b0 = layout.qubits("b")[0]
        co = layout.qubits("b")[1]  # top-bit carry lands in reg_b
        out = apply_to_basis_index(block, (1 << a0) | (1 << b0))
        assert (out >> co) & 1 == 1
        assert (out >> b0) & 1 == 0

    def test_sum_truth_table_exhaustive(self):
        layout = adder_layout(1)
        block = build_sum_block(layout, 0)
        c0 = layout.qubits("carry")[0]
        a0 = layout.qubits("a")[0]
        b0 = layout.qubits("b")[0]
        for bits in range(8):
            c, a, b = bits & 1, (bits >> 1) & 1, (bits >> 2) & 1
            index = (c << c0) | (a << a0) | (b << b0)
            out = apply_to_basis_index(block, index)
            _, _, eb = classical_sum(c, a, b)
            assert (out >> b0) & 1 == eb
        # spec row: c=1, a=1, b=0 -> b=0
        out = apply_to_basis_index(block, (1 << c0) | (1 << a0))
        assert (out >> b0) & 1 == 0

    def test_carry_self_reverse(self):
        layout = adder_layout(2)
        block = build_carry_block(layout, 1)
        round_trip = block.then(reverse_circuit(block))
        for bits in range(1 << layout.total_qubits):
            if bits >= 1 << 8:
                break
            assert apply_to_basis_index(round_trip, bits) == bits

    def test_position_bounds(self):
        layout = adder_layout(2)
        with pytest.raises(IndexOutOfRange):
            build_carry_block(layout, 2)
        with pytest.raises(IndexOutOfRange):
            build_sum_block(layout, -1)


class TestAdder:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exhaustive_statevector(self, n):
        net = build_adder(n)
        for a in range(1 << n):
            for b in range(1 << n):
                state = basis_state(net.layout.total_qubits, net.layout.pack(a=a, b=b))
                out = net.on_state(state)
                idx = int(np.argmax(np.abs(out.amps)))
                assert abs(out.amps[idx] - 1.0) < 1e-10
                values = net.layout.unpack(idx)
                assert values == {"a": a, "b": a + b, "carry": 0}

    def test_exhaustive_bit_trace_n4(self):
        net = build_adder(4)
        for a in range(16):
            for b in range(16):
                values = net.on_basis(a=a, b=b)
                assert values == {"a": a, "b": a + b, "carry": 0}

    def test_trivial_zero(self):
        assert run_adder(1, 0, 0) == (0, 0)

    def test_spec_example(self):
        assert run_adder(3, 3, 4) == (3, 7)

    def test_superposition_input(self):
        net = build_adder(3)
        layout = net.layout
        amps = np.zeros(1 << layout.total_qubits, dtype=complex)
        amps[layout.pack(a=1, b=3)] = 1 / math.sqrt(2)
        amps[layout.pack(a=2, b=3)] = 1 / math.sqrt(2)
        out = net.on_state(StateVector(layout.total_qubits, amps))
        expected = np.zeros_like(amps)
        expected[layout.pack(a=1, b=4)] = 1 / math.sqrt(2)
        expected[layout.pack(a=2, b=5)] = 1 / math.sqrt(2)
        assert np.allclose(out.amps, expected, atol=1e-12)
        # carries disentangled and zero
        verdict = is_product_across(out, layout.qubits("carry"))
        assert verdict.product

    def test_is_basis_permutation(self):
        net = build_adder(2)
        images = {
            apply_to_basis_index(net.circuit, v)
            for v in range(1 << net.layout.total_qubits)
        }
        assert len(images) == 1 << net.layout.total_qubits

    def test_forward_then_reverse_is_identity(self):
        net = build_adder(3)
        round_trip = net.circuit.then(reverse_circuit(net.circuit))
        for a in range(8):
            for b in range(8):
                index = net.layout.pack(a=a, b=b)
                assert apply_to_basis_index(round_trip, index) == index

    def test_width_bounds(self):
        with pytest.raises(WidthOutOfRange):
            build_adder(0)
        with pytest.raises(WidthOutOfRange):
            build_adder(7)


class TestReversedAdder:
    def test_subtract(self):
        assert run_reversed_adder(3, 5, 2) == (5, 3)

    def test_wraparound_with_overflow_bit(self):
        a, result = run_reversed_adder(3, 2, 5)
        assert result == 2**4 - 3 == 13
        assert (result >> 3) & 1 == 1

    def test_equal_operands(self):
        a, result = run_reversed_adder(2, 3, 3)
        assert result == 0

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_exhaustive_against_formula(self, n):
        for a in range(1 << n):
            for b in range(1 << n):
                _, result = run_reversed_adder(n, a, b)
                if a >= b:
                    assert result == a - b
                    assert (result >> n) & 1 == 0
                else:
                    assert result == 2 ** (n + 1) - (b - a)
                    assert (result >> n) & 1 == 1


class TestModularAdder:
    @pytest.mark.parametrize("modulus", [3, 5, 7, 15])
    def test_exhaustive_bit_trace(self, modulus):
        n = width_for_modulus(modulus)
        net = build_modadd(n, modulus)
        for a in range(modulus):
            for b in range(modulus):
                values = net.on_basis(a=a, b=b)
                assert values["b"] == (a + b) % modulus
                assert values["a"] == a
                assert values["carry"] == 0
                assert values["modulus"] == 0
                assert values["flag"] == 0

    def test_statevector_matches_bit_trace(self):
        # dual-route check: the full quantum simulation agrees with the
        # index-tracing shortcut on the same circuit
        net = build_modadd(3, 5)
        for a in range(5):
            for b in range(5):
                state = basis_state(net.layout.total_qubits, net.layout.pack(a=a, b=b))
                out = net.on_state(state)
                idx = int(np.argmax(np.abs(out.amps)))
                assert abs(out.amps[idx] - 1.0) < 1e-10
                assert idx == apply_to_basis_index(
                    net.circuit, net.layout.pack(a=a, b=b)
                )

    def test_statevector_sample_n15(self):
        net = build_modadd(4, 15)
        rng = np.random.default_rng(0)
        for _ in range(4):
            a, b = int(rng.integers(15)), int(rng.integers(15))
            state = basis_state(net.layout.total_qubits, net.layout.pack(a=a, b=b))
            out = net.on_state(state)
            values = net.layout.unpack(int(np.argmax(np.abs(out.amps))))
            assert values["b"] == (a + b) % 15
            assert values["carry"] == values["modulus"] == values["flag"] == 0

    def test_spec_example(self):
        assert run_modadd(9, 8, 15) == 2

    def test_superposition_through_network(self):
        net = build_modadd(2, 3)
        layout = net.layout
        amps = np.zeros(1 << layout.total_qubits, dtype=complex)
        amps[layout.pack(a=1, b=1)] = 1 / math.sqrt(2)
        amps[layout.pack(a=1, b=2)] = 1j / math.sqrt(2)
        out = net.on_state(StateVector(layout.total_qubits, amps))
        expected = np.zeros_like(amps)
        expected[layout.pack(a=1, b=2)] = 1 / math.sqrt(2)
        expected[layout.pack(a=1, b=0)] = 1j / math.sqrt(2)
        assert np.allclose(out.amps, expected, atol=1e-12)

    def test_bijection_on_operand_range(self):
        modulus = 5
        net = build_modadd(3, modulus)
        for a in range(modulus):
            images = {net.on_basis(a=a, b=b)["b"] for b in range(modulus)}
            assert images == set(range(modulus))

    def test_modulus_cap(self):
        with pytest.raises(ModulusTooLarge):
            width_for_modulus(64)

    def test_operand_validation(self):
        with pytest.raises(InvalidOperand):
            run_modadd(5, 1, 5)
        with pytest.raises(InvalidOperand):
            build_modadd(1, 5)


class TestModMulModExp:
    @pytest.mark.parametrize("modulus", [3, 5, 7])
    def test_modmul_exhaustive(self, modulus):
        for a in range(modulus):
            for b in range(modulus):
                assert modmul_by_repeated_add(a, b, modulus) == (a * b) % modulus

    def test_modmul_spec_example(self):
        assert modmul_by_repeated_add(2, 4, 15) == 8

    def test_modexp_sequence_mod_15(self):
        assert [modexp_by_repeated_mul(2, i, 15) for i in range(8)] == [
            1, 2, 4, 8, 1, 2, 4, 8,
        ]

    def test_modexp_spec_example(self):
        assert modexp_by_repeated_mul(2, 4, 15) == 1

    @pytest.mark.parametrize("modulus", [3, 7])
    def test_modexp_matches_pow(self, modulus):
        for a in range(modulus):
            for exp in range(6):
                assert modexp_by_repeated_mul(a, exp, modulus) == pow(a, exp, modulus)


class TestComputeCopyUncompute:
    def test_increment_pipeline_registers(self):
        result = compute_copy_uncompute(increment_circuit(3), 3, 3)
        pre = [
            result.register_value(f"work{i}", result.pre_copy_state)
            for i in (1, 2, 3)
        ]
        assert pre == [4, 5, 6]
        assert result.register_value("work4", result.pre_copy_state) == 7
        assert [result.register_value(f"work{i}") for i in (1, 2, 3, 4)] == [0] * 4
        assert result.register_value("output") == 7
        assert result.register_value("input") == 3

    @pytest.mark.parametrize("x", range(8))
    def test_increment_pipeline_all_inputs(self, x):
        result = compute_copy_uncompute(increment_circuit(3), 3, x)
        assert result.register_value("output") == (x + 4) % 8
        for i in (1, 2, 3, 4):
            assert result.register_value(f"work{i}") == 0

    def test_identity_function(self):
        result = compute_copy_uncompute(copy_function_circuit(2), 2, 3)
        assert result.register_value("output") == 3
        assert result.register_value("input") == 3

    def test_superposition_disentangles_garbage(self):
        width = 3
        amps = np.zeros(1 << width, dtype=complex)
        amps[1] = amps[3] = 1 / math.sqrt(2)
        result = compute_copy_uncompute(
            increment_circuit(width), width, StateVector(width, amps)
        )
        garbage = [
            q for name in ("work1", "work2", "work3", "work4")
            for q in result.registers[name]
        ]
        assert is_product_across(result.state, garbage).product
        # result register correlated with the input only
        keep = list(result.registers["input"]) + list(result.registers["output"])
        rho = reduced_density_from_state(result.state, keep)
        assert purity(rho) == pytest.approx(1.0, abs=1e-10)

    def test_skipping_uncompute_leaves_mixture(self):
        width = 3
        amps = np.zeros(1 << width, dtype=complex)
        amps[1] = amps[3] = 1 / math.sqrt(2)
        naive = compute_copy_uncompute(
            increment_circuit(width), width, StateVector(width, amps),
            uncompute=False,
        )
        # tracing out the garbage keeps input + output (the purity of both
        # sides of a pure-state cut is equal)
        kept = list(naive.registers["input"]) + list(naive.registers["output"])
        assert purity(reduced_density_from_state(naive.state, kept)) < 1 - 1e-6
        full = compute_copy_uncompute(
            increment_circuit(width), width, StateVector(width, amps)
        )
        assert purity(
            reduced_density_from_state(full.state, kept)
        ) == pytest.approx(1.0, abs=1e-10)

    def test_width_validation(self):
        with pytest.raises(WidthOutOfRange):
            compute_copy_uncompute(increment_circuit(2), 3, 0)
        with pytest.raises(WidthOutOfRange):
            increment_circuit(4)


class TestLayout:
    def test_disjoint_registers_enforced(self):
        with pytest.raises(IndexOutOfRange):
            modadd_layout(2).registers  # valid
            from qdesk.arithmetic import RegisterLayout

            RegisterLayout({"a": (0, 1), "b": (1, 2)}, total_qubits=3)

    def test_pack_unpack_round_trip(self):
        layout = modadd_layout(3)
        index = layout.pack(a=5, b=9, flag=1)
        values = layout.unpack(index)
        assert values["a"] == 5 and values["b"] == 9 and values["flag"] == 1
