import math

import numpy as np
import pytest

from qdesk.errors import InvalidPulse, PhononLeakage, ValueOutOfRange
from qdesk.iontrap import (
    ANTINODE,
    NODE,
    IonTrapState,
    IonTrapSystem,
    Pulse,
    align_global_phase,
    apply_pulse,
    apply_sequence,
    build_hamiltonian,
    carrier_pulse_duration,
    cnot_sequence,
    controlled_phase_sequence,
    node_pulse_duration,
    qubit_subspace_unitary,
)

CNOT_MATRIX = np.array(
    [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex
)
CZ_MATRIX = np.diag([1.0, 1.0, 1.0, -1.0]).astype(complex)


def ideal_cnot_on_levels(c: int, t: int) -> tuple[int, int]:
    return c, t ^ c


class TestHamiltonians:
    def test_node_coupling_elements(self):
        system = IonTrapSystem(n_ions=1, phonon_cutoff=1)
        ham = build_hamiltonian(system, Pulse(0, NODE, (0, 1), 0.0, 1.0))
        # basis (level, phonon): 00, 01, 10, 11 -> indices 0..3
        expected = system.eta * system.omega / 2.0
        up = system.index([1], 0)
        down = system.index([0], 1)
        assert ham[up, down] == pytest.approx(expected)
        assert ham[down, up] == pytest.approx(expected)
        mask = np.ones_like(ham, dtype=bool)
        mask[up, down] = mask[down, up] = False
        assert np.max(np.abs(ham[mask])) == 0.0

    def test_node_bosonic_factor(self):
        system = IonTrapSystem(n_ions=1, phonon_cutoff=3)
        ham = build_hamiltonian(system, Pulse(0, NODE, (0, 1), 0.0, 1.0))
        g = system.eta * system.omega / 2.0
        for n in range(3):
            up = system.index([1], n)
            down = system.index([0], n + 1)
            assert ham[up, down] == pytest.approx(g * math.sqrt(n + 1))

    def test_antinode_block_diagonal_in_phonon(self):
        system = IonTrapSystem()
        ham = build_hamiltonian(system, Pulse(0, ANTINODE, (0, 1), 0.3, 1.0))
        dim_ph = system.phonon_dim
        for row in range(system.dim):
            for col in range(system.dim):
                if row % dim_ph != col % dim_ph:
                    assert ham[row, col] == 0.0

    def test_hermitian_by_construction(self):
        system = IonTrapSystem()
        for pulse in (
            Pulse(0, NODE, (0, 1), 0.7, 1.0),
            Pulse(1, NODE, (0, 2), -1.1, 1.0),
            Pulse(1, ANTINODE, (0, 1), 0.4, 1.0),
        ):
            ham = build_hamiltonian(system, pulse)
            assert np.array_equal(ham, ham.conj().T)

    def test_spectator_ion_untouched(self):
        system = IonTrapSystem()
        ham = build_hamiltonian(system, Pulse(0, NODE, (0, 1), 0.0, 1.0))
        # ion 1 in |2> never couples: matrix elements between different
        # ion-1 levels vanish
        for l1 in range(3):
            for l1p in range(3):
                if l1 == l1p:
                    continue
                row = system.index([1, l1], 0)
                col = system.index([0, l1p], 1)
                assert ham[row, col] == 0.0


class TestPulses:
    def test_pi_pulse_moves_excitation_to_phonon(self):
        system = IonTrapSystem()
        t_pi = node_pulse_duration(system, math.pi)
        out = apply_pulse(
            IonTrapState.basis(system, [1, 0], 0),
            Pulse(0, NODE, (0, 1), 0.0, t_pi),
        )
        amp = out.amps[system.index([0, 0], 1)]
        assert abs(amp - (-1j)) < 1e-9

    def test_pi_pulse_ground_control_idle(self):
        system = IonTrapSystem()
        t_pi = node_pulse_duration(system, math.pi)
        out = apply_pulse(
            IonTrapState.basis(system, [0, 1], 0),
            Pulse(0, NODE, (0, 1), 0.0, t_pi),
        )
        assert abs(out.amps[system.index([0, 1], 0)] - 1.0) < 1e-12

    def test_two_pi_auxiliary_pulse_flips_phase_iff_phonon(self):
        system = IonTrapSystem()
        t_2pi = node_pulse_duration(system, 2 * math.pi)
        pulse = Pulse(1, NODE, (0, 2), 0.0, t_2pi)
        excited = apply_pulse(IonTrapState.basis(system, [0, 0], 1), pulse)
        assert abs(excited.amps[system.index([0, 0], 1)] + 1.0) < 1e-9
        ground = apply_pulse(IonTrapState.basis(system, [0, 0], 0), pulse)
        assert abs(ground.amps[system.index([0, 0], 0)] - 1.0) < 1e-12

    def test_norm_preserved(self):
        system = IonTrapSystem()
        rng = np.random.default_rng(31)
        amps = rng.normal(size=system.dim) + 1j * rng.normal(size=system.dim)
        state = IonTrapState(system, amps / np.linalg.norm(amps))
        out = apply_pulse(
            state,
            Pulse(0, ANTINODE, (0, 1), 0.2, 0.7),
            check_leakage=False,  # random input fills the whole ladder
        )
        assert abs(np.linalg.norm(out.amps) - 1.0) < 1e-10

    def test_leakage_detection(self):
        # a long sideband drive from the top rung spills past the cutoff
        system = IonTrapSystem(phonon_cutoff=1)
        t_pi = node_pulse_duration(system, math.pi)
        with pytest.raises(PhononLeakage):
            apply_pulse(
                IonTrapState.basis(system, [1, 0], 1),
                Pulse(0, NODE, (0, 1), 0.0, t_pi),
            )

    def test_pulse_validation(self):
        with pytest.raises(InvalidPulse):
            Pulse(0, ANTINODE, (0, 2), 0.0, 1.0)
        with pytest.raises(InvalidPulse):
            Pulse(0, NODE, (0, 1), 0.0, -1.0)
        with pytest.raises(InvalidPulse):
            Pulse(0, "standing", (0, 1), 0.0, 1.0)

    def test_eta_warning(self):
        with pytest.warns(UserWarning):
            IonTrapSystem(eta=0.5)


class TestControlledPhase:
    def test_truth_table(self):
        system = IonTrapSystem()
        got = qubit_subspace_unitary(system, controlled_phase_sequence(system))
        aligned = align_global_phase(got, CZ_MATRIX)
        assert np.max(np.abs(aligned - CZ_MATRIX)) < 1e-6

    def test_phonon_returns_to_ground(self):
        system = IonTrapSystem()
        final = apply_sequence(
            IonTrapState.basis(system, [1, 0], 0),
            controlled_phase_sequence(system),
        )
        assert 1.0 - final.phonon_population(0) < 1e-9

    def test_linearity_on_random_superpositions(self):
        system = IonTrapSystem()
        seq = controlled_phase_sequence(system)
        rng = np.random.default_rng(32)
        for _ in range(100):
            coeffs = rng.normal(size=4) + 1j * rng.normal(size=4)
            coeffs /= np.linalg.norm(coeffs)
            amps = np.zeros(system.dim, dtype=complex)
            for k in range(4):
                amps[system.index([k >> 1, k & 1], 0)] = coeffs[k]
            final = apply_sequence(IonTrapState(system, amps), seq)
            expected = coeffs * np.array([1, 1, 1, -1])
            got = np.array(
                [final.amps[system.index([k >> 1, k & 1], 0)] for k in range(4)]
            )
            assert np.max(np.abs(got - expected)) < 1e-6


class TestCnotSequence:
    def test_matches_ideal_cnot(self):
        system = IonTrapSystem()
        got = qubit_subspace_unitary(system, cnot_sequence(system))
        aligned = align_global_phase(got, CNOT_MATRIX)
        assert np.max(np.abs(aligned - CNOT_MATRIX)) < 1e-6

    def test_basis_rows(self):
        system = IonTrapSystem()
        seq = cnot_sequence(system)
        for c, t in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            final = apply_sequence(IonTrapState.basis(system, [c, t], 0), seq)
            ec, et = ideal_cnot_on_levels(c, t)
            assert abs(final.amps[system.index([ec, et], 0)]) == pytest.approx(
                1.0, abs=1e-9
            )

    def test_auxiliary_level_stays_empty(self):
        system = IonTrapSystem()
        seq = cnot_sequence(system)
        for c, t in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            final = apply_sequence(IonTrapState.basis(system, [c, t], 0), seq)
            assert final.level_population(0, 2) < 1e-9
            assert final.level_population(1, 2) < 1e-9

    def test_stable_under_cutoff_increase(self):
        lo = IonTrapSystem(phonon_cutoff=2)
        hi = IonTrapSystem(phonon_cutoff=4)
        u_lo = qubit_subspace_unitary(lo, cnot_sequence(lo))
        u_hi = qubit_subspace_unitary(hi, cnot_sequence(hi))
        assert np.max(np.abs(u_lo - u_hi)) < 1e-8

    def test_hot_phonon_breaks_gate(self):
        # without ground-state cooling the sideband Rabi angles are wrong:
        # at least one basis input must drop below 0.99 fidelity
        system = IonTrapSystem(phonon_cutoff=4)
        seq = cnot_sequence(system)
        worst = 1.0
        for c, t in [(0, 0), (0, 1), (1, 0), (1, 1)]:
            final = apply_sequence(
                IonTrapState.basis(system, [c, t], 1), seq, check_leakage=False
            )
            ec, et = ideal_cnot_on_levels(c, t)
            fidelity = abs(final.amps[system.index([ec, et], 1)]) ** 2
            worst = min(worst, fidelity)
        assert worst < 0.99

    def test_carrier_durations(self):
        system = IonTrapSystem(omega=2.0)
        assert carrier_pulse_duration(system, math.pi / 2) == pytest.approx(
            math.pi / 4
        )
        seq = cnot_sequence(system)
        assert seq[0].duration == pytest.approx(math.pi / 4)
        assert seq[-1].duration == pytest.approx(3 * math.pi / 4)

    def test_node_duration_scales_with_ion_count(self):
        few = IonTrapSystem(n_ions=2)
        many = IonTrapSystem(n_ions=8)
        ratio = node_pulse_duration(many, math.pi) / node_pulse_duration(
            few, math.pi
        )
        assert ratio == pytest.approx(2.0)


class TestSystemValidation:
    def test_dimension(self):
        assert IonTrapSystem().dim == 27
        assert IonTrapSystem(n_ions=3, phonon_cutoff=1).dim == 54

    def test_bad_parameters(self):
        with pytest.raises(ValueOutOfRange):
            IonTrapSystem(n_ions=0)
        with pytest.raises(ValueOutOfRange):
            IonTrapSystem(eta=-0.1)
