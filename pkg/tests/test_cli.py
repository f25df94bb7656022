import pytest

from qdesk.cli import main
from qdesk.gates import circuit_from_text


def run_cli(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestSubcommands:
    def test_shor_factors_fifteen(self, capsys):
        code, out = run_cli(capsys, "shor", "15", "--base", "2", "--seed", "7")
        assert code == 0
        assert out.strip().splitlines()[-1].endswith("factors 3 x 5")

    def test_deutsch_text(self, capsys):
        code, out = run_cli(capsys, "deutsch", "const0")
        assert code == 0
        assert "CONSTANT (measured 0, probability 1.000000)" in out

    def test_add(self, capsys):
        code, out = run_cli(capsys, "add", "3", "4", "--bits", "3")
        assert code == 0
        assert "(3, 7), carries clean" in out

    def test_sub_overflow(self, capsys):
        code, out = run_cli(capsys, "sub", "2", "5", "--bits", "3")
        assert code == 0
        assert "overflow_bit=1" in out

    def test_modexp(self, capsys):
        code, out = run_cli(capsys, "modexp", "2", "4", "15")
        assert code == 0
        assert "2^4 mod 15 = 1" in out

    def test_epr(self, capsys):
        code, out = run_cli(capsys, "epr", "--seed", "3")
        assert code == 0
        assert "0.707107|01>" in out and "0.707107|10>" in out

    def test_garbage_demo(self, capsys):
        code, out = run_cli(capsys, "garbage-demo")
        assert code == 0
        assert "[4, 5, 6, 7]" in out
        assert "result register holds 7" in out

    def test_iontrap(self, capsys):
        code, out = run_cli(capsys, "iontrap-cnot")
        assert code == 0
        assert "five-pulse CNOT" in out

    def test_dephase(self, capsys):
        code, out = run_cli(capsys, "dephase", "--qubits", "2")
        assert code == 0
        assert "offdiag" in out

    def test_qec_success(self, capsys):
        code, out = run_cli(capsys, "qec", "--error", "x", "--qubit", "2")
        assert code == 0
        assert "syndrome 10" in out

    def test_error_prop(self, capsys):
        code, out = run_cli(capsys, "error-prop")
        assert code == 0


class TestExitCodes:
    def test_usage_error_is_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["shor"])  # missing N
        assert exc.value.code == 1

    def test_unknown_command_is_one(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["teleport"])
        assert exc.value.code == 1

    def test_invalid_operand_is_one(self, capsys):
        code = main(["add", "9", "1", "--bits", "3"])
        assert code == 1

    def test_uncorrectable_is_two(self, capsys):
        code = main(["qec", "--code", "amplitude", "--error", "z"])
        assert code == 2

    def test_retries_exhausted_is_two(self, capsys):
        # seed 3's single attempt measures an uninformative y, and a
        # 1-attempt budget leaves nothing to retry with
        code = main(
            ["shor", "15", "--base", "2", "--seed", "3", "--attempts", "1"]
        )
        assert code == 2


class TestRecordsMode:
    def test_byte_identical_reruns(self, capsys):
        args = ["shor", "15", "--base", "2", "--seed", "11", "--records"]
        code_a = main(list(args))
        out_a = capsys.readouterr().out
        code_b = main(list(args))
        out_b = capsys.readouterr().out
        assert code_a == code_b == 0
        assert out_a == out_b

    def test_records_are_parseable(self, capsys):
        code, out = run_cli(capsys, "qec", "--records", "--seed", "5")
        assert code == 0
        for line in out.strip().splitlines():
            stage, _, rest = line.partition(" ")
            assert stage and "=" in rest

    def test_seed_echoed(self, capsys):
        code, out = run_cli(capsys, "dephase", "--records", "--seed", "17")
        assert "config seed=17" in out
        assert "config rng=numpy-pcg64" in out


class TestCircuitExport:
    def test_dumped_adder_parses_and_matches(self, capsys, tmp_path):
        path = tmp_path / "adder.txt"
        code, _ = run_cli(
            capsys, "add", "2", "3", "--bits", "2", "--dump-circuit", str(path)
        )
        assert code == 0
        parsed = circuit_from_text(path.read_text())
        from qdesk.arithmetic import build_adder

        net = build_adder(2)
        assert parsed.n_qubits == net.layout.total_qubits
        assert [g.kind for g in parsed.ops] == [g.kind for g in net.circuit.ops]
