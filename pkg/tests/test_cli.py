import io
import json
import subprocess
import sys

import numpy as np
import pytest

from qndsim.cli import run
from qndsim.errors import ModelFileError, ValidationError
from qndsim.modelfile import dump_model, emit_report, load_model, parse_model, parse_report
from qndsim import conditions as cd
from qndsim.models import cnot_readout

from conftest import FIXTURES

# (file, extra arguments, expected exit code)
CONTRACT = [
    ("cnot_ideal.json", ["check"], 0),
    ("cnot_ideal.json", ["estimate"], 0),
    ("cnot_qnd.json", ["check", "--condition", "strong"], 0),
    ("cnot_fk_only.json", ["check"], 0),
    ("cnot_noisy.json", ["estimate"], 1),
    ("cnot_noisy_eps03.json", ["estimate"], 0),
    ("swap.json", ["check", "--condition", "weak"], 1),
    ("swap.json", ["check"], 1),
    ("identity_matrix.json", ["check"], 0),
    ("identity_matrix.json", ["estimate"], 1),
    ("hamiltonian_zero.json", ["check"], 0),
    ("restricted_range.json", ["check", "--condition", "weak"], 0),
    ("restricted_range.json", ["check"], 1),
    ("probe_flip.json", ["check", "--condition", "moderate"], 0),
    ("probe_flip.json", ["check", "--condition", "strong"], 1),
    ("vaidman_weak_pass.json", ["check", "--condition", "weak"], 0),
    ("vaidman_pass_moderate_fail.json", ["check", "--condition", "moderate"], 1),
    ("cnot_ideal.json", ["check", "--condition", "bogus"], 2),
    ("cnot_qnd.json", ["estimate"], 2),
    ("bad_nonunitary.json", ["check"], 2),
    ("bad_syntax.json", ["check"], 2),
    ("bad_two_kinds.json", ["check"], 2),
    ("bad_state_norm.json", ["check"], 2),
    ("bad_table_length.json", ["estimate"], 2),
    ("bad_unknown_builtin.json", ["check"], 2),
    ("bad_dims.json", ["check"], 2),
    ("does_not_exist.json", ["check"], 2),
    ("cnot_ideal.json", ["simulate", "-n", "0"], 2),
    ("cnot_ideal.json", ["search", "--target", "nowhere"], 2),
]


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, doc = run([str(a) for a in argv], out=out, err=err)
    return code, doc, out.getvalue(), err.getvalue()


@pytest.mark.parametrize("fname, args, expected", CONTRACT,
                         ids=[f"{f}-{'-'.join(a)}" for f, a, _ in CONTRACT])
def test_exit_code_contract(fname, args, expected):
    code, _, _, _ = invoke(args[0], FIXTURES / fname, *args[1:])
    assert code == expected


def test_nonunitary_names_field():
    with pytest.raises(ValidationError) as exc:
        parse_model(FIXTURES / "bad_nonunitary.json")
    assert exc.value.field == "interaction.matrix"
    _, _, _, err = invoke("check", FIXTURES / "bad_nonunitary.json")
    assert "interaction.matrix" in err


def test_parse_builtin_and_hamiltonian():
    lm = parse_model(FIXTURES / "cnot_ideal.json")
    assert cd.strong_violation(lm.model.u, 2).violation == 0.0
    lm = parse_model(FIXTURES / "hamiltonian_zero.json")
    np.testing.assert_allclose(lm.model.u, np.eye(4))


def test_malformed_documents():
    with pytest.raises(ModelFileError):
        load_model([1, 2])
    with pytest.raises(ModelFileError):
        load_model({"interaction": {"kind": "matrix"}})


def test_dump_then_load_is_identity():
    m = cnot_readout(3, [0.6, 0, 0.8], [0, 1, 0]).model
    again = load_model(json.loads(json.dumps(dump_model(m)))).model
    np.testing.assert_array_equal(again.u, m.u)
    np.testing.assert_array_equal(again.a, m.a)
    np.testing.assert_array_equal(again.b, m.b)


def test_flat_matrix_accepted():
    doc = dump_model(cnot_readout(2).model)
    doc["interaction"]["matrix"] = [z for row in doc["interaction"]["matrix"] for z in row]
    np.testing.assert_array_equal(load_model(doc).model.u, cnot_readout(2).model.u)


def test_check_human_output():
    code, _, out, _ = invoke("check", FIXTURES / "swap.json", "--condition", "weak")
    assert code == 1
    assert "violation=6.40000e-01" in out
    assert "not-FK" in out


@pytest.mark.parametrize("argv", [
    ["check", FIXTURES / "swap.json", "--output", "machine"],
    ["check", FIXTURES / "vaidman_weak_pass.json", "--output", "machine"],
    ["estimate", FIXTURES / "cnot_noisy.json", "--output", "machine"],
    ["simulate", FIXTURES / "cnot_ideal.json", "-n", "500", "--output", "machine"],
    ["search", FIXTURES / "swap.json", "--restarts", "2", "--output", "machine"],
    ["demo", "--output", "machine"],
])
def test_machine_report_round_trip(argv):
    code, doc, out, _ = invoke(*argv)
    parsed = parse_report(out)
    assert parsed == doc
    assert emit_report(parsed) == out.rstrip("\n")
    assert parsed.exit_code == code


def test_report_carries_digest():
    _, doc, _, _ = invoke("check", FIXTURES / "cnot_ideal.json", "--output", "machine")
    assert doc.input_digest == parse_model(FIXTURES / "cnot_ideal.json").digest
    assert doc.input_digest.startswith("sha256:")


def test_estimate_values():
    code, doc, _, _ = invoke("estimate", FIXTURES / "cnot_ideal.json")
    assert code == 0
    assert doc.estimation.info_nats == pytest.approx(0.6534181947937018, abs=1e-12)
    code, doc, _, _ = invoke("estimate", FIXTURES / "cnot_noisy.json")
    assert code == 1
    assert doc.estimation.squared_error == pytest.approx(0.08732565191024864, abs=1e-12)
    assert not doc.estimation.error_ok


def test_simulate_outputs():
    code, doc, out, _ = invoke("simulate", FIXTURES / "cnot_ideal.json", "-n", "100000",
                               "--seed", "42")
    assert code == 0
    freq = doc.sampling["frequencies"][0]
    assert abs(freq - 0.36) <= 3 * np.sqrt(0.36 * 0.64 / 100000)
    outs = [invoke("simulate", FIXTURES / "cnot_ideal.json", "-n", "1000", "--seed", "5",
                   "--output", "machine")[2] for _ in range(2)]
    assert outs[0] == outs[1]


def test_simulate_single_bin(tmp_path):
    doc = json.loads((FIXTURES / "cnot_ideal.json").read_text())
    doc["system_state"] = [[0, 0], [1, 0]]
    path = tmp_path / "det.json"
    path.write_text(json.dumps(doc))
    _, rep, _, _ = invoke("simulate", path, "-n", "300")
    assert rep.sampling["counts"] == [0, 300]


def test_search_command():
    code, doc, _, _ = invoke("search", FIXTURES / "swap.json", "--target", "weak")
    assert code == 0 and doc.search.best_value == pytest.approx(1.0, abs=1e-6)
    _, doc, _, _ = invoke("search", FIXTURES / "cnot_ideal.json", "--target", "weak")
    assert doc.search.best_value <= 1e-9
    _, doc, _, _ = invoke("search", FIXTURES / "restricted_range.json", "--target", "weak")
    assert doc.search.best_value >= 0.5
    assert np.sum(np.abs(doc.search.best_state[:2]) ** 2) < 1e-6
    _, doc, _, _ = invoke("search", FIXTURES / "probe_flip.json", "--target", "moderate")
    assert doc.search.best_value <= 1e-9
    _, doc, _, _ = invoke("search", FIXTURES / "swap.json", "--target", "probe")
    assert doc.search.best_value <= 1e-9


def test_demo_profiles_match():
    code, _, out, _ = invoke("demo")
    assert code == 0
    assert "MISMATCH" not in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qndsim.cli", "check",
                           str(FIXTURES / "swap.json"), "--condition", "weak"],
                          capture_output=True, text=True)
    assert proc.returncode == 1
    assert "weak" in proc.stdout
