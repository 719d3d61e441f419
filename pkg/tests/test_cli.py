import io
import json

import pytest

from catrot.circuit_ir import from_text
from catrot.cli import main
from catrot.sim import load_state


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), stream=buf)
    return code, json.loads(buf.getvalue()), buf.getvalue()


class TestPrimpoly:
    def test_degree_36_trinomial(self):
        code, doc, _ = run("primpoly", "36", "--max-terms", "3")
        assert code == 0 and doc["status"] == "ok"
        assert doc["payload"]["polynomial"] == "x^36 + x^11 + 1"
        assert doc["payload"]["q_set"] == [10]
        assert doc["payload"]["hex"] == "0x1000000801"

    def test_degree_3(self):
        assert run("primpoly", "3")[1]["payload"]["polynomial"] == "x^3 + x + 1"

    def test_check_reducible(self):
        code, doc, _ = run("primpoly", "--check", "x^2+1")
        assert code == 2 and doc["status"] == "error"
        assert doc["payload"]["reason"] == "reducible"
        assert doc["diagnostics"]

    def test_check_not_primitive(self):
        code, doc, _ = run("primpoly", "--check", "x^4+x^3+x^2+x+1")
        assert code == 2 and doc["payload"]["reason"] == "not primitive"

    def test_check_ok(self):
        code, doc, _ = run("primpoly", "--check", "x^27+x^20+x^13+x^7+1")
        assert code == 0 and doc["payload"]["q_size"] == 3

    def test_no_trinomial(self):
        code, doc, _ = run("primpoly", "8", "--max-terms", "3")
        assert code == 4 and doc["status"] == "error"

    def test_missing_degree(self):
        assert run("primpoly")[0] == 2

    def test_degree_too_large(self):
        assert run("primpoly", "65")[0] == 4


class TestSynth:
    def test_fixed_n3(self, tmp_path):
        out = tmp_path / "c.txt"
        code, doc, _ = run("synth", "3", "--angle", "b=1", "--mode", "fixed", "--out", str(out))
        rep = doc["payload"]["report"]
        assert code == 0 and rep["toffoli_count"] == 3 and rep["toffoli_depth"] == 3
        c = from_text(out.read_text())
        assert c.toffoli_count == 3
        assert doc["payload"]["layout"]["catalyst"] == [3, 5]

    def test_b_zero(self):
        code, doc, _ = run("synth", "3", "--angle", "b=0")
        assert code == 0
        assert doc["payload"]["kickback"]["catalysts"] == []
        assert doc["payload"]["report"]["toffoli_count"] == 0

    def test_n27(self):
        rep = run("synth", "27", "--angle", "b=1", "--mode", "fixed")[1]["payload"]["report"]
        assert rep["toffoli_count"] == 29 and rep["toffoli_depth"] == 3

    def test_theta(self):
        code, doc, _ = run("synth", "8", "--angle", "theta=0.7853981633974483")
        assert code == 0 and doc["payload"]["b"] == 32
        assert doc["payload"]["angle_error"] == pytest.approx(0.00307999279763704)

    def test_variable(self):
        code, doc, _ = run("synth", "3", "--angle", "b=5", "--mode", "variable")
        k = doc["payload"]["kickback"]
        assert code == 0 and k["bits"] == [0, 2] and k["catalysts"] == [1, 4]
        assert doc["payload"]["report"]["toffoli_depth"] == 3

    def test_variable_not_coprime(self):
        assert run("synth", "4", "--angle", "b=1", "--mode", "variable", "--a", "3")[0] == 2

    @pytest.mark.parametrize("angle", ["b=x", "phi=1", "b=7"])
    def test_bad_angle(self, angle):
        assert run("synth", "3", "--angle", angle)[0] == 2

    def test_bad_poly(self):
        assert run("synth", "--poly", "x^3+x^2+x+1")[0] == 2


class TestVerify:
    def test_n3(self):
        code, doc, _ = run("verify", "--poly", "x^3+x+1", "--k", "1")
        rep = doc["payload"]["report"]
        assert code == 0
        assert rep["phase_error"] < 1e-9 and rep["catalyst_fidelity"] > 1 - 1e-9
        assert rep["ancilla_restored"] is True

    def test_empty_plan_phase_is_one(self):
        code, doc, _ = run("verify", "3", "--k", "0", "--mode", "variable")
        assert code == 0 and doc["payload"]["report"]["measured_phase"] == [1.0, 0.0]

    def test_cap(self):
        code, doc, _ = run("verify", "12")
        assert code == 4
        assert "simulation cap exceeded (22 qubits)" in doc["diagnostics"][0]

    def test_tolerance_violation(self):
        code, doc, _ = run("verify", "3", "--k", "2", "--tolerance", "1e-30")
        assert code == 3 and doc["status"] == "error"
        assert "report" in doc["payload"]

    def test_k_out_of_range(self):
        assert run("verify", "3", "--k", "7")[0] == 2

    def test_bad_amplitudes(self):
        assert run("verify", "3", "--alpha-beta", "1")[0] == 2
        assert run("verify", "3", "--alpha-beta", "1,0")[0] == 2

    def test_amplitudes_are_normalised(self):
        assert run("verify", "3", "--alpha-beta", "3,4j")[0] == 0


class TestResources:
    def test_kappa(self):
        code, doc, _ = run("resources", "27", "--kappa", "2")
        assert code == 0 and doc["payload"]["constrained"]["toffoli_depth"] == 54
        assert doc["payload"]["unconstrained"]["toffoli_depth"] == 3

    def test_n36(self):
        rep = run("resources", "36")[1]["payload"]["unconstrained"]
        assert rep["toffoli_depth"] == 3 and rep["toffoli_count"] == 36

    def test_kappa_one(self):
        assert run("resources", "27", "--kappa", "1")[0] == 2


class TestPrep:
    def test_frobenius(self, tmp_path):
        code, doc, _ = run("prep", "--poly", "x^3+x+1", "--k", "1", "--copies", "4",
                           "--method", "frobenius", "--out-dir", str(tmp_path))
        p = doc["payload"]
        assert code == 0 and p["mul_count"] == 6
        assert [o["k"] for o in p["outputs"]] == [1, 2, 4, 1]
        assert all(o["fidelity"] > 1 - 1e-9 for o in p["outputs"])
        assert load_state(tmp_path / "psi_2.bin").num_qubits == 3

    def test_not_coprime(self):
        code, doc, _ = run("prep", "--k", "0", "--method", "frobenius", "--copies", "1")
        assert code == 2 and "coprime" in doc["diagnostics"][0]

    def test_qpe(self):
        code, doc, _ = run("prep", "--method", "qpe", "--seed", "7")
        assert code == 0
        assert 0 <= doc["payload"]["sampled_k"] < 7
        assert doc["payload"]["fidelity"] > 0.9

    def test_qpe_many_shots(self):
        doc = run("prep", "3", "--method", "qpe", "--shots", "20", "--seed", "1")[1]
        assert len(doc["payload"]["sampled_k"]) == 20

    def test_dlog(self):
        code, doc, _ = run("prep", "4", "--method", "dlog", "--k", "6", "--seed", "2")
        assert code == 0 and doc["payload"]["k"] == 6
        assert doc["payload"]["fidelity"] > 0.9

    def test_missing_k(self):
        assert run("prep", "3", "--method", "dlog")[0] == 2

    def test_bad_shots(self):
        assert run("prep", "--method", "qpe", "--shots", "0")[0] == 2


@pytest.mark.parametrize("argv", [
    ("synth", "5", "--angle", "theta=1.1"),
    ("verify", "4", "--k", "3"),
    ("prep", "--method", "qpe", "--seed", "3", "--shots", "50"),
    ("resources", "20", "--kappa", "4"),
])
def test_deterministic(argv):
    assert run(*argv)[2] == run(*argv)[2]


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as err:
        main(["synth", "--mode", "sideways"], stream=io.StringIO())
    assert err.value.code == 2
