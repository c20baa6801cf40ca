import csv
import io
import logging
import math

import pytest
from numpy.testing import assert_allclose

from cli.app import EXIT_CAP, EXIT_CERTIFICATION, EXIT_FAILURE, EXIT_OK, EXIT_PARSE, ToolkitApp
from cli.files import channel_document, format_value, load_channel, load_state, parse_channel, write_csv
from core.exceptions import ParseError
from core.hypothesis_testing import NeymanPearsonSolver
from database.db import ResultArchive


def run_cli(*argv):
    out = io.StringIO()
    code = ToolkitApp().run(list(argv), stdout=out)
    return code, out.getvalue()


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


class TestDhCommand:
    def test_equal_states(self, fixture_path):
        path = fixture_path("single_input.json")
        code, text = run_cli("dh", path, path, "--epsilon", "0.25")
        assert code == EXIT_OK
        assert text.splitlines()[0] == "epsilon,beta,dh,threshold,mixing,dual_value,gap"
        row = rows_of(text)[0]
        assert float(row["dh"]) == pytest.approx(-math.log2(0.75), abs=1e-9)
        assert float(row["beta"]) == pytest.approx(0.75, abs=1e-12)

    def test_pure_against_diagonal(self, fixture_path):
        code, text = run_cli("dh", fixture_path("qubit_plus.json"), fixture_path("qubit_diag_two_thirds.json"))
        assert code == EXIT_OK
        row = rows_of(text)[0]
        assert float(row["dh"]) == pytest.approx(1.0, abs=1e-9)
        assert row["epsilon"] == "0"

    def test_commuting_qutrits(self, fixture_path):
        code, text = run_cli("dh", fixture_path("qutrit_p.json"), fixture_path("qutrit_q.json"), "--eps", "0.1")
        assert code == EXIT_OK
        assert float(rows_of(text)[0]["beta"]) == pytest.approx(0.75, abs=1e-9)

    def test_pure_null_hypothesis(self, fixture_path):
        code, text = run_cli("dh", fixture_path("qubit_zero.json"), fixture_path("qubit_zero.json"), "--eps", "0.5")
        assert code == EXIT_OK
        code, text = run_cli("dh", fixture_path("qubit_zero.json"), fixture_path("qubit_diag_nine_tenths.json"))
        assert code == EXIT_OK
        assert float(rows_of(text)[0]["dh"]) == pytest.approx(-math.log2(0.9), abs=1e-9)

    def test_nats(self, fixture_path):
        path = fixture_path("single_input.json")
        code, text = run_cli("dh", path, path, "--epsilon", "0.25", "--nats")
        assert code == EXIT_OK
        assert float(rows_of(text)[0]["dh"]) == pytest.approx(-math.log(0.75), abs=1e-9)

    def test_out_file(self, fixture_path, tmp_path):
        target = tmp_path / "dh.csv"
        path = fixture_path("qubit_mixed.json")
        code, text = run_cli("dh", path, path, "--out", str(target))
        assert code == EXIT_OK
        assert text == ""
        assert target.read_text().startswith("epsilon,beta,dh")

    def test_certification_failure(self, fixture_path, monkeypatch):
        monkeypatch.setattr(NeymanPearsonSolver, "dual_value", lambda self, pencil, eps, hint=None: 42.0)
        code, _ = run_cli("dh", fixture_path("qubit_plus.json"), fixture_path("qubit_mixed.json"), "--eps", "0.1")
        assert code == EXIT_CERTIFICATION


class TestErrors:
    def test_malformed_json(self, fixture_path, caplog):
        with caplog.at_level(logging.ERROR):
            code, text = run_cli("bounds", fixture_path("malformed.json"))
        assert code == EXIT_PARSE
        assert text == ""
        assert "malformed.json:" in caplog.text

    def test_bad_entry_names_field(self, fixture_path, caplog):
        with caplog.at_level(logging.ERROR):
            code, _ = run_cli("bounds", fixture_path("bad_entry.json"))
        assert code == EXIT_PARSE
        assert "inputs[0].state[1][1]" in caplog.text

    def test_missing_file(self, tmp_path):
        code, _ = run_cli("bounds", str(tmp_path / "missing.json"))
        assert code == EXIT_PARSE

    def test_state_file_with_two_inputs(self, fixture_path):
        code, _ = run_cli("dh", fixture_path("noiseless_binary.json"), fixture_path("qubit_zero.json"))
        assert code == EXIT_PARSE

    def test_cap_exceeded(self, fixture_path):
        path = fixture_path("qubit_plus.json")
        code, _ = run_cli("stein", path, fixture_path("qubit_mixed.json"), "--n-max", "13")
        assert code == EXIT_CAP

    def test_bad_parameter(self, fixture_path):
        code, _ = run_cli("simulate", fixture_path("noiseless_binary.json"), "--rate", "1.5", "--epsilon-prime", "0.05")
        assert code == EXIT_FAILURE

    def test_dimension_mismatch(self, fixture_path):
        code, _ = run_cli("dh", fixture_path("qubit_zero.json"), fixture_path("qutrit_q.json"))
        assert code == EXIT_FAILURE


class TestChannelCommands:
    def test_bounds_zero_error(self, fixture_path):
        code, text = run_cli("bounds", fixture_path("noiseless_binary.json"), "--epsilon", "0")
        assert code == EXIT_OK
        row = rows_of(text)[0]
        assert float(row["converse_R"]) == pytest.approx(1.0, abs=1e-6)
        assert row["achievable_R"] == "nan"
        assert row["input_dist"] == "0:0.5 1:0.5"

    def test_bounds_single_input(self, fixture_path):
        code, text = run_cli("bounds", fixture_path("single_input.json"), "--epsilon", "0.2")
        assert code == EXIT_OK
        row = rows_of(text)[0]
        assert float(row["converse_R"]) == pytest.approx(-math.log2(0.8), abs=1e-9)
        assert float(row["achievable_R"]) <= float(row["converse_R"])

    def test_bounds_fixed_parameters(self, fixture_path):
        code, text = run_cli(
            "bounds", fixture_path("single_input.json"), "--epsilon", "0.1", "--epsilon-prime", "0.01", "--c", "1"
        )
        assert code == EXIT_OK
        row = rows_of(text)[0]
        expected = -math.log2(0.99) - math.log2(4 / 0.08)
        assert float(row["fixed_achievable_R"]) == pytest.approx(expected, abs=1e-9)

    def test_bounds_deterministic(self, fixture_path):
        path = fixture_path("zero_plus.json")
        assert run_cli("bounds", path) == run_cli("bounds", path)

    def test_simulate(self, fixture_path):
        path = fixture_path("zero_plus.json")
        code, text = run_cli("simulate", path, "--rate", "1", "--epsilon-prime", "0.05", "--trials", "5", "--seed", "3")
        assert code == EXIT_OK
        rows = rows_of(text)
        assert len(rows) == 5
        assert list(rows[0]) == ["trial", "m", "eps_prime", "c_star", "empirical_error", "bound_value", "seed"]
        assert {r["seed"] for r in rows} == {"3"}
        again = run_cli("simulate", path, "--rate", "1", "--epsilon-prime", "0.05", "--trials", "5", "--seed", "3")
        assert again == (code, text)

    def test_simulate_input_dist(self, fixture_path):
        code, text = run_cli(
            "simulate", fixture_path("noiseless_binary.json"),
            "--rate", "1", "--epsilon-prime", "0.05", "--trials", "3", "--input-dist", "1,0",
        )
        assert code == EXIT_OK
        # both codewords are "0", so each message is decoded with probability 1/2 at best
        assert all(float(r["empirical_error"]) >= 0.5 - 1e-9 for r in rows_of(text))

    def test_stein(self, fixture_path):
        path = fixture_path("single_input.json")
        code, text = run_cli("stein", path, path, "--eps", "0.1", "--n", "3")
        assert code == EXIT_OK
        rows = rows_of(text)
        assert [int(r["n"]) for r in rows] == [1, 2, 3]
        for r in rows:
            assert float(r["dh_rate"]) == pytest.approx(-math.log2(0.9) / int(r["n"]), abs=1e-9)

    def test_capacity(self, fixture_path):
        code, text = run_cli("capacity", fixture_path("noiseless_binary.json"), "--eps", "0", "--n-max", "2")
        assert code == EXIT_OK
        rows = rows_of(text)
        assert [float(r["rate_upper"]) for r in rows] == pytest.approx([1.0, 1.0], abs=1e-6)
        assert {r["input_mode"] for r in rows} == {"iid"}

    def test_eps_capacity(self, fixture_path):
        code, text = run_cli(
            "capacity", fixture_path("identical_outputs.json"), "--eps", "0.2", "--n-max", "1", "--eps-levels", "2"
        )
        assert code == EXIT_OK
        assert text.splitlines()[0] == "n,eps,eps_prime,rate_eps_prime,rate_upper,input_mode"
        assert len(rows_of(text)) == 2

    def test_check_hn(self):
        code, text = run_cli("check-hn", "--count", "50", "--dim-max", "6", "--seed", "42")
        assert code == EXIT_OK
        row = rows_of(text)[0]
        assert row["count"] == "50"
        assert row["failures"] == "0"
        assert row["passed"] == "true"


class TestArchive:
    def test_run_is_archived(self, fixture_path, tmp_path):
        url = f"sqlite:///{tmp_path / 'archive.db'}"
        path = fixture_path("single_input.json")
        code, _ = run_cli("dh", path, path, "--eps", "0.25", "--archive", "--archive-url", url)
        assert code == EXIT_OK

        archive = ResultArchive(url)
        try:
            runs = archive.runs()
            assert len(runs) == 1
            assert runs[0].command == "dh"
            assert runs[0].log_base == "bits"
            certs = archive.certificates_for(runs[0].id)
            assert len(certs) == 1
            assert certs[0].label == "dh"
            assert certs[0].dh == pytest.approx(-math.log2(0.75), abs=1e-9)
            assert certs[0].certified
        finally:
            archive.dispose()

    def test_configured_url_without_flag(self, fixture_path, tmp_path, monkeypatch):
        url = f"sqlite:///{tmp_path / 'configured.db'}"
        monkeypatch.setattr("database.db.RESULTS_DATABASE_URL", url)
        path = fixture_path("single_input.json")
        code, _ = run_cli("dh", path, path, "--eps", "0.25", "--archive")
        assert code == EXIT_OK

        archive = ResultArchive(url)
        try:
            assert [r.command for r in archive.runs()] == ["dh"]
        finally:
            archive.dispose()


class TestFiles:
    @pytest.mark.parametrize("value, text", [
        (0.0, "0"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (math.nan, "nan"),
        (True, "true"),
        (False, "false"),
        (3, "3"),
        (0.1, "0.1"),
        (1 / 3, "0.333333333333"),
        ("0:0.5 1:0.5", "0:0.5 1:0.5"),
    ])
    def test_format_value(self, value, text):
        assert format_value(value) == text

    def test_write_csv(self):
        out = io.StringIO()
        write_csv([{"a": 1, "b": math.inf}, {"a": 2, "b": 0.5}], ("a", "b"), out)
        assert out.getvalue() == "a,b\n1,inf\n2,0.5\n"

    def test_channel_document_round_trip(self, fixture_path):
        ch = load_channel(fixture_path("zero_plus.json"))
        again = parse_channel(channel_document(ch))
        assert again.labels == ch.labels
        for x in ch.labels:
            assert_allclose(again.output(x).matrix, ch.output(x).matrix, atol=1e-12)

    def test_complex_entries(self, fixture_path):
        rho = load_state(fixture_path("single_input.json"))
        assert rho.matrix[0, 1] == pytest.approx(0.1j)
        assert rho.matrix[1, 0] == pytest.approx(-0.1j)

    def test_invalid_state_is_parse_error(self):
        doc = {"dim_out": 1, "inputs": [{"label": "a", "state": [[[0.5, 0]]]}]}
        with pytest.raises(ParseError) as info:
            parse_channel(doc, "mem.json")
        assert info.value.field == "inputs[0].state"

    def test_duplicate_label(self):
        state = [[[1, 0]]]
        doc = {"dim_out": 1, "inputs": [{"label": "a", "state": state}, {"label": "a", "state": state}]}
        with pytest.raises(ParseError):
            parse_channel(doc)
