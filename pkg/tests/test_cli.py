"""
Command-Line Tests
"""
import csv
import io
import json

from app.cli import EXIT_OK, EXIT_USAGE, run


def test_verify_lem71_passes(tmp_path):
    out = tmp_path / "lem71.json"
    assert run(["verify", "lem71", "--R", "1", "--Q", "3", "--out-file", str(out)]) == EXIT_OK
    data = json.loads(out.read_text())
    assert data["checks"][0]["residual"] == 0.0
    assert data["passed"] is True


def test_report_goes_to_stdout(capsysbinary):
    assert run(["verify", "thm81", "--R", "1", "--Q", "3"]) == EXIT_OK
    data = json.loads(capsysbinary.readouterr().out)
    assert data["command"] == "verify thm81"


def test_runs_are_byte_identical(tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    for path in (first, second):
        assert run(["verify", "lem71", "--R", "1", "--Q", "3", "--out-file", str(path)]) == EXIT_OK
    assert first.read_bytes() == second.read_bytes()


def test_thm72_trivial_level(tmp_path):
    assert run(["verify", "thm72", "--Q", "1", "--R", "1", "--out-file", str(tmp_path / "thm72.json")]) == EXIT_OK


def test_params_and_csv_output(tmp_path):
    out = tmp_path / "thm81.csv"
    code = run(["verify", "thm81", "--params", "R=19", "Q=3", "samples=2000", "--out", "csv", "--out-file", str(out)])
    assert code == EXIT_OK
    header, row = csv.reader(io.StringIO(out.read_text()))
    assert header[:2] == ["kind", "name"]
    assert row[:2] == ["check", "thm81[R=19,Q=3]"]
    assert row[5] == "pass"


def test_table_export(tmp_path):
    out = tmp_path / "table.csv"
    assert run(["table", "coeffs", "--R", "1", "--Q", "3", "--out", "csv", "--out-file", str(out)]) == EXIT_OK
    assert out.read_text().startswith("R,Q,N\n1,3,3\n")


def test_usage_errors():
    assert run(["verify", "lem71", "--bogus"]) == EXIT_USAGE
    assert run(["verify", "nothing"]) == EXIT_USAGE
    assert run(["verify", "lem71", "--R", "9", "--Q", "3"]) == EXIT_USAGE
    assert run(["--help"]) == EXIT_OK
