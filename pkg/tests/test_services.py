"""
Service Layer Tests
"""
import csv
import io
import json

import numpy as np
import pytest

from app.models import CheckResult, CheckStatus, RunReport
from core import forms
from core.config import settings
from core.exceptions import ConsistencyError, PreconditionError
from services.report_service import CSV_COLUMNS, ReportService
from services.verification_service import VerificationService, override_settings, parse_number


@pytest.fixture(scope="module")
def service():
    return VerificationService()


@pytest.fixture(scope="module")
def writer():
    return ReportService()


@pytest.mark.parametrize(
    "raw,expected",
    [("15", 15), ("2.5", 2.5), ("3+4i", 3 + 4j), ("true", True), ("kernel320", "kernel320"), ([1, "2"], [1, 2])],
)
def test_parse_number(raw, expected):
    assert parse_number(raw) == expected


def test_reports_are_byte_identical(service, writer):
    first = writer.emit(service.verify("lem71", {"R": 1, "Q": 3}))
    second = writer.emit(service.verify("lem71", {"R": 1, "Q": 3}))
    assert first == second
    data = json.loads(first)
    assert "wall_time_s" not in data
    assert data["passed"] is True
    assert data["parameters"] == {"Q": 3, "R": 1}
    assert data["checks"][0]["status"] == "pass"


def test_string_parameters_are_coerced(service):
    report = service.verify("thm81", {"R": "1", "Q": "3"})
    assert report.parameters == {"Q": 3, "R": 1}
    assert report.passed


def test_csv_rows_share_columns(service, writer):
    report = service.report("residue-f")
    rows = list(csv.reader(io.StringIO(writer.emit(report, "csv").decode())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 1 + len(report.values) + len(report.checks)
    assert all(len(row) == len(CSV_COLUMNS) for row in rows)


def test_empty_report_serializes(writer):
    data = json.loads(writer.emit(RunReport(command="verify lem71")))
    assert data["checks"] == [] and data["values"] == {}
    assert data["passed"] is True


def test_non_finite_residuals_become_strings(writer):
    report = RunReport(command="report prop94")
    report.checks.append(CheckResult(name="prop94", status=CheckStatus.REPORT, residual=float("inf")))
    data = json.loads(writer.emit(report))
    assert data["checks"][0]["residual"] == "inf"


def test_wall_time_kept_on_request():
    report = RunReport(command="verify zeta", wall_time_s=0.5)
    assert json.loads(ReportService(include_wall_time=True).emit(report))["wall_time_s"] == 0.5


def test_unknown_names_rejected(service):
    with pytest.raises(PreconditionError):
        service.verify("thm99")
    with pytest.raises(PreconditionError):
        service.compute("lem71")


def test_overrides_are_scoped(service):
    before = settings.TOL
    report = service.verify("lem71", {"R": 1, "Q": 3}, overrides={"tol": "1e-6"})
    assert report.config["tol"] == 1e-6
    assert settings.TOL == before
    with pytest.raises(PreconditionError):
        with override_settings({"tol": 1e-3, "nonsense": 1}):
            pass
    assert settings.TOL == before


def test_thm72_rejects_level_without_prime_bound(service):
    with pytest.raises(PreconditionError):
        service.verify("thm72", {"R": 7, "Q": 3})


def test_thm72_default_level(service):
    report = service.verify("thm72")
    assert report.parameters["R"] == 5
    assert report.passed


def test_zeta_checks_pass(service):
    report = service.verify("zeta")
    assert report.passed
    assert len(report.checks) == 6


def test_dirichlet_series_check(service):
    report = service.verify("eq54")
    assert [c.name for c in report.checks] == ["eq54[X=100000]", "eq54[f(2)]"]
    assert report.passed


def test_residue_report_values(service):
    report = service.report("residue-f")
    assert set(report.values) == {"residue.plus", "residue.minus", "residue.printed", "residue.four_over_pi2"}
    assert report.checks[0].status == CheckStatus.REPORT


def test_coefficient_table(service, writer):
    table = service.table(1, 3)
    data = json.loads(writer.emit_table(table))
    assert data["modulus"] == 18
    assert len(data["entries"]) == len(table.entries)
    assert writer.emit_table(table, "csv").decode().startswith("R,Q,N\n1,3,3\n")


def test_coefficient_table_is_cross_checked(service, monkeypatch):
    monkeypatch.setattr(forms, "coeff_eq64", lambda R, Q, m, n: np.asarray(m, dtype=np.int64) * 0 + 7)
    with pytest.raises(ConsistencyError):
        service.table(1, 3)


def test_euler_check_judges_stencil_order(service):
    report = service.verify("lem21")
    order = [c for c in report.checks if c.name == "lem21[order]"]
    assert len(order) == 1 and order[0].status == CheckStatus.PASS
    assert order[0].detail["observed_order"] >= 3.5
    assert report.passed
