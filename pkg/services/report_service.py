"""
Report Service
Deterministic JSON and CSV serialization of run reports and coefficient tables
"""
import csv
import io
import json
import math
from typing import Any, Dict, List, Union

from app.models import CoeffTable, OutputFormat, RunReport
from core.forms import coeff_table_csv

CSV_COLUMNS = ("kind", "name", "re", "im", "err", "status", "residual", "tolerance")


def _finite(value: Any) -> Any:
    """JSON has no inf or nan; map them to strings"""
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    if isinstance(value, dict):
        return {key: _finite(item) for key, item in value.items()}
    if isinstance(value, list):
        return [_finite(item) for item in value]
    return value


class ReportService:
    """Serializer for RunReport and CoeffTable"""

    def __init__(self, include_wall_time: bool = False):
        """
        Args:
            include_wall_time: Keep wall_time_s in the output; off by default
                so identical runs give identical bytes
        """
        self.include_wall_time = include_wall_time

    def as_dict(self, report: RunReport) -> Dict[str, Any]:
        data = report.model_dump(mode="json")
        if not self.include_wall_time:
            data.pop("wall_time_s", None)
        data["passed"] = report.passed
        return _finite(data)

    def to_json(self, report: RunReport) -> str:
        return json.dumps(self.as_dict(report), sort_keys=True, indent=2) + "\n"

    def to_csv(self, report: RunReport) -> str:
        """
        Flat rows: one per value and one per check

        Every row has the same columns; fields that do not apply are empty.
        """
        rows: List[List[Any]] = []
        for name in sorted(report.values):
            re, im = report.values[name]
            rows.append(["value", name, re, im, report.errors.get(name, ""), "", "", ""])
        for check in report.checks:
            rows.append([
                "check",
                check.name,
                "",
                "",
                "",
                check.status.value,
                "" if check.residual is None else check.residual,
                "" if check.tolerance is None else check.tolerance,
            ])
        buffer = io.StringIO()
        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)
        return buffer.getvalue()

    def emit(self, report: RunReport, fmt: Union[OutputFormat, str] = OutputFormat.JSON) -> bytes:
        """
        Serialize a report

        Args:
            report: Report to write
            fmt: json or csv

        Returns:
            UTF-8 bytes, identical for identical reports
        """
        fmt = OutputFormat(fmt)
        text = self.to_json(report) if fmt == OutputFormat.JSON else self.to_csv(report)
        return text.encode("utf-8")

    def emit_table(self, table: CoeffTable, fmt: Union[OutputFormat, str] = OutputFormat.JSON) -> bytes:
        fmt = OutputFormat(fmt)
        if fmt == OutputFormat.CSV:
            return coeff_table_csv(table).encode("utf-8")
        data = {
            "R": table.R,
            "Q": table.Q,
            "N": table.N,
            "modulus": table.modulus,
            "entries": [list(row) for row in table.rows()],
        }
        return (json.dumps(data, sort_keys=True, indent=2) + "\n").encode("utf-8")
