"""
Report Unit of Work module.
This module writes run reports atomically: report.json and report.csv are
staged in a temporary directory and only moved into the output directory
when the run finishes without raising.
"""
import csv
import json
import logging
import os
import shutil
import tempfile
from contextlib import contextmanager
from typing import Any, Dict, Iterator, List

from app.api.schemas.reports import RunReport
from app.api.utils.settings import OUTPUT_DIR

logger = logging.getLogger(__name__)

REPORT_JSON = "report.json"
REPORT_CSV = "report.csv"

def _csv_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (list, dict)):
        return json.dumps(value, sort_keys=True)
    return str(value)

def report_columns(rows: List[Dict[str, Any]]) -> List[str]:
    """
    Column names in first-seen order across all rows.

    Args:
        rows (List[Dict[str, Any]]): The report rows.

    Returns:
        List[str]: The header.
    """
    columns: List[str] = []
    for row in rows:
        for key in row:
            if key not in columns:
                columns.append(key)
    return columns

class ReportSession:
    """
    Staging area for one run's report files.
    """
    def __init__(self, staging: str):
        self.staging = staging
        self.written: List[str] = []

    def write(self, report: RunReport) -> None:
        """
        Write report.json and report.csv into the staging directory.

        Args:
            report (RunReport): The finished run.
        """
        payload = report.model_dump(mode="json")
        with open(os.path.join(self.staging, REPORT_JSON), "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True, ensure_ascii=False)
            handle.write("\n")
        columns = report_columns(payload["rows"])
        with open(os.path.join(self.staging, REPORT_CSV), "w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle, lineterminator="\n")
            writer.writerow(columns)
            for row in payload["rows"]:
                writer.writerow([_csv_value(row.get(column)) for column in columns])
        self.written = [REPORT_JSON, REPORT_CSV]

class ReportUnitOfWork:
    """
    Report Unit of Work implementation.
    Provides a context manager that commits staged report files on success
    and discards them on failure.
    """
    def __init__(self, output_dir: str = OUTPUT_DIR):
        """
        Initialize the Unit of Work.

        Args:
            output_dir (str): Directory receiving report.json and report.csv.
        """
        self.output_dir = output_dir

    @contextmanager
    def __call__(self) -> Iterator[ReportSession]:
        """
        Stage report files and move them into place when the block succeeds.

        Yields:
            ReportSession: The staging session.
        """
        os.makedirs(self.output_dir, exist_ok=True)
        staging = tempfile.mkdtemp(prefix=".staging-", dir=self.output_dir)
        try:
            session = ReportSession(staging)
            yield session
            for name in session.written:
                os.replace(os.path.join(staging, name), os.path.join(self.output_dir, name))
            logger.info("wrote %s to %s", ", ".join(session.written), self.output_dir)
        finally:
            shutil.rmtree(staging, ignore_errors=True)

def write_report(report: RunReport, output_dir: str = OUTPUT_DIR) -> str:
    """
    Write a run report to a directory.

    Args:
        report (RunReport): The finished run.
        output_dir (str): The output directory.

    Returns:
        str: The output directory.
    """
    with ReportUnitOfWork(output_dir)() as session:
        session.write(report)
    return output_dir
