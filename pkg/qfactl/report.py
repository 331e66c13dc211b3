"""Shared result presentation for qfactl commands."""

import csv
import datetime
import json
import os
from typing import Any, Dict, Iterable, List, Optional, Sequence

import click
import numpy as np
from rich.console import Console
from rich.table import Table

from .loader import FormatError

INPUT_ERROR = 2
MISMATCH = 1
FLOAT_DIGITS = 12


def to_jsonable(value: Any) -> Any:
    """Plain JSON types; complex numbers become [re, im] pairs."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [to_jsonable(value.real), to_jsonable(value.imag)]
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not np.isfinite(value):
            return None
        return float(f"{value:.{FLOAT_DIGITS}g}")
    return value


def dump_json(document: Any) -> str:
    return json.dumps(to_jsonable(document), sort_keys=True, indent=2)


def fmt(value: Optional[float], digits: int = 7) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return "-"
    return f"{value:.{digits}f}"


class ReportBase:
    """Base class for commands that print tables, JSON and CSV rows."""

    csv_fields: Sequence[str] = ()

    def __init__(self, run_id=None, csv_file=None, as_json=False):
        self.console = Console()
        self.run_id = run_id
        self.csv_file = csv_file
        self.as_json = as_json

    def create_table(self, title: str, columns: Iterable[str]) -> Table:
        """Create a Rich table with the given columns."""
        table = Table(title=title)
        styles = ["cyan", "magenta", "green", "yellow", "bright_blue", "bright_cyan"]
        for i, column in enumerate(columns):
            table.add_column(column, style=styles[i % len(styles)])
        return table

    def print_json(self, document: Any) -> None:
        click.echo(dump_json(document))

    def fail(self, message: str, code: int = INPUT_ERROR):
        click.echo(f"Error: {message}", err=True)
        raise SystemExit(code)

    def guarded(self, action, *args, **kwargs):
        """Run ``action``, mapping input errors to exit code 2."""
        try:
            return action(*args, **kwargs)
        except FormatError as e:
            self.fail(f"bad input file: {e}")
        except ValueError as e:
            self.fail(str(e))

    def append_to_csv(self, rows: List[Dict[str, Any]]) -> None:
        """Append result rows to the CSV file, writing a header for new files."""
        if not self.csv_file:
            return
        file_exists = os.path.exists(self.csv_file)
        timestamp = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
        fieldnames = ["Timestamp"]
        if self.run_id:
            fieldnames.append("Run ID")
        fieldnames += list(self.csv_fields)

        try:
            with open(self.csv_file, "a", newline="", encoding="utf-8") as csvfile:
                writer = csv.DictWriter(csvfile, fieldnames=fieldnames, extrasaction="ignore")
                if not file_exists:
                    writer.writeheader()
                for row in rows:
                    record = {"Timestamp": timestamp, **row}
                    if self.run_id:
                        record["Run ID"] = self.run_id
                    writer.writerow(record)
            click.echo(f"Results appended to {self.csv_file}", err=self.as_json)
        except OSError as e:
            click.echo(f"Error writing to CSV file: {e}", err=True)
