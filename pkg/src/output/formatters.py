"""Output formatters for sweep results and comparison tables.

Provides multiple output formats:
- JSON: Machine-readable records
- CSV: The result contract, numbers at 8 significant digits
- Table: Human-readable CLI output
"""

import json
import logging
import math
from abc import ABC, abstractmethod
from io import StringIO
from typing import Any

import pandas as pd

logger = logging.getLogger(__name__)


class OutputFormatter(ABC):
    """Abstract base class for output formatters."""

    @abstractmethod
    def format(self, frame: pd.DataFrame) -> str:
        """Format the table as a string."""
        pass

    def format_to_file(self, frame: pd.DataFrame, filepath: str) -> None:
        """Write formatted table to a file."""
        with open(filepath, "w", encoding="utf-8") as f:
            f.write(self.format(frame))


class JSONFormatter(OutputFormatter):
    """Formats tables as a JSON list of records; NaN becomes null."""

    def __init__(self, indent: int = 2):
        self.indent = indent

    def _clean(self, value: Any) -> Any:
        if isinstance(value, float) and math.isnan(value):
            return None
        if hasattr(value, "item"):
            # numpy scalar
            return self._clean(value.item())
        return value

    def format(self, frame: pd.DataFrame) -> str:
        records = [
            {key: self._clean(value) for key, value in record.items()}
            for record in frame.to_dict(orient="records")
        ]
        return json.dumps(records, indent=self.indent)


class CSVFormatter(OutputFormatter):
    """Formats tables as CSV."""

    def __init__(self, float_format: str = "%.8g"):
        self.float_format = float_format

    def format(self, frame: pd.DataFrame) -> str:
        return frame.to_csv(index=False, float_format=self.float_format)


class TableFormatter(OutputFormatter):
    """Formats tables for the terminal with rich."""

    def __init__(self, title: str | None = None, width: int = 120, precision: int = 3):
        """
        Initialize table formatter.

        Args:
            title: Table title
            width: Maximum table width
            precision: Decimals for floating-point cells
        """
        self.title = title
        self.width = width
        self.precision = precision

    def _cell(self, value: Any) -> str:
        if value is None or (isinstance(value, float) and math.isnan(value)):
            return "-"
        if isinstance(value, float):
            if value != 0.0 and abs(value) < 10.0 ** (-self.precision):
                return f"{value:.2e}"
            return f"{value:.{self.precision}f}"
        return str(value)

    def format(self, frame: pd.DataFrame) -> str:
        from rich.console import Console
        from rich.table import Table

        table = Table(title=self.title)
        for column in frame.columns:
            numeric = pd.api.types.is_numeric_dtype(frame[column])
            table.add_column(str(column), justify="right" if numeric else "left", style=None if numeric else "cyan")
        for record in frame.itertuples(index=False):
            table.add_row(*(self._cell(v.item() if hasattr(v, "item") else v) for v in record))

        output = StringIO()
        console = Console(file=output, force_terminal=False, width=self.width)
        console.print(table)
        return output.getvalue()
