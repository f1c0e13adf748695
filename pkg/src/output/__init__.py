"""Result table formatters (table, JSON, CSV)."""

from .formatters import OutputFormatter, JSONFormatter, CSVFormatter, TableFormatter

__all__ = [
    "OutputFormatter",
    "JSONFormatter",
    "CSVFormatter",
    "TableFormatter",
]
