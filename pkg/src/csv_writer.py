"""
CSV Writer Module
Writes sweep, comparison and entropy-profile tables to CSV files.
"""

import csv
import os
from pathlib import Path
from typing import List, Mapping, Sequence


class CSVWriter:
    """
    Writes fixed-header result tables.
    """

    # CSV format specification
    DELIMITER = ','
    QUOTECHAR = '"'
    ENCODING = 'utf-8'

    SWEEP_HEADER = ['r', 'log10_r', 'U', 'S', 'value_with_penalty', 'seed', 'wall_ms']
    COMPARISON_HEADER = ['r', 'log10_r', 'U_white', 'U_black', 'difference']
    ENTROPY_HEADER = ['v', 'p_norm', 'entropy_nats', 'z', 'memo_size', 'achieved_value', 'value_bound']

    def __init__(self, verbose: bool = False):
        """
        Initialize CSV writer.

        Args:
            verbose: Enable verbose output
        """
        self.verbose = verbose

    def write(
        self,
        rows: Sequence[Mapping[str, str]],
        header: List[str],
        output_path: Path
    ) -> None:
        """
        Write rows to a CSV file, replacing it.

        Args:
            rows: Row dictionaries keyed by header column
            header: Column names
            output_path: Path to output CSV file

        Raises:
            ValueError: If rows list is empty
            PermissionError: If file cannot be written
        """
        if not rows:
            raise ValueError("Cannot write CSV: rows list is empty")

        self._validate_output_path(output_path)

        try:
            with open(output_path, 'w', newline='', encoding=self.ENCODING) as csvfile:
                writer = self._writer(csvfile, header)
                writer.writeheader()
                for row in rows:
                    writer.writerow(row)
        except PermissionError as e:
            raise PermissionError(f"Cannot write to file: {output_path}") from e

    def append(
        self,
        row: Mapping[str, str],
        header: List[str],
        output_path: Path
    ) -> None:
        """
        Append one row and force it to disk; the header is written for a new file.

        Raises:
            PermissionError: If file cannot be written
        """
        self._validate_output_path(output_path)
        new_file = not output_path.exists() or output_path.stat().st_size == 0

        try:
            with open(output_path, 'a', newline='', encoding=self.ENCODING) as csvfile:
                writer = self._writer(csvfile, header)
                if new_file:
                    writer.writeheader()
                writer.writerow(row)
                csvfile.flush()
                os.fsync(csvfile.fileno())
        except PermissionError as e:
            raise PermissionError(f"Cannot write to file: {output_path}") from e

    def read(self, input_path: Path) -> List[dict]:
        """
        Read back the rows of a CSV file written by this class.

        Returns:
            List of row dictionaries; empty when the file does not exist
        """
        if not input_path.exists():
            return []
        with open(input_path, 'r', newline='', encoding=self.ENCODING) as csvfile:
            reader = csv.DictReader(csvfile, delimiter=self.DELIMITER, quotechar=self.QUOTECHAR)
            return [dict(row) for row in reader]

    def write_plot_data(
        self,
        rows: Sequence[Mapping[str, str]],
        columns: List[str],
        output_path: Path
    ) -> None:
        """
        Write a whitespace-separated data file with a commented header, for plotting tools.
        """
        with open(output_path, 'w', encoding=self.ENCODING) as handle:
            handle.write("# " + " ".join(columns) + "\n")
            for row in rows:
                handle.write(" ".join(str(row[column]) for column in columns) + "\n")

    def _writer(self, csvfile, header: List[str]) -> csv.DictWriter:
        return csv.DictWriter(
            csvfile,
            fieldnames=header,
            delimiter=self.DELIMITER,
            quotechar=self.QUOTECHAR,
            quoting=csv.QUOTE_MINIMAL
        )

    def _validate_output_path(self, output_path: Path) -> None:
        """
        Validate output path.

        Args:
            output_path: Path to validate

        Raises:
            ValueError: If path is not a .csv file
        """
        if output_path.suffix.lower() != '.csv':
            raise ValueError(f"Output file must have .csv extension: {output_path}")
