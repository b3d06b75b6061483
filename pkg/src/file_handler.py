"""
File Handler Module
Handles file and directory operations for game, config and result files.
"""

import json
from pathlib import Path
from typing import Any, Sequence


class FileHandler:
    """
    Handles file system operations for the solver CLI.
    """

    ENCODING = 'utf-8'

    def __init__(self, verbose: bool = False):
        """
        Initialize FileHandler.

        Args:
            verbose: Enable verbose output
        """
        self.verbose = verbose

    def validate_input_file(self, input_path: Path, suffixes: Sequence[str] = ('.json',)) -> Path:
        """
        Check that an input file exists and has an accepted extension.

        Args:
            input_path: Path to the file
            suffixes: Accepted extensions

        Returns:
            The validated path

        Raises:
            FileNotFoundError: If input_path does not exist
            ValueError: If it is not a file or has the wrong extension
        """
        self._validate_path_exists(input_path)
        if not input_path.is_file():
            raise ValueError(f"Input path is not a file: {input_path}")
        if input_path.suffix.lower() not in suffixes:
            raise ValueError(f"Input file must have one of {', '.join(suffixes)} extensions: {input_path}")
        return input_path

    def _validate_path_exists(self, path: Path) -> None:
        """
        Validate that a path exists.

        Args:
            path: Path to validate

        Raises:
            FileNotFoundError: If path does not exist
        """
        if not path.exists():
            raise FileNotFoundError(f"Path does not exist: {path}")

    def get_default_output_path(self, input_path: Path, tag: str, suffix: str) -> Path:
        """
        Default output file next to the input.

        Args:
            input_path: Original input file
            tag: Appended to the input stem (e.g. 'best_response')
            suffix: Output extension including the dot

        Returns:
            Path like parent_dir/<stem>_<tag><suffix>
        """
        return input_path.parent / f"{input_path.stem}_{tag}{suffix}"

    def create_output_directory(self, output_dir: Path) -> None:
        """
        Create output directory if it doesn't exist.

        Args:
            output_dir: Path to output directory

        Raises:
            PermissionError: If directory cannot be created
        """
        try:
            output_dir.mkdir(parents=True, exist_ok=True)
        except PermissionError as e:
            raise PermissionError(f"Cannot create output directory: {output_dir}") from e

    def read_json(self, input_path: Path) -> Any:
        """
        Load a JSON document.

        Raises:
            FileNotFoundError: If the file does not exist
            ValueError: If the file is not valid JSON
        """
        self._validate_path_exists(input_path)
        try:
            with open(input_path, 'r', encoding=self.ENCODING) as handle:
                return json.load(handle)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in {input_path}: {e}") from e

    def write_json(self, data: Any, output_path: Path) -> None:
        """
        Write a JSON document, creating the parent directory.

        Raises:
            PermissionError: If the file cannot be written
        """
        self.create_output_directory(output_path.parent)
        try:
            with open(output_path, 'w', encoding=self.ENCODING) as handle:
                json.dump(data, handle, indent=2)
                handle.write("\n")
        except PermissionError as e:
            raise PermissionError(f"Cannot write to file: {output_path}") from e
