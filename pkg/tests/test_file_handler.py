"""
Unit tests for FileHandler module.
"""

import json
from pathlib import Path

import pytest

from src.file_handler import FileHandler


@pytest.fixture
def file_handler():
    """Create FileHandler instance for testing."""
    return FileHandler(verbose=False)


@pytest.fixture
def game_file(tmp_path):
    """A small JSON input file."""
    path = tmp_path / "game.json"
    path.write_text(json.dumps({"actions_per_node": [0]}))
    return path


class TestValidateInputFile:
    """Tests for validate_input_file method."""

    def test_valid_file_is_returned(self, file_handler, game_file):
        """Test that an existing JSON file passes."""
        assert file_handler.validate_input_file(game_file) == game_file

    def test_non_existent_path_raises_error(self, file_handler):
        """Test that non-existent path raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            file_handler.validate_input_file(Path("/non/existent/game.json"))

    def test_directory_raises_error(self, file_handler, tmp_path):
        """Test that a directory is not an input file."""
        with pytest.raises(ValueError, match="not a file"):
            file_handler.validate_input_file(tmp_path)

    def test_wrong_extension_raises_error(self, file_handler, tmp_path):
        """Test that other extensions are rejected."""
        txt_file = tmp_path / "game.txt"
        txt_file.touch()

        with pytest.raises(ValueError, match=".json"):
            file_handler.validate_input_file(txt_file)

    def test_custom_suffixes(self, file_handler, tmp_path):
        """Test that accepted extensions can be widened."""
        csv_file = tmp_path / "sweep.csv"
        csv_file.touch()

        assert file_handler.validate_input_file(csv_file, ('.csv',)) == csv_file


class TestGetDefaultOutputPath:
    """Tests for get_default_output_path method."""

    def test_output_next_to_input(self, file_handler, tmp_path):
        """Test that the output lands beside the input with a tag."""
        result = file_handler.get_default_output_path(tmp_path / "game.json", "equilibrium", ".json")
        assert result == tmp_path / "game_equilibrium.json"

    def test_other_suffix(self, file_handler, tmp_path):
        """Test that the suffix replaces the input extension."""
        result = file_handler.get_default_output_path(tmp_path / "game.json", "entropy", ".csv")
        assert result == tmp_path / "game_entropy.csv"


class TestCreateOutputDirectory:
    """Tests for create_output_directory method."""

    def test_create_new_directory(self, file_handler, tmp_path):
        """Test creating a new directory."""
        new_dir = tmp_path / "new_output"
        file_handler.create_output_directory(new_dir)

        assert new_dir.exists()
        assert new_dir.is_dir()

    def test_create_nested_directories(self, file_handler, tmp_path):
        """Test creating nested directories."""
        nested_dir = tmp_path / "level1" / "level2"
        file_handler.create_output_directory(nested_dir)

        assert nested_dir.exists()

    def test_existing_directory_no_error(self, file_handler, tmp_path):
        """Test that existing directory doesn't raise error."""
        file_handler.create_output_directory(tmp_path)
        assert tmp_path.exists()


class TestJson:
    """Tests for read_json and write_json methods."""

    def test_write_then_read(self, file_handler, tmp_path):
        """Test that a document is written with its parent directory."""
        output_path = tmp_path / "results" / "report.json"
        file_handler.write_json({"value": 0.5, "memo_set": [["a0"]]}, output_path)

        assert file_handler.read_json(output_path) == {"value": 0.5, "memo_set": [["a0"]]}
        assert output_path.read_text().endswith("\n")

    def test_read_missing_file_raises_error(self, file_handler, tmp_path):
        """Test that reading a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            file_handler.read_json(tmp_path / "absent.json")

    def test_invalid_json_raises_error(self, file_handler, tmp_path):
        """Test that malformed JSON raises ValueError."""
        broken = tmp_path / "broken.json"
        broken.write_text("{not json")

        with pytest.raises(ValueError, match="Invalid JSON"):
            file_handler.read_json(broken)
