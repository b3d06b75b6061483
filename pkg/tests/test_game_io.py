"""
Unit tests for the game file module.
"""

import json

import numpy as np
import pytest

from src.errors import GameError
from src.game_io import GameFile, game_from_dict, game_to_dict, load_game, save_game
from src.synthetic import gen_random_game, random_policy


@pytest.fixture
def game_data():
    """Game file contents with one policy block."""
    return {
        "actions_per_node": [["left", "right"], ["x", "y"], ["z"], [], [], []],
        "children": [[1, 2], [3, 4], [5], [], [], []],
        "terminal_utilities": {"3": 1.0, "4": 0.0, "5": 0.5},
        "policy": {"base2": {"1": [0.9, 0.1]}},
    }


class TestGameFromDict:
    """Tests for game_from_dict."""

    def test_builds_game_and_policies(self, game_data):
        """Test that nodes, labels and policies are read."""
        game_file = game_from_dict(game_data)

        assert game_file.game.labels((0, 1)) == ["left", "y"]
        np.testing.assert_allclose(game_file.policy("base2").distribution(game_file.game, (0,)), [0.9, 0.1])

    def test_missing_policy_is_uniform(self, game_data):
        """Test that absent policy blocks play uniformly."""
        game_file = game_from_dict(game_data)

        np.testing.assert_allclose(game_file.policy("pre").distribution(game_file.game, ()), [0.5, 0.5])

    def test_missing_field_raises_error(self, game_data):
        """Test that required fields are checked."""
        del game_data["children"]
        with pytest.raises(GameError, match="missing field"):
            game_from_dict(game_data)

    def test_unknown_policy_node_raises_error(self, game_data):
        """Test that policy entries must refer to existing nodes."""
        game_data["policy"]["pre"] = {"17": [1.0]}
        with pytest.raises(GameError, match="unknown node 17"):
            game_from_dict(game_data)

    def test_policy_length_mismatch_raises_error(self, game_data):
        """Test that policy vectors must match the action count."""
        game_data["policy"]["pre"] = {"0": [1.0]}
        with pytest.raises(GameError, match="has 1 entries"):
            game_from_dict(game_data)

    def test_invalid_probabilities_raise_error(self, game_data):
        """Test that policy vectors must be distributions."""
        game_data["policy"]["pre"] = {"0": [0.7, 0.7]}
        with pytest.raises(GameError, match="sums to"):
            game_from_dict(game_data)


class TestSaveAndLoad:
    """Tests for save_game and load_game."""

    def test_node_ids_and_policies_are_preserved(self, tmp_path):
        """Test that a saved game reads back identically."""
        game = gen_random_game(seed=9, depth=3, branching=3)
        policies = {"base1": random_policy(game, 1), "pre": random_policy(game, 2, deterministic=True)}
        path = tmp_path / "game.json"

        save_game(GameFile(game, policies), path)
        loaded = load_game(path)

        assert loaded.game.histories() == game.histories()
        assert game_to_dict(loaded) == game_to_dict(GameFile(game, policies))

    def test_file_is_plain_json(self, tmp_path, game_data):
        """Test the on-disk layout."""
        path = tmp_path / "game.json"
        save_game(game_from_dict(game_data), path)

        data = json.loads(path.read_text())
        assert data["children"] == game_data["children"]
        assert data["policy"]["base2"] == {"1": [0.9, 0.1]}

    def test_missing_file_raises_error(self, tmp_path):
        """Test that a missing file raises FileNotFoundError."""
        with pytest.raises(FileNotFoundError):
            load_game(tmp_path / "absent.json")
