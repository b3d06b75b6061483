"""
Game IO Module
Loads and saves explicit games with their policies (JSON game files).
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict

from src.errors import GameError
from src.file_handler import FileHandler
from src.game_core import GameTree, TablePolicy

POLICY_NAMES = ("base1", "base2", "pre")


@dataclass
class GameFile:
    """An explicit game and its named policies (base1, base2, pre)."""

    game: GameTree
    policies: Dict[str, TablePolicy] = field(default_factory=dict)

    def policy(self, name: str) -> TablePolicy:
        """Named policy; a missing block plays uniformly."""
        return self.policies.get(name) or TablePolicy()


def game_from_dict(data: dict) -> GameFile:
    """
    Build a game from the file schema.

    Raises:
        GameError: If a field is missing or malformed
    """
    try:
        game = GameTree(
            data["actions_per_node"],
            data["children"],
            {int(k): v for k, v in data["terminal_utilities"].items()},
        )
    except KeyError as e:
        raise GameError(f"Game file is missing field {e}") from e
    except (TypeError, AttributeError) as e:
        raise GameError(f"Malformed game file: {e}") from e

    policies = {}
    for name, block in (data.get("policy") or {}).items():
        table = {}
        for node, probs in block.items():
            node = int(node)
            if not 0 <= node < game.node_count:
                raise GameError(f"Policy {name} refers to unknown node {node}")
            h = game.history(node)
            if len(probs) != len(game.actions(h)):
                raise GameError(f"Policy {name} at node {node} has {len(probs)} entries")
            table[h] = probs
        policies[name] = TablePolicy(table)
    return GameFile(game, policies)


def game_to_dict(game_file: GameFile) -> dict:
    """Serialize a game and its policies to the file schema."""
    game = game_file.game
    data = game.to_dict()
    data["policy"] = {
        name: {
            str(game.node_id(h)): [float(p) for p in probs]
            for h, probs in sorted(policy.table.items(), key=lambda item: game.node_id(item[0]))
        }
        for name, policy in game_file.policies.items()
    }
    return data


def load_game(path: Path, file_handler: FileHandler = None) -> GameFile:
    """
    Read a game file.

    Raises:
        FileNotFoundError: If the file does not exist
        GameError: If the contents are invalid
    """
    handler = file_handler or FileHandler()
    handler.validate_input_file(path)
    return game_from_dict(handler.read_json(path))


def save_game(game_file: GameFile, path: Path, file_handler: FileHandler = None) -> None:
    handler = file_handler or FileHandler()
    handler.write_json(game_to_dict(game_file), path)
