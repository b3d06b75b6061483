"""
Chess Game Module
Chess from the starting position as a lazily expanded game over the
engine's top-K moves.
"""

import threading
from dataclasses import dataclass
from typing import Callable, Dict, Tuple

import chess
import numpy as np

from src.errors import GameError
from src.game_core import Game
from src.models import EngineConfig, History
from src.policies import MATE_CP, cp_to_utility
from src.uci_engine import board_from_moves


@dataclass(frozen=True)
class ChessNode:
    moves: Tuple[str, ...]
    actions: Tuple[str, ...]
    eval_cp: int
    white_to_move: bool
    utility: float = 0.5


class ChessGame(Game):
    """
    Histories index into the engine's top-K moves at each position.

    A position is terminal when the game is over, when the engine sees a
    decisive advantage, or at the ply cap (scored as a draw).

    Args:
        config: Engine settings (K, ply cap, decisive threshold, think times)
        evaluator: Object with evaluate(moves, movetime_ms, multipv, root_moves),
            such as an EnginePool or a UCIEngine
    """

    def __init__(self, config: EngineConfig, evaluator):
        self.config = config
        self.evaluator = evaluator
        self._nodes: Dict[History, ChessNode] = {}
        self._lock = threading.Lock()

    @property
    def max_length(self) -> int:
        return self.config.max_plies

    @property
    def max_actions(self) -> int:
        return self.config.multipv

    def node(self, h: History) -> ChessNode:
        h = tuple(h)
        cached = self._nodes.get(h)
        if cached is not None:
            return cached
        if h:
            parent = self.node(h[:-1])
            if not 0 <= h[-1] < len(parent.actions):
                raise GameError(f"Unknown history: {h}")
            moves = parent.moves + (parent.actions[h[-1]],)
        else:
            moves = ()
        node = self._expand(moves)
        with self._lock:
            self._nodes.setdefault(h, node)
        return self._nodes[h]

    def _expand(self, moves: Tuple[str, ...]) -> ChessNode:
        board = board_from_moves(moves)
        white_to_move = board.turn == chess.WHITE
        if board.is_game_over():
            result = board.result()
            utility = 1.0 if result == "1-0" else 0.0 if result == "0-1" else 0.5
            cp = MATE_CP if utility == 1.0 else -MATE_CP if utility == 0.0 else 0
            return ChessNode(moves, (), cp, white_to_move, utility)

        lines = self.evaluator.evaluate(list(moves), self.config.movetime_ms, self.config.multipv)
        eval_cp = lines[0][1] if lines else 0
        if len(moves) >= self.config.max_plies:
            return ChessNode(moves, (), eval_cp, white_to_move, 0.5)
        if abs(eval_cp) >= self.config.decisive_cp:
            return ChessNode(moves, (), eval_cp, white_to_move, cp_to_utility(eval_cp, self.config.decisive_cp))
        return ChessNode(moves, tuple(move for move, _ in lines), eval_cp, white_to_move)

    def actions(self, h: History) -> Tuple[str, ...]:
        return self.node(h).actions

    def utility(self, h: History) -> float:
        node = self.node(h)
        if node.actions:
            raise GameError(f"History {tuple(h)} is not terminal")
        return node.utility

    def contains(self, h: History) -> bool:
        try:
            self.node(h)
        except GameError:
            return False
        return True

    def proxy_value(self, h: History) -> float:
        """Centipawn-threshold estimate of u1 at `h`."""
        node = self.node(h)
        if not node.actions:
            return node.utility
        return cp_to_utility(node.eval_cp, self.config.decisive_cp)

    def move_scores(self, h: History, movetime_ms: int) -> np.ndarray:
        """
        Mover-perspective scores of the actions at `h` after `movetime_ms` of search.

        Moves the engine does not report score as a lost position.
        """
        node = self.node(h)
        if movetime_ms == self.config.movetime_ms:
            lines = self.evaluator.evaluate(list(node.moves), movetime_ms, self.config.multipv)
        else:
            lines = self.evaluator.evaluate(
                list(node.moves), movetime_ms, len(node.actions), list(node.actions)
            )
        sign = 1.0 if node.white_to_move else -1.0
        scored = {move: sign * cp for move, cp in lines}
        return np.array([scored.get(move, -MATE_CP) for move in node.actions], dtype=float)

    def scorer(self, movetime_ms: int) -> Callable[[Game, History], np.ndarray]:
        """Scorer for a ScoredPolicy thinking `movetime_ms` per move."""
        def score(game: Game, h: History) -> np.ndarray:
            return self.move_scores(h, movetime_ms)
        return score
