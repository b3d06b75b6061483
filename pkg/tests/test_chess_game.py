"""
Unit tests for the chess game module, with a scripted evaluator.
"""

import chess
import numpy as np
import pytest

from src.chess_game import ChessGame
from src.errors import GameError
from src.models import EngineConfig, Player
from src.policies import FIXED_TEMPERATURE, ScoredPolicy
from src.uci_engine import board_from_moves


class FakeEvaluator:
    """
    Ranks legal moves in UCI string order; rank i is worth 50 - 10 * i for
    the side to move. `leads` overrides the best line's white-perspective
    score at chosen positions.
    """

    def __init__(self, leads=None):
        self.leads = leads or {}
        self.calls = []

    def evaluate(self, moves, movetime_ms, multipv, root_moves=None):
        self.calls.append((tuple(moves), movetime_ms, multipv, tuple(root_moves or ())))
        board = board_from_moves(moves)
        sign = 1 if board.turn == chess.WHITE else -1
        ranked = sorted(move.uci() for move in board.legal_moves)
        lines = [(move, sign * (50 - 10 * rank)) for rank, move in enumerate(ranked)
                 if not root_moves or move in root_moves][:multipv]
        if tuple(moves) in self.leads:
            lines[0] = (lines[0][0], self.leads[tuple(moves)])
        return lines


@pytest.fixture
def config():
    """Two candidate moves, four plies."""
    return EngineConfig(path="fake", movetime_ms=50, base_movetime_ms=10, multipv=2, max_plies=4, decisive_cp=400)


@pytest.fixture
def evaluator():
    """Scripted evaluator where a2a3 leads to a winning evaluation."""
    return FakeEvaluator(leads={("a2a3",): 650})


@pytest.fixture
def game(config, evaluator):
    """Chess game over the scripted evaluator."""
    return ChessGame(config, evaluator)


class TestChessGame:
    """Tests for ChessGame."""

    def test_actions_are_top_moves(self, game):
        """Test that the root offers the evaluator's top-K moves."""
        assert game.actions(()) == ("a2a3", "a2a4")
        assert game.player(()) is Player.P1

    def test_black_moves_after_white(self, game):
        """Test the second ply."""
        assert game.actions((1,)) == ("a7a5", "a7a6")
        assert game.labels((1, 0)) == ["a2a4", "a7a5"]

    def test_decisive_evaluation_is_terminal(self, game):
        """Test that a large advantage ends the game."""
        assert game.is_terminal((0,))
        assert game.utility((0,)) == 1.0
        assert game.proxy_value((0,)) == 1.0

    def test_ply_cap_is_a_draw(self, game):
        """Test that histories at max_plies are draws."""
        h = (1, 0, 0, 0)
        assert game.is_terminal(h)
        assert game.utility(h) == 0.5

    def test_proxy_value_of_quiet_position(self, game):
        """Test the centipawn proxy inside the draw band."""
        assert game.proxy_value(()) == 0.5

    def test_checkmate_is_scored(self, game):
        """Test that a finished game uses the board result."""
        node = game._expand(("f2f3", "e7e5", "g2g4", "d8h4"))

        assert node.actions == ()
        assert node.utility == 0.0

    def test_unknown_history_raises_error(self, game):
        """Test that out-of-range actions are rejected."""
        with pytest.raises(GameError, match="Unknown history"):
            game.actions((5,))
        assert not game.contains((5,))
        assert game.contains((1, 1))

    def test_utility_of_inner_history_raises_error(self, game):
        """Test that only terminals have a utility."""
        with pytest.raises(GameError, match="not terminal"):
            game.utility(())

    def test_nodes_are_cached(self, game, evaluator):
        """Test that expanding a history twice asks once."""
        game.actions((1,))
        calls = len(evaluator.calls)
        game.actions((1,))

        assert len(evaluator.calls) == calls


class TestMoveScores:
    """Tests for move_scores and scorer."""

    def test_scores_from_the_movers_side(self, game):
        """Test that black's scores are negated white-perspective values."""
        np.testing.assert_allclose(game.move_scores((), 50), [50.0, 40.0])
        np.testing.assert_allclose(game.move_scores((1,), 50), [50.0, 40.0])

    def test_other_think_time_restricts_to_actions(self, game, evaluator):
        """Test that a different think time searches only the action moves."""
        game.move_scores((1,), 10)

        moves, movetime, multipv, root_moves = evaluator.calls[-1]
        assert moves == ("a2a4",)
        assert movetime == 10
        assert root_moves == ("a7a5", "a7a6")

    def test_scored_policy_plays_the_best_move(self, game, config):
        """Test a near-zero temperature policy over the scorer."""
        policy = ScoredPolicy(game.scorer(config.movetime_ms), FIXED_TEMPERATURE)

        np.testing.assert_allclose(policy.distribution(game, ()), [1.0, 0.0])
