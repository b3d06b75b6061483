"""
Unit tests for the command line interface module.
"""

import pytest

from src.cli import parse_arguments


class TestParseArguments:
    """Tests for parse_arguments."""

    def test_best_response(self):
        """Test the best-response subcommand and its defaults."""
        args = parse_arguments(["best-response", "--game", "g.json", "--lambda", "0.01"])

        assert args.command == "best-response"
        assert args.game == "g.json"
        assert args.engine is None
        assert args.lam == 0.01
        assert args.player == 1
        assert args.eps == 0.05
        assert not args.exact
        assert not args.verbose

    def test_verbose_precedes_subcommand(self):
        """Test the global verbose flag."""
        args = parse_arguments(["-v", "equilibrium", "--engine", "e.json", "--lambda1", "0.1", "--lambda2", "0.2"])

        assert args.verbose
        assert args.engine == "e.json"
        assert (args.lambda1, args.lambda2) == (0.1, 0.2)
        assert args.max_iters is None

    def test_entropy_profile_grid(self):
        """Test that the threshold grid is split on commas."""
        args = parse_arguments(["entropy-profile", "--game", "g.json", "--v-grid", "0.1,0.9"])

        assert args.v_grid == [0.1, 0.9]
        assert args.eps == 0.25

    def test_sweep(self):
        """Test the sweep subcommand."""
        args = parse_arguments(["sweep", "--config", "s.json", "-o", "out.csv", "--resume", "--workers", "3"])

        assert args.resume
        assert args.workers == 3
        assert args.out == "out.csv"

    def test_compare_sides(self):
        """Test the compare-sides subcommand."""
        args = parse_arguments(["compare-sides", "--white", "w.csv", "--black", "b.csv", "-o", "d.csv"])
        assert (args.white, args.black, args.out) == ("w.csv", "b.csv", "d.csv")

    def test_generate_game(self):
        """Test the generate-game subcommand and its defaults."""
        args = parse_arguments(["generate-game", "-o", "g.json", "--law", "ternary"])

        assert args.depth == 4
        assert args.branching == 2
        assert args.law == "ternary"
        assert args.stop_probability == 0.0

    def test_backend_is_required(self):
        """Test that best-response needs a game or an engine."""
        with pytest.raises(SystemExit):
            parse_arguments(["best-response", "--lambda", "0.01"])

    def test_backends_are_exclusive(self):
        """Test that a game and an engine cannot both be given."""
        with pytest.raises(SystemExit):
            parse_arguments(["best-response", "--game", "g.json", "--engine", "e.json", "--lambda", "0.01"])

    def test_invalid_eps_exits(self):
        """Test that eps must lie in (0, 1)."""
        with pytest.raises(SystemExit):
            parse_arguments(["best-response", "--game", "g.json", "--lambda", "0.01", "--eps", "1.5"])

    def test_non_positive_lambda_exits(self):
        """Test that penalties must be positive."""
        with pytest.raises(SystemExit):
            parse_arguments(["best-response", "--game", "g.json", "--lambda", "0"])

    def test_bad_grid_exits(self):
        """Test that a malformed grid is rejected."""
        with pytest.raises(SystemExit):
            parse_arguments(["entropy-profile", "--game", "g.json", "--v-grid", "0.1,high"])

    def test_command_is_required(self):
        """Test that a subcommand must be given."""
        with pytest.raises(SystemExit):
            parse_arguments([])
