"""
Unit tests for the CFR module.
"""

import numpy as np
import pytest

from src.cfr import CFRSolver, cfr_solve, regret_matching
from src.game_core import TablePolicy, UniformPolicy
from src.models import MetaConfig, Player
from src.synthetic import gen_random_game, random_policy
from src.transform import PRECOMPUTE, STOP, transform_game
from tests.helpers import one_sided


@pytest.fixture
def one_sided_tgame():
    """Transformed game where precomputing at the root clearly pays for player 1."""
    game = one_sided()
    pre = TablePolicy({(): [1.0, 0.0]})
    return transform_game(
        game, UniformPolicy(), UniformPolicy(), pre, MetaConfig(0.1, 0.1), set(game.histories()), {},
    )


@pytest.fixture
def random_tgame():
    """Transformed random game with full-support policies."""
    game = gen_random_game(seed=2, depth=3, branching=2)
    base1, base2, pre = (random_policy(game, s, floor=0.1) for s in (1, 2, 3))
    return transform_game(game, base1, base2, pre, MetaConfig(0.02, 0.02), set(game.histories()), {})


class TestRegretMatching:
    """Tests for regret_matching."""

    def test_proportional_to_positive_regret(self):
        """Test that negative regrets get no weight."""
        np.testing.assert_allclose(regret_matching(np.array([3.0, -1.0])), [1.0, 0.0])
        np.testing.assert_allclose(regret_matching(np.array([1.0, 3.0])), [0.25, 0.75])

    def test_uniform_without_positive_regret(self):
        """Test the uniform fallback."""
        np.testing.assert_allclose(regret_matching(np.array([-1.0, -2.0])), [0.5, 0.5])
        np.testing.assert_allclose(regret_matching(np.zeros(2)), [0.5, 0.5])


class TestCFRSolver:
    """Tests for CFRSolver."""

    def test_learns_to_precompute(self, one_sided_tgame):
        """Test that player 1 precomputes and player 2 stops."""
        result = cfr_solve(one_sided_tgame, 200)

        assert result.average[(Player.P1, (), ())][PRECOMPUTE] > 0.95
        for key, sigma in result.average.items():
            if key[0] is Player.P2:
                assert sigma[STOP] > 0.95

    def test_average_strategies_are_distributions(self, random_tgame):
        """Test that every average strategy sums to 1."""
        result = cfr_solve(random_tgame, 50)

        for sigma in result.average.values():
            assert sigma.sum() == pytest.approx(1.0)
            assert np.all(sigma >= 0.0)

    def test_average_regret_within_bound(self, random_tgame):
        """Test that the regret matching bound holds."""
        report = cfr_solve(random_tgame, 300).report

        assert report.iterations == 300
        assert report.average_regret[0] <= report.regret_bound
        assert report.average_regret[1] <= report.regret_bound

    def test_runs_continue_the_same_table(self, random_tgame):
        """Test that a second run adds to the first."""
        solver = CFRSolver(random_tgame)
        early = solver.run(20)
        late = solver.run(980)

        assert solver.iterations == 1000
        assert late.regret_bound < early.regret_bound
        assert sum(late.average_regret) <= 2 * late.regret_bound

    def test_runs_are_deterministic(self, random_tgame):
        """Test that equal runs give equal profiles."""
        first = cfr_solve(random_tgame, 40, seed=5)
        second = cfr_solve(random_tgame, 40, seed=5)

        for key in first.average:
            np.testing.assert_array_equal(first.average[key], second.average[key])
        assert first.report.seed == 5

    def test_invalid_iterations_raise_error(self, random_tgame):
        """Test that at least one iteration is required."""
        with pytest.raises(ValueError, match="at least 1"):
            CFRSolver(random_tgame).run(0)
