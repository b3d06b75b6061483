"""
Unit tests for the entropy module.
"""

import math

import numpy as np
import pytest

from src.entropy import (
    advantage_distribution,
    advantage_strategy,
    distribution_entropy,
    entropy,
    equilibrium_entropy_bound,
    first_advantage_set,
    memorization_count,
    top_mass,
)
from src.errors import EmptyDistributionError
from src.game_core import Profile, TablePolicy, UniformPolicy
from src.synthetic import gen_random_game, random_policy
from tests.helpers import build_tree, two_by_two


@pytest.fixture
def game():
    """Depth-2 game with one informative branch."""
    return two_by_two()


@pytest.fixture
def uniform():
    """Both players uniform."""
    return Profile(UniformPolicy(), UniformPolicy())


class TestFirstAdvantageSet:
    """Tests for first_advantage_set and advantage_distribution."""

    def test_finds_first_winning_history(self, game, uniform):
        """Test that only the winning terminal reaches v = 0.75."""
        assert first_advantage_set(game, uniform, 0.75) == [(0, 0)]

    def test_root_qualifies_for_low_threshold(self, game, uniform):
        """Test that the root itself is the first advantage when its value suffices."""
        assert first_advantage_set(game, uniform, 0.5) == [()]

    def test_descendants_of_advantage_are_excluded(self, uniform):
        """Test that no member has a player-1 prefix in the set."""
        game = build_tree([[[[1.0, 1.0]], 0.0], [0.0, 0.0]])
        support = first_advantage_set(game, uniform, 0.9)

        assert support == [(0, 0)]

    def test_reach_under_prepared_policy(self, game, uniform):
        """Test that reach is measured with player 1 playing pre."""
        pre = TablePolicy({(): [1.0, 0.0]})
        distribution = advantage_distribution(game, uniform, pre, 0.75)

        assert distribution.support == ((0, 0),)
        assert distribution.p_norm == pytest.approx(0.5)
        assert distribution.probs == (1.0,)

    def test_unreachable_support_is_empty(self, game, uniform):
        """Test that a pre avoiding the support gives an empty distribution."""
        pre = TablePolicy({(): [0.0, 1.0]})
        distribution = advantage_distribution(game, uniform, pre, 0.75)

        assert distribution.is_empty
        with pytest.raises(EmptyDistributionError):
            entropy(distribution)

    def test_threshold_above_every_value_is_empty(self, game, uniform):
        """Test that nothing qualifies above the best utility."""
        distribution = advantage_distribution(game, uniform, UniformPolicy(), 1.5)

        assert distribution.support == ()
        assert distribution.is_empty


class TestEntropyHelpers:
    """Tests for entropy, top_mass and memorization_count."""

    def test_entropy_of_fair_coin(self):
        """Test the entropy of a uniform pair in nats."""
        assert distribution_entropy([0.5, 0.5]) == pytest.approx(math.log(2))

    def test_point_mass_has_zero_entropy(self):
        """Test that 0 * ln 0 counts as 0."""
        assert distribution_entropy([1.0, 0.0]) == 0.0

    def test_top_mass(self):
        """Test the sum of the largest probabilities."""
        assert top_mass([0.2, 0.5, 0.3], 2) == pytest.approx(0.8)
        assert top_mass([0.2, 0.5, 0.3], 0) == 0.0
        with pytest.raises(ValueError, match="non-negative"):
            top_mass([1.0], -1)

    def test_memorization_count(self):
        """Test ceil((1 - eps) * e^(H / eps))."""
        assert memorization_count(0.0, 0.25) == 1
        assert memorization_count(math.log(3), 0.5) == 5

    def test_memorization_count_does_not_overflow(self):
        """Test that huge exponents saturate."""
        assert memorization_count(1000.0, 0.5) >= 10 ** 18


class TestAdvantageStrategy:
    """Tests for advantage_strategy."""

    def test_prepares_the_winning_line(self, game, uniform):
        """Test that the strict player-1 prefixes of the chosen line are memorized."""
        pre = TablePolicy({(): [1.0, 0.0]})
        result = advantage_strategy(game, uniform, pre, 0.75, 0.25)

        assert result.entropy == 0.0
        assert result.z == 1
        assert result.strategy.memo_set == frozenset({()})
        assert result.value == pytest.approx(0.5)
        assert result.value_bound == pytest.approx(0.75 * 0.75 * 0.5)
        assert result.value >= result.value_bound

    def test_uniform_support_is_covered(self, uniform):
        """Test that all equally likely first advantages are prepared."""
        game = build_tree([[1.0, 0.0], [1.0, 0.0], [0.0, 0.0]])
        pre = TablePolicy({(): [0.5, 0.5, 0.0]})
        result = advantage_strategy(game, uniform, pre, 1.0, 0.5)

        assert len(result.distribution.support) == 2
        assert result.entropy == pytest.approx(math.log(2))
        assert result.z >= 2
        assert result.value >= result.value_bound

    def test_empty_distribution_raises_error(self, game, uniform):
        """Test that an unreachable threshold has no strategy."""
        with pytest.raises(EmptyDistributionError):
            advantage_strategy(game, uniform, UniformPolicy(), 1.5, 0.25)

    def test_invalid_eps_raises_error(self, game, uniform):
        """Test that eps must lie in (0, 1)."""
        with pytest.raises(ValueError, match="eps must lie"):
            advantage_strategy(game, uniform, UniformPolicy(), 0.75, 1.0)


class TestEquilibriumEntropyBound:
    """Tests for equilibrium_entropy_bound."""

    def test_bound_value(self):
        """Test the closed form."""
        expected = (0.9 - 0.5 - 0.01) * (math.log(1.0 / (1e-6 * 10)) - 5.0)
        assert equilibrium_entropy_bound(0.5, 0.9, 1e-6, 10) == pytest.approx(expected)

    def test_bound_is_never_negative(self):
        """Test that large penalties give a zero bound."""
        assert equilibrium_entropy_bound(0.5, 0.9, 0.1, 10) == 0.0

    def test_v_prime_too_close_raises_error(self):
        """Test the admissible range of v_prime."""
        with pytest.raises(ValueError, match="v_prime must lie"):
            equilibrium_entropy_bound(0.5, 0.505, 1e-6, 10)

    def test_reference_value(self):
        """Test the bound for v = 0.2, v' = 0.5, lambda1 = 1e-5, L = 100."""
        bound = equilibrium_entropy_bound(0.2, 0.5, 1e-5, 100)

        assert bound == pytest.approx(0.29 * (math.log(1000.0) - 5.0), abs=1e-9)
        assert bound == pytest.approx(0.5532, abs=1e-4)

    def test_vanishes_at_the_slack_boundary(self):
        """Test continuity where v' approaches v + 0.01."""
        assert equilibrium_entropy_bound(0.2, 0.2 + 0.01 + 1e-12, 1e-5, 100) == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("lambda1, L", [(1e-3, 10), (math.exp(-5.0), 1), (1e-2, 100), (1e-4, 1000)])
    def test_zero_when_penalty_times_length_is_large(self, lambda1, L):
        """Test that the bound is zero whenever lambda1 * L >= e^-5."""
        assert equilibrium_entropy_bound(0.2, 0.9, lambda1, L) == pytest.approx(0.0, abs=1e-12)


class TestEntropyProperties:
    """Seeded property suites for the entropy helpers."""

    @pytest.mark.parametrize("n", [1, 2, 3, 7, 10, 64, 1000])
    def test_uniform_entropy_is_log_n(self, n):
        """Test that n equally likely outcomes have entropy ln n."""
        assert abs(distribution_entropy([1.0 / n] * n) - math.log(n)) <= 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_top_mass_reaches_gamma(self, seed):
        """Test that the memorization count covers a gamma share of any distribution."""
        rng = np.random.default_rng(seed)
        for _ in range(100):
            size = int(rng.integers(1, 60))
            probs = rng.dirichlet(np.full(size, float(rng.choice([0.05, 0.3, 1.0, 5.0]))))
            h = distribution_entropy(probs)
            for gamma in np.linspace(0.1, 0.9, 9):
                z = memorization_count(h, 1.0 - gamma)

                assert z >= gamma * math.exp(h / (1.0 - gamma)) - 1e-9
                assert top_mass(probs, z) >= gamma - 1e-12

    @pytest.mark.parametrize("seed", range(100))
    def test_advantage_strategy_meets_its_bound(self, seed):
        """Test the guaranteed value and the memorization size on random games."""
        game = gen_random_game(seed=seed, depth=2 + 2 * (seed % 2), branching=2 + seed % 2, ragged=True)
        profile = Profile(random_policy(game, seed + 1, floor=0.1), random_policy(game, seed + 2, floor=0.1))
        pre = random_policy(game, seed + 3, floor=0.1)

        for v in (0.25, 0.5, 0.75):
            for eps in (0.25, 0.5):
                try:
                    result = advantage_strategy(game, profile, pre, v, eps)
                except EmptyDistributionError:
                    continue

                assert result.value >= result.value_bound - 1e-9
                assert result.value_bound == pytest.approx((1.0 - eps) * v * result.distribution.p_norm)
                assert result.strategy.size <= game.max_length * result.z
