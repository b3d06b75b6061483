"""
Entropy Module
How much randomness protects a player against an opponent's preparation.
"""

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

from src.errors import EmptyDistributionError
from src.game_core import (
    DEFAULT_NODE_LIMIT,
    ROOT,
    Game,
    Policy,
    Profile,
    ValueTable,
    expected_value,
    reach_probability,
)
from src.models import History, Player
from src.precompute import PrecompStrategy

VALUE_TOLERANCE = 1e-12

# Constants of the equilibrium entropy bound.
BOUND_SLACK = 0.01
BOUND_SHIFT = 5.0

# exp() overflows a float beyond this exponent.
_MAX_EXPONENT = 700.0


@dataclass(frozen=True)
class AdvantageDistribution:
    """
    Where player 1 first reaches an advantage of at least `v`, weighted by
    how likely the prepared line reaches each such history.

    Attributes:
        support: First-advantage histories, sorted by history key
        reach: Reach probability of each support history under (pre, player 2)
        probs: `reach` normalized by `p_norm` (all zero when empty)
        p_norm: Total reach of the support
        v: Advantage threshold
    """

    support: Tuple[History, ...]
    reach: Tuple[float, ...]
    probs: Tuple[float, ...]
    p_norm: float
    v: float

    @property
    def is_empty(self) -> bool:
        return self.p_norm <= 0.0


@dataclass(frozen=True)
class AdvantageStrategy:
    """
    Constructive precomputation strategy for an advantage threshold.

    `value_bound` is the guaranteed value (1 - eps) * v * p_norm.
    """

    strategy: PrecompStrategy
    value: float
    z: int
    entropy: float
    distribution: AdvantageDistribution
    value_bound: float


def first_advantage_set(
    game: Game,
    profile: Profile,
    v: float,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> List[History]:
    """
    Player-1 histories whose value reaches `v` with no player-1 prefix doing so.

    The game should be sentinelized so that every terminal is a player-1 history.

    Raises:
        EnumerationLimitError: If exact values need too many histories
    """
    table = ValueTable(game, profile, node_limit, prune_zero=False)
    table.value(ROOT)

    found: List[History] = []
    stack = [ROOT]
    while stack:
        h = stack.pop()
        if game.player(h) is Player.P1 and table.value(h) >= v - VALUE_TOLERANCE:
            found.append(h)
            continue
        if not game.is_terminal(h):
            stack.extend(game.children(h))
    return sorted(found, key=game.history_key)


def advantage_distribution(
    game: Game,
    profile: Profile,
    pre: Policy,
    v: float,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> AdvantageDistribution:
    """
    Distribution over the first-advantage set when player 1 plays `pre`.

    An unreachable support yields a distribution with `is_empty` set.
    """
    support = tuple(first_advantage_set(game, profile, v, node_limit))
    prepared = Profile(pre, profile.p2)
    reach = tuple(reach_probability(game, prepared, ROOT, h) for h in support)
    p_norm = math.fsum(reach)
    if p_norm > 0.0:
        probs = tuple(r / p_norm for r in reach)
    else:
        probs = tuple(0.0 for _ in reach)
    return AdvantageDistribution(support, reach, probs, p_norm, v)


def distribution_entropy(probs: Sequence[float]) -> float:
    """Entropy in nats, with 0 * ln 0 = 0."""
    return -math.fsum(p * math.log(p) for p in probs if p > 0.0)


def entropy(d: AdvantageDistribution) -> float:
    """
    Entropy of a first-advantage distribution in nats.

    Raises:
        EmptyDistributionError: If the distribution has no mass
    """
    if d.is_empty:
        raise EmptyDistributionError(
            f"No first-advantage history for v={d.v} is reachable; entropy is undefined"
        )
    return distribution_entropy(d.probs)


def top_mass(probs: Sequence[float], z: int) -> float:
    """
    Sum of the z largest probabilities.

    Raises:
        ValueError: If z is negative
    """
    if z < 0:
        raise ValueError(f"z must be non-negative, got {z}")
    return math.fsum(sorted(probs, reverse=True)[:z])


def memorization_count(entropy_nats: float, eps: float) -> int:
    """ceil((1 - eps) * e^(H / eps)): how many first-advantage lines to prepare."""
    exponent = entropy_nats / eps
    if exponent > _MAX_EXPONENT:
        return int(1e18)
    return max(1, math.ceil((1.0 - eps) * math.exp(exponent)))


def advantage_strategy(
    game: Game,
    profile: Profile,
    pre: Policy,
    v: float,
    eps: float,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> AdvantageStrategy:
    """
    Prepare the most likely first-advantage lines.

    The z most likely support histories are chosen (ties broken by history
    key) and every strict player-1 prefix of them is memorized. Against
    player 2's policy the result is worth at least (1 - eps) * v * p_norm.

    Args:
        game: Sentinelized game
        profile: Player 1 base policy and player 2 policy
        pre: Prepared policy of player 1
        v: Advantage threshold
        eps: Slack in (0, 1)

    Raises:
        ValueError: If eps is outside (0, 1)
        EmptyDistributionError: If no first-advantage history is reachable
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")

    distribution = advantage_distribution(game, profile, pre, v, node_limit)
    entropy_nats = entropy(distribution)
    z = memorization_count(entropy_nats, eps)

    order = sorted(
        range(len(distribution.support)),
        key=lambda i: (-distribution.reach[i], game.history_key(distribution.support[i])),
    )
    chosen = [distribution.support[i] for i in order[:z]]
    memo = frozenset(h[:k] for h in chosen for k in range(len(h) - 2, -1, -2))

    strategy = PrecompStrategy(Player.P1, profile.p1, pre, memo)
    value = expected_value(game, Profile(strategy.as_policy(), profile.p2), ROOT, node_limit)
    return AdvantageStrategy(
        strategy=strategy,
        value=value,
        z=z,
        entropy=entropy_nats,
        distribution=distribution,
        value_bound=(1.0 - eps) * v * distribution.p_norm,
    )


def equilibrium_entropy_bound(v: float, v_prime: float, lambda1: float, L: int) -> float:
    """
    Lower bound on the entropy player 2 must show in equilibrium.

    Applies when player 1 could win outright with unlimited preparation,
    player 2 holds the game to `v` in the meta-game and `v_prime` without
    preparation.

    Raises:
        ValueError: If v_prime is not in (v + 0.01, 1), lambda1 <= 0 or L < 1
    """
    if not 0.0 <= v <= 1.0:
        raise ValueError(f"v must lie in [0, 1], got {v}")
    if not v + BOUND_SLACK < v_prime < 1.0:
        raise ValueError(f"v_prime must lie in (v + {BOUND_SLACK}, 1), got {v_prime}")
    if lambda1 <= 0:
        raise ValueError(f"lambda1 must be positive, got {lambda1}")
    if L < 1:
        raise ValueError(f"L must be at least 1, got {L}")
    return max(0.0, (v_prime - v - BOUND_SLACK) * (math.log(1.0 / (lambda1 * L)) - BOUND_SHIFT))
