"""
Precompute Module
Precomputation strategies, meta-game utility and the best precomputation response.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, FrozenSet, Iterable, Iterator, Optional, Set, Tuple

import numpy as np

from src.errors import GameError
from src.game_core import (
    DEFAULT_NODE_LIMIT,
    ROOT,
    Game,
    Policy,
    Profile,
    ValueTable,
    action_distribution,
    estimate_value,
    expected_value,
)
from src.models import History, MetaConfig, Player

# Memorizing must beat staying on the base policy by more than this.
TIE_TOLERANCE = 1e-12

ValueOracle = Callable[[History], float]


class PrecompPolicy(Policy):
    """Plays `pre` on the memorization set and `base` everywhere else."""

    def __init__(self, base: Policy, pre: Policy, memo_set: FrozenSet[History]):
        self.base = base
        self.pre = pre
        self.memo_set = memo_set

    def distribution(self, game: Game, h: History) -> np.ndarray:
        source = self.pre if h in self.memo_set else self.base
        return source.distribution(game, h)


@dataclass(frozen=True)
class PrecompStrategy:
    """
    Precomputation strategy of one player.

    Attributes:
        owner: Player using the strategy
        base: Policy played outside the memorization set
        pre: Prepared policy played on the memorization set
        memo_set: Memorized histories of `owner`, closed under same-player prefixes

    Raises:
        GameError: If the memorization set holds opponent histories or is
            not prefix-closed
    """

    owner: Player
    base: Policy
    pre: Policy
    memo_set: FrozenSet[History] = field(default_factory=frozenset)

    def __post_init__(self):
        memo = frozenset(tuple(h) for h in self.memo_set)
        object.__setattr__(self, "memo_set", memo)
        for h in memo:
            if Player.for_length(len(h)) is not self.owner:
                raise GameError(f"History {h} does not belong to player {int(self.owner)}")
            for k in range(len(h) - 2, -1, -2):
                if h[:k] not in memo:
                    raise GameError(f"Memorization set is not prefix-closed: {h[:k]} missing for {h}")

    @property
    def size(self) -> int:
        return len(self.memo_set)

    def as_policy(self) -> Policy:
        """Policy that plays `pre` on the memorization set, `base` elsewhere."""
        if not self.memo_set:
            return self.base
        return PrecompPolicy(self.base, self.pre, self.memo_set)

    def validate(self, game: Game) -> None:
        for h in self.memo_set:
            game.validate(h)


def meta_utility(
    game: Game,
    s1: PrecompStrategy,
    s2: PrecompStrategy,
    cfg: MetaConfig,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> float:
    """
    Player-1 meta-game utility of two pure precomputation strategies.

    Player 2's meta utility is one minus this value.

    Raises:
        ValueError: If the owners are not player 1 and player 2
        EnumerationLimitError: If exact evaluation is too large
    """
    if s1.owner is not Player.P1 or s2.owner is not Player.P2:
        raise ValueError("meta_utility expects a player-1 and a player-2 strategy")
    profile = Profile(s1.as_policy(), s2.as_policy())
    value = expected_value(game, profile, ROOT, node_limit)
    return value - cfg.lambda1 * s1.size + cfg.lambda2 * s2.size


def owner_profile(owner: Player, own: Policy, opponent: Policy) -> Profile:
    return Profile(own, opponent) if owner is Player.P1 else Profile(opponent, own)


@dataclass
class BoundingTree:
    """
    Owner histories reached with probability at least `lam` when the owner
    plays the prepared policy, plus the successor frontier below them.
    """

    owner: Player
    lam: float
    histories: Dict[History, float] = field(default_factory=dict)
    frontier: Dict[History, float] = field(default_factory=dict)
    candidates: FrozenSet[History] = frozenset()

    def __len__(self) -> int:
        return len(self.histories)

    def __contains__(self, h: History) -> bool:
        return h in self.histories

    @property
    def node_count(self) -> int:
        return len(self.histories) + len(self.frontier)


def _opponent_layer(game: Game, profile: Profile, h: History, reach: float) -> Iterator[Tuple[History, float]]:
    if game.is_terminal(h):
        yield h, reach
        return
    for b, q in enumerate(profile.distribution(game, h)):
        if q > 0.0:
            yield h + (b,), reach * float(q)


def successors(game: Game, profile: Profile, h: History, reach: float) -> Iterator[Tuple[History, float]]:
    """
    Next owner decision points after one owner move and one opponent move,
    plus terminal histories reached in between. Zero-probability branches
    are skipped.
    """
    for a, p in enumerate(profile.distribution(game, h)):
        if p > 0.0:
            yield from _opponent_layer(game, profile, h + (a,), reach * float(p))


def _first_decisions(game: Game, profile: Profile, owner: Player) -> Iterator[Tuple[History, float]]:
    if owner is Player.P1:
        yield ROOT, 1.0
    else:
        yield from _opponent_layer(game, profile, ROOT, 1.0)


def bounding_tree(
    game: Game,
    pre: Policy,
    opponent: Policy,
    lam: float,
    owner: Player = Player.P1,
) -> BoundingTree:
    """
    Materialize the bounding tree by breadth-first search.

    Inspection helper: `best_precomp_response` prunes the same way on the
    fly and never builds the tree. Every history a best response memorizes
    is one of `candidates`.

    Args:
        game: Game to search
        pre: Prepared policy of the owner
        opponent: Fixed opponent policy
        lam: Reach threshold (the owner's penalty factor)
        owner: Player that memorizes

    Raises:
        ValueError: If lam is not positive
    """
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    profile = owner_profile(owner, pre, opponent)
    tree = BoundingTree(owner=owner, lam=lam)
    queue = deque()

    def classify(h: History, reach: float) -> None:
        if game.player(h) is owner and reach >= lam:
            tree.histories[h] = reach
            if not game.is_terminal(h):
                queue.append(h)
        else:
            tree.frontier[h] = reach

    for h, reach in _first_decisions(game, profile, owner):
        classify(h, reach)
    while queue:
        h = queue.popleft()
        for child, reach in successors(game, profile, h, tree.histories[h]):
            classify(child, reach)

    tree.candidates = frozenset(h for h in tree.histories if not game.is_terminal(h))
    return tree


@dataclass(frozen=True)
class BestResponse:
    """
    Result of a best precomputation response.

    Attributes:
        strategy: The returned precomputation strategy
        value: Owner's utility minus its memorization penalty
        utility: Owner's utility without the penalty
        memo_size: Size of the memorization set
        samples: Rollouts per history estimate (None for exact or oracle values)
        visited: Histories visited by the search
    """

    strategy: PrecompStrategy
    value: float
    utility: float
    memo_size: int
    samples: Optional[int]
    visited: int


def default_samples(game: Game, lam: float, eps: float, delta: float) -> int:
    """Rollouts per history that make every estimate eps/4-accurate with probability 1 - delta."""
    actions = max(game.max_actions, 1)
    count = actions ** 2 * (game.max_length + 1) / (delta * lam)
    return max(1, math.ceil(16.0 * math.log(max(count, 1.0 + 1e-12)) / eps ** 2))


class _BestResponseSearch:
    """Depth-first evaluation of the optimal memorization subtree."""

    def __init__(
        self,
        game: Game,
        owner: Player,
        pre: Policy,
        lam: float,
        leaf_value: Callable[[History], float],
    ):
        self.game = game
        self.owner = owner
        self.lam = lam
        self.leaf_value = leaf_value
        self.pre = pre
        self.best_choices: Set[History] = set()
        self.visited = 0
        self._opponent_policy: Optional[Policy] = None

    def owner_utility(self, u1: float) -> float:
        return u1 if self.owner is Player.P1 else 1.0 - u1

    def decision(self, h: History, reach: float) -> float:
        if reach == 0.0:
            return 0.0
        self.visited += 1
        if self.game.is_terminal(h):
            return reach * self.owner_utility(self.game.utility(h))
        stay = reach * self.owner_utility(self.leaf_value(h))
        if reach < self.lam:
            return stay

        memorize = -self.lam
        for a, p in enumerate(action_distribution(self.game, self.pre, h)):
            if p > 0.0:
                memorize += self.reply(h + (a,), reach * float(p))
        if memorize > stay + TIE_TOLERANCE:
            self.best_choices.add(h)
            return memorize
        return stay

    def reply(self, h: History, reach: float) -> float:
        if self.game.is_terminal(h):
            self.visited += 1
            return reach * self.owner_utility(self.game.utility(h))
        total = 0.0
        for b, q in enumerate(action_distribution(self.game, self._opponent_policy, h)):
            if q > 0.0:
                total += self.decision(h + (b,), reach * float(q))
        return total

    def solve(self, opponent: Policy) -> float:
        self._opponent_policy = opponent
        if self.owner is Player.P1:
            return self.decision(ROOT, 1.0)
        return self.reply(ROOT, 1.0)

    def memo_set(self) -> FrozenSet[History]:
        if self.owner is Player.P1:
            roots: Iterable[History] = [ROOT]
        elif self.game.is_terminal(ROOT):
            roots = []
        else:
            roots = list(self.game.children(ROOT))

        memo: Set[History] = set()
        stack = [h for h in roots if h in self.best_choices]
        while stack:
            h = stack.pop()
            memo.add(h)
            for child in self.game.children(h):
                if self.game.is_terminal(child):
                    continue
                for grandchild in self.game.children(child):
                    if grandchild in self.best_choices:
                        stack.append(grandchild)
        return frozenset(memo)


def best_precomp_response(
    game: Game,
    base: Policy,
    opponent: Policy,
    pre: Policy,
    cfg: MetaConfig,
    eps: float = 0.05,
    delta: float = 0.05,
    seed: int = 0,
    exact: bool = False,
    owner: Player = Player.P1,
    samples: Optional[int] = None,
    value_oracle: Optional[ValueOracle] = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> BestResponse:
    """
    Compute the best precomputation response of `owner` against a fixed opponent.

    Histories reached with probability below the owner's penalty are never
    memorized; above it, memorizing wins when the prepared continuation is
    worth more than the penalty plus the base continuation.

    Args:
        game: Game to solve
        base: Owner's base policy
        opponent: Fixed opponent policy
        pre: Owner's prepared policy
        cfg: Memorization penalties; the owner's factor is used
        eps: Target accuracy of sampled values
        delta: Failure probability of sampled values
        seed: Rollout seed
        exact: Use exact values instead of rollouts
        owner: Responding player
        samples: Rollouts per history (defaults to the accuracy formula)
        value_oracle: Callable giving u1 at a history, replacing rollouts
        node_limit: Guard for exact enumeration

    Returns:
        BestResponse with the strategy and its penalty-inclusive value

    Raises:
        ValueError: If eps or delta are outside (0, 1)
        EnumerationLimitError: If exact values need too many histories
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if samples is not None and samples < 1:
        raise ValueError(f"samples must be at least 1, got {samples}")

    lam = cfg.penalty(owner)
    base_profile = owner_profile(owner, base, opponent)
    used_samples: Optional[int] = None

    if exact:
        table = ValueTable(game, base_profile, node_limit)
        leaf_value = table.value
    elif value_oracle is not None:
        leaf_value = value_oracle
    else:
        used_samples = samples or default_samples(game, lam, eps, delta)

        def leaf_value(h: History) -> float:
            return estimate_value(game, base_profile, h, used_samples, seed).mean

    search = _BestResponseSearch(game, owner, pre, lam, leaf_value)
    value = search.solve(opponent)
    memo = search.memo_set()
    strategy = PrecompStrategy(owner, base, pre, memo)
    return BestResponse(
        strategy=strategy,
        value=value,
        utility=value + lam * len(memo),
        memo_size=len(memo),
        samples=used_samples,
        visited=search.visited,
    )
