"""
Shared game builders for the test suite.
"""

from collections import deque
from itertools import combinations
from typing import FrozenSet, List, Union

from src.game_core import GameTree, Policy, Profile, expected_value
from src.models import Player
from src.precompute import PrecompStrategy

Nested = Union[float, list]


def build_tree(nested: Nested) -> GameTree:
    """
    Build a GameTree from nested lists: a number is a terminal utility,
    a list holds the children of a decision node (labels a0, a1, ...).
    """
    actions, children, utilities = [], [], {}
    queue = deque([(nested, 0)])
    actions.append([])
    children.append([])
    while queue:
        item, node = queue.popleft()
        if not isinstance(item, list):
            utilities[node] = float(item)
            continue
        for a, sub in enumerate(item):
            child = len(actions)
            actions.append([])
            children.append([])
            actions[node].append(f"a{a}")
            children[node].append(child)
            queue.append((sub, child))
    return GameTree(actions, children, utilities)


def two_by_two() -> GameTree:
    """Player 1 picks a0 (P2 then chooses 1.0 or 0.0) or a1 (0.5 either way)."""
    return build_tree([[1.0, 0.0], [0.5, 0.5]])


def one_sided() -> GameTree:
    """Player 1 picks the win (a0) or the loss (a1); player 2 only passes."""
    return build_tree([[1.0], [0.0]])


def prefix_closed_sets(game: GameTree, player: Player) -> List[FrozenSet]:
    """Every memorization set of `player` closed under same-player prefixes."""
    candidates = [
        h for h in game.histories()
        if game.player(h) is player and not game.is_terminal(h)
    ]
    sets = []
    for size in range(len(candidates) + 1):
        for chosen in combinations(candidates, size):
            memo = frozenset(chosen)
            if all(h[:k] in memo for h in memo for k in range(len(h) - 2, -1, -2)):
                sets.append(memo)
    return sets


def owner_value(game: GameTree, owner: Player, base: Policy, opponent: Policy,
                pre: Policy, memo: FrozenSet, lam: float) -> float:
    """Owner's utility of a memorization set minus its penalty."""
    policy = PrecompStrategy(owner, base, pre, memo).as_policy()
    if owner is Player.P1:
        return expected_value(game, Profile(policy, opponent)) - lam * len(memo)
    return 1.0 - expected_value(game, Profile(opponent, policy)) - lam * len(memo)


def brute_force_best(game: GameTree, owner: Player, base: Policy, opponent: Policy,
                     pre: Policy, lam: float) -> float:
    return max(
        owner_value(game, owner, base, opponent, pre, memo, lam)
        for memo in prefix_closed_sets(game, owner)
    )


def closed_subsets(candidates) -> List[FrozenSet]:
    """Subsets of `candidates` closed under same-player prefixes, grown shortest history first."""
    subsets = [frozenset()]
    for h in sorted(candidates, key=len):
        parents = [h[:k] for k in range(len(h) - 2, -1, -2)]
        subsets += [memo | {h} for memo in subsets if all(p in memo for p in parents)]
    return subsets
