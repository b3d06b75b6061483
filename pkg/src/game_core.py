"""
Game Core Module
Alternating two-player games, policy oracles, reach probabilities and values.
"""

from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from src.errors import EnumerationLimitError, GameError
from src.models import History, Player, ValueEstimate

ROOT: History = ()

# Exact enumeration refuses to visit more histories than this.
DEFAULT_NODE_LIMIT = 10 ** 6

# Rollouts per generator; results do not depend on how chunks are scheduled.
ROLLOUT_CHUNK = 4096

PROBABILITY_TOLERANCE = 1e-9
SENTINEL_ACTION = "pass"

_POINT_MASS = np.ones(1)
_POINT_MASS.setflags(write=False)


class Game(ABC):
    """
    Finite two-player zero-sum alternating game with utilities in [0, 1].

    Histories are tuples of action indices. Player 1 moves at even lengths.
    Subclasses may expand histories lazily.
    """

    @property
    @abstractmethod
    def max_length(self) -> int:
        """Maximum history length L."""

    @property
    @abstractmethod
    def max_actions(self) -> int:
        """Largest number of actions at any history (A)."""

    @abstractmethod
    def actions(self, h: History) -> Tuple[str, ...]:
        """Action labels at `h`; empty for terminal histories."""

    @abstractmethod
    def utility(self, h: History) -> float:
        """Player-1 utility of terminal history `h`."""

    def is_terminal(self, h: History) -> bool:
        return not self.actions(h)

    def player(self, h: History) -> Player:
        return Player.for_length(len(h))

    def contains(self, h: History) -> bool:
        for i, action in enumerate(h):
            if not 0 <= action < len(self.actions(h[:i])):
                return False
        return True

    def validate(self, h: History) -> None:
        """
        Check that `h` is a history of this game.

        Raises:
            GameError: If some action index is out of range
        """
        if not self.contains(tuple(h)):
            raise GameError(f"Unknown history: {tuple(h)}")

    def history_key(self, h: History):
        """Deterministic sort key (shorter first, then lexicographic)."""
        return (len(h), h)

    def labels(self, h: History) -> List[str]:
        """Human readable action path of `h`."""
        return [self.actions(h[:i])[a] for i, a in enumerate(h)]

    def children(self, h: History) -> Iterator[History]:
        for a in range(len(self.actions(h))):
            yield h + (a,)


class GameTree(Game):
    """
    Explicit game tree with integer node ids. Node 0 is the root.

    Args:
        actions_per_node: Action labels per node id
        children: Child node ids per node id, aligned with the labels
        terminal_utilities: Player-1 utility per terminal node id

    Raises:
        GameError: If the structure is not a tree rooted at node 0, labels
            and children disagree, or a utility is missing or outside [0, 1]
    """

    def __init__(
        self,
        actions_per_node: Sequence[Sequence[str]],
        children: Sequence[Sequence[int]],
        terminal_utilities: Mapping[int, float],
    ):
        if not actions_per_node:
            raise GameError("Game has no nodes")
        if len(actions_per_node) != len(children):
            raise GameError("actions_per_node and children must have the same length")

        self._actions = [tuple(str(a) for a in acts) for acts in actions_per_node]
        self._children = [tuple(int(c) for c in kids) for kids in children]
        self._utilities: Dict[int, float] = {}
        self._histories: List[Optional[History]] = [None] * len(self._actions)
        self._index: Dict[History, int] = {}

        self._build_index()
        self._validate_utilities(terminal_utilities)
        self._max_length = max(len(h) for h in self._index)
        self._max_actions = max(len(a) for a in self._actions)

    def _build_index(self) -> None:
        node_count = len(self._actions)
        queue = deque([(0, ROOT)])
        while queue:
            node, h = queue.popleft()
            if self._histories[node] is not None:
                raise GameError(f"Node {node} is reachable more than once")
            self._histories[node] = h
            self._index[h] = node
            acts, kids = self._actions[node], self._children[node]
            if len(acts) != len(kids):
                raise GameError(
                    f"Node {node} has {len(acts)} action labels but {len(kids)} children"
                )
            for a, child in enumerate(kids):
                if not 0 <= child < node_count:
                    raise GameError(f"Node {node} points to unknown child {child}")
                if child == 0:
                    raise GameError("The root cannot be a child")
                queue.append((child, h + (a,)))

        unreachable = [i for i, h in enumerate(self._histories) if h is None]
        if unreachable:
            raise GameError(f"Nodes not reachable from the root: {unreachable[:10]}")

    def _validate_utilities(self, terminal_utilities: Mapping[int, float]) -> None:
        for node, value in terminal_utilities.items():
            node = int(node)
            if not 0 <= node < len(self._actions):
                raise GameError(f"Utility given for unknown node {node}")
            if self._actions[node]:
                raise GameError(f"Utility given for non-terminal node {node}")
            value = float(value)
            if not 0.0 <= value <= 1.0:
                raise GameError(f"Utility {value} of node {node} is outside [0, 1]")
            self._utilities[node] = value

        missing = [i for i, acts in enumerate(self._actions) if not acts and i not in self._utilities]
        if missing:
            raise GameError(f"Terminal nodes without utility: {missing[:10]}")

    @property
    def max_length(self) -> int:
        return self._max_length

    @property
    def max_actions(self) -> int:
        return self._max_actions

    @property
    def node_count(self) -> int:
        return len(self._actions)

    def node_id(self, h: History) -> int:
        try:
            return self._index[tuple(h)]
        except KeyError:
            raise GameError(f"Unknown history: {tuple(h)}") from None

    def history(self, node: int) -> History:
        return self._histories[node]

    def actions(self, h: History) -> Tuple[str, ...]:
        return self._actions[self.node_id(h)]

    def utility(self, h: History) -> float:
        node = self.node_id(h)
        if node not in self._utilities:
            raise GameError(f"History {tuple(h)} is not terminal")
        return self._utilities[node]

    def contains(self, h: History) -> bool:
        return tuple(h) in self._index

    def history_key(self, h: History):
        return self._index[h]

    def histories(self) -> List[History]:
        """All histories in node id order."""
        return list(self._histories)

    def to_dict(self) -> dict:
        """Structure in the game file schema (without policies)."""
        return {
            "actions_per_node": [list(acts) for acts in self._actions],
            "children": [list(kids) for kids in self._children],
            "terminal_utilities": {str(k): v for k, v in sorted(self._utilities.items())},
        }


def sentinelize(game: GameTree) -> GameTree:
    """
    Make every terminal history end on player 1's turn.

    Terminals at odd length get a single pass-through child carrying the
    utility. Already normalized games are returned unchanged.
    """
    odd_terminals = [
        game.node_id(h) for h in game.histories()
        if game.is_terminal(h) and game.player(h) is Player.P2
    ]
    if not odd_terminals:
        return game

    structure = game.to_dict()
    actions = structure["actions_per_node"]
    children = structure["children"]
    utilities = {int(k): v for k, v in structure["terminal_utilities"].items()}

    for node in odd_terminals:
        sentinel = len(actions)
        actions[node] = [SENTINEL_ACTION]
        children[node] = [sentinel]
        actions.append([])
        children.append([])
        utilities[sentinel] = utilities.pop(node)

    return GameTree(actions, children, utilities)


class Policy(ABC):
    """Oracle mapping a history to a distribution over its actions."""

    @abstractmethod
    def distribution(self, game: Game, h: History) -> np.ndarray:
        """Probability vector over `game.actions(h)`."""


def action_distribution(game: Game, policy: Policy, h: History) -> np.ndarray:
    """
    Query `policy` at `h`, skipping the oracle where only one action exists.

    Raises:
        GameError: If `h` is terminal
    """
    count = len(game.actions(h))
    if count == 0:
        raise GameError(f"No actions at terminal history {h}")
    if count == 1:
        return _POINT_MASS
    return policy.distribution(game, h)


def check_distribution(probs: Sequence[float], where: str = "") -> np.ndarray:
    """
    Validate and freeze a probability vector.

    Raises:
        GameError: If entries are negative or do not sum to 1
    """
    vector = np.asarray(probs, dtype=float)
    if vector.ndim != 1 or vector.size == 0:
        raise GameError(f"Probability vector{where} must be a non-empty list")
    if not np.all(np.isfinite(vector)) or np.any(vector < 0):
        raise GameError(f"Probability vector{where} has negative or non-finite entries")
    if abs(vector.sum() - 1.0) > PROBABILITY_TOLERANCE:
        raise GameError(f"Probability vector{where} sums to {vector.sum()}, expected 1")
    vector.setflags(write=False)
    return vector


class UniformPolicy(Policy):
    def distribution(self, game: Game, h: History) -> np.ndarray:
        count = len(game.actions(h))
        return np.full(count, 1.0 / count)


class TablePolicy(Policy):
    """
    Explicit per-history probability vectors; histories without an entry
    play uniformly.
    """

    def __init__(self, table: Optional[Mapping[History, Sequence[float]]] = None):
        self._table: Dict[History, np.ndarray] = {}
        for h, probs in (table or {}).items():
            self._table[tuple(h)] = check_distribution(probs, f" at {tuple(h)}")

    @property
    def table(self) -> Dict[History, np.ndarray]:
        return dict(self._table)

    def distribution(self, game: Game, h: History) -> np.ndarray:
        count = len(game.actions(h))
        vector = self._table.get(h)
        if vector is None:
            return np.full(count, 1.0 / count)
        if vector.size != count:
            raise GameError(
                f"Policy vector at {h} has {vector.size} entries for {count} actions"
            )
        return vector


@dataclass(frozen=True)
class Profile:
    """Pair of policies, one per player."""

    p1: Policy
    p2: Policy

    def policy_for(self, player: Player) -> Policy:
        return self.p1 if player is Player.P1 else self.p2

    def distribution(self, game: Game, h: History) -> np.ndarray:
        return action_distribution(game, self.policy_for(game.player(h)), h)


def reach_probability(game: Game, profile: Profile, start: History, end: History) -> float:
    """
    Probability of moving from `start` to `end` under `profile`.

    Returns:
        Product of the acting players' probabilities along the path, 0 when
        `start` is not a prefix of `end`

    Raises:
        GameError: If either history is unknown
    """
    start, end = tuple(start), tuple(end)
    game.validate(start)
    game.validate(end)
    if len(start) > len(end) or end[:len(start)] != start:
        return 0.0

    probability = 1.0
    for i in range(len(start), len(end)):
        probability *= float(profile.distribution(game, end[:i])[end[i]])
        if probability == 0.0:
            break
    return probability


class ValueTable:
    """
    Memoized exact player-1 values of histories under a fixed profile.

    Args:
        game: Game to evaluate
        profile: Policies of both players
        node_limit: Maximum number of histories expanded overall
        prune_zero: Skip zero-probability branches when summing; values of
            histories below such branches are then not tabulated
    """

    def __init__(
        self,
        game: Game,
        profile: Profile,
        node_limit: int = DEFAULT_NODE_LIMIT,
        prune_zero: bool = True,
    ):
        self.game = game
        self.profile = profile
        self.node_limit = node_limit
        self.prune_zero = prune_zero
        self._values: Dict[History, float] = {}

    def __len__(self) -> int:
        return len(self._values)

    def __contains__(self, h: History) -> bool:
        return h in self._values

    def as_dict(self) -> Dict[History, float]:
        return dict(self._values)

    def value(self, h: History = ROOT) -> float:
        """
        Exact u1 at `h`.

        Raises:
            EnumerationLimitError: If the subtree exceeds the node limit
        """
        h = tuple(h)
        cached = self._values.get(h)
        if cached is not None:
            return cached
        return self._fill(h)

    def _fill(self, h: History) -> float:
        if len(self._values) >= self.node_limit:
            raise EnumerationLimitError(self.node_limit)

        if self.game.is_terminal(h):
            value = self.game.utility(h)
        else:
            probs = self.profile.distribution(self.game, h)
            value = 0.0
            for a, p in enumerate(probs):
                if p == 0.0 and self.prune_zero:
                    continue
                child = h + (a,)
                child_value = self._values.get(child)
                if child_value is None:
                    child_value = self._fill(child)
                value += float(p) * child_value
            value = min(max(value, 0.0), 1.0)

        self._values[h] = value
        return value


def expected_value(
    game: Game,
    profile: Profile,
    h: History = ROOT,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> float:
    """
    Exact expected player-1 utility from `h`.

    Raises:
        GameError: If `h` is unknown
        EnumerationLimitError: If more than `node_limit` histories are needed
    """
    game.validate(h)
    return ValueTable(game, profile, node_limit).value(tuple(h))


def value_table(
    game: Game,
    profile: Profile,
    h: History = ROOT,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> Dict[History, float]:
    """Exact values of every history in the subtree of `h`, including zero-reach branches."""
    game.validate(h)
    table = ValueTable(game, profile, node_limit, prune_zero=False)
    table.value(tuple(h))
    return table.as_dict()


def rollout_generator(seed: int, chunk: int, h: History) -> np.random.Generator:
    """Generator for one rollout chunk from `h`, independent of other chunks and histories."""
    return np.random.default_rng([seed, chunk, len(h), *h])


def _rollout_batch(game: Game, profile: Profile, h: History, count: int, rng: np.random.Generator) -> float:
    # Rollouts sharing a history move together; the multinomial split keeps
    # the joint distribution of `count` independent rollouts.
    total = 0.0
    groups: Dict[History, int] = {h: count}
    while groups:
        next_groups: Dict[History, int] = {}
        for node, n in groups.items():
            if game.is_terminal(node):
                total += n * game.utility(node)
                continue
            probs = np.clip(np.asarray(profile.distribution(game, node), dtype=float), 0.0, None)
            if probs.size == 1:
                next_groups[node + (0,)] = n
                continue
            split = rng.multinomial(n, probs / probs.sum())
            for a, k in enumerate(split):
                if k:
                    next_groups[node + (a,)] = int(k)
        groups = next_groups
    return total


def estimate_value(
    game: Game,
    profile: Profile,
    h: History,
    K: int,
    seed: int,
) -> ValueEstimate:
    """
    Mean utility of K rollouts from `h`.

    Args:
        game: Game to sample
        profile: Policies of both players
        h: Start history
        K: Number of rollouts
        seed: Non-negative root seed

    Returns:
        ValueEstimate, identical for identical inputs

    Raises:
        ValueError: If K < 1 or seed is negative
        GameError: If `h` is unknown
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    if seed < 0:
        raise ValueError(f"seed must be non-negative, got {seed}")
    h = tuple(h)
    game.validate(h)

    total = 0.0
    for chunk, start in enumerate(range(0, K, ROLLOUT_CHUNK)):
        size = min(ROLLOUT_CHUNK, K - start)
        total += _rollout_batch(game, profile, h, size, rollout_generator(seed, chunk, h))
    return ValueEstimate(mean=total / K, samples=K, seed=seed)


def high_reach_count(
    game: Game,
    profile: Profile,
    p: float,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> int:
    """
    Number of histories reached from the root with probability at least `p`.

    Raises:
        ValueError: If p is not in (0, 1]
        EnumerationLimitError: If the count passes `node_limit`
    """
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    count = 0
    stack = [(ROOT, 1.0)]
    while stack:
        h, reach = stack.pop()
        if reach < p:
            continue
        count += 1
        if count > node_limit:
            raise EnumerationLimitError(node_limit)
        if game.is_terminal(h):
            continue
        for a, q in enumerate(profile.distribution(game, h)):
            if q > 0.0:
                stack.append((h + (a,), reach * float(q)))
    return count
