"""
Transform Module
High-probability histories and the imperfect-information precompute/stop game.
"""

import math
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import AbstractSet, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import EnumerationLimitError, GameError
from src.game_core import DEFAULT_NODE_LIMIT, ROOT, Game, Policy, action_distribution
from src.models import History, MetaConfig, Player

STOP = 0
PRECOMPUTE = 1
DECISION_ACTIONS = ("stop", "precompute")

# (player, chance history, own precompute/stop choices)
InfosetKey = Tuple[Player, History, Tuple[int, ...]]


@dataclass(frozen=True)
class HighProbabilitySet:
    """
    Histories some precomputation strategy can reach with probability at
    least the penalty factor.

    Attributes:
        w1: Histories where player 1 may still be precomputing
        w2: Histories where player 2 may still be precomputing
        frontier: Successors of W1 and W2 outside both sets
    """

    w1: FrozenSet[History]
    w2: FrozenSet[History]
    frontier: FrozenSet[History]

    @property
    def histories(self) -> FrozenSet[History]:
        return self.w1 | self.w2 | self.frontier

    def __contains__(self, h: History) -> bool:
        return h in self.w1 or h in self.w2 or h in self.frontier

    def __len__(self) -> int:
        return len(self.histories)

    def __iter__(self) -> Iterator[History]:
        return iter(self.histories)

    def allows(self, player: Player, h: History) -> bool:
        """Whether `player` may choose to precompute at `h`."""
        return h in (self.w1 if player is Player.P1 else self.w2)


def _cutoff_reach_set(
    game: Game,
    precomputer: Player,
    opponent_base: Policy,
    pre: Policy,
    lam: float,
    node_limit: int,
) -> FrozenSet[History]:
    # Best reach over cutoffs: the precomputer plays `pre`; the other player
    # plays `pre` on its first s decisions and its base policy afterwards.
    # splits[s] holds the other player's factor for cutoff s.
    found = set()
    if lam > 1.0:
        return frozenset()
    queue = deque([(ROOT, 1.0, (1.0,))])
    while queue:
        h, own, splits = queue.popleft()
        found.add(h)
        if len(found) > node_limit:
            raise EnumerationLimitError(node_limit)
        if game.is_terminal(h):
            continue

        prepared = action_distribution(game, pre, h)
        if game.player(h) is precomputer:
            for a, p in enumerate(prepared):
                child_own = own * float(p)
                if child_own * max(splits) >= lam:
                    queue.append((h + (a,), child_own, splits))
        else:
            fallback = action_distribution(game, opponent_base, h)
            for a, (p, b) in enumerate(zip(prepared, fallback)):
                child_splits = tuple(m * float(b) for m in splits) + (splits[-1] * float(p),)
                if own * max(child_splits) >= lam:
                    queue.append((h + (a,), own, child_splits))
    return frozenset(found)


def high_prob_set(
    game: Game,
    base1: Policy,
    base2: Policy,
    pre: Policy,
    cfg: MetaConfig,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> HighProbabilitySet:
    """
    Histories worth offering a precompute choice, plus their successor frontier.

    Player i's set keeps the histories reached with probability at least
    lambda_i when player i plays `pre` and the other player prepares up to
    some depth and then falls back to its base policy.

    Raises:
        EnumerationLimitError: If a set grows beyond `node_limit`
    """
    w1 = _cutoff_reach_set(game, Player.P1, base2, pre, cfg.lambda1, node_limit)
    w2 = _cutoff_reach_set(game, Player.P2, base1, pre, cfg.lambda2, node_limit)
    inner = w1 | w2

    frontier = set()
    for h in inner:
        if game.is_terminal(h):
            continue
        for child in game.children(h):
            if game.is_terminal(child):
                if child not in inner:
                    frontier.add(child)
                continue
            for grandchild in game.children(child):
                if grandchild not in inner:
                    frontier.add(grandchild)
    return HighProbabilitySet(w1, w2, frozenset(frontier))


def value_targets(game: Game, W: Union[HighProbabilitySet, AbstractSet[History]]) -> List[History]:
    """Histories that become terminals of the transformed game and need a value."""
    targets = []
    stack = [ROOT]
    while stack:
        h = stack.pop()
        if h not in W or game.is_terminal(h):
            targets.append(h)
            continue
        stack.extend(game.children(h))
    return sorted(targets, key=game.history_key)


class NodeKind(Enum):
    DECISION = "decision"
    CHANCE = "chance"
    TERMINAL = "terminal"


@dataclass
class TransformedNode:
    """
    Node of the transformed game.

    Decision nodes have two children (stop, precompute). Chance nodes draw
    the base-game action of `player` from `probs`; `actions` holds the
    base-game action index of each child. Terminal utilities are base-game
    values; memorization penalties are charged per infoset.
    """

    kind: NodeKind
    history: History
    player: Optional[Player]
    chance_reach: float
    children: List[int] = field(default_factory=list)
    probs: Tuple[float, ...] = ()
    actions: Tuple[int, ...] = ()
    infoset: Optional[InfosetKey] = None
    utility: float = 0.0


# Behaviour profile of the transformed game: infoset -> [P(stop), P(precompute)]
TransformedProfile = Mapping[InfosetKey, Sequence[float]]


def expected_memo_size(precompute: Mapping[History, float]) -> float:
    """Expected number of memorized histories: each choice counts if every earlier own choice precomputed."""
    total = 0.0
    for h, x in precompute.items():
        chain = x
        for k in range(len(h) - 2, -1, -2):
            chain *= precompute.get(h[:k], 0.0)
            if chain == 0.0:
                break
        total += chain
    return total


class TransformedGame:
    """
    Tree of the transformed game with its infosets.

    A player deciding at an infoset sees the base-game history and its own
    earlier precompute/stop choices, but not the opponent's choices.
    Choosing precompute at an infoset costs its owner the full penalty,
    whatever the opponent and chance do, so a profile is worth its expected
    base value minus lambda_i times player i's expected memorization size.
    """

    def __init__(self, nodes: List[TransformedNode], cfg: MetaConfig):
        self.nodes = nodes
        self.cfg = cfg
        self.infosets: Dict[InfosetKey, List[int]] = {}
        for index, node in enumerate(nodes):
            if node.kind is NodeKind.DECISION:
                self.infosets.setdefault(node.infoset, []).append(index)

        # Own-choice tree: the next infosets a player reaches after precomputing.
        self.successors: Dict[InfosetKey, List[InfosetKey]] = {key: [] for key in self.infosets}
        for key in self.infosets:
            parent = self.parent(key)
            if parent is not None:
                self.successors[parent].append(key)

    root = 0

    def __len__(self) -> int:
        return len(self.nodes)

    def parent(self, key: InfosetKey) -> Optional[InfosetKey]:
        """The owner's previous decision on the way to `key` (None for its first)."""
        player, h, own = key
        if not own:
            return None
        for k in range(len(h) - 2, -1, -2):
            candidate = (player, h[:k], own[:-1])
            if candidate in self.infosets:
                return candidate
        return None

    def infosets_of(self, player: Player) -> List[InfosetKey]:
        return [key for key in self.infosets if key[0] is player]

    def precompute_cost(self, player: Player) -> float:
        """Change of player 1's utility when `player` memorizes one more history."""
        return -self.cfg.lambda1 if player is Player.P1 else self.cfg.lambda2

    def own_costs(self, profile: TransformedProfile) -> Dict[InfosetKey, float]:
        """
        Penalty (in player-1 utility) that precomputing at each infoset
        carries, including the owner's later precompute choices under `profile`.
        """
        costs: Dict[InfosetKey, float] = {}
        for key in sorted(self.infosets, key=lambda k: len(k[2]), reverse=True):
            later = math.fsum(
                float(profile.get(child, (0.5, 0.5))[PRECOMPUTE]) * costs[child]
                for child in self.successors[key]
            )
            costs[key] = self.precompute_cost(key[0]) + later
        return costs

    def utility_range(self) -> float:
        utilities = [n.utility for n in self.nodes if n.kind is NodeKind.TERMINAL]
        spread = max(utilities) - min(utilities)
        spread += self.cfg.lambda1 * len(self.infosets_of(Player.P1))
        spread += self.cfg.lambda2 * len(self.infosets_of(Player.P2))
        return max(spread, 1e-12)

    def terminal_reach(self, profile: TransformedProfile) -> Iterator[Tuple[TransformedNode, float]]:
        """Reached terminals with their probability under `profile` (unlisted infosets play uniformly)."""
        stack = [(self.root, 1.0)]
        while stack:
            index, reach = stack.pop()
            node = self.nodes[index]
            if node.kind is NodeKind.TERMINAL:
                yield node, reach
            elif node.kind is NodeKind.CHANCE:
                for child, p in zip(node.children, node.probs):
                    stack.append((child, reach * p))
            else:
                sigma = profile.get(node.infoset, (0.5, 0.5))
                for child, p in zip(node.children, sigma):
                    if p > 0.0:
                        stack.append((child, reach * float(p)))

    def base_utility(self, profile: TransformedProfile) -> float:
        """Player-1 utility of a behaviour profile before penalties."""
        return math.fsum(node.utility * reach for node, reach in self.terminal_reach(profile))

    def memo_size(self, profile: TransformedProfile, player: Player) -> float:
        """Expected memorization set size of `player`; the set size itself for pure profiles."""
        return expected_memo_size(precompute_probabilities(self, profile, player))

    def expected_utility(self, profile: TransformedProfile) -> float:
        """Player-1 meta-game utility of a behaviour profile, penalties included."""
        return (
            self.base_utility(profile)
            - self.cfg.lambda1 * self.memo_size(profile, Player.P1)
            + self.cfg.lambda2 * self.memo_size(profile, Player.P2)
        )

    def pure_profile(self, memo1: AbstractSet[History], memo2: AbstractSet[History]) -> Dict[InfosetKey, np.ndarray]:
        """Behaviour profile that precomputes exactly on the given memorization sets."""
        profile = {}
        for key in self.infosets:
            player, h, _ = key
            memo = memo1 if player is Player.P1 else memo2
            profile[key] = np.array([0.0, 1.0]) if h in memo else np.array([1.0, 0.0])
        return profile

    def decision_histories(self, player: Player) -> FrozenSet[History]:
        """Histories where `player` can choose to precompute."""
        return frozenset(h for p, h, _ in self.infosets if p is player)


def precompute_probabilities(tgame: TransformedGame, profile: TransformedProfile, player: Player) -> Dict[History, float]:
    """Probability of precomputing at each history where `player` still can."""
    probabilities = {}
    for key in tgame.infosets_of(player):
        _, h, _ = key
        probabilities[h] = float(profile.get(key, (0.5, 0.5))[PRECOMPUTE])
    return probabilities


class _Builder:
    def __init__(
        self,
        game: Game,
        base1: Policy,
        base2: Policy,
        pre: Policy,
        W: Union[HighProbabilitySet, AbstractSet[History]],
        values: Mapping[History, float],
        node_limit: int,
    ):
        self.game = game
        self.bases = {Player.P1: base1, Player.P2: base2}
        self.pre = pre
        self.W = W
        self.values = values
        self.node_limit = node_limit
        self.nodes: List[TransformedNode] = []

    def allows(self, player: Player, h: History) -> bool:
        if isinstance(self.W, HighProbabilitySet):
            return self.W.allows(player, h)
        return h in self.W

    def add(self, node: TransformedNode) -> int:
        if len(self.nodes) >= self.node_limit:
            raise EnumerationLimitError(self.node_limit)
        self.nodes.append(node)
        return len(self.nodes) - 1

    def build(self, h, active, own, chance_reach) -> int:
        game = self.game
        if h not in self.W or game.is_terminal(h):
            return self.add(self.terminal(h))

        i = game.player(h)
        slot = 0 if i is Player.P1 else 1
        if not (active[slot] and self.allows(i, h)):
            stopped = self.with_slot(active, slot, False)
            return self.chance(h, i, self.bases[i], stopped, own, chance_reach)

        index = self.add(TransformedNode(
            kind=NodeKind.DECISION,
            history=h,
            player=i,
            chance_reach=chance_reach,
            infoset=(i, h, own[slot]),
        ))
        stop_own = self.with_slot(own, slot, own[slot] + (STOP,))
        stop = self.chance(h, i, self.bases[i], self.with_slot(active, slot, False), stop_own, chance_reach)
        pre_own = self.with_slot(own, slot, own[slot] + (PRECOMPUTE,))
        precompute = self.chance(h, i, self.pre, active, pre_own, chance_reach)
        self.nodes[index].children = [stop, precompute]
        return index

    def chance(self, h, player, policy, active, own, chance_reach) -> int:
        index = self.add(TransformedNode(
            kind=NodeKind.CHANCE,
            history=h,
            player=player,
            chance_reach=chance_reach,
        ))
        children, probs, actions = [], [], []
        for a, p in enumerate(action_distribution(self.game, policy, h)):
            p = float(p)
            if p <= 0.0:
                continue
            children.append(self.build(h + (a,), active, own, chance_reach * p))
            probs.append(p)
            actions.append(a)
        node = self.nodes[index]
        node.children, node.probs, node.actions = children, tuple(probs), tuple(actions)
        return index

    def terminal(self, h: History) -> TransformedNode:
        if h in self.values:
            base_value = float(self.values[h])
        elif self.game.is_terminal(h):
            base_value = self.game.utility(h)
        else:
            raise GameError(f"Missing value for frontier history {h}")
        return TransformedNode(
            kind=NodeKind.TERMINAL,
            history=h,
            player=None,
            chance_reach=0.0,
            utility=base_value,
        )

    @staticmethod
    def with_slot(pair, slot, value):
        return (value, pair[1]) if slot == 0 else (pair[0], value)


def transform_game(
    game: Game,
    base1: Policy,
    base2: Policy,
    pre: Policy,
    cfg: MetaConfig,
    W: Union[HighProbabilitySet, AbstractSet[History]],
    values: Mapping[History, float],
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> TransformedGame:
    """
    Build the precompute/stop game restricted to W.

    At each of its turns inside W a still-precomputing player chooses stop
    or precompute; a chance node then draws the base-game move from the
    base or prepared policy. Stopping is permanent. Histories outside W
    become terminals worth values[h]. Every precompute choice costs its
    owner lambda_i once, independently of how likely the opponent and
    chance make the infoset, so moves a policy never plays cannot hide
    penalties.

    Args:
        game: Base game
        base1: Player 1 base policy
        base2: Player 2 base policy
        pre: Prepared policy shared by both players
        cfg: Memorization penalties
        W: HighProbabilitySet, or a plain set offering choices everywhere in it
        values: u1 of truncated histories (base-game terminals default to their utility)
        node_limit: Maximum transformed-game size

    Raises:
        GameError: If a truncated history has no value
        EnumerationLimitError: If the tree grows beyond `node_limit`
    """
    builder = _Builder(game, base1, base2, pre, W, values, node_limit)
    builder.build(ROOT, (True, True), ((), ()), 1.0)
    return TransformedGame(builder.nodes, cfg)
