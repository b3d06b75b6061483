"""
Synthetic Module
Seeded random game trees, random policies and the strength-graded game.
"""

import hashlib
import struct
from collections import deque
from functools import lru_cache
from typing import Dict, List, Tuple

import numpy as np

from src.errors import GameError
from src.game_core import DEFAULT_NODE_LIMIT, Game, GameTree, TablePolicy, sentinelize
from src.models import GradedGameConfig, History
from src.policies import cp_to_utility

UTILITY_LAWS = ("uniform", "bernoulli", "ternary")


def full_tree_size(depth: int, branching: int) -> int:
    """Number of histories of a complete tree before sentinels."""
    if branching == 1:
        return depth + 1
    return (branching ** (depth + 1) - 1) // (branching - 1)


def _draw_utility(rng: np.random.Generator, law: str) -> float:
    if law == "uniform":
        return float(rng.random())
    if law == "bernoulli":
        return float(rng.random() < 0.5)
    return float(rng.integers(0, 3)) / 2.0


def gen_random_game(
    seed: int,
    depth: int,
    branching: int,
    law: str = "uniform",
    stop_probability: float = 0.0,
    ragged: bool = False,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> GameTree:
    """
    Build a seeded random alternating game, sentinelized.

    Args:
        seed: Generator seed
        depth: Maximum number of moves before the terminal
        branching: Actions per non-terminal history (the maximum when `ragged`)
        law: Terminal utility law: uniform on [0, 1], bernoulli {0, 1} or ternary {0, 0.5, 1}
        stop_probability: Chance that a non-root history is terminal early
        ragged: Draw the branching of every history from 1..branching
        node_limit: Largest allowed tree

    Raises:
        ValueError: If depth or branching < 1 or the law is unknown
        GameError: If the complete tree would exceed `node_limit`
    """
    if depth < 1 or branching < 1:
        raise ValueError(f"depth and branching must be at least 1, got {depth} and {branching}")
    if law not in UTILITY_LAWS:
        raise ValueError(f"Unknown utility law {law!r}; expected one of {UTILITY_LAWS}")
    if not 0.0 <= stop_probability < 1.0:
        raise ValueError(f"stop_probability must lie in [0, 1), got {stop_probability}")
    if full_tree_size(depth, branching) * 2 > node_limit:
        raise GameError(f"A depth-{depth} branching-{branching} game exceeds {node_limit} histories")

    rng = np.random.default_rng(seed)
    actions: List[List[str]] = [[]]
    children: List[List[int]] = [[]]
    utilities: Dict[int, float] = {}
    queue = deque([(0, 0)])
    while queue:
        node, level = queue.popleft()
        terminal = level == depth or (level > 0 and rng.random() < stop_probability)
        if terminal:
            utilities[node] = _draw_utility(rng, law)
            continue
        count = int(rng.integers(1, branching + 1)) if ragged else branching
        for a in range(count):
            child = len(actions)
            actions.append([])
            children.append([])
            actions[node].append(f"a{a}")
            children[node].append(child)
            queue.append((child, level + 1))

    return sentinelize(GameTree(actions, children, utilities))


def random_policy(
    game: GameTree,
    seed: int,
    floor: float = 0.0,
    deterministic: bool = False,
) -> TablePolicy:
    """
    Seeded random policy over every history with more than one action.

    Args:
        game: Explicit game
        seed: Generator seed
        floor: Mix this share of the uniform distribution in (full support when > 0)
        deterministic: Play one random action with probability 1
    """
    rng = np.random.default_rng(seed)
    table = {}
    for h in game.histories():
        count = len(game.actions(h))
        if count < 2:
            continue
        if deterministic:
            probs = np.zeros(count)
            probs[int(rng.integers(count))] = 1.0
        else:
            probs = (1.0 - floor) * rng.dirichlet(np.ones(count)) + floor / count
            probs = probs / probs.sum()
        table[h] = probs
    return TablePolicy(table)


class GradedGame(Game):
    """
    Lazily generated game where the strong player sees the true move values.

    At every history one sharp move is worth `edge_cp` to the mover and
    the others are worth nothing. The evaluation is the white-perspective
    sum of move values along the history; a history is terminal once the
    evaluation is decisive or the ply cap is reached.
    """

    def __init__(self, config: GradedGameConfig):
        self.config = config
        self._labels = tuple(f"m{a}" for a in range(config.branching))
        self.evaluation = lru_cache(maxsize=None)(self._evaluation)

    @property
    def max_length(self) -> int:
        return self.config.max_plies

    @property
    def max_actions(self) -> int:
        return self.config.branching

    def _uniforms(self, tag: int, h: History, count: int) -> np.ndarray:
        values: List[int] = []
        block = 0
        while len(values) < count:
            key = struct.pack(">QII", self.config.seed, tag, block) + bytes(h)
            digest = hashlib.blake2b(key, digest_size=64, person=b"graded-game").digest()
            values.extend(struct.unpack(">8Q", digest))
            block += 1
        return (np.array(values[:count], dtype=float) + 0.5) / 2.0 ** 64

    def sharp_move(self, h: History) -> int:
        return int(self._uniforms(0, h, 1)[0] * self.config.branching) % self.config.branching

    def true_scores(self, h: History) -> np.ndarray:
        """Mover-perspective values of the moves at `h`."""
        scores = np.zeros(self.config.branching)
        scores[self.sharp_move(h)] = self.config.edge_cp
        return scores

    def noisy_scores(self, h: History) -> np.ndarray:
        """True values plus seeded Gaussian noise."""
        u = self._uniforms(1, h, 2 * self.config.branching)
        noise = np.sqrt(-2.0 * np.log(u[0::2])) * np.cos(2.0 * np.pi * u[1::2])
        return self.true_scores(h) + self.config.noise_cp * noise

    def _evaluation(self, h: History) -> float:
        if not h:
            return 0.0
        parent = h[:-1]
        sign = 1.0 if len(parent) % 2 == 0 else -1.0
        return self.evaluation(parent) + sign * float(self.true_scores(parent)[h[-1]])

    def is_terminal(self, h: History) -> bool:
        return len(h) >= self.config.max_plies or abs(self.evaluation(tuple(h))) >= self.config.decisive_cp

    def actions(self, h: History) -> Tuple[str, ...]:
        return () if self.is_terminal(h) else self._labels

    def utility(self, h: History) -> float:
        if not self.is_terminal(h):
            raise GameError(f"History {tuple(h)} is not terminal")
        return cp_to_utility(self.evaluation(tuple(h)), self.config.decisive_cp)

    def proxy_value(self, h: History) -> float:
        """Centipawn-threshold estimate of u1 at `h`."""
        return cp_to_utility(self.evaluation(tuple(h)), self.config.decisive_cp)

    def strong_scorer(self, game: Game, h: History) -> np.ndarray:
        return self.true_scores(h)

    def weak_scorer(self, game: Game, h: History) -> np.ndarray:
        return self.noisy_scores(h)
