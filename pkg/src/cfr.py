"""
CFR Module
Vanilla counterfactual regret minimization over the transformed game.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.logger import Logger
from src.models import Player
from src.transform import InfosetKey, NodeKind, TransformedGame

NUM_ACTIONS = 2


def regret_matching(regrets: np.ndarray) -> np.ndarray:
    """Strategy proportional to positive regrets; uniform when none is positive."""
    positive = np.maximum(regrets, 0.0)
    total = positive.sum()
    if total <= 0.0:
        return np.full(regrets.size, 1.0 / regrets.size)
    return positive / total


@dataclass
class InfosetState:
    regrets: np.ndarray = field(default_factory=lambda: np.zeros(NUM_ACTIONS))
    strategy_sum: np.ndarray = field(default_factory=lambda: np.zeros(NUM_ACTIONS))
    visits: int = 0

    def current_strategy(self) -> np.ndarray:
        return regret_matching(self.regrets)

    def average_strategy(self) -> np.ndarray:
        total = self.strategy_sum.sum()
        if total <= 0.0:
            return np.full(self.strategy_sum.size, 1.0 / self.strategy_sum.size)
        return self.strategy_sum / total


class RegretTable:
    """Cumulative regrets and strategy weights per infoset."""

    def __init__(self):
        self._states: Dict[InfosetKey, InfosetState] = {}

    def __len__(self) -> int:
        return len(self._states)

    def __contains__(self, key: InfosetKey) -> bool:
        return key in self._states

    def state(self, key: InfosetKey) -> InfosetState:
        if key not in self._states:
            self._states[key] = InfosetState()
        return self._states[key]

    def current_strategy(self, key: InfosetKey) -> np.ndarray:
        return self.state(key).current_strategy()

    def average_strategy(self, key: InfosetKey) -> np.ndarray:
        return self.state(key).average_strategy()

    def keys(self) -> List[InfosetKey]:
        return list(self._states)

    def positive_regret(self, player: Player) -> float:
        """Sum over the player's infosets of the largest positive cumulative regret."""
        return math.fsum(
            max(float(state.regrets.max()), 0.0)
            for key, state in self._states.items() if key[0] is player
        )


@dataclass(frozen=True)
class RegretReport:
    """
    Convergence summary of a CFR run.

    `regret_bound` is range * |infosets| * sqrt(A) / sqrt(T), for monitoring.
    """

    iterations: int
    average_regret: Tuple[float, float]
    regret_bound: float
    utility_range: float
    infosets: int
    seed: int


@dataclass(frozen=True)
class CFRResult:
    current: Dict[InfosetKey, np.ndarray]
    average: Dict[InfosetKey, np.ndarray]
    report: RegretReport


class CFRSolver:
    """
    Vanilla CFR with simultaneous updates and full tree walks.

    Runs can be continued: each call to `run` adds iterations to the same
    regret table. Vanilla CFR draws no random numbers; `seed` is recorded
    in the report only.
    """

    def __init__(self, game: TransformedGame, seed: int = 0, logger: Optional[Logger] = None):
        self.game = game
        self.seed = seed
        self.logger = logger or Logger.silent()
        self.table = RegretTable()
        self.iterations = 0
        self._strategies: Dict[InfosetKey, np.ndarray] = {}
        self._values: Dict[InfosetKey, np.ndarray] = {}
        for key in game.infosets:
            self.table.state(key)

    def run(self, iterations: int) -> RegretReport:
        """
        Run `iterations` more iterations.

        Raises:
            ValueError: If iterations < 1
        """
        if iterations < 1:
            raise ValueError(f"iterations must be at least 1, got {iterations}")
        for _ in range(iterations):
            self._strategies = {key: self.table.current_strategy(key) for key in self.game.infosets}
            self._values = {key: np.zeros(NUM_ACTIONS) for key in self.game.infosets}
            self._walk(self.game.root, 1.0, 1.0, 1.0)
            self._update_regrets()
            self.iterations += 1
        self.logger.progress(f"CFR iteration {self.iterations}")
        return self.report()

    def _update_regrets(self) -> None:
        # Penalties enter the counterfactual values unweighted by opponent
        # and chance reach.
        costs = self.game.own_costs(self._strategies)
        for key, values in self._values.items():
            values = values + np.array([0.0, costs[key]])
            sigma = self._strategies[key]
            node_value = float(sigma @ values)
            state = self.table.state(key)
            # Player 2 minimizes player 1's utility.
            if key[0] is Player.P1:
                state.regrets += values - node_value
            else:
                state.regrets += node_value - values

    def _walk(self, index: int, reach1: float, reach2: float, chance: float) -> float:
        node = self.game.nodes[index]
        if node.kind is NodeKind.TERMINAL:
            return node.utility
        if node.kind is NodeKind.CHANCE:
            return sum(
                p * self._walk(child, reach1, reach2, chance * p)
                for child, p in zip(node.children, node.probs)
            )

        sigma = self._strategies[node.infoset]
        state = self.table.state(node.infoset)
        utilities = np.zeros(NUM_ACTIONS)
        for action, child in enumerate(node.children):
            if node.player is Player.P1:
                utilities[action] = self._walk(child, reach1 * sigma[action], reach2, chance)
            else:
                utilities[action] = self._walk(child, reach1, reach2 * sigma[action], chance)
        if node.player is Player.P1:
            self._values[node.infoset] += reach2 * chance * utilities
            state.strategy_sum += reach1 * sigma
        else:
            self._values[node.infoset] += reach1 * chance * utilities
            state.strategy_sum += reach2 * sigma
        state.visits += 1
        return float(sigma @ utilities)

    def current_profile(self) -> Dict[InfosetKey, np.ndarray]:
        return {key: self.table.current_strategy(key) for key in self.game.infosets}

    def average_profile(self) -> Dict[InfosetKey, np.ndarray]:
        """Reach-weighted average strategies; unreached infosets play uniformly."""
        return {key: self.table.average_strategy(key) for key in self.game.infosets}

    def report(self) -> RegretReport:
        iterations = max(self.iterations, 1)
        utility_range = self.game.utility_range()
        infosets = len(self.game.infosets)
        return RegretReport(
            iterations=self.iterations,
            average_regret=(
                self.table.positive_regret(Player.P1) / iterations,
                self.table.positive_regret(Player.P2) / iterations,
            ),
            regret_bound=utility_range * infosets * math.sqrt(NUM_ACTIONS) / math.sqrt(iterations),
            utility_range=utility_range,
            infosets=infosets,
            seed=self.seed,
        )


def cfr_solve(game: TransformedGame, iterations: int, seed: int = 0) -> CFRResult:
    """
    Run vanilla CFR on a transformed game.

    Returns:
        CFRResult with the last current profile, the average profile and a
        regret report
    """
    solver = CFRSolver(game, seed)
    report = solver.run(iterations)
    return CFRResult(solver.current_profile(), solver.average_profile(), report)
