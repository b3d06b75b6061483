"""
Policies Module
Score-based softmax policies and the centipawn utility proxy.
"""

from typing import Callable, Optional, Sequence

import numpy as np

from src.errors import GameError
from src.game_core import Game, Policy
from src.models import History

# Mate scores are mapped beyond any decisive threshold.
MATE_CP = 32000
DECISIVE_CP = 400

# Temperature of the fixed side's policies; numerically an argmax.
FIXED_TEMPERATURE = 1e-6

# Scores of the actions at a history, from the mover's perspective.
Scorer = Callable[[Game, History], Sequence[float]]


def softmax_policy(scores: Sequence[float], r: float) -> np.ndarray:
    """
    Softmax of scores / r.

    Raises:
        ValueError: If r <= 0 or a score is not finite
    """
    if not r > 0:
        raise ValueError(f"temperature r must be positive, got {r}")
    values = np.asarray(scores, dtype=float)
    if values.size == 0:
        raise ValueError("scores must not be empty")
    if not np.all(np.isfinite(values)):
        raise ValueError("scores must be finite")
    weights = np.exp((values - values.max()) / r)
    return weights / weights.sum()


def cp_to_utility(cp: float, threshold: int = DECISIVE_CP) -> float:
    """Player-1 utility of a white-perspective evaluation: win, loss or draw band."""
    if cp >= threshold:
        return 1.0
    if cp <= -threshold:
        return 0.0
    return 0.5


class ScoredPolicy(Policy):
    """
    Softmax over scorer output at temperature r.

    Args:
        scorer: Mover-perspective scores of the actions at a history
        r: Temperature; small values play the best-scored action
        top_k: Keep only the k best-scored actions (others get probability 0)
    """

    def __init__(self, scorer: Scorer, r: float, top_k: Optional[int] = None):
        if not r > 0:
            raise ValueError(f"temperature r must be positive, got {r}")
        if top_k is not None and top_k < 1:
            raise ValueError(f"top_k must be at least 1, got {top_k}")
        self.scorer = scorer
        self.r = r
        self.top_k = top_k

    def distribution(self, game: Game, h: History) -> np.ndarray:
        count = len(game.actions(h))
        scores = np.asarray(self.scorer(game, h), dtype=float)
        if scores.size != count:
            raise GameError(f"Scorer returned {scores.size} scores for {count} actions at {h}")
        if self.top_k is None or self.top_k >= count:
            return softmax_policy(scores, self.r)

        kept = np.argsort(-scores, kind="stable")[:self.top_k]
        probs = np.zeros(count)
        probs[kept] = softmax_policy(scores[kept], self.r)
        return probs
