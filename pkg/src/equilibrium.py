"""
Equilibrium Module
Approximate Nash equilibria of the meta-precomputation game, certified by
best-response exploitability.
"""

import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Mapping, Optional, Tuple

import numpy as np

from src.cfr import CFRSolver, RegretReport
from src.errors import EnumerationLimitError
from src.game_core import (
    DEFAULT_NODE_LIMIT,
    Game,
    Policy,
    Profile,
    ValueTable,
    action_distribution,
    estimate_value,
)
from src.logger import Logger
from src.models import History, MetaConfig, Player
from src.precompute import BestResponse, best_precomp_response
from src.transform import (
    HighProbabilitySet,
    InfosetKey,
    TransformedGame,
    TransformedProfile,
    expected_memo_size,
    high_prob_set,
    precompute_probabilities,
    transform_game,
    value_targets,
)

# Exact frontier values are attempted up to this many histories in total.
EXACT_FRONTIER_LIMIT = 200_000
MIN_CHECK_INTERVAL = 100


class InducedPolicy(Policy):
    """
    Base-game behaviour of a player following a transformed-game strategy.

    Along a history the player is either still precomputing (mass A) or
    has stopped; the move distribution mixes `pre` and `base` by the
    posterior of still precomputing.
    """

    def __init__(self, player: Player, base: Policy, pre: Policy, precompute: Mapping[History, float]):
        self.player = player
        self.base = base
        self.pre = pre
        self.precompute = dict(precompute)
        self._mass: Dict[History, Tuple[float, float]] = {}

    def _masses(self, game: Game, h: History) -> Tuple[float, float]:
        # (A, T): probability of the player's own moves on h while still
        # precomputing, and in total.
        cached = self._mass.get(h)
        if cached is not None:
            return cached
        a_mass = t_mass = 1.0
        for k, action in enumerate(h):
            prefix = h[:k]
            if game.player(prefix) is not self.player:
                continue
            x = self.precompute.get(prefix, 0.0)
            b = float(action_distribution(game, self.base, prefix)[action])
            p = float(action_distribution(game, self.pre, prefix)[action]) if x > 0.0 else 0.0
            a_mass, t_mass = a_mass * x * p, (t_mass - a_mass) * b + a_mass * (x * p + (1.0 - x) * b)
        self._mass[h] = (a_mass, t_mass)
        return a_mass, t_mass

    def distribution(self, game: Game, h: History) -> np.ndarray:
        base = action_distribution(game, self.base, h)
        x = self.precompute.get(h, 0.0)
        if x == 0.0:
            return base
        a_mass, t_mass = self._masses(game, h)
        if t_mass <= 0.0 or a_mass <= 0.0:
            return base
        pre = action_distribution(game, self.pre, h)
        return ((t_mass - a_mass) * base + a_mass * (x * pre + (1.0 - x) * base)) / t_mass


@dataclass(frozen=True)
class ExploitabilityReport:
    """
    Best-response gains against a transformed-game profile.

    Attributes:
        gap1: What player 1 gains by deviating
        gap2: What player 2 gains by deviating
        value: Player-1 meta-game value of the profile
        best_response1: Player 1's best precomputation response
        best_response2: Player 2's best precomputation response
        memo1: Expected memorization set size of player 1
        memo2: Expected memorization set size of player 2
    """

    gap1: float
    gap2: float
    value: float
    best_response1: BestResponse
    best_response2: BestResponse
    memo1: float
    memo2: float

    @property
    def max_gap(self) -> float:
        return max(self.gap1, self.gap2)


def exploitability(
    game: Game,
    tgame: TransformedGame,
    profile: TransformedProfile,
    base1: Policy,
    base2: Policy,
    pre: Policy,
    cfg: MetaConfig,
    exact: bool = True,
    eps: float = 0.05,
    delta: float = 0.05,
    seed: int = 0,
    value_oracle: Optional[Callable[[History], float]] = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
) -> ExploitabilityReport:
    """
    Measure how much each player gains by best-responding to `profile`.

    Each player's best precomputation response is computed in the base game
    against the opponent's induced behaviour, and compared with the
    profile's meta-game value: its expected base value minus each player's
    penalty times its expected memorization set size.
    """
    x1 = precompute_probabilities(tgame, profile, Player.P1)
    x2 = precompute_probabilities(tgame, profile, Player.P2)
    memo1, memo2 = expected_memo_size(x1), expected_memo_size(x2)
    value = tgame.base_utility(profile) - cfg.lambda1 * memo1 + cfg.lambda2 * memo2
    induced1 = InducedPolicy(Player.P1, base1, pre, x1)
    induced2 = InducedPolicy(Player.P2, base2, pre, x2)

    options = dict(eps=eps, delta=delta, seed=seed, exact=exact, value_oracle=value_oracle, node_limit=node_limit)
    br1 = best_precomp_response(game, base1, induced2, pre, cfg, owner=Player.P1, **options)
    br2 = best_precomp_response(game, base2, induced1, pre, cfg, owner=Player.P2, **options)

    best_for_p1 = br1.value + cfg.lambda2 * memo2
    worst_for_p1 = 1.0 - br2.value - cfg.lambda1 * memo1
    return ExploitabilityReport(
        gap1=best_for_p1 - value,
        gap2=value - worst_for_p1,
        value=value,
        best_response1=br1,
        best_response2=br2,
        memo1=memo1,
        memo2=memo2,
    )


@dataclass(frozen=True)
class EquilibriumResult:
    """
    Outcome of the equilibrium search.

    Attributes:
        profile: Lowest-gap average profile found (infoset -> [stop, precompute])
        value: Player-1 meta-game value of `profile`
        certified_gap: Largest best-response gain against `profile`
        certified: Whether certified_gap <= eps
        iterations: CFR iterations run
        tgame: The transformed game
        W: High-probability set used to build it
        report: Regret report of the last CFR chunk (None without CFR)
    """

    profile: Dict[InfosetKey, np.ndarray]
    value: float
    certified_gap: float
    certified: bool
    iterations: int
    tgame: TransformedGame
    W: HighProbabilitySet
    report: Optional[RegretReport]


def frontier_values(
    game: Game,
    targets: List[History],
    base1: Policy,
    base2: Policy,
    samples: int,
    seed: int,
    value_oracle: Optional[Callable[[History], float]] = None,
    logger: Optional[Logger] = None,
) -> Tuple[Dict[History, float], bool]:
    """
    Values of truncated histories under the base policies.

    Exact when the subtrees are small enough, rollout estimates otherwise.

    Returns:
        (values, exact) where `exact` tells whether every value is exact
    """
    logger = logger or Logger.silent()
    profile = Profile(base1, base2)
    if value_oracle is not None:
        return {h: (game.utility(h) if game.is_terminal(h) else value_oracle(h)) for h in targets}, False

    table = ValueTable(game, profile, EXACT_FRONTIER_LIMIT)
    try:
        return {h: table.value(h) for h in targets}, True
    except EnumerationLimitError:
        logger.debug(f"Frontier too large for exact values; sampling {samples} rollouts per history")

    values = {}
    for h in targets:
        if game.is_terminal(h):
            values[h] = game.utility(h)
        else:
            values[h] = estimate_value(game, profile, h, samples, seed).mean
    return values, False


def stop_profile(tgame: TransformedGame) -> Dict[InfosetKey, np.ndarray]:
    """Profile in which nobody precomputes."""
    return {key: np.array([1.0, 0.0]) for key in tgame.infosets}


def solve_meta_equilibrium(
    game: Game,
    base1: Policy,
    base2: Policy,
    pre: Policy,
    cfg: MetaConfig,
    eps: float = 0.05,
    delta: float = 0.05,
    seed: int = 0,
    max_iters: Optional[int] = None,
    check_interval: Optional[int] = None,
    iteration_constant: float = 1.0,
    value_oracle: Optional[Callable[[History], float]] = None,
    node_limit: int = DEFAULT_NODE_LIMIT,
    logger: Optional[Logger] = None,
) -> EquilibriumResult:
    """
    Compute an eps-Nash equilibrium of the meta-precomputation game.

    Builds the high-probability set, values its frontier, transforms the
    game and runs CFR in chunks. After each chunk both players' best
    responses are computed; the search stops once neither gains more than
    eps, or after iteration_constant * |W|^2 / eps^2 iterations.

    Args:
        game: Base game
        base1: Player 1 base policy
        base2: Player 2 base policy
        pre: Prepared policy
        cfg: Memorization penalties
        eps: Target exploitability
        delta: Failure probability of sampled frontier values
        seed: Rollout seed
        max_iters: Optional lower iteration cap
        check_interval: Iterations between checks (default max(100, |W|))
        iteration_constant: Constant c of the iteration cap
        value_oracle: Optional u1 estimate replacing rollouts
        node_limit: Guard for the transformed game and exact values
        logger: Progress logger

    Returns:
        EquilibriumResult; `certified` is False when the cap was reached first

    Raises:
        ValueError: If eps or delta are outside (0, 1)
    """
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    logger = logger or Logger.silent()

    W = high_prob_set(game, base1, base2, pre, cfg, node_limit)
    size = max(len(W), 1)
    logger.debug(f"High-probability set: {len(W.w1)} / {len(W.w2)} histories, frontier {len(W.frontier)}")

    samples = max(1, math.ceil(16.0 * math.log(max(size, 2) / delta) / eps ** 2))
    targets = value_targets(game, W)
    values, exact = frontier_values(game, targets, base1, base2, samples, seed, value_oracle, logger)
    tgame = transform_game(game, base1, base2, pre, cfg, W, values, node_limit)
    logger.debug(f"Transformed game: {len(tgame)} nodes, {len(tgame.infosets)} infosets")

    def check(profile) -> ExploitabilityReport:
        return exploitability(
            game, tgame, profile, base1, base2, pre, cfg,
            exact=exact, eps=eps, delta=delta, seed=seed,
            value_oracle=value_oracle, node_limit=node_limit,
        )

    best_profile = stop_profile(tgame)
    best = check(best_profile)
    if best.max_gap <= eps or not tgame.infosets:
        return EquilibriumResult(best_profile, best.value, best.max_gap, best.max_gap <= eps, 0, tgame, W, None)

    cap = max(1, math.ceil(iteration_constant * size ** 2 / eps ** 2))
    if max_iters is not None:
        cap = min(cap, max_iters)
    interval = check_interval or max(MIN_CHECK_INTERVAL, len(W))

    solver = CFRSolver(tgame, seed, logger)
    report = None
    while solver.iterations < cap:
        report = solver.run(min(interval, cap - solver.iterations))
        profile = solver.average_profile()
        current = check(profile)
        logger.progress(
            f"iteration {solver.iterations}: gaps {current.gap1:.5f} / {current.gap2:.5f}"
        )
        if current.max_gap < best.max_gap:
            best, best_profile = current, profile
        if best.max_gap <= eps:
            break

    certified = best.max_gap <= eps
    if not certified:
        logger.warning(f"Iteration cap {cap} reached; best gap {best.max_gap:.5f} exceeds eps {eps}")
    return EquilibriumResult(
        profile=best_profile,
        value=best.value,
        certified_gap=best.max_gap,
        certified=certified,
        iterations=solver.iterations,
        tgame=tgame,
        W=W,
        report=report,
    )
