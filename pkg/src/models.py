"""Data models shared by the solvers, the engine layer and the experiment harness."""

import math
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from pathlib import Path
from typing import Optional, Tuple

import numpy as np

# A history is the sequence of action indices played from the root.
History = Tuple[int, ...]


class Player(IntEnum):
    """The two players of an alternating game. Player 1 moves at even lengths."""

    P1 = 1
    P2 = 2

    @classmethod
    def for_length(cls, length: int) -> "Player":
        return cls.P1 if length % 2 == 0 else cls.P2

    @property
    def opponent(self) -> "Player":
        return Player.P2 if self is Player.P1 else Player.P1


@dataclass(frozen=True)
class MetaConfig:
    """Linear memorization penalties of the meta-precomputation game.

    Attributes:
        lambda1: Cost per memorized history for player 1
        lambda2: Cost per memorized history for player 2
    """

    lambda1: float
    lambda2: float

    def __post_init__(self):
        for name in ("lambda1", "lambda2"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise ValueError(f"{name} must be a positive finite number, got {value}")

    def penalty(self, player: Player) -> float:
        """Penalty factor paid by `player` per memorized history."""
        return self.lambda1 if player is Player.P1 else self.lambda2


@dataclass(frozen=True)
class ValueEstimate:
    """Mean player-1 utility of `samples` rollouts drawn with `seed`."""

    mean: float
    samples: int
    seed: int


class Side(Enum):
    """Which colour precomputes in a sweep."""

    WHITE = "white-precomputes"
    BLACK = "black-precomputes"

    @property
    def owner(self) -> Player:
        return Player.P1 if self is Side.WHITE else Player.P2


@dataclass(frozen=True)
class EngineConfig:
    """Settings for a UCI engine backend.

    Attributes:
        path: Engine executable
        movetime_ms: Think time of the prepared (precompute) policy and of
            the move generator that defines the top-K legal actions
        base_movetime_ms: Think time of the in-game policies
        multipv: Number of top moves kept per position (K)
        max_plies: Half-move cap (L); longer games are scored as draws
        decisive_cp: Centipawn advantage treated as a decided game
        args: Extra command line arguments for the engine process
        cache_path: Append-only evaluation cache file
        timeout_s: Handshake / analysis timeout
        retries: Restarts attempted after a transport failure
    """

    path: str
    movetime_ms: int = 50
    base_movetime_ms: int = 10
    multipv: int = 2
    max_plies: int = 100
    decisive_cp: int = 400
    args: Tuple[str, ...] = ()
    cache_path: Optional[Path] = None
    timeout_s: float = 30.0
    retries: int = 2

    def __post_init__(self):
        if self.movetime_ms <= 0 or self.base_movetime_ms <= 0:
            raise ValueError("movetime_ms and base_movetime_ms must be positive")
        if self.multipv < 1:
            raise ValueError(f"multipv must be at least 1, got {self.multipv}")
        if self.max_plies < 1:
            raise ValueError(f"max_plies must be at least 1, got {self.max_plies}")
        if self.decisive_cp <= 0:
            raise ValueError(f"decisive_cp must be positive, got {self.decisive_cp}")
        if self.retries < 0:
            raise ValueError(f"retries must be non-negative, got {self.retries}")

    @property
    def command(self) -> list:
        return [self.path, *self.args]


@dataclass(frozen=True)
class GradedGameConfig:
    """Parameters of the strength-graded synthetic backend.

    Every position has one sharp move worth `edge_cp` to the mover and
    quiet moves worth nothing; the weak scorer adds Gaussian noise of
    standard deviation `noise_cp` to what the strong scorer sees.
    """

    seed: int = 0
    branching: int = 2
    max_plies: int = 80
    edge_cp: float = 40.0
    noise_cp: float = 100.0
    decisive_cp: int = 400

    def __post_init__(self):
        if not 1 <= self.branching <= 255:
            raise ValueError(f"branching must be between 1 and 255, got {self.branching}")
        if self.max_plies < 1:
            raise ValueError(f"max_plies must be at least 1, got {self.max_plies}")
        if self.noise_cp < 0 or self.edge_cp < 0:
            raise ValueError("edge_cp and noise_cp must be non-negative")
        if self.decisive_cp <= 0:
            raise ValueError(f"decisive_cp must be positive, got {self.decisive_cp}")
        if self.seed < 0:
            raise ValueError(f"seed must be non-negative, got {self.seed}")


def default_r_grid() -> Tuple[float, ...]:
    """13 logarithmic temperatures from 1e-6 to 1e4."""
    return tuple(float(r) for r in np.logspace(-6, 4, 13))


@dataclass(frozen=True)
class SweepConfig:
    """One randomness sweep: the precomputing side, the temperature grid and the backend."""

    side: Side
    meta: MetaConfig
    r_grid: Tuple[float, ...] = field(default_factory=default_r_grid)
    engine: Optional[EngineConfig] = None
    synthetic: Optional[GradedGameConfig] = None
    eps: float = 0.05
    delta: float = 0.05
    seed: int = 0
    value_mode: str = "proxy"

    VALUE_MODES = ("proxy", "rollout", "exact")

    def __post_init__(self):
        if not self.r_grid:
            raise ValueError("r_grid must not be empty")
        if any(not (r > 0 and math.isfinite(r)) for r in self.r_grid):
            raise ValueError("r_grid values must be positive and finite")
        if list(self.r_grid) != sorted(self.r_grid):
            raise ValueError("r_grid must be sorted ascending")
        if (self.engine is None) == (self.synthetic is None):
            raise ValueError("exactly one of engine or synthetic backends must be configured")
        if self.value_mode not in self.VALUE_MODES:
            raise ValueError(f"value_mode must be one of {self.VALUE_MODES}, got {self.value_mode!r}")
        if not (0 < self.eps < 1 and 0 < self.delta < 1):
            raise ValueError("eps and delta must lie in (0, 1)")


@dataclass(frozen=True)
class SweepRow:
    """Result of one grid point of a sweep.

    Attributes:
        r: Opponent temperature
        utility: Precomputing side's utility without the memorization penalty (U)
        memo_size: Size of the memorization set (S)
        value_with_penalty: Utility minus the precomputing side's penalty
        seed: Seed used for the grid point
        wall_ms: Wall-clock time of the grid point
    """

    r: float
    utility: float
    memo_size: int
    value_with_penalty: float
    seed: int
    wall_ms: float

    def to_dict(self) -> dict:
        """Convert the row to a CSV dictionary (fixed column names)."""
        return {
            'r': repr(float(self.r)),
            'log10_r': repr(math.log10(self.r)),
            'U': repr(float(self.utility)),
            'S': str(int(self.memo_size)),
            'value_with_penalty': repr(float(self.value_with_penalty)),
            'seed': str(int(self.seed)),
            'wall_ms': f"{self.wall_ms:.3f}",
        }

    @classmethod
    def from_dict(cls, row: dict) -> "SweepRow":
        """Rebuild a row read back from a sweep CSV."""
        return cls(
            r=float(row['r']),
            utility=float(row['U']),
            memo_size=int(row['S']),
            value_with_penalty=float(row['value_with_penalty']),
            seed=int(row['seed']),
            wall_ms=float(row['wall_ms']),
        )
