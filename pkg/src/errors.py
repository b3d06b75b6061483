"""Exception types raised by the solver, engine and configuration layers."""


class GameError(ValueError):
    """Malformed game, unknown history or invalid policy data."""


class EnumerationLimitError(GameError):
    """Exact enumeration would visit more histories than the guard allows."""

    def __init__(self, limit: int):
        super().__init__(
            f"Exact enumeration exceeded {limit} histories; "
            f"use estimate_value for games of this size"
        )
        self.limit = limit


class EmptyDistributionError(ValueError):
    """The first-advantage distribution has zero normalizing mass."""


class ConfigError(ValueError):
    """Invalid configuration file contents."""


class EngineError(RuntimeError):
    """Base class for chess engine failures."""


class EngineTransportError(EngineError):
    """Engine crashed, timed out or closed its pipes. Safe to retry."""


class EngineInputError(ValueError):
    """The engine was asked about an illegal position or move."""
