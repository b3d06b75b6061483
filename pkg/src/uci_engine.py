"""
UCI Engine Module
MultiPV evaluations from a UCI chess engine, served through the evaluation cache.
"""

import asyncio
import concurrent.futures
import queue
from contextlib import contextmanager
from typing import Iterator, List, Optional, Sequence

import chess
import chess.engine

from src.errors import EngineError, EngineInputError, EngineTransportError
from src.eval_cache import EngineLines, EvalCache
from src.logger import Logger
from src.models import EngineConfig
from src.policies import MATE_CP

TRANSPORT_ERRORS = (
    chess.engine.EngineError,
    asyncio.TimeoutError,
    concurrent.futures.TimeoutError,
    TimeoutError,
    OSError,
)


def board_from_moves(moves: Sequence[str]) -> chess.Board:
    """
    Replay UCI moves from the starting position.

    Raises:
        EngineInputError: If a move is malformed or illegal
    """
    board = chess.Board()
    for ply, move in enumerate(moves):
        try:
            board.push_uci(move)
        except ValueError as e:
            raise EngineInputError(f"Illegal move {move!r} at ply {ply}") from e
    return board


def score_to_cp(score: chess.engine.PovScore) -> int:
    """White-perspective centipawns; mates map to +/- MATE_CP."""
    white = score.white()
    if white.is_mate():
        return MATE_CP if white > chess.engine.Cp(0) else -MATE_CP
    return int(white.score())


class UCIEngine:
    """
    One engine process with cached MultiPV analysis.

    Transport failures (crash, timeout, closed pipes) restart the process
    and retry up to `config.retries` times.
    """

    def __init__(
        self,
        config: EngineConfig,
        cache: Optional[EvalCache] = None,
        logger: Optional[Logger] = None,
    ):
        self.config = config
        self.cache = cache if cache is not None else EvalCache()
        self.logger = logger or Logger.silent()
        self.identity = "unknown"
        self.analyses = 0
        self._engine: Optional[chess.engine.SimpleEngine] = None

    def start(self) -> "UCIEngine":
        """
        Launch the engine and read its identity.

        Raises:
            EngineTransportError: If the process cannot be started
        """
        try:
            self._engine = chess.engine.SimpleEngine.popen_uci(
                self.config.command, timeout=self.config.timeout_s
            )
        except TRANSPORT_ERRORS as e:
            raise EngineTransportError(f"Cannot start engine {self.config.path}: {e}") from e
        self.identity = self._engine.id.get("name", self.config.path)
        self.logger.debug(f"Engine started: {self.identity}")
        return self

    def close(self) -> None:
        if self._engine is not None:
            try:
                self._engine.quit()
            except TRANSPORT_ERRORS:
                self._engine.close()
            self._engine = None

    def __enter__(self) -> "UCIEngine":
        if self._engine is None:
            self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def evaluate(
        self,
        moves: Sequence[str],
        movetime_ms: int,
        multipv: int,
        root_moves: Optional[Sequence[str]] = None,
    ) -> EngineLines:
        """
        Top lines at a position as (first move, white-perspective cp).

        Args:
            moves: UCI moves from the starting position
            movetime_ms: Think time
            multipv: Number of lines
            root_moves: Restrict the search to these moves

        Raises:
            EngineInputError: If the position or a root move is illegal
            EngineTransportError: If the engine keeps failing after retries
        """
        board = board_from_moves(moves)
        restricted = self._parse_root_moves(board, root_moves)
        if self._engine is None:
            self.start()
        key = EvalCache.make_key(self.identity, moves, movetime_ms, multipv, root_moves)
        cached = self.cache.get(key)
        if cached is not None:
            return cached

        lines = self._analyse_with_retry(board, movetime_ms, multipv, restricted)
        self.cache.put(key, lines)
        return self.cache.get(key)

    @staticmethod
    def _parse_root_moves(board: chess.Board, root_moves: Optional[Sequence[str]]) -> Optional[List[chess.Move]]:
        if not root_moves:
            return None
        parsed = []
        for move in root_moves:
            try:
                parsed.append(board.parse_uci(move))
            except ValueError as e:
                raise EngineInputError(f"Illegal root move {move!r}") from e
        return parsed

    def _analyse_with_retry(self, board, movetime_ms, multipv, root_moves) -> EngineLines:
        last_error = None
        for attempt in range(self.config.retries + 1):
            if self._engine is None:
                self.start()
            try:
                return self._analyse(board, movetime_ms, multipv, root_moves)
            except TRANSPORT_ERRORS as e:
                last_error = e
                self.logger.warning(f"Engine failure (attempt {attempt + 1}): {e}")
                self._restart()
        raise EngineTransportError(
            f"Engine failed after {self.config.retries + 1} attempts: {last_error}"
        ) from last_error

    def _restart(self) -> None:
        if self._engine is not None:
            try:
                self._engine.close()
            except TRANSPORT_ERRORS:
                pass
            self._engine = None

    def _analyse(self, board, movetime_ms, multipv, root_moves) -> EngineLines:
        self.analyses += 1
        infos = self._engine.analyse(
            board,
            chess.engine.Limit(time=movetime_ms / 1000.0),
            multipv=multipv,
            root_moves=root_moves,
        )
        lines = []
        for info in infos:
            pv = info.get("pv")
            score = info.get("score")
            if not pv or score is None:
                continue
            lines.append((pv[0].uci(), score_to_cp(score)))
        if not lines and not board.is_game_over():
            raise EngineError(f"Engine returned no lines for {board.fen()}")
        return lines


def engine_eval(
    config: EngineConfig,
    position: Sequence[str],
    cache: Optional[EvalCache] = None,
    engine: Optional[UCIEngine] = None,
) -> EngineLines:
    """
    Evaluate one position with the configured think time and MultiPV.

    A running engine may be passed in; otherwise one is started for the call.
    """
    if engine is not None:
        return engine.evaluate(position, config.movetime_ms, config.multipv)
    with UCIEngine(config, cache) as temporary:
        return temporary.evaluate(position, config.movetime_ms, config.multipv)


class EnginePool:
    """A fixed set of engine processes handed out one at a time."""

    def __init__(
        self,
        config: EngineConfig,
        size: int = 1,
        cache: Optional[EvalCache] = None,
        logger: Optional[Logger] = None,
    ):
        if size < 1:
            raise ValueError(f"pool size must be at least 1, got {size}")
        self.config = config
        self.cache = cache if cache is not None else EvalCache(config.cache_path, logger)
        self.logger = logger or Logger.silent()
        self._engines = [UCIEngine(config, self.cache, self.logger).start() for _ in range(size)]
        self._idle: "queue.Queue[UCIEngine]" = queue.Queue()
        for engine in self._engines:
            self._idle.put(engine)

    @property
    def identity(self) -> str:
        return self._engines[0].identity

    @contextmanager
    def engine(self) -> Iterator[UCIEngine]:
        engine = self._idle.get()
        try:
            yield engine
        finally:
            self._idle.put(engine)

    def evaluate(self, moves: Sequence[str], movetime_ms: int, multipv: int,
                 root_moves: Optional[Sequence[str]] = None) -> EngineLines:
        with self.engine() as engine:
            return engine.evaluate(moves, movetime_ms, multipv, root_moves)

    def close(self) -> None:
        for engine in self._engines:
            engine.close()
        self.cache.close()

    def __enter__(self) -> "EnginePool":
        return self

    def __exit__(self, *exc) -> None:
        self.close()
