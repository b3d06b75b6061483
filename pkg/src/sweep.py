"""
Sweep Module
Precomputation value against opponents of increasing randomness.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple

from scipy.stats import spearmanr

from src.chess_game import ChessGame
from src.csv_writer import CSVWriter
from src.errors import EngineError
from src.game_core import Game
from src.logger import Logger
from src.models import History, SweepConfig, SweepRow
from src.policies import FIXED_TEMPERATURE, ScoredPolicy, Scorer
from src.precompute import best_precomp_response
from src.synthetic import GradedGame
from src.uci_engine import EnginePool

# Grid points closer than this (relative) are the same point.
R_TOLERANCE = 1e-9


@dataclass
class Backend:
    """A game with the scorers and value oracle a sweep needs."""

    game: Game
    strong: Scorer
    weak: Scorer
    proxy: Callable[[History], float]
    top_k: int
    close: Callable[[], None] = lambda: None


def synthetic_backend(config: SweepConfig) -> Backend:
    game = GradedGame(config.synthetic)
    return Backend(game, game.strong_scorer, game.weak_scorer, game.proxy_value, config.synthetic.branching)


def engine_backend(config: SweepConfig, workers: int, logger: Logger) -> Backend:
    engine = config.engine
    pool = EnginePool(engine, size=workers, logger=logger)
    game = ChessGame(engine, pool)
    return Backend(
        game,
        game.scorer(engine.movetime_ms),
        game.scorer(engine.base_movetime_ms),
        game.proxy_value,
        engine.multipv,
        pool.close,
    )


@dataclass
class SweepResult:
    rows: List[SweepRow] = field(default_factory=list)
    failed: List[float] = field(default_factory=list)
    skipped: List[float] = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return not self.failed


def same_r(a: float, b: float) -> bool:
    return math.isclose(a, b, rel_tol=R_TOLERANCE)


class SweepRunner:
    """
    Runs the best precomputation response at every temperature of the grid.

    The precomputing side plays the weak scorer (base) and the strong scorer
    (prepared) at a near-zero temperature; the opponent plays the weak
    scorer at temperature r.
    """

    def __init__(self, config: SweepConfig, backend: Backend, logger: Optional[Logger] = None):
        self.config = config
        self.backend = backend
        self.logger = logger or Logger.silent()

    def evaluate_point(self, r: float) -> SweepRow:
        """Best response of the precomputing side against the opponent at temperature r."""
        cfg = self.config
        backend = self.backend
        base = ScoredPolicy(backend.weak, FIXED_TEMPERATURE)
        pre = ScoredPolicy(backend.strong, FIXED_TEMPERATURE)
        opponent = ScoredPolicy(backend.weak, r, top_k=backend.top_k)

        started = time.perf_counter()
        result = best_precomp_response(
            backend.game, base, opponent, pre, cfg.meta,
            eps=cfg.eps,
            delta=cfg.delta,
            seed=cfg.seed,
            exact=cfg.value_mode == "exact",
            owner=cfg.side.owner,
            value_oracle=backend.proxy if cfg.value_mode == "proxy" else None,
        )
        wall_ms = (time.perf_counter() - started) * 1000.0
        self.logger.progress(
            f"r={r:.3g}: U={result.utility:.4f} S={result.memo_size} ({wall_ms:.0f} ms)"
        )
        return SweepRow(
            r=r,
            utility=result.utility,
            memo_size=result.memo_size,
            value_with_penalty=result.value,
            seed=cfg.seed,
            wall_ms=wall_ms,
        )

    def _safe_point(self, r: float) -> Tuple[float, Optional[SweepRow]]:
        try:
            return r, self.evaluate_point(r)
        except EngineError as e:
            self.logger.error(f"Grid point r={r:.3g} failed: {e}")
            return r, None

    def run(
        self,
        out_path: Optional[Path] = None,
        resume: bool = False,
        workers: int = 1,
        csv_writer: Optional[CSVWriter] = None,
    ) -> SweepResult:
        """
        Evaluate the grid, appending each finished row to `out_path` in grid order.

        Args:
            out_path: CSV file (None keeps rows in memory only)
            resume: Skip grid points already present in `out_path`
            workers: Grid points evaluated concurrently
            csv_writer: Writer to use

        Returns:
            SweepResult with the new rows, failed and skipped grid points
        """
        if workers < 1:
            raise ValueError(f"workers must be at least 1, got {workers}")
        writer = csv_writer or CSVWriter()
        result = SweepResult()

        done: List[float] = []
        if out_path is not None and out_path.exists():
            if resume:
                done = [float(row['r']) for row in writer.read(out_path)]
            else:
                out_path.unlink()
        pending = []
        for r in self.config.r_grid:
            if any(same_r(r, d) for d in done):
                result.skipped.append(r)
            else:
                pending.append(r)
        if result.skipped:
            self.logger.info(f"Resuming: {len(result.skipped)} grid point(s) already done")

        with ThreadPoolExecutor(max_workers=workers) as executor:
            for r, row in executor.map(self._safe_point, pending):
                if row is None:
                    result.failed.append(r)
                    continue
                result.rows.append(row)
                if out_path is not None:
                    writer.append(row.to_dict(), CSVWriter.SWEEP_HEADER, out_path)
        return result


def run_sweep(
    config: SweepConfig,
    out_path: Optional[Path] = None,
    resume: bool = False,
    workers: int = 1,
    logger: Optional[Logger] = None,
) -> SweepResult:
    """Build the configured backend and run the sweep."""
    logger = logger or Logger.silent()
    if config.synthetic is not None:
        backend = synthetic_backend(config)
    else:
        backend = engine_backend(config, workers, logger)
    try:
        return SweepRunner(config, backend, logger).run(out_path, resume, workers)
    finally:
        backend.close()


def trend_correlation(rows: Sequence[SweepRow]) -> float:
    """Spearman rank correlation of U against r (nan for constant U)."""
    if len(rows) < 2:
        return float('nan')
    rho = spearmanr([row.r for row in rows], [row.utility for row in rows]).correlation
    return float(rho)


@dataclass(frozen=True)
class SideComparison:
    r: float
    utility_white: float
    utility_black: float

    @property
    def difference(self) -> float:
        return self.utility_white - self.utility_black

    def to_dict(self) -> dict:
        return {
            'r': repr(self.r),
            'log10_r': repr(math.log10(self.r)),
            'U_white': repr(self.utility_white),
            'U_black': repr(self.utility_black),
            'difference': repr(self.difference),
        }


def compare_sides(white_rows: Sequence[SweepRow], black_rows: Sequence[SweepRow]) -> List[SideComparison]:
    """
    Pair the two sides' sweeps on their common grid points.

    Raises:
        ValueError: If the grids share no point
    """
    paired = []
    for white in sorted(white_rows, key=lambda row: row.r):
        match = next((black for black in black_rows if same_r(black.r, white.r)), None)
        if match is not None:
            paired.append(SideComparison(white.r, white.utility, match.utility))
    if not paired:
        raise ValueError("Sweep grids do not overlap; nothing to compare")
    return paired


def read_sweep(path: Path, csv_writer: Optional[CSVWriter] = None) -> List[SweepRow]:
    """
    Rows of a sweep CSV.

    Raises:
        FileNotFoundError: If the file does not exist
    """
    if not path.exists():
        raise FileNotFoundError(f"Path does not exist: {path}")
    writer = csv_writer or CSVWriter()
    return [SweepRow.from_dict(row) for row in writer.read(path)]
