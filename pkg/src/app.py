"""
Application Module
Main application logic and orchestration.
"""

import argparse
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

from src.chess_game import ChessGame
from src.config import load_engine_config, load_sweep_config
from src.csv_writer import CSVWriter
from src.entropy import advantage_strategy
from src.equilibrium import solve_meta_equilibrium
from src.errors import EmptyDistributionError, EngineError
from src.file_handler import FileHandler
from src.game_core import Game, Policy, Profile
from src.game_io import GameFile, load_game, save_game
from src.logger import Logger
from src.models import History, MetaConfig, Player
from src.policies import FIXED_TEMPERATURE, ScoredPolicy
from src.precompute import best_precomp_response
from src.sweep import compare_sides, read_sweep, run_sweep, trend_correlation
from src.synthetic import gen_random_game, random_policy
from src.uci_engine import EnginePool


@dataclass
class Setting:
    """Game and policies a solver command runs on."""

    game: Game
    base1: Policy
    base2: Policy
    pre: Policy
    value_oracle: Optional[Callable[[History], float]] = None
    close: Callable[[], None] = lambda: None
    source: Optional[Path] = None


class Application:
    """
    Main application class that dispatches the CLI subcommands.
    """

    def __init__(self, args: argparse.Namespace):
        """
        Initialize the application.

        Args:
            args: Parsed command line arguments
        """
        self.args = args
        self.logger = Logger(verbose=args.verbose)
        self.file_handler = FileHandler(verbose=args.verbose)
        self.csv_writer = CSVWriter(verbose=args.verbose)

    def run(self) -> int:
        """
        Run the selected subcommand.

        Returns:
            int: Exit code (0 = success, 1 = error)
        """
        commands = {
            "best-response": self._run_best_response,
            "entropy-profile": self._run_entropy_profile,
            "equilibrium": self._run_equilibrium,
            "sweep": self._run_sweep,
            "compare-sides": self._run_compare_sides,
            "generate-game": self._run_generate_game,
        }
        try:
            return commands[self.args.command]()

        except FileNotFoundError as e:
            self.logger.error(str(e))
            return 1
        except PermissionError as e:
            self.logger.error(f"Permission denied: {e}")
            return 1
        except (ValueError, EngineError) as e:
            self.logger.error(str(e))
            return 1
        except Exception as e:
            self.logger.error(f"Unexpected error: {e}")
            if self.args.verbose:
                import traceback
                traceback.print_exc()
            return 1

    def _load_setting(self) -> Setting:
        """
        Load the game file or start the chess backend.

        Returns:
            Setting with the policies of both players
        """
        if self.args.game:
            path = Path(self.args.game)
            game_file = load_game(path, self.file_handler)
            self.logger.info(f"Loaded game with {game_file.game.node_count} histories from {path}")
            return Setting(
                game_file.game,
                game_file.policy("base1"),
                game_file.policy("base2"),
                game_file.policy("pre"),
                source=path,
            )

        path = Path(self.args.engine)
        config = load_engine_config(path, self.file_handler)
        pool = EnginePool(config, size=1, logger=self.logger)
        game = ChessGame(config, pool)
        self.logger.info(f"Engine backend: {pool.identity}, top {config.multipv} moves, {config.max_plies} plies")
        base = ScoredPolicy(game.scorer(config.base_movetime_ms), FIXED_TEMPERATURE)
        pre = ScoredPolicy(game.scorer(config.movetime_ms), FIXED_TEMPERATURE)
        return Setting(game, base, base, pre, game.proxy_value, pool.close, path)

    def _output_path(self, setting_source: Path, tag: str, suffix: str) -> Path:
        if self.args.out:
            return Path(self.args.out)
        return self.file_handler.get_default_output_path(setting_source, tag, suffix)

    def _run_best_response(self) -> int:
        setting = self._load_setting()
        try:
            player = Player(self.args.player)
            cfg = MetaConfig(self.args.lam, self.args.lam)
            own_base = setting.base1 if player is Player.P1 else setting.base2
            opponent = setting.base2 if player is Player.P1 else setting.base1
            result = best_precomp_response(
                setting.game, own_base, opponent, setting.pre, cfg,
                eps=self.args.eps,
                delta=self.args.delta,
                seed=self.args.seed,
                exact=self.args.exact,
                owner=player,
                samples=self.args.samples,
                value_oracle=None if self.args.exact else setting.value_oracle,
            )
            memo = sorted(result.strategy.memo_set, key=lambda h: (len(h), h))
            report = {
                "player": int(player),
                "lambda": self.args.lam,
                "value": result.value,
                "utility": result.utility,
                "memo_size": result.memo_size,
                "samples": result.samples,
                "visited": result.visited,
                "memo_set": [setting.game.labels(h) for h in memo],
            }
        finally:
            setting.close()

        out_path = self._output_path(setting.source, "best_response", ".json")
        self.file_handler.write_json(report, out_path)
        self.logger.success(
            f"Player {int(player)} memorizes {result.memo_size} histories: "
            f"value {result.value:.6f} (utility {result.utility:.6f}) -> {out_path}"
        )
        return 0

    def _run_entropy_profile(self) -> int:
        path = Path(self.args.game)
        game_file = load_game(path, self.file_handler)
        profile = Profile(game_file.policy("base1"), game_file.policy("base2"))
        pre = game_file.policy("pre")

        rows = []
        for v in self.args.v_grid:
            try:
                result = advantage_strategy(game_file.game, profile, pre, v, self.args.eps)
            except EmptyDistributionError as e:
                self.logger.warning(str(e))
                rows.append({'v': repr(v), 'p_norm': '0.0', 'entropy_nats': '', 'z': '',
                             'memo_size': '', 'achieved_value': '', 'value_bound': ''})
                continue
            rows.append({
                'v': repr(v),
                'p_norm': repr(result.distribution.p_norm),
                'entropy_nats': repr(result.entropy),
                'z': str(result.z),
                'memo_size': str(result.strategy.size),
                'achieved_value': repr(result.value),
                'value_bound': repr(result.value_bound),
            })
            self.logger.debug(f"v={v}: H={result.entropy:.4f} z={result.z} value={result.value:.4f}")

        out_path = self._output_path(path, "entropy", ".csv")
        self.csv_writer.write(rows, CSVWriter.ENTROPY_HEADER, out_path)
        self.logger.success(f"Entropy profile for {len(rows)} thresholds -> {out_path}")
        return 0

    def _run_equilibrium(self) -> int:
        setting = self._load_setting()
        try:
            cfg = MetaConfig(self.args.lambda1, self.args.lambda2)
            result = solve_meta_equilibrium(
                setting.game, setting.base1, setting.base2, setting.pre, cfg,
                eps=self.args.eps,
                delta=self.args.delta,
                seed=self.args.seed,
                max_iters=self.args.max_iters,
                check_interval=self.args.check_interval,
                value_oracle=setting.value_oracle,
                logger=self.logger,
            )
            infosets = [
                {
                    "player": int(player),
                    "history": setting.game.labels(h),
                    "own_choices": ["precompute" if c else "stop" for c in own],
                    "precompute": float(result.profile[(player, h, own)][1]),
                }
                for player, h, own in sorted(result.profile, key=lambda k: (len(k[1]), k[1], int(k[0]), k[2]))
            ]
        finally:
            setting.close()

        report = {
            "lambda1": cfg.lambda1,
            "lambda2": cfg.lambda2,
            "value": result.value,
            "certified_gap": result.certified_gap,
            "certified": result.certified,
            "iterations": result.iterations,
            "high_probability_histories": len(result.W),
            "infosets": infosets,
        }
        out_path = self._output_path(setting.source, "equilibrium", ".json")
        self.file_handler.write_json(report, out_path)
        if not result.certified:
            self.logger.warning(f"Not certified: gap {result.certified_gap:.5f} > eps {self.args.eps}")
        self.logger.success(
            f"Equilibrium value {result.value:.6f}, gap {result.certified_gap:.2e} "
            f"after {result.iterations} iterations -> {out_path}"
        )
        return 0

    def _run_sweep(self) -> int:
        config = load_sweep_config(Path(self.args.config), self.file_handler)
        out_path = Path(self.args.out)
        self.file_handler.create_output_directory(out_path.parent)
        self.logger.info(
            f"Sweep ({config.side.value}) over {len(config.r_grid)} temperatures, "
            f"lambda1={config.meta.lambda1}, lambda2={config.meta.lambda2}"
        )

        result = run_sweep(config, out_path, self.args.resume, self.args.workers, self.logger)
        rows = read_sweep(out_path, self.csv_writer) if out_path.exists() else []
        if rows:
            self.csv_writer.write_plot_data(
                [{'log10_r': r['log10_r'], 'U': r['U'], 'S': r['S']} for r in (row.to_dict() for row in rows)],
                ['log10_r', 'U', 'S'],
                out_path.with_suffix('.dat'),
            )
            self.logger.info(f"Spearman correlation of U with r: {trend_correlation(rows):.3f}")

        if result.failed:
            self.logger.error(f"{len(result.failed)} grid point(s) failed; rerun with --resume")
            return 1
        self.logger.success(f"Sweep complete: {len(rows)} rows -> {out_path}")
        return 0

    def _run_compare_sides(self) -> int:
        white = read_sweep(Path(self.args.white), self.csv_writer)
        black = read_sweep(Path(self.args.black), self.csv_writer)
        paired = compare_sides(white, black)
        out_path = Path(self.args.out)
        self.csv_writer.write([p.to_dict() for p in paired], CSVWriter.COMPARISON_HEADER, out_path)
        for p in paired:
            self.logger.debug(f"r={p.r:.3g}: U_white - U_black = {p.difference:+.4f}")
        self.logger.success(f"Compared {len(paired)} grid points -> {out_path}")
        return 0

    def _run_generate_game(self) -> int:
        args = self.args
        game = gen_random_game(args.seed, args.depth, args.branching, args.law, args.stop_probability)
        policies = {
            name: random_policy(game, args.seed * 3 + offset + 1, floor=0.1)
            for offset, name in enumerate(("base1", "base2", "pre"))
        }
        out_path = Path(args.out)
        save_game(GameFile(game, policies), out_path, self.file_handler)
        self.logger.success(f"Wrote game with {game.node_count} histories -> {out_path}")
        return 0
