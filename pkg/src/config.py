"""
Config Module
Loads engine and sweep configuration files (JSON) into models.
"""

from pathlib import Path
from typing import Any, Mapping, Optional, Union

import numpy as np

from src.errors import ConfigError
from src.file_handler import FileHandler
from src.models import (
    EngineConfig,
    GradedGameConfig,
    MetaConfig,
    Side,
    SweepConfig,
    default_r_grid,
)

ENGINE_FIELDS = {
    "path", "movetime_ms", "base_movetime_ms", "multipv", "max_plies",
    "decisive_cp", "args", "cache_path", "timeout_s", "retries",
}
SYNTHETIC_FIELDS = {"seed", "branching", "max_plies", "edge_cp", "noise_cp", "decisive_cp"}
SWEEP_FIELDS = {
    "side", "r_grid", "r_min", "r_max", "points", "lambda1", "lambda2",
    "eps", "delta", "seed", "value_mode", "engine", "synthetic",
}


def _check_fields(data: Mapping[str, Any], allowed: set, what: str) -> None:
    if not isinstance(data, Mapping):
        raise ConfigError(f"{what} config must be an object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"Unknown {what} config fields: {', '.join(unknown)}")


def engine_config_from_dict(data: Mapping[str, Any], base_dir: Optional[Path] = None) -> EngineConfig:
    """
    Build an EngineConfig; relative paths resolve against `base_dir`.

    Raises:
        ConfigError: If fields are missing, unknown or invalid
    """
    _check_fields(data, ENGINE_FIELDS, "engine")
    if "path" not in data:
        raise ConfigError("Engine config requires 'path'")
    values = dict(data)
    if values.get("cache_path") is not None:
        cache_path = Path(values["cache_path"])
        if base_dir is not None and not cache_path.is_absolute():
            cache_path = base_dir / cache_path
        values["cache_path"] = cache_path
    values["args"] = tuple(str(a) for a in values.get("args", ()))
    try:
        return EngineConfig(**values)
    except (TypeError, ValueError) as e:
        raise ConfigError(f"Invalid engine config: {e}") from e


def _r_grid(data: Mapping[str, Any]):
    if "r_grid" in data:
        return tuple(float(r) for r in data["r_grid"])
    if "r_min" in data or "r_max" in data or "points" in data:
        try:
            r_min, r_max, points = float(data["r_min"]), float(data["r_max"]), int(data["points"])
        except KeyError as e:
            raise ConfigError(f"r_min, r_max and points must be given together; missing {e}") from e
        if r_min <= 0 or r_max < r_min or points < 1:
            raise ConfigError("r grid needs 0 < r_min <= r_max and points >= 1")
        return tuple(float(r) for r in np.logspace(np.log10(r_min), np.log10(r_max), points))
    return default_r_grid()


def sweep_config_from_dict(data: Mapping[str, Any], base_dir: Optional[Path] = None,
                           file_handler: Optional[FileHandler] = None) -> SweepConfig:
    """
    Build a SweepConfig.

    The `engine` block may be an object or the path of an engine config file.

    Raises:
        ConfigError: If fields are missing, unknown or invalid
    """
    _check_fields(data, SWEEP_FIELDS, "sweep")
    try:
        side = Side(data.get("side", Side.WHITE.value))
    except ValueError as e:
        raise ConfigError(f"side must be one of {[s.value for s in Side]}") from e

    engine = None
    if data.get("engine") is not None:
        block = data["engine"]
        if isinstance(block, str):
            engine = load_engine_config(_resolve(Path(block), base_dir), file_handler)
        else:
            engine = engine_config_from_dict(block, base_dir)
    synthetic = None
    if data.get("synthetic") is not None:
        _check_fields(data["synthetic"], SYNTHETIC_FIELDS, "synthetic")
        try:
            synthetic = GradedGameConfig(**data["synthetic"])
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid synthetic config: {e}") from e

    try:
        return SweepConfig(
            side=side,
            meta=MetaConfig(float(data.get("lambda1", 1e-5)), float(data.get("lambda2", 1e-5))),
            r_grid=_r_grid(data),
            engine=engine,
            synthetic=synthetic,
            eps=float(data.get("eps", 0.05)),
            delta=float(data.get("delta", 0.05)),
            seed=int(data.get("seed", 0)),
            value_mode=str(data.get("value_mode", "proxy")),
        )
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Invalid sweep config: {e}") from e


def _resolve(path: Path, base_dir: Optional[Path]) -> Path:
    if base_dir is not None and not path.is_absolute():
        return base_dir / path
    return path


def load_engine_config(path: Union[str, Path], file_handler: Optional[FileHandler] = None) -> EngineConfig:
    """
    Read an engine config file.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: If the contents are invalid
    """
    handler = file_handler or FileHandler()
    path = handler.validate_input_file(Path(path))
    return engine_config_from_dict(handler.read_json(path), path.parent)


def load_sweep_config(path: Union[str, Path], file_handler: Optional[FileHandler] = None) -> SweepConfig:
    """
    Read a sweep config file.

    Raises:
        FileNotFoundError: If the file does not exist
        ConfigError: If the contents are invalid
    """
    handler = file_handler or FileHandler()
    path = handler.validate_input_file(Path(path))
    return sweep_config_from_dict(handler.read_json(path), path.parent, handler)
