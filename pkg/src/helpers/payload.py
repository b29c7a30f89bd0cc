"""Shared helpers for tool functions: config loading with tool overrides and JSON output."""

import json as _json
from dataclasses import asdict, is_dataclass
from enum import Enum
from pathlib import Path
from typing import Any

import numpy as np

from ..calibration import SearchSpec
from ..config import RunConfig, load_run_config
from ..series import AnnualSeries


def load_tool_config(
    config_path: str | None,
    *,
    family: str | None = None,
    window: int | None = None,
    params: dict[str, str] | None = None,
    grids: dict[str, list[float] | None] | None = None,
    workers: int | None = None,
) -> RunConfig:
    """Load a run configuration and apply the per-call overrides a tool accepts."""
    config = load_run_config(
        Path(config_path) if config_path else None,
        {"family": family, "window": window, "params": params or None, "workers": workers},
    )
    grids = {k: v for k, v in (grids or {}).items() if v is not None}
    if grids:
        search = SearchSpec.model_validate({**config.search.model_dump(), **grids})
        config = config.model_copy(update={"search": search})
    return config


def _plain(value: Any) -> Any:
    if isinstance(value, AnnualSeries):
        return {"start_year": value.start_year, "label": value.label, "values": [float(v) for v in value.values]}
    if isinstance(value, Enum):
        return value.value
    if is_dataclass(value) and not isinstance(value, type):
        return _plain(asdict(value))
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, Path):
        return value.as_posix()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    return value


def to_json(value: Any) -> str:
    """Serialize tool results (dataclasses, series, enums, numpy scalars) to JSON."""
    return _json.dumps(_plain(value), sort_keys=True)
