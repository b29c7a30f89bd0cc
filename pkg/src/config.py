"""Run configuration: ini file -> validated ``RunConfig``.

Layout (see ``productivity_config.ini``)::

    [run]     name, family, window, output, workers, last_observed_year
    [data]    gdp, per_person, per_hour, observed, lfp, n9, population
    [search]  a2, lag, alpha (min, max, step), n0, t0, smooth
    [params]  preset and/or explicit constants for the selected family

Paths are relative to the config file. Precedence is flags > file > defaults.
"""

from __future__ import annotations

import configparser
from pathlib import Path
from typing import Any, Literal, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .calibration import SearchSpec
from .errors import ConfigError
from .model import (
    COUNTRY_PRESETS,
    LFP_RESPONSE_PRESETS,
    N9_PRESET,
    GdpModelParams,
    LfpResponseParams,
    LfpSimParams,
    ModelParams,
    N9ModelParams,
)
from .series import AnnualSeries

Family = Literal["gdp", "lfp", "n9"]

# definition label -> [data] key
OBSERVED_KEYS = {"per-person": "per_person", "per-hour": "per_hour", "observed": "observed"}


class DataPaths(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    gdp: Path | None = None
    per_person: Path | None = None
    per_hour: Path | None = None
    observed: Path | None = None
    lfp: Path | None = None
    n9: Path | None = None
    population: Path | None = None

    @field_validator("*")
    @classmethod
    def _exists(cls, v: Path | None) -> Path | None:
        if v is not None and not v.is_file():
            raise ValueError(f"file not found: {v}")
        return v

    def observed_paths(self) -> dict[str, Path]:
        found = {}
        for definition, key in OBSERVED_KEYS.items():
            path = getattr(self, key)
            if path is not None:
                found[definition] = path
        return found


class RunConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = "country"
    family: Family = "gdp"
    window: int = 5
    output: Path = Path("out")
    workers: int = Field(1, ge=1)
    last_observed_year: int | None = None
    data: DataPaths = DataPaths()
    search: SearchSpec = SearchSpec()
    params: dict[str, str] = Field(default_factory=dict)

    @field_validator("window")
    @classmethod
    def _odd_window(cls, v: int) -> int:
        if v < 1 or v % 2 == 0:
            raise ValueError(f"window must be a positive odd integer, got {v}")
        return v


def _describe(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(part) for part in error["loc"]) or "config"
        parts.append(f"{where}: {error['msg']}")
    return "; ".join(parts)


def _section(parser: configparser.ConfigParser, name: str) -> dict[str, str]:
    if not parser.has_section(name):
        return {}
    return {key: value.strip() for key, value in parser.items(name) if value.strip()}


def load_run_config(path: str | Path | None = None, overrides: Mapping[str, Any] | None = None) -> RunConfig:
    """Read and validate a run configuration; ``overrides`` are command-line values."""
    raw: dict[str, Any] = {}
    base = Path.cwd()
    if path is not None:
        path = Path(path)
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str  # keep parameter names like A2, LFP0
        try:
            with open(path, encoding="utf-8") as handle:
                parser.read_file(handle)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror or exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config {path}: {exc}") from exc
        base = path.resolve().parent
        raw.update(_section(parser, "run"))
        data = _section(parser, "data")
        raw["data"] = {key: base / value for key, value in data.items()}
        raw["search"] = _section(parser, "search")
        raw["params"] = _section(parser, "params")
        if "output" in raw:
            raw["output"] = base / raw["output"]

    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key == "params":
            raw["params"] = {**raw.get("params", {}), **value}
        elif key in DataPaths.model_fields:
            raw.setdefault("data", {})[key] = Path(value)
        else:
            raw[key] = value

    search = dict(raw.get("search") or {})
    search["window"] = raw.get("window", 5)
    raw["search"] = search
    try:
        return RunConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(_describe(exc)) from exc


def _number(values: Mapping[str, str], key: str, cast: type = float) -> Any:
    if key not in values:
        raise ConfigError(f"missing parameter '{key}'")
    text = values[key]
    try:
        number = float(text)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"parameter '{key}' is not a number: {text!r}") from exc
    if cast is int:
        if not number.is_integer():
            raise ConfigError(f"parameter '{key}' must be a whole number: {text!r}")
        return int(number)
    return number


_FAMILY_KEYS = {
    "gdp": ("A2", "B", "C", "N0", "T", "t0"),
    "n9": ("B", "C", "T"),
    "lfp": ("B2", "C2", "alpha", "t0", "LFP0", "A1", "B1", "C1", "T"),
}


def build_params(
    family: str, values: Mapping[str, Any], lfp: AnnualSeries | None = None
) -> ModelParams:
    """Parameter bundle for ``family`` from a preset plus explicit overrides.

    For the LFP family ``t0`` and ``LFP0`` default to the first year of ``lfp``.
    """
    values = {key: str(value) for key, value in values.items()}
    preset = values.pop("preset", None)
    allowed = _FAMILY_KEYS.get(family)
    if allowed is None:
        raise ConfigError(f"unknown family '{family}'")
    unknown = sorted(set(values) - set(allowed))
    if unknown:
        raise ConfigError(f"unknown {family} parameter(s): {', '.join(unknown)}")

    merged: dict[str, str] = {}
    if preset is not None:
        merged.update(preset_values(family, preset))
    merged.update(values)

    if family == "gdp":
        return GdpModelParams(
            A2=_number(merged, "A2"), B=_number(merged, "B"), C=_number(merged, "C"),
            N0=_number(merged, "N0"), T=_number(merged, "T", int), t0=_number(merged, "t0", int),
        )
    if family == "n9":
        return N9ModelParams(B=_number(merged, "B"), C=_number(merged, "C"), T=_number(merged, "T", int))
    if lfp is not None:
        merged.setdefault("t0", str(lfp.start_year))
        merged.setdefault("LFP0", repr(lfp.value_at(_number(merged, "t0", int))))
    return LfpResponseParams(
        B2=_number(merged, "B2"), C2=_number(merged, "C2"), alpha=_number(merged, "alpha"),
        t0=_number(merged, "t0", int), LFP0=_number(merged, "LFP0"),
    )


def build_lfp_sim_params(values: Mapping[str, Any]) -> LfpSimParams | None:
    """LFP simulation constants (``A1, B1, C1, T`` plus the shared ``alpha, t0, LFP0``).

    Returns ``None`` when ``A1`` is not given, i.e. the LFP series is read from data.
    """
    values = {key: str(value) for key, value in values.items()}
    preset = values.pop("preset", None)
    if "A1" not in values:
        return None
    if preset is not None:
        values = {**preset_values("lfp", preset), **values}
    return LfpSimParams(
        A1=_number(values, "A1"), B1=_number(values, "B1"), C1=_number(values, "C1"),
        alpha=_number(values, "alpha"), T=_number(values, "T", int),
        t0=_number(values, "t0", int), LFP0=_number(values, "LFP0"),
    )


def preset_values(family: str, name: str) -> dict[str, str]:
    key = name.strip().lower()
    if family == "gdp":
        if key not in COUNTRY_PRESETS:
            raise ConfigError(f"unknown gdp preset '{name}' (known: {', '.join(COUNTRY_PRESETS)})")
        p = COUNTRY_PRESETS[key]
        return {"A2": repr(p.A2), "B": repr(p.B), "C": repr(p.C), "N0": repr(p.N0), "T": str(p.T), "t0": str(p.t0)}
    if family == "n9":
        if key not in ("us", "n9"):
            raise ConfigError(f"unknown n9 preset '{name}' (known: us)")
        return {"B": repr(N9_PRESET.B), "C": repr(N9_PRESET.C), "T": str(N9_PRESET.T)}
    if key not in LFP_RESPONSE_PRESETS:
        raise ConfigError(f"unknown lfp preset '{name}' (known: {', '.join(LFP_RESPONSE_PRESETS)})")
    B2, C2, alpha = LFP_RESPONSE_PRESETS[key]
    return {"B2": repr(B2), "C2": repr(C2), "alpha": repr(alpha)}
