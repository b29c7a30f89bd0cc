"""Calibration, simulation and evaluation tools over a run configuration."""

from typing import Optional

from ..server import mcp, default_workers
from ..coerce import FloatList, ParamDict
from ..config import build_lfp_sim_params, build_params
from ..data_io import load_country_dataset
from ..errors import ConfigError
from ..pipeline import calibrate, evaluate, simulate
from ..report import summarize, write_report, write_reports
from src.helpers.payload import load_tool_config, to_json


def _series_rows(result) -> list[dict]:
    observed = dict(result.observed.items()) if result.observed is not None else {}
    return [
        {"year": year, "predicted": float(value), "observed": observed.get(year)}
        for year, value in result.predicted.items()
    ]


@mcp.tool()
def calibrate_model(
    config_path: str,
    family: Optional[str] = None,
    a2_grid: Optional[FloatList] = None,
    lag_grid: Optional[FloatList] = None,
    alpha_grid: Optional[FloatList] = None,
    window: Optional[int] = None,
    output_dir: Optional[str] = None,
) -> str:
    """Fit model constants to the observed productivity growth in a run configuration.

    Grids are ``[min, max, step]``. Returns one summary per observed definition
    (parameters, R2, SSE, best lag, fitted span). Writes the report directory
    only when ``output_dir`` is given.
    """
    config = load_tool_config(
        config_path,
        family=family,
        window=window,
        grids={"a2": a2_grid, "lag": lag_grid, "alpha": alpha_grid},
        workers=default_workers(),
    )
    dataset = load_country_dataset(config)
    results = calibrate(config.family, dataset, config.search, config.workers)
    if output_dir:
        write_reports(results, output_dir)
    return to_json({definition: summarize(result) for definition, result in results.items()})


def _fixed_params(config, dataset):
    if not config.params:
        raise ConfigError(f"no {config.family} parameters: pass params or preset, or set [params]")
    params = build_params(config.family, config.params, lfp=dataset.LFP)
    lfp_sim = build_lfp_sim_params(config.params) if config.family == "lfp" else None
    return params, lfp_sim


def _with_preset(params: Optional[dict], preset: Optional[str]) -> Optional[dict]:
    merged = dict(params or {})
    if preset:
        merged["preset"] = preset
    return merged or None


@mcp.tool()
def simulate_model(
    config_path: str,
    family: Optional[str] = None,
    preset: Optional[str] = None,
    params: Optional[ParamDict] = None,
    output_dir: Optional[str] = None,
) -> str:
    """Run the model forward with fixed constants (no fitting).

    ``params`` overrides single constants, e.g. ``{"A2": 450, "B": 7500000}``.
    Returns the predicted dP/P per year next to the observed series if one is configured.
    """
    config = load_tool_config(config_path, family=family, params=_with_preset(params, preset))
    dataset = load_country_dataset(config)
    fixed, lfp_sim = _fixed_params(config, dataset)
    result = simulate(dataset, fixed, config.window, lfp_sim)
    if output_dir:
        write_report(result, output_dir)
    return to_json({"summary": summarize(result), "series": _series_rows(result)})


@mcp.tool()
def evaluate_model(
    config_path: str,
    family: Optional[str] = None,
    preset: Optional[str] = None,
    params: Optional[ParamDict] = None,
    window: Optional[int] = None,
    output_dir: Optional[str] = None,
) -> str:
    """Score fixed constants against every observed definition: R2, SSE and best lag."""
    config = load_tool_config(
        config_path, family=family, window=window, params=_with_preset(params, preset)
    )
    dataset = load_country_dataset(config)
    fixed, lfp_sim = _fixed_params(config, dataset)
    results = evaluate(dataset, fixed, config.window, lfp_sim)
    if output_dir:
        write_reports(results, output_dir)
    return to_json({definition: summarize(result) for definition, result in results.items()})
