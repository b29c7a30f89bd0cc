"""Runs that bind a loaded dataset to the model, calibration and forecast code.

Shared by the command line and the tool server. Missing inputs are reported
as ``ConfigError`` naming the ``[data]`` key that would supply them.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from .calibration import (
    CalibrationResult,
    FitSummary,
    SearchSpec,
    calibrate_gdp_model,
    calibrate_lfp_dual,
    calibrate_n9_model,
    evaluate_fit,
)
from .data_io import CountryDataset
from .errors import ConfigError
from .forecast import (
    DEFAULT_DISCREPANCY_TOLERANCE,
    ConsistencyReport,
    ExtendedCohort,
    ForecastSeries,
    cohort_consistency,
    extend_n9,
    forecast_productivity,
)
from .model import (
    GdpModelParams,
    LfpResponseParams,
    LfpSimParams,
    ModelParams,
    N9ModelParams,
    productivity_from_g,
    productivity_from_lfp,
    productivity_from_n9,
    simulate_lfp,
    synthetic_population,
)
from .series import AnnualSeries

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SimulationResult:
    """Forward model output, optionally scored against an observed series."""

    family: str
    params: ModelParams
    predicted: AnnualSeries
    observed: AnnualSeries | None = None
    population: AnnualSeries | None = None
    lfp: AnnualSeries | None = None
    fit: FitSummary | None = None
    window: int = 5
    definition: str = ""


@dataclass(frozen=True)
class ForecastRun:
    forecast: ForecastSeries
    cohort: ExtendedCohort
    consistency: ConsistencyReport


def _require_gdp(dataset: CountryDataset, family: str) -> AnnualSeries:
    if dataset.G is None:
        raise ConfigError(f"family={family} with no G series (missing G path, set [data] gdp)")
    return dataset.G


def _require_lfp(dataset: CountryDataset) -> AnnualSeries:
    if dataset.LFP is None:
        raise ConfigError("family=lfp with no LFP series (set [data] lfp)")
    return dataset.LFP


def _cohort_series(dataset: CountryDataset) -> AnnualSeries:
    if dataset.N9 is not None:
        return dataset.N9
    if dataset.population is not None:
        log.info("No N9 series given; using the extended 9-year-old cohort from the population table")
        return extend_n9(dataset.population).series
    raise ConfigError("family=n9 with no N9 series (set [data] n9 or [data] population)")


def _require_observed(dataset: CountryDataset) -> dict[str, AnnualSeries]:
    if not dataset.observed_dpp:
        raise ConfigError(
            "no observed productivity series (set [data] per_person, per_hour or observed)"
        )
    return dataset.observed_dpp


def calibrate(
    family: str, dataset: CountryDataset, spec: SearchSpec | None = None, workers: int = 1
) -> dict[str, CalibrationResult]:
    """One calibration per observed productivity definition, in file order."""
    observed = _require_observed(dataset)
    if family == "gdp":
        G = _require_gdp(dataset, family)
        return {d: calibrate_gdp_model(s, G, spec, workers) for d, s in observed.items()}
    if family == "lfp":
        return calibrate_lfp_dual(observed, _require_lfp(dataset), spec, workers)
    if family == "n9":
        N9 = _cohort_series(dataset)
        return {d: calibrate_n9_model(s, N9, spec, workers) for d, s in observed.items()}
    raise ConfigError(f"unknown family '{family}'")


def _predict(
    dataset: CountryDataset, params: ModelParams, lfp_sim: LfpSimParams | None
) -> tuple[str, AnnualSeries, AnnualSeries | None, AnnualSeries | None]:
    if isinstance(params, GdpModelParams):
        G = _require_gdp(dataset, "gdp")
        N = synthetic_population(G, params.A2, params.N0, params.t0, params.T)
        return "gdp", productivity_from_g(G, params), N, None
    if isinstance(params, N9ModelParams):
        return "n9", productivity_from_n9(_cohort_series(dataset), params), None, None
    if isinstance(params, LfpResponseParams):
        if lfp_sim is not None:
            lfp = simulate_lfp(_require_gdp(dataset, "lfp"), lfp_sim)
        else:
            lfp = _require_lfp(dataset)
        return "lfp", productivity_from_lfp(lfp, params), None, lfp
    raise ConfigError(f"cannot simulate with {type(params).__name__}")


def simulate(
    dataset: CountryDataset,
    params: ModelParams,
    window: int = 5,
    lfp_sim: LfpSimParams | None = None,
) -> SimulationResult:
    """Forward evaluation with fixed constants; no fitting."""
    family, predicted, population, lfp = _predict(dataset, params, lfp_sim)
    definition, observed = next(iter(dataset.observed_dpp.items()), ("", None))
    log.info("Simulated %s model %d-%d", family, predicted.start_year, predicted.end_year)
    return SimulationResult(
        family=family,
        params=params,
        predicted=predicted,
        observed=observed,
        population=population,
        lfp=lfp,
        window=window,
        definition=definition,
    )


def evaluate(
    dataset: CountryDataset,
    params: ModelParams,
    window: int = 5,
    lfp_sim: LfpSimParams | None = None,
) -> dict[str, SimulationResult]:
    """Forward model scored against every observed definition (R², SSE, best lag)."""
    observed = _require_observed(dataset)
    family, predicted, population, lfp = _predict(dataset, params, lfp_sim)
    results = {}
    for definition, series in observed.items():
        fit = evaluate_fit(series, predicted, window)
        log.info(
            "Evaluated %s model against '%s': R2=%.4f, SSE=%.6g, best lag %s",
            family, definition, fit.r_squared, fit.sse, fit.best_lag,
        )
        results[definition] = SimulationResult(
            family=family,
            params=params,
            predicted=predicted,
            observed=series,
            population=population,
            lfp=lfp,
            fit=fit,
            window=window,
            definition=definition,
        )
    return results


def forecast(
    dataset: CountryDataset,
    params: N9ModelParams,
    last_observed_year: int | None = None,
    tolerance: float = DEFAULT_DISCREPANCY_TOLERANCE,
) -> ForecastRun:
    """Cohort-shift forecast past ``last_observed_year`` (default: end of the observed series)."""
    if dataset.population is None:
        raise ConfigError("forecast needs a population table (set [data] population)")
    if not isinstance(params, N9ModelParams):
        raise ConfigError("forecast runs the n9 family; pass B, C, T or preset=us")
    if last_observed_year is None:
        if not dataset.observed_dpp:
            raise ConfigError(
                "last observed year unknown: set [run] last_observed_year or give an observed series"
            )
        last_observed_year = max(s.end_year for s in dataset.observed_dpp.values())
    return ForecastRun(
        forecast=forecast_productivity(dataset.population, params, last_observed_year),
        cohort=extend_n9(dataset.population),
        consistency=cohort_consistency(dataset.population, tolerance),
    )
