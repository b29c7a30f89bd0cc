"""Grid search over the nonlinear constants with least squares for the affine ones.

Every model family is linear in its fitted constants once the grid values
are fixed, so each grid point reduces to a small OLS problem. Regressor
columns are smoothed with the same centered moving average as the observed
series, which keeps zero-noise recovery exact for any window.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import (
    AlignmentError,
    CalibrationFailedError,
    DegeneracyError,
    InsufficientDataError,
    UndefinedFitError,
)
from .helpers.ols import add_intercept, has_variance, least_squares, total_sum_of_squares
from .model import (
    MAX_LAG,
    GdpModelParams,
    LfpResponseParams,
    ModelParams,
    N9ModelParams,
    require_participation,
    synthetic_population,
)
from .series import AnnualSeries, align, growth_rate, lag, moving_average_centered

log = logging.getLogger(__name__)

MIN_FIT_YEARS = 8
FAMILIES = ("gdp", "lfp", "n9")


class GridRange(BaseModel):
    """Inclusive grid ``low, low + step, ..., <= high``."""

    model_config = ConfigDict(frozen=True)

    low: float
    high: float
    step: float = Field(gt=0)

    @model_validator(mode="after")
    def _ordered(self) -> "GridRange":
        if self.low > self.high:
            raise ValueError(f"grid low {self.low} exceeds high {self.high}")
        return self

    def values(self) -> tuple[float, ...]:
        count = int(math.floor((self.high - self.low) / self.step + 1e-9)) + 1
        return tuple(round(self.low + i * self.step, 10) for i in range(count))


def _as_grid(value: Any) -> Any:
    if isinstance(value, str):
        value = [part.strip() for part in value.split(",") if part.strip()]
    if isinstance(value, (list, tuple)):
        if len(value) == 1:
            value = [value[0], value[0], 1.0]
        if len(value) != 3:
            raise ValueError("grid must be 'min, max, step'")
        return {"low": value[0], "high": value[1], "step": value[2]}
    return value


class SearchSpec(BaseModel):
    """Grid ranges, fixed values and smoothing for one calibration run."""

    model_config = ConfigDict(frozen=True)

    a2: GridRange = GridRange(low=300.0, high=600.0, step=10.0)
    lag: GridRange = GridRange(low=0.0, high=4.0, step=1.0)
    alpha: GridRange = GridRange(low=0.0, high=6.0, step=0.1)
    n0: float = Field(1_000_000.0, gt=0)
    t0: int | None = None
    window: int = 5
    smooth: bool = True

    @field_validator("a2", "lag", "alpha", mode="before")
    @classmethod
    def _grid_from_sequence(cls, v: Any) -> Any:
        return _as_grid(v)

    @field_validator("window")
    @classmethod
    def _odd_window(cls, v: int) -> int:
        if v < 1 or v % 2 == 0:
            raise ValueError(f"window must be a positive odd integer, got {v}")
        return v

    @field_validator("lag")
    @classmethod
    def _whole_lags(cls, v: GridRange) -> GridRange:
        for value in v.values():
            if value != int(value) or not 0 <= value <= MAX_LAG:
                raise ValueError(f"lag grid values must be whole years in 0..{MAX_LAG}, got {value}")
        return v

    @property
    def effective_window(self) -> int:
        return self.window if self.smooth else 1

    def lags(self) -> tuple[int, ...]:
        return tuple(int(v) for v in self.lag.values())

    def echo(self) -> dict:
        return self.model_dump(mode="json")


@dataclass(frozen=True)
class TraceEntry:
    candidate: dict[str, float]
    sse: float | None
    note: str = ""


@dataclass(frozen=True)
class CalibrationResult:
    family: str
    params: ModelParams
    r_squared: float
    sse: float
    residuals: AnnualSeries
    observed: AnnualSeries
    predicted: AnnualSeries
    trace: list[TraceEntry]
    window: int
    best_lag: int | None
    spec: SearchSpec
    label: str = ""


@dataclass(frozen=True)
class FitSummary:
    r_squared: float
    sse: float
    best_lag: int | None
    observed: AnnualSeries
    predicted: AnnualSeries


@dataclass
class _Outcome:
    candidate: dict[str, float]
    key: tuple = ()
    params: ModelParams | None = None
    span: tuple[int, int] = (0, 0)
    y: np.ndarray | None = None
    fitted: np.ndarray | None = None
    sse: float | None = None
    note: str = ""
    error: type[Exception] | None = None


@dataclass(frozen=True)
class _Design:
    span: tuple[int, int]
    y: np.ndarray
    X: np.ndarray


def r_squared(observed: AnnualSeries, predicted: AnnualSeries) -> float:
    """R² of observed regressed on predicted (slope + intercept)."""
    _, (obs, pred) = align([observed, predicted])
    if len(obs) < 3:
        raise InsufficientDataError(f"R² needs at least 3 overlapping years, got {len(obs)}")
    if not has_variance(obs.values):
        raise UndefinedFitError("Observed series has zero variance; R² is undefined")
    if not has_variance(pred.values):
        return 0.0
    fit = least_squares(add_intercept(pred.values), obs.values)
    return 1.0 - fit.sse / total_sum_of_squares(obs.values)


def best_lag(observed: AnnualSeries, predicted: AnnualSeries, max_lag: int = 3) -> int | None:
    """Shift of ``predicted`` in ``-max_lag..max_lag`` with the highest correlation.

    Positive values mean the prediction leads the observation.
    """
    scored: list[tuple[float, int, int]] = []
    for k in range(-max_lag, max_lag + 1):
        try:
            _, (obs, pred) = align([observed, lag(predicted, k)])
        except AlignmentError:
            continue
        if len(obs) < 3 or not has_variance(obs.values) or not has_variance(pred.values):
            continue
        corr = float(np.corrcoef(obs.values, pred.values)[0, 1])
        scored.append((-corr, abs(k), k))
    if not scored:
        return None
    return min(scored)[2]


def evaluate_fit(observed: AnnualSeries, predicted: AnnualSeries, window: int = 5) -> FitSummary:
    """Score a forward prediction against the observed series.

    Both series are smoothed with the same centered window, as the calibrators
    smooth their regressor columns, so a calibrated parameter set scores the
    same R² and SSE here.
    """
    smoothed = [moving_average_centered(s, window) for s in (observed, predicted)]
    _, (obs, pred) = align(smoothed)
    diff = obs.values - pred.values
    return FitSummary(
        r_squared=r_squared(obs, pred),
        sse=float(diff @ diff),
        best_lag=best_lag(obs, pred),
        observed=obs,
        predicted=pred,
    )


def _shared_years(observed: AnnualSeries, spans: Sequence[tuple[int, int]]) -> AnnualSeries:
    """Restrict ``observed`` to the years every candidate's regressor covers."""
    first = max([observed.start_year, *(start for start, _ in spans)])
    last = min([observed.end_year, *(end for _, end in spans)])
    if first > last:
        raise InsufficientDataError(
            f"No year of '{observed.label}' is covered by every lag in the grid"
        )
    if (first, last) != observed.span:
        log.debug("Scoring every grid point over %d-%d", first, last)
    return observed.window(first, last)


def _design(observed: AnnualSeries, columns: Sequence[AnnualSeries], window: int, intercept: bool) -> _Design:
    _, parts = align([observed, *columns])
    smoothed = [moving_average_centered(part, window) for part in parts]
    y = smoothed[0].values
    if len(y) < MIN_FIT_YEARS:
        raise InsufficientDataError(
            f"Fit needs {MIN_FIT_YEARS} years after smoothing and lags, got {len(y)}"
        )
    X = np.column_stack([s.values for s in smoothed[1:]])
    if intercept:
        X = np.column_stack([X, np.ones(len(y))])
    span = (smoothed[0].start_year, smoothed[0].end_year)
    return _Design(span, y, X)


def _solve(design: _Design, outcome: _Outcome) -> np.ndarray:
    if not has_variance(design.y):
        raise UndefinedFitError("observed series has zero variance")
    for column in design.X.T:
        if not has_variance(column) and not np.allclose(column, 1.0):
            raise UndefinedFitError("regressor has no variance")
    fit = least_squares(design.X, design.y)
    if fit.rank < design.X.shape[1]:
        raise UndefinedFitError("regressors are collinear")
    outcome.span = design.span
    outcome.y = design.y
    outcome.fitted = fit.fitted
    outcome.sse = fit.sse
    return fit.coef


def _guarded(evaluate: Callable[[dict[str, float], _Outcome], None]) -> Callable[[dict[str, float]], _Outcome]:
    def run(candidate: dict[str, float]) -> _Outcome:
        outcome = _Outcome(candidate)
        try:
            evaluate(candidate, outcome)
        except (DegeneracyError, InsufficientDataError, AlignmentError, UndefinedFitError, CalibrationFailedError) as exc:
            outcome.sse = None
            outcome.params = None
            outcome.note = str(exc)
            outcome.error = type(exc)
            log.debug("Skipped grid point %s: %s", candidate, exc)
        return outcome

    return run


def _run_grid(
    family: str,
    observed: AnnualSeries,
    candidates: list[dict[str, float]],
    evaluate: Callable[[dict[str, float], _Outcome], None],
    spec: SearchSpec,
    workers: int,
) -> CalibrationResult:
    if not has_variance(observed.values):
        raise UndefinedFitError(f"Observed series '{observed.label}' has zero variance; nothing to fit")
    run = _guarded(evaluate)
    if workers > 1 and len(candidates) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, candidates))
    else:
        outcomes = [run(candidate) for candidate in candidates]

    trace = [TraceEntry(o.candidate, o.sse, o.note) for o in outcomes]
    fitted = [o for o in outcomes if o.sse is not None and o.params is not None]
    if not fitted:
        errors = {o.error for o in outcomes}
        detail = outcomes[0].note if outcomes else "empty grid"
        if errors == {UndefinedFitError}:
            raise UndefinedFitError(f"{family} calibration: no grid point has a defined fit ({detail})")
        if errors == {InsufficientDataError}:
            raise InsufficientDataError(f"{family} calibration: {detail}")
        raise CalibrationFailedError(
            f"{family} calibration failed: all {len(outcomes)} grid points were degenerate ({detail})"
        )

    best = min(fitted, key=lambda o: o.key)
    first, last = best.span
    window = spec.effective_window
    obs_s = AnnualSeries(first, best.y, observed.label or "observed")
    pred_s = AnnualSeries(first, best.fitted, "predicted")
    residuals = AnnualSeries(first, best.y - best.fitted, "residual")
    result = CalibrationResult(
        family=family,
        params=best.params,
        r_squared=r_squared(obs_s, pred_s),
        sse=float(best.sse),
        residuals=residuals,
        observed=obs_s,
        predicted=pred_s,
        trace=trace,
        window=window,
        best_lag=best_lag(obs_s, pred_s),
        spec=spec,
        label=observed.label,
    )
    log.info(
        "%s fit for '%s': %s, R2=%.4f over %d-%d (%d/%d grid points usable)",
        family, observed.label, best.candidate, result.r_squared, first, last, len(fitted), len(outcomes),
    )
    return result


def calibrate_gdp_model(
    observed_dpp: AnnualSeries, G: AnnualSeries, spec: SearchSpec | None = None, workers: int = 1
) -> CalibrationResult:
    """Fit A2 and T on the grid; 1/B and C by least squares with N0 held fixed."""
    spec = spec or SearchSpec()
    window = spec.effective_window

    def start(T: int) -> int:
        return spec.t0 if spec.t0 is not None else G.start_year + T

    spans = [(start(T) + T, G.end_year + 2 * T) for T in spec.lags() if G.start_year <= start(T) - T]
    observed = _shared_years(observed_dpp, spans)

    def evaluate(candidate: dict[str, float], outcome: _Outcome) -> None:
        A2, T = candidate["A2"], int(candidate["T"])
        t0 = start(T)
        N = synthetic_population(G, A2, spec.n0, t0, T)
        design = _design(observed, [lag(N, T)], window, intercept=True)
        x, C = _solve(design, outcome)
        if x == 0.0:
            raise UndefinedFitError("population slope is exactly zero")
        outcome.params = GdpModelParams(A2=A2, B=float(1.0 / x), C=float(C), N0=spec.n0, T=T, t0=t0)
        outcome.key = (outcome.sse, A2, T)

    candidates = [{"A2": a2, "T": t} for a2 in spec.a2.values() for t in spec.lags()]
    return _run_grid("gdp", observed, candidates, evaluate, spec, workers)


def calibrate_lfp_response(
    observed_dpp: AnnualSeries, LFP: AnnualSeries, spec: SearchSpec | None = None, workers: int = 1
) -> CalibrationResult:
    """Fit alpha on the grid; B2 and C2 by least squares on the columns
    ``dLFP/LFP * E`` and ``E`` with ``E = exp(alpha * (LFP - LFP0) / LFP0)``."""
    spec = spec or SearchSpec()
    require_participation(LFP)
    window = spec.effective_window
    t0 = spec.t0 if spec.t0 is not None else LFP.start_year
    LFP0 = LFP.value_at(t0)
    rate = growth_rate(LFP)
    level = LFP.window(rate.start_year, rate.end_year)

    def evaluate(candidate: dict[str, float], outcome: _Outcome) -> None:
        alpha = candidate["alpha"]
        sensitivity = np.exp(alpha * (level.values - LFP0) / LFP0)
        columns = [
            AnnualSeries(rate.start_year, rate.values * sensitivity, "dLFP/LFP*E"),
            AnnualSeries(rate.start_year, sensitivity, "E"),
        ]
        design = _design(observed_dpp, columns, window, intercept=False)
        B2, C2 = _solve(design, outcome)
        outcome.params = LfpResponseParams(B2=float(B2), C2=float(C2), alpha=alpha, t0=t0, LFP0=LFP0)
        outcome.key = (outcome.sse, abs(alpha), alpha)

    candidates = [{"alpha": a} for a in spec.alpha.values()]
    return _run_grid("lfp", observed_dpp, candidates, evaluate, spec, workers)


def calibrate_lfp_dual(
    observed_by_definition: Mapping[str, AnnualSeries],
    LFP: AnnualSeries,
    spec: SearchSpec | None = None,
    workers: int = 1,
) -> dict[str, CalibrationResult]:
    """One response fit per productivity definition (per-person, per-hour, ...)."""
    return {
        definition: calibrate_lfp_response(series, LFP, spec, workers)
        for definition, series in observed_by_definition.items()
    }


def calibrate_n9_model(
    observed_dpp: AnnualSeries, N9: AnnualSeries, spec: SearchSpec | None = None, workers: int = 1
) -> CalibrationResult:
    """Fit T on the grid; 1/B and C by least squares."""
    spec = spec or SearchSpec()
    window = spec.effective_window
    observed = _shared_years(observed_dpp, [(N9.start_year + T, N9.end_year + T) for T in spec.lags()])

    def evaluate(candidate: dict[str, float], outcome: _Outcome) -> None:
        T = int(candidate["T"])
        design = _design(observed, [lag(N9, T)], window, intercept=True)
        x, C = _solve(design, outcome)
        if x == 0.0:
            raise UndefinedFitError("cohort slope is exactly zero")
        outcome.params = N9ModelParams(B=float(1.0 / x), C=float(C), T=T)
        outcome.key = (outcome.sse, T)

    candidates = [{"T": t} for t in spec.lags()]
    return _run_grid("n9", observed, candidates, evaluate, spec, workers)
