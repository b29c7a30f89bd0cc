"""Report directories: ``summary.json`` plus CSV data files for external plotting.

Output is byte-stable for identical inputs: sorted JSON keys, ``repr`` floats,
``\\n`` line endings, and a timestamp only when asked for.
"""

from __future__ import annotations

import json as _json
import logging
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

from . import __version__
from .calibration import CalibrationResult
from .data_io import format_cell, write_series_csv, write_table
from .forecast import ConsistencyReport
from .model import steady_state_rate
from .pipeline import ForecastRun, SimulationResult
from .series import AnnualSeries

log = logging.getLogger(__name__)

Report = CalibrationResult | SimulationResult | ForecastRun

FIT_HEADER = ("year", "observed", "predicted", "residual")


def _fit_rows(observed: AnnualSeries | None, predicted: AnnualSeries) -> list[tuple]:
    obs = dict(observed.items()) if observed is not None else {}
    rows = []
    for year, value in predicted.items():
        seen = obs.get(year)
        rows.append((year, seen, value, None if seen is None else seen - value))
    return rows


def _float_or_none(value: float | None) -> float | None:
    return None if value is None else float(value)


def _candidate_text(candidate: dict[str, float]) -> str:
    return ";".join(f"{key}={format_cell(float(value))}" for key, value in candidate.items())


def _calibration_summary(result: CalibrationResult) -> dict:
    return {
        "family": result.family,
        "definition": result.label,
        "params": asdict(result.params),
        "r_squared": float(result.r_squared),
        "sse": float(result.sse),
        "window": result.window,
        "grid": result.spec.echo(),
        "best_lag": result.best_lag,
        "steady_state_rate": _float_or_none(steady_state_rate(result.params)),
        "span": [result.observed.start_year, result.observed.end_year],
        "grid_points": len(result.trace),
        "skipped_points": sum(1 for entry in result.trace if entry.sse is None),
    }


def _calibration_files(result: CalibrationResult, directory: Path) -> list[Path]:
    return [
        write_table(directory / "fit.csv", FIT_HEADER, _fit_rows(result.observed, result.predicted)),
        write_table(
            directory / "trace.csv",
            ("candidate", "sse", "note"),
            ((_candidate_text(e.candidate), e.sse, e.note) for e in result.trace),
        ),
    ]


def _simulation_summary(result: SimulationResult) -> dict:
    fit = result.fit
    return {
        "family": result.family,
        "definition": result.definition,
        "params": asdict(result.params),
        "r_squared": None if fit is None else float(fit.r_squared),
        "sse": None if fit is None else float(fit.sse),
        "best_lag": None if fit is None else fit.best_lag,
        "window": result.window,
        "grid": None,
        "steady_state_rate": _float_or_none(steady_state_rate(result.params)),
        "span": [result.predicted.start_year, result.predicted.end_year],
    }


def _simulation_files(result: SimulationResult, directory: Path) -> list[Path]:
    if result.fit is not None:
        rows = _fit_rows(result.fit.observed, result.fit.predicted)
    else:
        rows = _fit_rows(result.observed, result.predicted)
    files = [write_table(directory / "fit.csv", FIT_HEADER, rows)]
    if result.population is not None:
        files.append(write_series_csv(result.population, directory / "population.csv"))
    if result.lfp is not None:
        files.append(write_series_csv(result.lfp, directory / "lfp.csv"))
    return files


def _consistency_rows(report: ConsistencyReport) -> list[tuple]:
    return [
        (r.year, r.cohort_a.value, r.cohort_b.value, r.rate_a, r.rate_b, r.difference,
         "yes" if abs(r.difference) > report.tolerance else "no")
        for r in report.rows
    ]


def _forecast_summary(run: ForecastRun) -> dict:
    fc = run.forecast
    return {
        "family": "n9",
        "params": asdict(fc.params),
        "r_squared": None,
        "sse": None,
        "window": None,
        "grid": None,
        "horizon": fc.horizon,
        "last_measured_year": fc.last_measured_year,
        "last_observed_year": fc.last_observed_year,
        "years_ahead": len(fc.ahead()),
        "omitted_years": list(run.cohort.omitted_years),
        "consistency": {
            "rows": len(run.consistency.rows),
            "flagged_years": sorted({r.year for r in run.consistency.flagged}),
            "max_abs": float(run.consistency.max_abs),
            "mean_abs": float(run.consistency.mean_abs),
            "tolerance": run.consistency.tolerance,
        },
    }


def _forecast_files(run: ForecastRun, directory: Path) -> list[Path]:
    cohort = run.cohort
    return [
        write_table(
            directory / "forecast.csv",
            ("year", "dpp", "provenance"),
            ((p.year, p.dpp, p.provenance.value) for p in run.forecast.points),
        ),
        write_table(
            directory / "cohort.csv",
            ("year", "count", "provenance"),
            ((year, value, cohort.provenance[year].value) for year, value in cohort.series.items()),
        ),
        write_table(
            directory / "consistency.csv",
            ("year", "cohort_a", "cohort_b", "rate_a", "rate_b", "difference", "flagged"),
            _consistency_rows(run.consistency),
        ),
    ]


def summarize(result: Report) -> dict:
    """The ``summary.json`` content (without version and timestamp)."""
    if isinstance(result, CalibrationResult):
        return _calibration_summary(result)
    if isinstance(result, SimulationResult):
        return _simulation_summary(result)
    if isinstance(result, ForecastRun):
        return _forecast_summary(result)
    raise TypeError(f"cannot report {type(result).__name__}")


def write_report(result: Report, directory: str | Path, include_timestamp: bool = False) -> list[Path]:
    """Write one report directory and return the files written, ``summary.json`` last."""
    summary = summarize(result)
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    if isinstance(result, CalibrationResult):
        files = _calibration_files(result, directory)
    elif isinstance(result, SimulationResult):
        files = _simulation_files(result, directory)
    else:
        files = _forecast_files(result, directory)

    summary = {"version": __version__, **summary}
    if include_timestamp:
        summary["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    path = directory / "summary.json"
    path.write_text(_json.dumps(summary, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n")
    files.append(path)
    log.info("Wrote %d report file(s) to %s", len(files), directory)
    return files


def write_reports(
    results: dict[str, Report], directory: str | Path, include_timestamp: bool = False
) -> list[Path]:
    """One directory for a single result; one subdirectory per definition otherwise."""
    directory = Path(directory)
    if len(results) == 1:
        return write_report(next(iter(results.values())), directory, include_timestamp)
    written: list[Path] = []
    for definition, result in results.items():
        written.extend(write_report(result, directory / definition, include_timestamp))
    return written
