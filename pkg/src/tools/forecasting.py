"""Cohort-shift forecast and cohort consistency tools."""

from typing import Optional

from ..server import mcp
from ..coerce import ParamDict
from ..config import build_params
from ..data_io import load_country_dataset, read_population_csv
from ..forecast import DEFAULT_DISCREPANCY_TOLERANCE, cohort_consistency
from ..pipeline import forecast
from ..report import summarize, write_report
from src.helpers.payload import load_tool_config, to_json


@mcp.tool()
def forecast_productivity_tool(
    config_path: str,
    preset: Optional[str] = "us",
    params: Optional[ParamDict] = None,
    last_observed_year: Optional[int] = None,
    output_dir: Optional[str] = None,
) -> str:
    """Forecast dP/P from the 9-year-old cohort extended with shifted 6- and 1-year-olds.

    Needs ``[data] population`` in the run configuration. Every forecast year
    carries the provenance of the cohort count it came from.
    """
    values = dict(params or {})
    if preset and "preset" not in values:
        values["preset"] = preset
    config = load_tool_config(config_path, family="n9", params=values or None)
    dataset = load_country_dataset(config)
    n9_params = build_params("n9", config.params)
    run = forecast(dataset, n9_params, last_observed_year or config.last_observed_year)
    if output_dir:
        write_report(run, output_dir)
    points = [
        {"year": p.year, "dpp": p.dpp, "provenance": p.provenance.value}
        for p in run.forecast.points
    ]
    return to_json({"summary": summarize(run), "points": points})


@mcp.tool()
def cohort_consistency_report(
    population_path: str,
    tolerance: float = DEFAULT_DISCREPANCY_TOLERANCE,
) -> str:
    """Compare year-on-year change rates of the shifted 9-, 6- and 1-year-old cohorts.

    Rows above ``tolerance`` (absolute difference of growth rates) are flagged.
    """
    report = cohort_consistency(read_population_csv(population_path), tolerance)
    return to_json({
        "tolerance": report.tolerance,
        "empty": report.empty,
        "max_abs": report.max_abs,
        "mean_abs": report.mean_abs,
        "flagged_years": sorted({r.year for r in report.flagged}),
        "rows": report.rows,
    })
