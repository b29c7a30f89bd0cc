from dataclasses import asdict
from typing import Optional

from ..server import mcp
from ..coerce import FloatList, ParamDict
from ..config import build_params
from ..data_io import read_series_csv
from ..model import (
    COUNTRY_PRESETS,
    LFP_RESPONSE_PRESETS,
    N9_PRESET,
    POTENTIAL_RATE_CONSTANTS,
    below_potential_years,
    check_params,
    potential_gap,
)
from src.helpers.payload import to_json


@mcp.tool()
def check_model_params(
    family: str = "gdp",
    preset: Optional[str] = None,
    params: Optional[ParamDict] = None,
) -> str:
    """Steady-state sanity check of a parameter set.

    GDP sets report N0/B + C, LFP response sets report C2. Rates outside
    [-0.05, 0.15] per year are flagged.
    """
    values = dict(params or {})
    if preset:
        values["preset"] = preset
    if family == "lfp":
        values = {"t0": "0", "LFP0": "1.0", **values}
    check = check_params(build_params(family, values))
    return to_json(check)


@mcp.tool()
def list_presets() -> str:
    """Documented parameter sets by family, with their steady-state rates."""
    gdp = {
        name: {**asdict(p), "steady_state_rate": p.steady_state_rate}
        for name, p in COUNTRY_PRESETS.items()
    }
    lfp = {
        name: {"B2": B2, "C2": C2, "alpha": alpha}
        for name, (B2, C2, alpha) in LFP_RESPONSE_PRESETS.items()
    }
    return to_json({
        "gdp": gdp,
        "lfp": lfp,
        "n9": {"us": asdict(N9_PRESET)},
        "potential_rate_constants": POTENTIAL_RATE_CONSTANTS,
    })


@mcp.tool()
def potential_growth(gdp_path: str, constants: Optional[FloatList] = None) -> str:
    """Compare dG/G with the potential rate A/G for each constant A.

    Defaults to the US values A1 = 420 and A2 = 398. Returns the per-year gap
    and the years in which growth fell below potential.
    """
    G = read_series_csv(gdp_path, label="G")
    values = constants or list(POTENTIAL_RATE_CONSTANTS.values())
    result = {}
    for A in values:
        gap = potential_gap(G, A)
        result[f"{A:g}"] = {
            "gap": [{"year": year, "value": value} for year, value in gap.items()],
            "below_potential_years": below_potential_years(G, A),
        }
    return to_json(result)
