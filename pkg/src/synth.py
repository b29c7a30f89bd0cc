"""Synthetic countries with known constants, for tests and demos."""

from __future__ import annotations

import configparser
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .data_io import CountryDataset, format_value, write_series_csv
from .errors import GenerationError, ParameterError
from .model import GdpModelParams, productivity_from_g
from .series import AnnualSeries

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class GdpPathSpec:
    """``G(k) = level * (1 + trend)**k * (1 + amplitude * sin(2 pi k / period))``."""

    start_year: int = 1959
    years: int = 45
    initial_level: float = 7000.0
    trend: float = 0.025
    amplitude: float = 0.02
    period: float = 9.0

    def path(self) -> AnnualSeries:
        if self.years < 2:
            raise GenerationError(f"GDP path needs at least 2 years, got {self.years}")
        if self.period <= 0:
            raise GenerationError(f"period must be positive, got {self.period}")
        k = np.arange(self.years, dtype=float)
        values = (
            self.initial_level
            * (1.0 + self.trend) ** k
            * (1.0 + self.amplitude * np.sin(2.0 * math.pi * k / self.period))
        )
        bad = np.flatnonzero(~(values > 0.0))
        if bad.size:
            raise GenerationError(
                f"GDP path is not positive in {self.start_year + int(bad[0])} ({values[bad[0]]!r})"
            )
        return AnnualSeries(self.start_year, values, "G")


def generate_synthetic_country(
    true_params: GdpModelParams,
    path_spec: GdpPathSpec | None = None,
    noise_sigma: float = 0.0,
    seed: int = 0,
    name: str = "synthetic",
) -> CountryDataset:
    """GDP path plus observed dP/P = model output + seeded Gaussian noise."""
    if not noise_sigma >= 0.0:
        raise ParameterError(f"noise sigma must be >= 0, got {noise_sigma!r}")
    if path_spec is None:
        path_spec = GdpPathSpec(start_year=true_params.t0 - true_params.T)
    G = path_spec.path()
    model = productivity_from_g(G, true_params)
    model = model.window(model.start_year, min(model.end_year, G.end_year))
    values = model.values
    if noise_sigma > 0.0:
        rng = np.random.default_rng(seed)
        values = values + rng.normal(0.0, noise_sigma, size=len(model))
    observed = AnnualSeries(model.start_year, values, "per-person")
    log.info(
        "Synthetic country '%s': G %d-%d, observed %d-%d, sigma=%g, seed=%d",
        name, G.start_year, G.end_year, observed.start_year, observed.end_year, noise_sigma, seed,
    )
    return CountryDataset(name=name, G=G, observed_dpp={"per-person": observed})


def write_synthetic_country(
    dataset: CountryDataset, directory: str | Path, true_params: GdpModelParams
) -> list[Path]:
    """Write ``gdp.csv``, ``per_person.csv`` and a runnable ``run.ini``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = [write_series_csv(dataset.G, directory / "gdp.csv")]
    for definition, series in dataset.observed_dpp.items():
        written.append(write_series_csv(series, directory / f"{definition.replace('-', '_')}.csv"))

    parser = configparser.ConfigParser(interpolation=None)
    parser.optionxform = str
    parser["run"] = {"name": dataset.name, "family": "gdp", "window": "5", "output": "out"}
    parser["data"] = {"gdp": "gdp.csv", "per_person": "per_person.csv"}
    a2 = true_params.A2
    parser["search"] = {
        "a2": f"{max(a2 - 100.0, 10.0):g}, {a2 + 100.0:g}, 10",
        "lag": "0, 2, 1",
        "n0": format_value(true_params.N0),
    }
    parser["params"] = {
        "A2": format_value(true_params.A2),
        "B": format_value(true_params.B),
        "C": format_value(true_params.C),
        "N0": format_value(true_params.N0),
        "T": str(true_params.T),
        "t0": str(true_params.t0),
    }
    config_path = directory / "run.ini"
    with open(config_path, "w", encoding="utf-8", newline="\n") as handle:
        parser.write(handle)
    written.append(config_path)
    return written
