"""CSV ingestion and serialization for series, population tables and country datasets.

Parsing is locale-independent: decimal point only, no thousands separators,
no underscores, no ``nan``/``inf``. Files are read as UTF-8 (a BOM is accepted).
Cells are read as text and checked row by row, so errors carry the file line.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Iterator, Sequence

import pandas as pd

from .config import RunConfig
from .errors import DataError, LoadError
from .forecast import PopulationTable
from .series import AnnualSeries

log = logging.getLogger(__name__)

SERIES_HEADER = ("year", "value")
POPULATION_HEADER = ("year", "age", "count")

_NUMBER = re.compile(r"[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?")
_INTEGER = re.compile(r"[+-]?\d+")
_FIELD_COUNT = re.compile(r"Expected (\d+) fields in line (\d+), saw (\d+)")


@dataclass(frozen=True)
class CountryDataset:
    """Everything known about one country; only the series a family needs must be present."""

    name: str
    G: AnnualSeries | None = None
    observed_dpp: dict[str, AnnualSeries] = field(default_factory=dict)
    LFP: AnnualSeries | None = None
    N9: AnnualSeries | None = None
    population: PopulationTable | None = None


def format_value(value: float) -> str:
    """Shortest exact text for a float, so write -> read is the identity."""
    return repr(float(value))


def format_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return format_value(value)
    return str(value)


def write_table(path: str | Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write rows as CSV with ``\\n`` line endings; floats use :func:`format_value`."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame([[format_cell(v) for v in row] for row in rows], columns=list(header), dtype=object)
    frame.to_csv(path, index=False, lineterminator="\n", encoding="utf-8")
    return path


def _parse_float(text: str, path: str, line: int, column: str) -> float:
    text = text.strip()
    if not _NUMBER.fullmatch(text):
        raise LoadError(path, line, f"unparsable {column} {text!r}")
    return float(text)


def _parse_int(text: str, path: str, line: int, column: str) -> int:
    text = text.strip()
    if not _INTEGER.fullmatch(text):
        raise LoadError(path, line, f"unparsable {column} {text!r}")
    return int(text)


def _read_frame(path: str) -> pd.DataFrame:
    # blank lines are kept so that row i is file line i + 1
    try:
        return pd.read_csv(
            path,
            header=None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=False,
            encoding="utf-8-sig",
        )
    except pd.errors.EmptyDataError as exc:
        raise LoadError(path, 1, "missing header") from exc
    except pd.errors.ParserError as exc:
        match = _FIELD_COUNT.search(str(exc))
        if match is None:
            raise LoadError(path, None, str(exc)) from exc
        raise LoadError(
            path, int(match.group(2)), f"expected {match.group(1)} fields, got {match.group(3)}"
        ) from exc
    except UnicodeDecodeError as exc:
        raise LoadError(path, None, f"not UTF-8: {exc}") from exc
    except OSError as exc:
        raise LoadError(path, None, f"cannot open: {exc.strerror or exc}") from exc


def _rows(path: str | Path, header: tuple[str, ...]) -> Iterator[tuple[int, list[str]]]:
    path = str(path)
    frame = _read_frame(path)
    if frame.empty:
        raise LoadError(path, 1, f"missing header '{','.join(header)}'")
    for offset, record in enumerate(frame.itertuples(index=False, name=None)):
        line = offset + 1
        # absent trailing fields come back as NaN, empty ones as ""
        present = [cell for cell in record if isinstance(cell, str)]
        if not any(cell.strip() for cell in present):
            if line == 1:
                raise LoadError(path, 1, f"missing header '{','.join(header)}'")
            continue
        if line == 1:
            if len(present) != len(record) or tuple(c.strip().lower() for c in record) != header:
                raise LoadError(path, 1, f"missing header '{','.join(header)}'")
            continue
        if len(present) != len(header) or len(record) != len(header):
            raise LoadError(path, line, f"expected {len(header)} fields, got {len(present)}")
        yield line, present


def read_series_csv(path: str | Path, label: str | None = None) -> AnnualSeries:
    """Read a ``year,value`` file of consecutive ascending years."""
    path_str = str(path)
    years: list[int] = []
    values: list[float] = []
    for line, (year_text, value_text) in _rows(path_str, SERIES_HEADER):
        year = _parse_int(year_text, path_str, line, "year")
        value = _parse_float(value_text, path_str, line, "value")
        if years:
            prev = years[-1]
            if year == prev:
                raise LoadError(path_str, line, f"duplicate year {year}")
            if year < prev:
                raise LoadError(path_str, line, f"year {year} out of order after {prev}")
            if year != prev + 1:
                raise LoadError(path_str, line, f"gap after {prev}")
        years.append(year)
        values.append(value)
    if not years:
        raise LoadError(path_str, None, "no data rows")
    try:
        return AnnualSeries(years[0], values, label if label is not None else Path(path_str).stem)
    except DataError as exc:
        raise LoadError(path_str, None, str(exc)) from exc


def write_series_csv(series: AnnualSeries, path: str | Path) -> Path:
    return write_table(path, SERIES_HEADER, series.items())


def read_population_csv(path: str | Path) -> PopulationTable:
    """Read a ``year,age,count`` file; duplicate keys and negative counts are errors."""
    path_str = str(path)
    rows: list[tuple[int, int, float]] = []
    seen: dict[tuple[int, int], int] = {}
    for line, (year_text, age_text, count_text) in _rows(path_str, POPULATION_HEADER):
        year = _parse_int(year_text, path_str, line, "year")
        age = _parse_int(age_text, path_str, line, "age")
        count = _parse_float(count_text, path_str, line, "count")
        if (year, age) in seen:
            raise LoadError(path_str, line, f"duplicate entry for year {year}, age {age} (first on line {seen[(year, age)]})")
        if count < 0:
            raise LoadError(path_str, line, f"negative count {count_text.strip()}")
        if age < 0:
            raise LoadError(path_str, line, f"negative age {age}")
        seen[(year, age)] = line
        rows.append((year, age, count))
    if not rows:
        raise LoadError(path_str, None, "no data rows")
    table = PopulationTable.from_rows(rows)
    log.debug("Loaded %d population rows from %s (ages %s)", len(table), path_str, table.ages)
    return table


def write_population_csv(table: PopulationTable, path: str | Path) -> Path:
    return write_table(path, POPULATION_HEADER, table.rows())


def load_country_dataset(config: RunConfig) -> CountryDataset:
    """Load every file the configuration lists; absent entries stay ``None``."""
    paths = config.data
    observed = {
        definition: read_series_csv(path, label=definition)
        for definition, path in paths.observed_paths().items()
    }
    dataset = CountryDataset(
        name=config.name,
        G=read_series_csv(paths.gdp, label="G") if paths.gdp else None,
        observed_dpp=observed,
        LFP=read_series_csv(paths.lfp, label="LFP") if paths.lfp else None,
        N9=read_series_csv(paths.n9, label="N9") if paths.n9 else None,
        population=read_population_csv(paths.population) if paths.population else None,
    )
    log.info(
        "Loaded dataset '%s': G=%s, observed=%s, LFP=%s, N9=%s, population=%s",
        dataset.name,
        dataset.G.span if dataset.G else None,
        {k: v.span for k, v in observed.items()},
        dataset.LFP.span if dataset.LFP else None,
        dataset.N9.span if dataset.N9 else None,
        len(dataset.population) if dataset.population else None,
    )
    return dataset
