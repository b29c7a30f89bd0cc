"""Cohort-shift extrapolation of the 9-year-old population and the productivity forecast."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

from .errors import DataError, InsufficientDataError, NothingToForecastError
from .model import N9ModelParams, productivity_from_n9
from .series import AnnualSeries

log = logging.getLogger(__name__)

EXTRAPOLATION_YEARS = 9
DEFAULT_DISCREPANCY_TOLERANCE = 0.01


class Provenance(str, Enum):
    MEASURED = "measured-9yo"
    SHIFTED_6 = "shifted-6yo"
    SHIFTED_1 = "shifted-1yo"


# (source age, years shifted ahead, provenance), in precedence order
COHORT_SHIFTS: tuple[tuple[int, int, Provenance], ...] = (
    (9, 0, Provenance.MEASURED),
    (6, 3, Provenance.SHIFTED_6),
    (1, 8, Provenance.SHIFTED_1),
)


class PopulationTable:
    """Population counts keyed by ``(year, age)``."""

    def __init__(self, counts: Mapping[tuple[int, int], float] | None = None) -> None:
        self._counts: dict[tuple[int, int], float] = {}
        for (year, age), count in (counts or {}).items():
            self._add(int(year), int(age), count)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[int, int, float]]) -> "PopulationTable":
        table = cls()
        for year, age, count in rows:
            if (int(year), int(age)) in table._counts:
                raise DataError(f"Duplicate population entry for year {year}, age {age}")
            table._add(int(year), int(age), count)
        return table

    def _add(self, year: int, age: int, count: float) -> None:
        count = float(count)
        if not math.isfinite(count) or count < 0:
            raise DataError(f"Population count for year {year}, age {age} must be finite and >= 0, got {count!r}")
        if age < 0:
            raise DataError(f"Age must be >= 0, got {age}")
        self._counts[(year, age)] = count

    def __len__(self) -> int:
        return len(self._counts)

    def __contains__(self, key: object) -> bool:
        return key in self._counts

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PopulationTable):
            return NotImplemented
        return self._counts == other._counts

    __hash__ = None  # type: ignore[assignment]

    @property
    def ages(self) -> list[int]:
        return sorted({age for _, age in self._counts})

    @property
    def years(self) -> list[int]:
        return sorted({year for year, _ in self._counts})

    def count(self, year: int, age: int) -> float | None:
        return self._counts.get((year, age))

    def cohort(self, age: int) -> dict[int, float]:
        return {year: c for (year, a), c in sorted(self._counts.items()) if a == age}

    def rows(self) -> Iterator[tuple[int, int, float]]:
        for (year, age), count in sorted(self._counts.items()):
            yield year, age, count


@dataclass(frozen=True)
class ExtendedCohort:
    series: AnnualSeries
    provenance: dict[int, Provenance]
    last_measured_year: int
    omitted_years: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class ForecastPoint:
    year: int
    dpp: float
    provenance: Provenance


@dataclass(frozen=True)
class ForecastSeries:
    points: list[ForecastPoint]
    last_observed_year: int
    last_measured_year: int
    params: N9ModelParams

    @property
    def horizon(self) -> int:
        return self.points[-1].year - self.last_measured_year if self.points else 0

    def ahead(self) -> list[ForecastPoint]:
        return [p for p in self.points if p.year > self.last_observed_year]

    def as_series(self) -> AnnualSeries:
        return AnnualSeries(self.points[0].year, [p.dpp for p in self.points], "dP/P forecast")


def _shifted_cohorts(pop: PopulationTable) -> dict[Provenance, dict[int, float]]:
    shifted: dict[Provenance, dict[int, float]] = {}
    for age, shift, provenance in COHORT_SHIFTS:
        shifted[provenance] = {year + shift: count for year, count in pop.cohort(age).items()}
    return shifted


def extend_n9(pop: PopulationTable) -> ExtendedCohort:
    """9-year-old counts, extended with 6-year-olds shifted 3 years and 1-year-olds shifted 8.

    Precedence per year: measured > 6-year-olds > 1-year-olds. Years are never
    interpolated; when the candidates are not contiguous, the run containing the
    last measured year is kept.
    """
    shifted = _shifted_cohorts(pop)
    measured = shifted[Provenance.MEASURED]
    if not measured:
        raise InsufficientDataError("Population table has no age-9 counts to extend")
    last_measured = max(measured)
    latest = last_measured + EXTRAPOLATION_YEARS

    chosen: dict[int, tuple[float, Provenance]] = {}
    for provenance in (Provenance.MEASURED, Provenance.SHIFTED_6, Provenance.SHIFTED_1):
        for year, count in shifted[provenance].items():
            if year <= latest and year not in chosen:
                chosen[year] = (count, provenance)

    first = last = last_measured
    while first - 1 in chosen:
        first -= 1
    while last + 1 in chosen:
        last += 1
    omitted = sorted(year for year in chosen if not first <= year <= last)
    if omitted:
        log.info("Omitted %d non-contiguous cohort year(s): %s", len(omitted), omitted)

    years = range(first, last + 1)
    series = AnnualSeries(first, [chosen[y][0] for y in years], "N9")
    return ExtendedCohort(series, {y: chosen[y][1] for y in years}, last_measured, omitted)


def forecast_productivity(
    pop: PopulationTable, p: N9ModelParams, last_observed_year: int
) -> ForecastSeries:
    """Productivity growth from the extended cohort, up to ``9 + T`` years past the last measured year."""
    extended = extend_n9(pop)
    dpp = productivity_from_n9(extended.series, p)
    points = [
        ForecastPoint(year, value, extended.provenance[year - p.T])
        for year, value in dpp.items()
    ]
    forecast = ForecastSeries(points, last_observed_year, extended.last_measured_year, p)
    if not forecast.ahead():
        raise NothingToForecastError(
            f"Cohort data ends at {dpp.end_year}; nothing to forecast after {last_observed_year}. "
            "Add 1- or 6-year-old counts for recent years."
        )
    log.info(
        "Forecast %d-%d, %d year(s) past %d, horizon %d years after last measured 9-year-olds (%d)",
        dpp.start_year, dpp.end_year, len(forecast.ahead()), last_observed_year,
        forecast.horizon, extended.last_measured_year,
    )
    return forecast


@dataclass(frozen=True)
class DiscrepancyRow:
    year: int
    cohort_a: Provenance
    cohort_b: Provenance
    rate_a: float
    rate_b: float
    difference: float


@dataclass(frozen=True)
class ConsistencyReport:
    rows: list[DiscrepancyRow]
    tolerance: float
    flagged: list[DiscrepancyRow]
    max_abs: float
    mean_abs: float

    @property
    def empty(self) -> bool:
        return not self.rows


def _cohort_rates(counts: dict[int, float]) -> dict[int, float]:
    return {
        year: (count - counts[year - 1]) / counts[year - 1]
        for year, count in counts.items()
        if year - 1 in counts and counts[year - 1] > 0
    }


def cohort_consistency(
    pop: PopulationTable, tolerance: float = DEFAULT_DISCREPANCY_TOLERANCE
) -> ConsistencyReport:
    """Growth-rate differences between shifted cohorts for every overlapping year."""
    rates = {prov: _cohort_rates(counts) for prov, counts in _shifted_cohorts(pop).items()}
    order = [prov for _, _, prov in COHORT_SHIFTS]
    rows: list[DiscrepancyRow] = []
    for i, a in enumerate(order):
        for b in order[i + 1:]:
            for year in sorted(set(rates[a]) & set(rates[b])):
                ra, rb = rates[a][year], rates[b][year]
                rows.append(DiscrepancyRow(year, a, b, ra, rb, ra - rb))
    rows.sort(key=lambda r: (r.year, order.index(r.cohort_a), order.index(r.cohort_b)))
    if not rows:
        log.warning("No overlapping shifted cohorts; consistency report is empty")
        return ConsistencyReport([], tolerance, [], 0.0, 0.0)
    diffs = [abs(r.difference) for r in rows]
    flagged = [r for r in rows if abs(r.difference) > tolerance]
    if flagged:
        log.warning(
            "%d cohort growth-rate discrepancies above %g in years %s",
            len(flagged), tolerance, sorted({r.year for r in flagged}),
        )
    return ConsistencyReport(rows, tolerance, flagged, max(diffs), sum(diffs) / len(diffs))
