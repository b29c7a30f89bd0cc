"""Annual time-series container and the elementary transforms built on it."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import AlignmentError, DomainError, InsufficientDataError, ParameterError


@dataclass(frozen=True, eq=False)
class AnnualSeries:
    """Gapless year-indexed sequence of finite values.

    Missing data is expressed by a shorter span, never by sentinel values.
    """

    start_year: int
    values: np.ndarray
    label: str = field(default="")

    def __post_init__(self) -> None:
        arr = np.array(self.values, dtype=float).reshape(-1)
        if arr.size < 1:
            raise InsufficientDataError(f"Series '{self.label}' is empty")
        if not np.all(np.isfinite(arr)):
            bad = int(np.flatnonzero(~np.isfinite(arr))[0])
            raise DomainError(
                f"Series '{self.label}' has a non-finite value in {int(self.start_year) + bad}",
                year=int(self.start_year) + bad,
            )
        arr.setflags(write=False)
        object.__setattr__(self, "start_year", int(self.start_year))
        object.__setattr__(self, "values", arr)

    def __len__(self) -> int:
        return int(self.values.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, AnnualSeries):
            return NotImplemented
        return (
            self.start_year == other.start_year
            and self.label == other.label
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        return f"AnnualSeries({self.label!r}, {self.start_year}-{self.end_year}, n={len(self)})"

    @property
    def end_year(self) -> int:
        return self.start_year + len(self) - 1

    @property
    def span(self) -> tuple[int, int]:
        return self.start_year, self.end_year

    @property
    def years(self) -> np.ndarray:
        return np.arange(self.start_year, self.end_year + 1)

    def value_at(self, year: int) -> float:
        if not self.start_year <= year <= self.end_year:
            raise InsufficientDataError(
                f"Series '{self.label}' has no value for {year} (covers {self.start_year}-{self.end_year})"
            )
        return float(self.values[year - self.start_year])

    def window(self, first: int, last: int) -> "AnnualSeries":
        """Restrict to ``first..last`` inclusive; the range must lie inside the span."""
        if first > last or first < self.start_year or last > self.end_year:
            raise InsufficientDataError(
                f"Series '{self.label}' covers {self.start_year}-{self.end_year}, "
                f"cannot restrict to {first}-{last}"
            )
        lo = first - self.start_year
        return AnnualSeries(first, self.values[lo:lo + (last - first + 1)], self.label)

    def with_label(self, label: str) -> "AnnualSeries":
        return AnnualSeries(self.start_year, self.values, label)

    def items(self) -> Iterable[tuple[int, float]]:
        for offset, value in enumerate(self.values):
            yield self.start_year + offset, float(value)


def growth_rate(s: AnnualSeries) -> AnnualSeries:
    """Annual growth ``(s(t) - s(t-1)) / s(t-1)`` dated at ``t``."""
    if len(s) < 2:
        raise InsufficientDataError(f"Growth rate of '{s.label}' needs at least 2 years, got {len(s)}")
    nonpositive = np.flatnonzero(s.values <= 0.0)
    if nonpositive.size:
        year = s.start_year + int(nonpositive[0])
        raise DomainError(f"Growth rate of '{s.label}' needs positive values; {year} is {s.values[nonpositive[0]]!r}", year=year)
    prev = s.values[:-1]
    rate = (s.values[1:] - prev) / prev
    return AnnualSeries(s.start_year + 1, rate, f"d{s.label}/{s.label}" if s.label else "")


def moving_average_centered(s: AnnualSeries, window: int) -> AnnualSeries:
    """Centered moving average; years without a full window are trimmed."""
    if int(window) != window or window < 1 or window % 2 == 0:
        raise ParameterError(f"Moving-average window must be a positive odd integer, got {window!r}")
    window = int(window)
    if len(s) < window:
        raise InsufficientDataError(
            f"Series '{s.label}' has {len(s)} years, shorter than the MA({window}) window"
        )
    if window == 1:
        return s
    half = (window - 1) // 2
    means = np.lib.stride_tricks.sliding_window_view(s.values, window).mean(axis=1)
    return AnnualSeries(s.start_year + half, means, s.label)


def lag(s: AnnualSeries, k: int) -> AnnualSeries:
    """Shift dates by ``+k`` years; negative ``k`` is a lead."""
    return AnnualSeries(s.start_year + int(k), s.values, s.label)


def align(series: Sequence[AnnualSeries]) -> tuple[tuple[int, int], list[AnnualSeries]]:
    """Intersect the year spans and restrict every series to the common span."""
    if not series:
        raise AlignmentError("Nothing to align: no series given")
    first = max(s.start_year for s in series)
    last = min(s.end_year for s in series)
    if first > last:
        spans = [s.span for s in series]
        listing = ", ".join(f"'{s.label}' {a}-{b}" for s, (a, b) in zip(series, spans))
        raise AlignmentError(f"Series do not overlap: {listing}", spans=spans)
    return (first, last), [s.window(first, last) for s in series]


def difference(a: AnnualSeries, b: AnnualSeries, label: str = "") -> AnnualSeries:
    """Element-wise ``a - b`` over the aligned span."""
    (first, _), (wa, wb) = align([a, b])
    return AnnualSeries(first, wa.values - wb.values, label)
