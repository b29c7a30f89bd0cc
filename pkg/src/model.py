"""Model equations linking productivity growth to GDP per capita, LFP and cohort size.

All constants ``A`` are in 1990 Geary-Khamis dollars per year; inputs are
expected to be converted already. Every function is pure.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .errors import DegeneracyError, DomainError, InsufficientDataError, ParameterError
from .series import AnnualSeries, difference, growth_rate, lag

log = logging.getLogger(__name__)

MAX_LAG = 5
STEADY_STATE_BOUNDS = (-0.05, 0.15)


def _check_lag(T: int) -> None:
    if int(T) != T or not 0 <= T <= MAX_LAG:
        raise ParameterError(f"Lag T must be a whole number of years in 0..{MAX_LAG}, got {T!r}")


def _check_lfp0(LFP0: float) -> None:
    if not 0.0 < LFP0 <= 1.0:
        raise ParameterError(f"LFP0 must lie in (0, 1], got {LFP0!r}")


@dataclass(frozen=True)
class GdpModelParams:
    """Constants of the synthetic-population model (N0 is N at ``t0``)."""

    A2: float
    B: float
    C: float
    N0: float
    T: int = 0
    t0: int = 1959

    def __post_init__(self) -> None:
        if self.B == 0 or not math.isfinite(self.B):
            raise ParameterError(f"B must be finite and non-zero, got {self.B!r}")
        if not self.N0 > 0:
            raise ParameterError(f"N0 must be positive, got {self.N0!r}")
        if not self.A2 > 0:
            raise ParameterError(f"A2 must be positive, got {self.A2!r}")
        _check_lag(self.T)

    @property
    def steady_state_rate(self) -> float:
        return self.N0 / self.B + self.C


@dataclass(frozen=True)
class N9ModelParams:
    B: float
    C: float
    T: int = 2

    def __post_init__(self) -> None:
        if self.B == 0 or not math.isfinite(self.B):
            raise ParameterError(f"B must be finite and non-zero, got {self.B!r}")
        _check_lag(self.T)


@dataclass(frozen=True)
class LfpResponseParams:
    B2: float
    C2: float
    alpha: float
    t0: int
    LFP0: float

    def __post_init__(self) -> None:
        _check_lfp0(self.LFP0)
        if not math.isfinite(self.alpha):
            raise ParameterError(f"alpha must be finite, got {self.alpha!r}")


@dataclass(frozen=True)
class LfpSimParams:
    A1: float
    B1: float
    C1: float
    alpha: float
    T: int
    t0: int
    LFP0: float

    def __post_init__(self) -> None:
        if self.B1 == 0 or not math.isfinite(self.B1):
            raise ParameterError(f"B1 must be finite and non-zero, got {self.B1!r}")
        if not self.A1 > 0:
            raise ParameterError(f"A1 must be positive, got {self.A1!r}")
        _check_lfp0(self.LFP0)
        if int(self.T) != self.T or self.T < 0:
            raise ParameterError(f"Lag T must be a non-negative whole number, got {self.T!r}")


@dataclass(frozen=True)
class LfpToCohortParams:
    B3: float
    C3: float
    alpha2: float
    t0: int
    LFP0: float
    T: int = 2

    def __post_init__(self) -> None:
        if self.B3 == 0 or not math.isfinite(self.B3):
            raise ParameterError(f"B3 must be finite and non-zero, got {self.B3!r}")
        _check_lfp0(self.LFP0)
        _check_lag(self.T)


ModelParams = GdpModelParams | N9ModelParams | LfpResponseParams | LfpSimParams | LfpToCohortParams

# Published country sets: N(1959), A2, B, C. The US set is kept as published.
COUNTRY_PRESETS: dict[str, GdpModelParams] = {
    "us": GdpModelParams(A2=420.0, B=3_500_000.0, C=-0.095, N0=4_500_000.0, T=0, t0=1959),
    "france": GdpModelParams(A2=450.0, B=7_500_000.0, C=-0.022, N0=570_000.0, T=0, t0=1959),
    "italy": GdpModelParams(A2=550.0, B=5_000_000.0, C=-0.018, N0=570_000.0, T=0, t0=1959),
    "canada": GdpModelParams(A2=300.0, B=-3_200_000.0, C=0.108, N0=270_000.0, T=0, t0=1959),
    "uk": GdpModelParams(A2=390.0, B=7_500_000.0, C=-0.02, N0=670_000.0, T=0, t0=1959),
    "japan": GdpModelParams(A2=400.0, B=4_000_000.0, C=-0.018, N0=2_000_000.0, T=0, t0=1959),
}

N9_PRESET = N9ModelParams(B=48_000_000.0, C=-0.062, T=2)

# (B2, C2, alpha) for the two productivity definitions
LFP_RESPONSE_PRESETS: dict[str, tuple[float, float, float]] = {
    "per-person": (-5.0, 0.040, 5.0),
    "per-hour": (-3.5, 0.042, 3.8),
}

# US potential-growth constants: A1 for GDP per capita, A2 for productivity
POTENTIAL_RATE_CONSTANTS = {"A1": 420.0, "A2": 398.0}


def _require_positive(s: AnnualSeries, what: str) -> None:
    bad = np.flatnonzero(s.values <= 0.0)
    if bad.size:
        year = s.start_year + int(bad[0])
        raise DomainError(f"{what} must be positive; {year} is {s.values[bad[0]]!r}", year=year)


def require_participation(s: AnnualSeries) -> None:
    bad = np.flatnonzero((s.values <= 0.0) | (s.values > 1.0))
    if bad.size:
        year = s.start_year + int(bad[0])
        raise DomainError(f"LFP must lie in (0, 1]; {year} is {s.values[bad[0]]!r}", year=year)


def potential_rate(G: AnnualSeries, A: float) -> AnnualSeries:
    """Potential growth ``A / G(t)``."""
    _require_positive(G, "GDP per capita")
    return AnnualSeries(G.start_year, A / G.values, f"{A:g}/G")


def potential_gap(G: AnnualSeries, A: float) -> AnnualSeries:
    """Driving term ``dG/G - A/G`` dated at ``t``."""
    return difference(growth_rate(G), potential_rate(G, A), label=f"dG/G-{A:g}/G")


def below_potential_years(G: AnnualSeries, A: float) -> list[int]:
    gap = potential_gap(G, A)
    return [year for year, value in gap.items() if value < 0.0]


def simulate_lfp(G: AnnualSeries, p: LfpSimParams) -> AnnualSeries:
    """Step the participation rate forward from ``LFP(t0) = LFP0``.

    The exponent uses the previous year's LFP (explicit scheme). Output runs
    from ``t0`` to ``G.end_year + T``.
    """
    if G.start_year > p.t0 - p.T:
        raise InsufficientDataError(
            f"GDP series starts {G.start_year}; lag {p.T} from t0={p.t0} needs data from {p.t0 - p.T}"
        )
    g = potential_gap(G, p.A1)
    last = G.end_year + p.T
    lfp = [p.LFP0]
    for t in range(p.t0 + 1, last + 1):
        drive = g.value_at(t - p.T)
        prev = lfp[-1]
        rate = (drive * math.exp(-p.alpha * (prev - p.LFP0) / p.LFP0) - p.C1) / p.B1
        value = prev * (1.0 + rate)
        if not math.isfinite(value):
            raise DegeneracyError(f"Simulated LFP is not finite in {t}", year=t)
        lfp.append(value)
    result = AnnualSeries(p.t0, lfp, "LFP")
    outside = out_of_range_years(result)
    if outside:
        log.warning("Simulated LFP left (0, 1] in %d year(s): %s", len(outside), outside)
    return result


def out_of_range_years(lfp: AnnualSeries) -> list[int]:
    return [year for year, value in lfp.items() if not 0.0 < value <= 1.0]


def _lfp_sensitivity(LFP: AnnualSeries, alpha: float, LFP0: float) -> np.ndarray:
    return np.exp(alpha * (LFP.values - LFP0) / LFP0)


def productivity_from_lfp(LFP: AnnualSeries, p: LfpResponseParams) -> AnnualSeries:
    """``dP/P = (B2 * dLFP/LFP + C2) * exp(alpha * (LFP - LFP0) / LFP0)``."""
    require_participation(LFP)
    rate = growth_rate(LFP)
    level = LFP.window(rate.start_year, rate.end_year)
    dpp = (p.B2 * rate.values + p.C2) * _lfp_sensitivity(level, p.alpha, p.LFP0)
    return AnnualSeries(rate.start_year, dpp, "dP/P from LFP")


def productivity_from_n9(N9: AnnualSeries, p: N9ModelParams) -> AnnualSeries:
    """``dP/P(t) = N9(t - T) / B + C``."""
    _require_positive(N9, "N9")
    shifted = lag(N9, p.T)
    return AnnualSeries(shifted.start_year, shifted.values / p.B + p.C, "dP/P from N9")


def n9_implied_by_lfp(LFP: AnnualSeries, p: LfpToCohortParams) -> AnnualSeries:
    """Left side of the LFP/cohort relation, dated at ``t - T``."""
    require_participation(LFP)
    rate = growth_rate(LFP)
    level = LFP.window(rate.start_year, rate.end_year)
    implied = (p.B3 * rate.values + p.C3) * _lfp_sensitivity(level, p.alpha2, p.LFP0)
    return lag(AnnualSeries(rate.start_year, implied, "N9 implied by LFP"), -p.T)


def synthetic_population(
    G: AnnualSeries, A2: float, N0: float, t0: int, T: int
) -> AnnualSeries:
    """``N(t2) = N(t1) * (2 * [dG/G - A2/G](t2 - T) + 1)`` from ``N(t0) = N0``."""
    if G.start_year > t0 - T:
        raise InsufficientDataError(
            f"GDP series starts {G.start_year}; lag {T} from t0={t0} needs data from {t0 - T}"
        )
    gap = potential_gap(G, A2)
    last = G.end_year + T
    path = np.empty(max(last - t0, 0) + 1)
    path[0] = N0
    for i, t2 in enumerate(range(t0 + 1, last + 1), start=1):
        factor = 2.0 * gap.value_at(t2 - T) + 1.0
        if factor <= 0.0:
            raise DegeneracyError(
                f"Population factor {factor:.6g} in {t2} is not positive (A2={A2:g}, T={T})",
                year=t2,
            )
        path[i] = path[i - 1] * factor
    return AnnualSeries(t0, path, "N")


def productivity_from_g(G: AnnualSeries, p: GdpModelParams) -> AnnualSeries:
    """``dP/P(t2) = N(t2 - T) / B + C`` over the synthetic population path."""
    N = synthetic_population(G, p.A2, p.N0, p.t0, p.T)
    shifted = lag(N, p.T)
    return AnnualSeries(shifted.start_year, shifted.values / p.B + p.C, "dP/P from G")


def steady_state_rate(p: ModelParams) -> float | None:
    if isinstance(p, GdpModelParams):
        return p.steady_state_rate
    if isinstance(p, LfpResponseParams):
        return p.C2
    return None


@dataclass(frozen=True)
class ParamCheck:
    params: dict
    steady_state_rate: float | None
    within_bounds: bool
    bounds: tuple[float, float] = STEADY_STATE_BOUNDS
    notes: list[str] = field(default_factory=list)


def check_params(p: ModelParams, bounds: tuple[float, float] = STEADY_STATE_BOUNDS) -> ParamCheck:
    """Steady-state sanity check; flags sets whose implied rate leaves ``bounds``."""
    rate = steady_state_rate(p)
    notes: list[str] = []
    if rate is None:
        within = True
        notes.append("No level-free steady-state rate for this parameter family.")
    else:
        within = bounds[0] <= rate <= bounds[1]
        if not within:
            notes.append(
                f"Steady-state rate {rate:.4g}/yr lies outside [{bounds[0]:g}, {bounds[1]:g}]/yr."
            )
            log.warning("Parameter set %s flagged: steady-state rate %.4g/yr", asdict(p), rate)
    if isinstance(p, GdpModelParams):
        notes.append(
            "Only N0/B is identified: (k*N0, k*B) gives the same dP/P for any k > 0."
        )
    return ParamCheck(asdict(p), rate, within, bounds, notes)
