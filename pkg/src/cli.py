"""Command-line entry point: ``productivity <command> [options]``.

Precedence for every setting is flags > config file > built-in defaults.
Result tables go to stdout; logs and the single-line error go to stderr.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .calibration import CalibrationResult
from .config import RunConfig, build_lfp_sim_params, build_params, load_run_config
from .data_io import CountryDataset, format_value, load_country_dataset
from .errors import ConfigError, ProductivityError
from .model import ModelParams, check_params
from .pipeline import SimulationResult, calibrate, evaluate, forecast, simulate
from .report import write_report, write_reports
from .synth import GdpPathSpec, generate_synthetic_country, write_synthetic_country

log = logging.getLogger(__name__)


def _value(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, float):
        return format_value(value)
    return str(value)


def _print_table(rows: Sequence[tuple[str, Any]]) -> None:
    width = max((len(name) for name, _ in rows), default=0)
    for name, value in rows:
        print(f"{name:<{width}}  {_value(value)}")


def _param_rows(params: ModelParams) -> list[tuple[str, Any]]:
    return [(name, getattr(params, name)) for name in params.__dataclass_fields__]


def _parse_params(args: argparse.Namespace) -> dict[str, str] | None:
    values: dict[str, str] = {}
    if getattr(args, "preset", None):
        values["preset"] = args.preset
    for item in getattr(args, "param", None) or []:
        key, sep, value = item.partition("=")
        if not sep or not key.strip() or not value.strip():
            raise ConfigError(f"--param expects KEY=VALUE, got {item!r}")
        values[key.strip()] = value.strip()
    return values or None


def _load(args: argparse.Namespace, **extra: Any) -> RunConfig:
    overrides = {
        "family": getattr(args, "family", None),
        "window": getattr(args, "window", None),
        "output": getattr(args, "out", None),
        "workers": getattr(args, "workers", None),
        "params": _parse_params(args),
        **extra,
    }
    return load_run_config(args.config, overrides)


def _params_for(config: RunConfig, dataset: CountryDataset, family: str | None = None) -> ModelParams:
    family = family or config.family
    if not config.params:
        raise ConfigError(f"no {family} parameters: set [params], --preset or --param")
    return build_params(family, config.params, lfp=dataset.LFP)


def _lfp_sim(config: RunConfig) -> Any:
    return build_lfp_sim_params(config.params) if config.family == "lfp" else None


def _print_calibration(definition: str, result: CalibrationResult) -> None:
    first, last = result.observed.start_year, result.observed.end_year
    print(f"[{definition}] {result.family} fit {first}-{last}")
    _print_table(
        _param_rows(result.params)
        + [("R2", float(result.r_squared)), ("SSE", float(result.sse)), ("best_lag", result.best_lag)]
    )


def cmd_calibrate(args: argparse.Namespace) -> int:
    config = _load(args)
    dataset = load_country_dataset(config)
    results = calibrate(config.family, dataset, config.search, config.workers)
    for definition, result in results.items():
        _print_calibration(definition, result)
    write_reports(results, config.output)
    return 0


def _print_simulation(result: SimulationResult) -> None:
    predicted = result.predicted
    label = f" vs {result.definition}" if result.fit is not None else ""
    print(f"{result.family} model {predicted.start_year}-{predicted.end_year}{label}")
    rows = _param_rows(result.params)
    if result.fit is not None:
        rows += [
            ("R2", float(result.fit.r_squared)),
            ("SSE", float(result.fit.sse)),
            ("best_lag", result.fit.best_lag),
        ]
    _print_table(rows)


def cmd_simulate(args: argparse.Namespace) -> int:
    config = _load(args)
    dataset = load_country_dataset(config)
    result = simulate(dataset, _params_for(config, dataset), config.window, _lfp_sim(config))
    _print_simulation(result)
    write_report(result, config.output)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _load(args)
    dataset = load_country_dataset(config)
    results = evaluate(dataset, _params_for(config, dataset), config.window, _lfp_sim(config))
    for result in results.values():
        _print_simulation(result)
    write_reports(results, config.output)
    return 0


def cmd_forecast(args: argparse.Namespace) -> int:
    config = _load(args, family="n9", last_observed_year=args.last_observed_year)
    dataset = load_country_dataset(config)
    params = _params_for(config, dataset, "n9")
    run = forecast(dataset, params, config.last_observed_year)
    fc = run.forecast
    print(
        f"forecast {fc.points[0].year}-{fc.points[-1].year}: {len(fc.ahead())} year(s) after "
        f"{fc.last_observed_year}, horizon {fc.horizon} year(s) past {fc.last_measured_year}"
    )
    for point in fc.points:
        print(f"{point.year}  {format_value(point.dpp)}  {point.provenance.value}")
    if run.consistency.flagged:
        print(f"cohort discrepancies above {run.consistency.tolerance:g}: "
              f"{sorted({r.year for r in run.consistency.flagged})}")
    write_report(run, config.output)
    return 0


def cmd_synth(args: argparse.Namespace) -> int:
    values = _parse_params(args) or {}
    values.setdefault("preset", "france")
    params = build_params("gdp", values)
    path = GdpPathSpec(start_year=params.t0 - params.T, years=args.years)
    out = Path(args.out or "synthetic")
    dataset = generate_synthetic_country(params, path, args.noise, args.seed, name=out.name)
    written = write_synthetic_country(dataset, out, params)
    print(f"synthetic country '{dataset.name}' ({dataset.G.start_year}-{dataset.G.end_year})")
    for path_written in written:
        print(path_written.as_posix())
    return 0


def cmd_check_params(args: argparse.Namespace) -> int:
    values = _parse_params(args)
    if args.config is not None:
        config = _load(args)
        family, values = config.family, config.params
    else:
        family = args.family or "gdp"
    if not values:
        raise ConfigError("check-params needs --preset, --param or a config with [params]")
    if family == "lfp":
        # t0 and LFP0 do not enter the steady-state rate
        values = {"t0": "0", "LFP0": "1.0", **values}
    check = check_params(build_params(family, values))
    rows: list[tuple[str, Any]] = list(check.params.items())
    rows += [
        ("steady_state", check.steady_state_rate),
        ("bounds", f"[{check.bounds[0]:g}, {check.bounds[1]:g}]"),
        ("status", "ok" if check.within_bounds else "FLAGGED"),
    ]
    _print_table(rows)
    for note in check.notes:
        print(f"note: {note}")
    return 0


def _common(parser: argparse.ArgumentParser, *, params: bool = False) -> None:
    parser.add_argument("--config", type=Path, help="run configuration (.ini)")
    parser.add_argument("--family", choices=("gdp", "lfp", "n9"), help="model family (overrides [run] family)")
    parser.add_argument("--window", type=int, help="odd moving-average window (default 5)")
    parser.add_argument("--out", help="report directory (overrides [run] output)")
    if params:
        parser.add_argument("--preset", help="start from a named parameter set (e.g. france, us)")
        parser.add_argument(
            "--param", action="append", metavar="KEY=VALUE", help="override one constant; repeatable"
        )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="productivity",
        description="Calibrate, simulate and forecast labor productivity growth from GDP per "
        "capita, participation rates and cohort sizes. Flags override config values, which "
        "override defaults.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    parser.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")
    parser.add_argument("--workers", type=int, help="grid evaluation threads (default 1)")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p = sub.add_parser("calibrate", help="fit model constants to observed productivity growth")
    _common(p)
    p.set_defaults(handler=cmd_calibrate)

    p = sub.add_parser("simulate", help="evaluate the model with fixed constants")
    _common(p, params=True)
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("evaluate", help="score fixed constants against observed growth (R2, SSE, lag)")
    _common(p, params=True)
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("forecast", help="forecast from shifted 1- and 6-year-old cohorts")
    _common(p, params=True)
    p.add_argument("--last-observed-year", type=int, help="forecast only counts years after this one")
    p.set_defaults(handler=cmd_forecast)

    p = sub.add_parser("synth", help="write a synthetic country with known constants")
    p.add_argument("--out", help="output directory (default ./synthetic)")
    p.add_argument("--seed", type=int, default=0, help="noise seed (default 0)")
    p.add_argument("--noise", type=float, default=0.0, help="Gaussian noise sigma on dP/P (default 0)")
    p.add_argument("--years", type=int, default=45, help="length of the GDP path (default 45)")
    p.add_argument("--preset", help="gdp parameter set to generate from (default france)")
    p.add_argument("--param", action="append", metavar="KEY=VALUE", help="override one constant; repeatable")
    p.set_defaults(handler=cmd_synth)

    p = sub.add_parser("check-params", help="steady-state sanity check of a parameter set")
    _common(p, params=True)
    p.set_defaults(handler=cmd_check_params)
    return parser


def _configure_logging(args: argparse.Namespace) -> None:
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(message)s", stream=sys.stderr, force=True)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    try:
        return args.handler(args)
    except ProductivityError as exc:
        message = " ".join(str(exc).split())
        print(f"error {exc.code}: {message}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
