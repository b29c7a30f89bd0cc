"""End-to-end smoke run: synthetic country -> tools -> report files."""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from src.model import COUNTRY_PRESETS
from src.synth import generate_synthetic_country, write_synthetic_country
from src.tools.fitting import calibrate_model, evaluate_model, simulate_model
from src.tools.parameters import check_model_params, list_presets, potential_growth


def main() -> int:
    params = COUNTRY_PRESETS["france"]
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        dataset = generate_synthetic_country(params, noise_sigma=0.005, seed=7, name="france")
        write_synthetic_country(dataset, root, params)
        config = str(root / "run.ini")

        checks = [
            ("list_presets", lambda: json.loads(list_presets())),
            ("check_model_params us", lambda: json.loads(check_model_params("gdp", "us"))),
            ("potential_growth", lambda: json.loads(potential_growth(str(root / "gdp.csv")))),
            ("simulate_model", lambda: json.loads(simulate_model(config))["summary"]),
            ("evaluate_model", lambda: json.loads(evaluate_model(config))),
            ("calibrate_model", lambda: json.loads(calibrate_model(config, output_dir=str(root / "fit")))),
        ]

        failed = False
        for name, fn in checks:
            try:
                result = fn()
                print(f"[ok] {name}")
                print(json.dumps(result, indent=2)[:2000])
            except Exception as exc:  # pragma: no cover - smoke path
                failed = True
                print(f"[fail] {name}: {exc}", file=sys.stderr)

    return 1 if failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
