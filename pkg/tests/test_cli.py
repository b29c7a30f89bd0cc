import io
import shutil
import tempfile
import unittest
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from src.cli import main
from src.data_io import write_population_csv
from src.forecast import PopulationTable

TEMPLATE = Path(__file__).resolve().parents[1] / "productivity_config.ini"


def births(year: int) -> float:
    return 4e6 * (1.0 + 0.01 * (year - 1980))


def run(*argv: str) -> tuple[int, str, str]:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


class CliTestCase(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)
        self.country = self.root / "france"
        code, _, _ = run("-q", "synth", "--out", str(self.country), "--noise", "0.003", "--seed", "4")
        self.assertEqual(code, 0)
        self.config = str(self.country / "run.ini")

    def tearDown(self) -> None:
        self._tmp.cleanup()


class SynthAndCalibrateTests(CliTestCase):
    def test_synth_writes_a_runnable_country(self) -> None:
        for name in ("gdp.csv", "per_person.csv", "run.ini"):
            self.assertTrue((self.country / name).is_file(), msg=name)

    def test_calibrate_prints_fit_and_writes_report(self) -> None:
        out_dir = self.root / "fit"
        code, out, _ = run("-q", "calibrate", "--config", self.config, "--out", str(out_dir))
        self.assertEqual(code, 0)
        self.assertIn("[per-person] gdp fit", out)
        self.assertIn("R2", out)
        self.assertTrue((out_dir / "summary.json").is_file())
        self.assertTrue((out_dir / "trace.csv").is_file())

    def test_reports_identical_for_any_worker_count(self) -> None:
        serial, parallel = self.root / "w1", self.root / "w4"
        self.assertEqual(run("-q", "--workers", "1", "calibrate", "--config", self.config, "--out", str(serial))[0], 0)
        self.assertEqual(run("-q", "--workers", "4", "calibrate", "--config", self.config, "--out", str(parallel))[0], 0)
        for path in sorted(serial.iterdir()):
            self.assertEqual(path.read_bytes(), (parallel / path.name).read_bytes(), msg=path.name)

    def test_shipped_template_runs_after_synth(self) -> None:
        config = shutil.copy(TEMPLATE, self.root / "productivity_config.ini")
        self.assertEqual(run("-q", "synth", "--out", str(self.root / "data"))[0], 0)
        code, out, err = run("-q", "calibrate", "--config", str(config), "--out", str(self.root / "fit"))
        self.assertEqual(code, 0, msg=err)
        self.assertIn("[per-person] gdp fit", out)

    def test_logs_go_to_stderr(self) -> None:
        code, out, err = run("calibrate", "--config", self.config, "--out", str(self.root / "fit"))
        self.assertEqual(code, 0)
        self.assertIn("Loaded dataset", err)
        self.assertNotIn("Loaded dataset", out)


class ErrorExitTests(CliTestCase):
    def test_gdp_family_without_gdp_series(self) -> None:
        config = self.root / "no_gdp.ini"
        config.write_text(
            f"[data]\nper_person = {(self.country / 'per_person.csv').as_posix()}\n", encoding="utf-8"
        )
        code, out, err = run("-q", "calibrate", "--config", str(config), "--out", str(self.root / "x"))
        self.assertEqual(code, 2)
        self.assertEqual(out, "")
        self.assertTrue(err.startswith("error config_error:"))
        self.assertIn("[data] gdp", err)
        self.assertEqual(len(err.strip().splitlines()), 1)

    def test_lfp_family_without_participation(self) -> None:
        code, _, err = run("-q", "calibrate", "--config", self.config, "--family", "lfp")
        self.assertEqual(code, 2)
        self.assertIn("LFP", err)

    def test_zero_scale_parameter(self) -> None:
        code, _, err = run("-q", "simulate", "--config", self.config, "--param", "B=0", "--out", str(self.root / "s"))
        self.assertEqual(code, 2)
        self.assertIn("parameter_error", err)

    def test_malformed_param_flag(self) -> None:
        code, _, _ = run("-q", "simulate", "--config", self.config, "--param", "B")
        self.assertEqual(code, 2)

    def test_bad_data_file_is_data_error(self) -> None:
        (self.country / "gdp.csv").write_text("year,value\n1959,7000\n1961,7100\n", encoding="utf-8")
        code, _, err = run("-q", "calibrate", "--config", self.config)
        self.assertEqual(code, 3)
        self.assertIn("gap after 1959", err)


class CheckParamsTests(unittest.TestCase):
    def test_us_set_is_flagged(self) -> None:
        code, out, _ = run("-q", "check-params", "--preset", "us")
        self.assertEqual(code, 0)
        self.assertIn("FLAGGED", out)
        self.assertIn("N0/B", out)

    def test_france_set_is_ok(self) -> None:
        code, out, _ = run("-q", "check-params", "--preset", "france")
        self.assertEqual(code, 0)
        self.assertRegex(out, r"status\s+ok")
        self.assertIn("0.054", out)

    def test_lfp_set_reports_intercept(self) -> None:
        code, out, _ = run("-q", "check-params", "--family", "lfp", "--preset", "per-hour")
        self.assertEqual(code, 0)
        self.assertRegex(out, r"steady_state\s+0.042")

    def test_needs_some_parameters(self) -> None:
        code, _, _ = run("-q", "check-params")
        self.assertEqual(code, 2)


class ForecastCommandTests(unittest.TestCase):
    def test_forecast_prints_provenance(self) -> None:
        with tempfile.TemporaryDirectory() as tmp:
            root = Path(tmp)
            counts = {(y, 9): births(y - 9) for y in range(1990, 2001)}
            counts.update({(y, 6): births(y - 6) for y in range(1990, 2004)})
            counts.update({(y, 1): births(y - 1) for y in range(1990, 2002)})
            write_population_csv(PopulationTable(counts), root / "pop.csv")
            (root / "run.ini").write_text(
                "[run]\nlast_observed_year = 2005\n\n[data]\npopulation = pop.csv\n\n[params]\npreset = us\n",
                encoding="utf-8",
            )
            code, out, _ = run("-q", "forecast", "--config", str(root / "run.ini"), "--out", str(root / "fc"))
            self.assertEqual(code, 0)
            self.assertIn("6 year(s) after 2005", out)
            self.assertIn("horizon 11", out)
            self.assertRegex(out, r"2011  \S+  shifted-1yo")
            self.assertTrue((root / "fc" / "forecast.csv").is_file())


if __name__ == "__main__":
    unittest.main()
