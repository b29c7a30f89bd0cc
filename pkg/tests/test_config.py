import tempfile
import unittest
from pathlib import Path

from src.config import build_lfp_sim_params, build_params, load_run_config, preset_values
from src.errors import ConfigError, ParameterError
from src.model import GdpModelParams, LfpResponseParams, LfpSimParams, N9ModelParams
from src.series import AnnualSeries


class LoadRunConfigTests(unittest.TestCase):
    def setUp(self) -> None:
        self._tmp = tempfile.TemporaryDirectory()
        self.root = Path(self._tmp.name)
        (self.root / "gdp.csv").write_text("year,value\n1959,7000\n1960,7100\n", encoding="utf-8")
        self.ini = self.root / "run.ini"
        self.ini.write_text(
            "[run]\n"
            "name = france\n"
            "family = gdp\n"
            "window = 3\n"
            "output = reports\n"
            "\n"
            "[data]\n"
            "gdp = gdp.csv\n"
            "\n"
            "[search]\n"
            "a2 = 400, 500, 10\n"
            "lag = 0, 2, 1\n"
            "\n"
            "[params]\n"
            "preset = france\n"
            "A2 = 460\n",
            encoding="utf-8",
        )

    def tearDown(self) -> None:
        self._tmp.cleanup()

    def test_paths_resolve_against_config_directory(self) -> None:
        config = load_run_config(self.ini)
        self.assertEqual(config.data.gdp, self.root.resolve() / "gdp.csv")
        self.assertEqual(config.output, self.root.resolve() / "reports")
        self.assertEqual(config.name, "france")

    def test_search_section_and_window(self) -> None:
        config = load_run_config(self.ini)
        self.assertEqual(config.search.a2.values()[0], 400.0)
        self.assertEqual(config.search.lags(), (0, 1, 2))
        self.assertEqual(config.window, 3)
        self.assertEqual(config.search.effective_window, 3)

    def test_params_keep_their_case(self) -> None:
        config = load_run_config(self.ini)
        self.assertEqual(config.params, {"preset": "france", "A2": "460"})

    def test_flags_override_file(self) -> None:
        config = load_run_config(
            self.ini, {"window": 7, "family": "n9", "workers": 4, "params": {"A2": "470"}, "output": None}
        )
        self.assertEqual(config.window, 7)
        self.assertEqual(config.search.effective_window, 7)
        self.assertEqual(config.family, "n9")
        self.assertEqual(config.workers, 4)
        self.assertEqual(config.params["A2"], "470")
        self.assertEqual(config.params["preset"], "france")
        self.assertEqual(config.output, self.root.resolve() / "reports")

    def test_defaults_without_file(self) -> None:
        config = load_run_config()
        self.assertEqual(config.family, "gdp")
        self.assertEqual(config.window, 5)
        self.assertEqual(config.workers, 1)
        self.assertIsNone(config.data.gdp)

    def test_missing_file_is_config_error(self) -> None:
        with self.assertRaises(ConfigError) as ctx:
            load_run_config(self.root / "absent.ini")
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_missing_data_file_is_config_error(self) -> None:
        self.ini.write_text("[data]\ngdp = nowhere.csv\n", encoding="utf-8")
        with self.assertRaises(ConfigError) as ctx:
            load_run_config(self.ini)
        self.assertIn("data.gdp", str(ctx.exception))

    def test_even_window_is_rejected(self) -> None:
        with self.assertRaises(ConfigError):
            load_run_config(self.ini, {"window": 4})

    def test_unknown_family_is_rejected(self) -> None:
        with self.assertRaises(ConfigError):
            load_run_config(self.ini, {"family": "tfp"})

    def test_malformed_ini(self) -> None:
        self.ini.write_text("no section header\n", encoding="utf-8")
        with self.assertRaises(ConfigError):
            load_run_config(self.ini)


class BuildParamsTests(unittest.TestCase):
    def test_preset_with_override(self) -> None:
        p = build_params("gdp", {"preset": "france", "A2": "460"})
        self.assertIsInstance(p, GdpModelParams)
        self.assertEqual(p.A2, 460.0)
        self.assertEqual(p.B, 7_500_000.0)
        self.assertEqual(p.T, 0)

    def test_n9_preset(self) -> None:
        p = build_params("n9", {"preset": "us"})
        self.assertEqual(p, N9ModelParams(B=48e6, C=-0.062, T=2))

    def test_lfp_defaults_to_first_participation_year(self) -> None:
        lfp = AnnualSeries(1970, [0.6, 0.61, 0.62], "LFP")
        p = build_params("lfp", {"preset": "per-hour"}, lfp=lfp)
        self.assertIsInstance(p, LfpResponseParams)
        self.assertEqual(p.t0, 1970)
        self.assertEqual(p.LFP0, 0.6)
        self.assertEqual(p.alpha, 3.8)

    def test_unknown_key_is_rejected(self) -> None:
        with self.assertRaises(ConfigError) as ctx:
            build_params("n9", {"B": "1e7", "C": "0", "T": "2", "A2": "5"})
        self.assertIn("A2", str(ctx.exception))

    def test_missing_and_malformed_values(self) -> None:
        with self.assertRaises(ConfigError):
            build_params("n9", {"B": "1e7", "C": "0"})
        with self.assertRaises(ConfigError):
            build_params("n9", {"B": "lots", "C": "0", "T": "2"})
        with self.assertRaises(ConfigError):
            build_params("n9", {"B": "1e7", "C": "0", "T": "1.5"})

    def test_zero_scale_is_parameter_error(self) -> None:
        with self.assertRaises(ParameterError) as ctx:
            build_params("gdp", {"preset": "france", "B": "0"})
        self.assertEqual(ctx.exception.exit_code, 2)

    def test_unknown_preset(self) -> None:
        with self.assertRaises(ConfigError):
            preset_values("gdp", "atlantis")

    def test_lfp_simulation_constants_are_optional(self) -> None:
        self.assertIsNone(build_lfp_sim_params({"preset": "per-person"}))
        sim = build_lfp_sim_params(
            {"A1": "420", "B1": "2.5", "C1": "-0.01", "alpha": "5", "T": "2", "t0": "1960", "LFP0": "0.6"}
        )
        self.assertIsInstance(sim, LfpSimParams)
        self.assertEqual(sim.T, 2)
        self.assertEqual(sim.A1, 420.0)


if __name__ == "__main__":
    unittest.main()
