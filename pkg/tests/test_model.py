import math
import unittest

import numpy as np

from src.errors import DegeneracyError, DomainError, InsufficientDataError, ParameterError
from src.model import (
    COUNTRY_PRESETS,
    N9_PRESET,
    GdpModelParams,
    LfpResponseParams,
    LfpSimParams,
    LfpToCohortParams,
    N9ModelParams,
    below_potential_years,
    check_params,
    n9_implied_by_lfp,
    out_of_range_years,
    potential_gap,
    potential_rate,
    productivity_from_g,
    productivity_from_lfp,
    productivity_from_n9,
    simulate_lfp,
    synthetic_population,
)
from src.series import AnnualSeries, growth_rate


def gdp_with_gaps(start: int, first: float, A: float, gaps: list[float]) -> AnnualSeries:
    """GDP path whose ``dG/G - A/G`` equals ``gaps`` year by year."""
    values = [first]
    for gap in gaps:
        prev = values[-1]
        b = (1.0 + gap) * prev
        values.append((b + math.sqrt(b * b + 4.0 * A * prev)) / 2.0)
    return AnnualSeries(start, values, "G")


class PotentialRateTests(unittest.TestCase):
    def test_rate_is_a_over_g(self) -> None:
        G = AnnualSeries(2000, [21000.0, 21000.0], "G")
        self.assertAlmostEqual(potential_rate(G, 420.0).value_at(2000), 0.02, places=15)
        self.assertAlmostEqual(potential_rate(G, 398.0).value_at(2000), 398.0 / 21000.0, places=15)

    def test_zero_constant_gives_zero_series(self) -> None:
        G = AnnualSeries(2000, [1000.0, 2000.0], "G")
        self.assertEqual(list(potential_rate(G, 0.0).values), [0.0, 0.0])

    def test_decreasing_for_increasing_g(self) -> None:
        G = AnnualSeries(2000, [1000.0, 1100.0, 1300.0], "G")
        self.assertTrue(np.all(np.diff(potential_rate(G, 420.0).values) < 0))

    def test_non_positive_g_is_domain_error(self) -> None:
        with self.assertRaises(DomainError) as ctx:
            potential_rate(AnnualSeries(2000, [1000.0, -1.0], "G"), 420.0)
        self.assertEqual(ctx.exception.year, 2001)

    def test_gap_and_below_potential_years(self) -> None:
        G = gdp_with_gaps(1960, 10000.0, 420.0, [-0.01, 0.01, -0.02])
        gap = potential_gap(G, 420.0)
        np.testing.assert_allclose(gap.values, [-0.01, 0.01, -0.02], atol=1e-12)
        self.assertEqual(below_potential_years(G, 420.0), [1961, 1963])


class SimulateLfpTests(unittest.TestCase):
    def test_zero_net_change_keeps_lfp0(self) -> None:
        G = gdp_with_gaps(1960, 20000.0, 420.0, [0.004] * 10)
        p = LfpSimParams(A1=420.0, B1=-5.0, C1=0.004, alpha=5.0, T=0, t0=1960, LFP0=0.65)
        lfp = simulate_lfp(G, p)
        np.testing.assert_allclose(lfp.values, 0.65, rtol=1e-12)

    def test_degenerate_reduction_reproduces_driver(self) -> None:
        gaps = [0.01, -0.02, 0.015, 0.0, 0.005, -0.01]
        G = gdp_with_gaps(1960, 20000.0, 420.0, gaps)
        p = LfpSimParams(A1=420.0, B1=1.0, C1=0.0, alpha=0.0, T=1, t0=1961, LFP0=0.6)
        lfp = simulate_lfp(G, p)
        self.assertEqual(lfp.span, (1961, G.end_year + 1))
        rate = growth_rate(lfp)
        for year, value in rate.items():
            self.assertAlmostEqual(value, gaps[year - 1 - 1961], places=12)

    def test_single_pulse_step(self) -> None:
        G = gdp_with_gaps(1960, 20000.0, 420.0, [0.01, 0.0, 0.0])
        p = LfpSimParams(A1=420.0, B1=-5.0, C1=0.0, alpha=5.0, T=0, t0=1960, LFP0=0.65)
        rate = growth_rate(simulate_lfp(G, p))
        self.assertAlmostEqual(rate.value_at(1961), -0.002, places=12)

    def test_lag_needs_earlier_gdp(self) -> None:
        G = gdp_with_gaps(1960, 20000.0, 420.0, [0.0] * 5)
        p = LfpSimParams(A1=420.0, B1=-5.0, C1=0.0, alpha=5.0, T=2, t0=1960, LFP0=0.65)
        with self.assertRaises(InsufficientDataError):
            simulate_lfp(G, p)

    def test_zero_b1_is_parameter_error(self) -> None:
        with self.assertRaises(ParameterError):
            LfpSimParams(A1=420.0, B1=0.0, C1=0.0, alpha=5.0, T=0, t0=1960, LFP0=0.65)

    def test_non_finite_scale_is_parameter_error(self) -> None:
        for value in (math.inf, -math.inf, math.nan):
            with self.subTest(value=value):
                with self.assertRaises(ParameterError):
                    LfpSimParams(A1=420.0, B1=value, C1=0.0, alpha=5.0, T=0, t0=1960, LFP0=0.65)
                with self.assertRaises(ParameterError):
                    LfpToCohortParams(B3=value, C3=0.0, alpha2=1.0, t0=1960, LFP0=0.65)

    def test_out_of_range_years_are_reported_not_clamped(self) -> None:
        lfp = AnnualSeries(2000, [0.9, 1.05, 0.95, -0.1], "LFP")
        self.assertEqual(out_of_range_years(lfp), [2001, 2003])


class ProductivityFromLfpTests(unittest.TestCase):
    def test_flat_lfp_at_reference_gives_c2(self) -> None:
        lfp = AnnualSeries(2000, [0.65] * 4, "LFP")
        p = LfpResponseParams(B2=-5.0, C2=0.040, alpha=5.0, t0=2000, LFP0=0.65)
        dpp = productivity_from_lfp(lfp, p)
        self.assertEqual(dpp.start_year, 2001)
        np.testing.assert_allclose(dpp.values, 0.040, rtol=1e-15)

    def test_zero_alpha_is_affine(self) -> None:
        lfp = AnnualSeries(2000, [0.60, 0.61, 0.63, 0.62], "LFP")
        p = LfpResponseParams(B2=-3.5, C2=0.042, alpha=0.0, t0=2000, LFP0=0.60)
        dpp = productivity_from_lfp(lfp, p)
        expected = -3.5 * growth_rate(lfp).values + 0.042
        np.testing.assert_allclose(dpp.values, expected, rtol=1e-14)

    def test_direct_formula(self) -> None:
        lfp = AnnualSeries(2000, [0.66 / 1.005, 0.66], "LFP")
        p = LfpResponseParams(B2=-5.0, C2=0.04, alpha=5.0, t0=2000, LFP0=0.65)
        expected = (-5.0 * 0.005 + 0.04) * math.exp(5.0 * (0.66 - 0.65) / 0.65)
        self.assertAlmostEqual(productivity_from_lfp(lfp, p).value_at(2001), expected, places=12)

    def test_out_of_range_lfp_is_domain_error(self) -> None:
        p = LfpResponseParams(B2=-5.0, C2=0.04, alpha=5.0, t0=2000, LFP0=0.65)
        with self.assertRaises(DomainError):
            productivity_from_lfp(AnnualSeries(2000, [0.6, 1.2], "LFP"), p)

    def test_lfp0_outside_unit_interval_rejected(self) -> None:
        with self.assertRaises(ParameterError):
            LfpResponseParams(B2=-5.0, C2=0.04, alpha=5.0, t0=2000, LFP0=1.2)


class CohortModelTests(unittest.TestCase):
    def test_preset_value(self) -> None:
        N9 = AnnualSeries(2000, [4_000_000.0] * 3, "N9")
        dpp = productivity_from_n9(N9, N9_PRESET)
        self.assertEqual(dpp.start_year, 2002)
        self.assertAlmostEqual(dpp.value_at(2002), 4e6 / 48e6 - 0.062, places=15)
        self.assertAlmostEqual(dpp.value_at(2002), 0.0213, places=4)

    def test_cancellation_and_ratio_invariance(self) -> None:
        N9 = AnnualSeries(2000, [4_000_000.0, 4_100_000.0], "N9")
        zero = productivity_from_n9(AnnualSeries(2000, [4e6], "N9"), N9ModelParams(B=48e6, C=-4e6 / 48e6, T=0))
        self.assertAlmostEqual(zero.value_at(2000), 0.0, places=15)
        a = productivity_from_n9(N9, N9ModelParams(B=48e6, C=-0.062, T=1))
        doubled = AnnualSeries(2000, N9.values * 2.0, "N9")
        b = productivity_from_n9(doubled, N9ModelParams(B=96e6, C=-0.062, T=1))
        np.testing.assert_allclose(a.values, b.values, rtol=1e-15)

    def test_zero_b_is_parameter_error(self) -> None:
        with self.assertRaises(ParameterError):
            N9ModelParams(B=0.0, C=0.0, T=2)

    def test_lag_outside_range_is_parameter_error(self) -> None:
        with self.assertRaises(ParameterError):
            N9ModelParams(B=1.0, C=0.0, T=6)

    def test_implied_n9_reduces_to_c3_and_is_dated_back(self) -> None:
        lfp = AnnualSeries(2000, [0.65] * 4, "LFP")
        p = LfpToCohortParams(B3=2e6, C3=4e6, alpha2=5.0, t0=2000, LFP0=0.65)
        implied = n9_implied_by_lfp(lfp, p)
        self.assertEqual(implied.start_year, 2001 - 2)
        np.testing.assert_allclose(implied.values, 4e6)

    def test_implied_n9_moves_with_lfp_response(self) -> None:
        rng = np.random.default_rng(11)
        for _ in range(20):
            lfp = AnnualSeries(2000, rng.uniform(0.55, 0.75, size=8), "LFP")
            r = LfpResponseParams(B2=-5.0, C2=0.04, alpha=0.0, t0=2000, LFP0=0.65)
            c = LfpToCohortParams(B3=-2e7, C3=4e6, alpha2=0.0, t0=2000, LFP0=0.65, T=0)
            dpp = np.diff(productivity_from_lfp(lfp, r).values)
            n9 = np.diff(n9_implied_by_lfp(lfp, c).values)
            self.assertTrue(np.all(np.sign(dpp) == np.sign(n9)))


class SyntheticPopulationTests(unittest.TestCase):
    def test_one_step_hand_arithmetic(self) -> None:
        G = AnnualSeries(1999, [20000.0 / 1.03, 20000.0], "G")
        N = synthetic_population(G, 400.0, 1_000_000.0, 1999, 0)
        self.assertAlmostEqual(N.value_at(2000), 1_020_000.0, delta=1e-6)

    def test_zero_deviation_keeps_n_constant(self) -> None:
        G = gdp_with_gaps(1959, 7000.0, 450.0, [0.0] * 40)
        N = synthetic_population(G, 450.0, 570_000.0, 1959, 0)
        np.testing.assert_allclose(N.values, 570_000.0, rtol=1e-12)
        p = COUNTRY_PRESETS["france"]
        dpp = productivity_from_g(G, p)
        np.testing.assert_allclose(dpp.values, 0.054, rtol=1e-10)

    def test_lagged_output_span(self) -> None:
        G = gdp_with_gaps(1957, 7000.0, 450.0, [0.0] * 10)
        N = synthetic_population(G, 450.0, 570_000.0, 1959, 2)
        self.assertEqual(N.span, (1959, G.end_year + 2))

    def test_non_positive_factor_names_year(self) -> None:
        G = AnnualSeries(1959, [1000.0, 1000.0, 1000.0], "G")
        with self.assertRaises(DegeneracyError) as ctx:
            synthetic_population(G, 600.0, 1e6, 1959, 0)
        self.assertEqual(ctx.exception.year, 1960)

    def test_scaling_n0_scales_path(self) -> None:
        G = gdp_with_gaps(1959, 7000.0, 450.0, [0.01, -0.02, 0.03, 0.0])
        a = synthetic_population(G, 450.0, 1e6, 1959, 0)
        b = synthetic_population(G, 450.0, 3e6, 1959, 0)
        np.testing.assert_allclose(b.values, 3.0 * a.values, rtol=1e-14)

    def test_scale_degeneracy_of_n0_and_b(self) -> None:
        rng = np.random.default_rng(20)
        for _ in range(50):
            gaps = list(rng.uniform(-0.03, 0.03, size=30))
            G = gdp_with_gaps(1959, float(rng.uniform(5000, 20000)), 450.0, gaps)
            k = float(rng.uniform(0.1, 10.0))
            base = GdpModelParams(A2=450.0, B=7.5e6, C=-0.022, N0=570_000.0)
            scaled = GdpModelParams(A2=450.0, B=7.5e6 * k, C=-0.022, N0=570_000.0 * k)
            np.testing.assert_allclose(
                productivity_from_g(G, scaled).values,
                productivity_from_g(G, base).values,
                rtol=1e-12, atol=1e-14,
            )

    def test_pulse_above_potential_moves_output_with_sign_of_b(self) -> None:
        flat = [0.0] * 10
        pulse = [0.0, 0.0, 0.02] + [0.0] * 7
        for name in ("france", "canada"):
            p = COUNTRY_PRESETS[name]
            base = productivity_from_g(gdp_with_gaps(1959, 7000.0, p.A2, flat), p)
            bumped = productivity_from_g(gdp_with_gaps(1959, 7000.0, p.A2, pulse), p)
            delta = bumped.values[3:] - base.values[3:]
            if p.B > 0:
                self.assertTrue(np.all(delta > 0), name)
            else:
                self.assertTrue(np.all(delta < 0), name)


class ParamCheckTests(unittest.TestCase):
    def test_steady_state_rates_of_country_presets(self) -> None:
        self.assertAlmostEqual(COUNTRY_PRESETS["france"].steady_state_rate, 0.054, places=12)
        self.assertAlmostEqual(COUNTRY_PRESETS["italy"].steady_state_rate, 0.096, places=12)
        self.assertAlmostEqual(COUNTRY_PRESETS["canada"].steady_state_rate, 0.023625, places=12)

    def test_printed_us_set_is_flagged(self) -> None:
        check = check_params(COUNTRY_PRESETS["us"])
        self.assertFalse(check.within_bounds)
        self.assertAlmostEqual(check.steady_state_rate, 4.5e6 / 3.5e6 - 0.095, places=12)
        self.assertTrue(any("N0/B" in note for note in check.notes))

    def test_france_passes(self) -> None:
        check = check_params(COUNTRY_PRESETS["france"])
        self.assertTrue(check.within_bounds)
        self.assertEqual(check.params["A2"], 450.0)

    def test_cohort_set_has_no_steady_state(self) -> None:
        check = check_params(N9_PRESET)
        self.assertIsNone(check.steady_state_rate)
        self.assertTrue(check.within_bounds)

    def test_invalid_gdp_params(self) -> None:
        with self.assertRaises(ParameterError):
            GdpModelParams(A2=450.0, B=0.0, C=0.0, N0=1.0)
        with self.assertRaises(ParameterError):
            GdpModelParams(A2=450.0, B=1.0, C=0.0, N0=-1.0)
        with self.assertRaises(ParameterError):
            GdpModelParams(A2=0.0, B=1.0, C=0.0, N0=1.0)


if __name__ == "__main__":
    unittest.main()
