import math

import numpy as np
from django.test import SimpleTestCase, override_settings

from apps.graphgen.distributions import power_law_distribution

from .exceptions import DomainError, SummationError
from .formulas import (
    PowerLawModel,
    chernoff_threshold_and_eps,
    cubic_sum_approx,
    exact_power_sum,
    exact_weighted_sum,
    expected_tree_degree,
    expected_tree_degree_at_time,
    markov_rigorous_fraction,
    mean_degree_gap,
    predicted_tree_exponent,
    pvis_cubic,
    pvis_exact,
    pvis_lower_bound,
    pvis_reduced,
    tree_degree_band,
)
from .series import power_series

GAMMAS = (2.1, 2.3, 2.5, 2.7, 2.9)


class PowerSeriesTests(SimpleTestCase):
    def test_geometric_case(self):
        # k**0 * t**k sums to t / (1 - t); exponent 0 is only used as a check.
        self.assertAlmostEqual(power_series(0.0, 0.5, k_max=200), 1.0, places=12)

    def test_unbounded_at_one_is_zeta(self):
        self.assertAlmostEqual(power_series(-2.0, 1.0), math.pi**2 / 6, places=12)

    def test_truncated_sum(self):
        self.assertAlmostEqual(power_series(-1.5, 1.0, k_max=2), 1 + 2**-1.5)

    @override_settings(BFSBIAS_SUMMATION_CAP=1000)
    def test_cap_is_enforced(self):
        with self.assertRaises(SummationError):
            power_series(-1.5, 0.99999)


class PowerLawModelTests(SimpleTestCase):
    def test_zeta_constants(self):
        m = PowerLawModel.from_gamma(2.5)
        self.assertAlmostEqual(m.C, 0.7454, delta=1e-4)
        self.assertAlmostEqual(m.mu, 1.947, delta=1e-3)

    def test_from_distribution_matches_masses(self):
        dist = power_law_distribution(2.5, 500)
        m = PowerLawModel.from_distribution(dist)
        self.assertAlmostEqual(m.C, dist.normalization, places=12)
        self.assertAlmostEqual(m.mu, dist.mean, places=10)

    def test_gamma_must_exceed_two(self):
        with self.assertRaises(DomainError):
            PowerLawModel.from_gamma(2.0)

    def test_mean_degree_gap_is_loose(self):
        # mu * (gamma - 2) / C = (gamma - 2) * zeta(gamma - 1) = 0.5 * zeta(1.5).
        gap = mean_degree_gap(PowerLawModel.from_gamma(2.5))
        self.assertAlmostEqual(gap, 0.3062, delta=1e-3)


class SumTests(SimpleTestCase):
    def test_endpoints(self):
        m = PowerLawModel.from_gamma(2.5)
        self.assertEqual(exact_weighted_sum(m, 0), 0.0)
        self.assertAlmostEqual(exact_weighted_sum(m, 1), m.mu, delta=1e-10)
        self.assertEqual(cubic_sum_approx(m, 1), 2.0)
        self.assertEqual(cubic_sum_approx(m, 0), 0.0)

    def test_weighted_sum_bracket_at_half(self):
        m = PowerLawModel.from_gamma(2.5)
        value = exact_weighted_sum(m, 0.5)
        self.assertLessEqual(m.C * 0.5, value)
        self.assertLessEqual(value, m.mu)

    def test_cubic_approximation_error_is_measurable(self):
        m = PowerLawModel.from_gamma(2.5)
        exact = exact_power_sum(m, 0.95)
        approx = cubic_sum_approx(m, 0.95)
        self.assertGreater(exact, 0)
        self.assertTrue(math.isfinite(abs(approx - exact) / exact))

    def test_sum_bounds_hold_on_grid(self):
        for gamma in GAMMAS:
            m = PowerLawModel.from_gamma(gamma)
            for t in np.linspace(0, 1, 100):
                value = exact_weighted_sum(m, t)
                self.assertLessEqual(m.C * t, value + 1e-12, (gamma, t))
                self.assertLessEqual(value, m.mu + 1e-12, (gamma, t))

    def test_rejects_t_outside_unit_interval(self):
        m = PowerLawModel.from_gamma(2.5)
        with self.assertRaises(DomainError):
            exact_weighted_sum(m, 1.5)
        with self.assertRaises(DomainError):
            pvis_cubic(-0.1)


class VisibilityTests(SimpleTestCase):
    def test_pvis_is_one_at_t_one(self):
        for gamma in GAMMAS:
            for k_max in (None, 5000):
                result = pvis_exact(PowerLawModel.from_gamma(gamma, k_max), 1.0)
                self.assertAlmostEqual(result.raw, 1.0, delta=1e-8)
                self.assertFalse(result.at_limit)

    def test_pvis_limit_at_zero(self):
        result = pvis_exact(PowerLawModel.from_gamma(2.5), 0.0)
        self.assertEqual(result, (0.0, 0.0, True))
        with self.assertRaises(DomainError):
            pvis_exact(PowerLawModel.from_gamma(2.5), 1.01)

    def test_pvis_at_half_is_bracketed(self):
        m = PowerLawModel.from_gamma(2.5)
        result = pvis_exact(m, 0.5)
        self.assertGreaterEqual(result.value, pvis_lower_bound(m))
        self.assertLessEqual(result.value, 1.0)

    def test_pvis_never_drops_below_lower_bound(self):
        for gamma in GAMMAS:
            m = PowerLawModel.from_gamma(gamma)
            bound = pvis_lower_bound(m)
            for t in np.linspace(0.05, 1.0, 20):
                self.assertGreaterEqual(pvis_exact(m, t).raw, bound, (gamma, t))

    def test_lower_bound_value(self):
        m = PowerLawModel.from_gamma(2.5)
        self.assertAlmostEqual(pvis_lower_bound(m), 0.1466, delta=1e-3)
        self.assertLessEqual(pvis_lower_bound(m), 1.0)

    def test_cubic_visibility(self):
        self.assertEqual(pvis_cubic(0), 0)
        self.assertEqual(pvis_cubic(1), 1)
        self.assertEqual(pvis_cubic(0.5), 0.125)

    def test_reduced_series_at_one(self):
        m = PowerLawModel.from_gamma(2.5)
        # At t = 1 the reduced form is (gamma - 2) * W(1) = mu * (gamma - 2) / C.
        self.assertAlmostEqual(pvis_reduced(m, 1.0), 1 + mean_degree_gap(m), places=10)
        with self.assertRaises(DomainError):
            pvis_reduced(m, 0.0)

    def test_approximation_quality_near_one_is_reportable(self):
        m = PowerLawModel.from_gamma(2.5)
        gap = abs(pvis_exact(m, 0.9).value - 0.9**3)
        self.assertLess(gap, 1.0)


class TreeDegreeTests(SimpleTestCase):
    def test_expected_tree_degree(self):
        self.assertEqual(expected_tree_degree(1), 0)
        self.assertAlmostEqual(expected_tree_degree(18), 306 / 21)
        self.assertGreaterEqual(expected_tree_degree(18), 6 / 7 * 17 - 1e-12)

    def test_ratio_to_siblings_increases_towards_one(self):
        ratios = [expected_tree_degree(i) / (i - 1) for i in range(2, 2000)]
        self.assertTrue(all(a <= b for a, b in zip(ratios, ratios[1:])))
        self.assertGreater(ratios[-1], 0.99)
        self.assertTrue(all(expected_tree_degree(i) < i - 1 for i in range(2, 500)))

    def test_time_conditioned_expectation(self):
        self.assertEqual(expected_tree_degree_at_time(5, 1.0), 4)
        self.assertEqual(expected_tree_degree_at_time(5, 0.5), 0.5)

    def test_chernoff_values(self):
        self.assertEqual(chernoff_threshold_and_eps(1), (0.0, 1.0))
        threshold, eps = chernoff_threshold_and_eps(18)
        self.assertAlmostEqual(threshold, 153 / 21)
        self.assertAlmostEqual(eps, 0.162, delta=1e-3)
        self.assertAlmostEqual(chernoff_threshold_and_eps(32)[1], 0.029, delta=1e-3)

    def test_chernoff_eps_strictly_decreasing(self):
        eps = [chernoff_threshold_and_eps(i)[1] for i in range(2, 300)]
        self.assertTrue(all(a > b for a, b in zip(eps, eps[1:])))

    def test_tree_degree_band(self):
        low, high = tree_degree_band(18)
        self.assertAlmostEqual(low, 1 + 153 / 21)
        self.assertEqual(high, 18.0)

    def test_markov_fraction(self):
        m = PowerLawModel.from_gamma(2.5)
        self.assertAlmostEqual(markov_rigorous_fraction(m, 0.1), 0.895, delta=1e-3)
        self.assertEqual(markov_rigorous_fraction(m, math.inf), 0.0)
        self.assertLess(markov_rigorous_fraction(m, 1e9), 1e-8)
        with self.assertRaises(DomainError):
            markov_rigorous_fraction(m, 0)

    def test_predicted_exponent(self):
        self.assertEqual(predicted_tree_exponent(2.5), 2.5)
        self.assertEqual(predicted_tree_exponent(2.126), 2.126)
        with self.assertRaises(DomainError):
            predicted_tree_exponent(2.0)
