import numpy as np
from django.test import SimpleTestCase
from scipy.special import zeta

from apps.graphgen.distributions import power_law_distribution, sample_degree_sequence
from apps.graphgen.graph import configuration_model

from .ccdf import CCDF, average_ccdf, ccdf, degree_histogram, histogram_from_ccdf
from .exceptions import BoundsError, FitError, StatsError
from .fitting import FitMethod, fit_gamma_mle, fit_gamma_regression
from .strata import parse_bounds, stratify_by_degree


def exact_ccdf(gamma, k_max=10_000):
    degrees = np.arange(1, k_max + 1)
    fractions = zeta(gamma, degrees) / zeta(gamma)
    return CCDF(points=tuple(zip(degrees.tolist(), fractions.tolist())), n=10**9)


def quantile_sample(gamma, n, k_max=1_000_000):
    """Degrees at the n midpoint quantiles of the power law, free of draw noise."""
    dist = power_law_distribution(gamma, k_max)
    cdf = np.cumsum(dist.masses)
    index = np.searchsorted(cdf, (np.arange(n) + 0.5) / n)
    return dist.degrees[np.minimum(index, k_max - 1)]


class CcdfTests(SimpleTestCase):
    def test_two_degrees(self):
        self.assertEqual(ccdf({1: 2, 2: 2}).points, ((1, 1.0), (2, 0.5)))

    def test_point_mass(self):
        c = ccdf({5: 10})
        self.assertEqual(c.points, ((5, 1.0),))
        self.assertEqual(c.n, 10)

    def test_empty_histogram(self):
        with self.assertRaises(StatsError):
            ccdf({})

    def test_histogram_round_trip(self):
        hist = {1: 40, 2: 13, 3: 7, 9: 1, 40: 2}
        self.assertEqual(histogram_from_ccdf(ccdf(hist)), hist)

    def test_sampled_ccdf_matches_exact_tails(self):
        n = 200_000
        dist = power_law_distribution(2.5, 100_000)
        c = ccdf(degree_histogram(sample_degree_sequence(dist, n, seed=12)))
        for k in (1, 2, 5, 10, 50):
            exact = dist.masses[k - 1 :].sum()
            error = np.sqrt(exact * (1 - exact) / n) if exact < 1 else 1e-9
            self.assertLessEqual(abs(c.at(k) - exact), 3 * error + 1e-5, k)

    def test_step_evaluation(self):
        c = ccdf({2: 1, 4: 1})
        np.testing.assert_array_equal(c.at([1, 2, 3, 4, 5]), [1.0, 1.0, 0.5, 0.5, 0.0])


class AverageCcdfTests(SimpleTestCase):
    def test_identical_curves(self):
        c = ccdf({1: 3, 4: 1})
        self.assertEqual(average_ccdf([c, c, c]).points, c.points)

    def test_union_support_step_mean(self):
        first = CCDF(points=((1, 1.0),), n=1)
        second = CCDF(points=((1, 1.0), (2, 0.5)), n=2)
        self.assertEqual(average_ccdf([first, second]).points, ((1, 1.0), (2, 0.25)))

    def test_average_is_monotone(self):
        curves = [ccdf({1: 5, 3: 2, 8: 1}), ccdf({2: 1, 3: 1, 20: 1}), ccdf({1: 1})]
        fractions = average_ccdf(curves).fractions
        self.assertTrue(np.all(np.diff(fractions) <= 0))
        self.assertTrue(np.all(fractions > 0))

    def test_needs_a_curve(self):
        with self.assertRaises(StatsError):
            average_ccdf([])


class RegressionFitTests(SimpleTestCase):
    def test_exact_power_law(self):
        fit = fit_gamma_regression(exact_ccdf(2.5), k_min=10)
        self.assertAlmostEqual(fit.gamma_hat, 2.5, delta=0.02)
        self.assertEqual(fit.method, FitMethod.LOGLOG_REGRESSION_CCDF)
        self.assertGreater(fit.r_squared, 0.99)

    def test_dimes_exponent(self):
        fit = fit_gamma_regression(exact_ccdf(2.126), k_min=10)
        self.assertAlmostEqual(fit.gamma_hat, 2.126, delta=0.03)

    def test_scale_invariance(self):
        c = exact_ccdf(2.5, k_max=2000)
        scaled = CCDF(points=tuple((k, f * 0.3) for k, f in c.points), n=c.n)
        self.assertAlmostEqual(
            fit_gamma_regression(c, 10).gamma_hat,
            fit_gamma_regression(scaled, 10).gamma_hat,
            places=9,
        )

    def test_too_few_points(self):
        with self.assertRaises(FitError):
            fit_gamma_regression(ccdf({3: 1}), k_min=1)


class MleFitTests(SimpleTestCase):
    def test_degenerate_tail(self):
        with self.assertRaises(FitError):
            fit_gamma_mle([10] * 50, k_min=10)

    def test_too_few_tail_samples(self):
        with self.assertRaises(FitError):
            fit_gamma_mle([1, 2, 3, 50, 60], k_min=10)

    def test_recovers_known_exponents(self):
        for gamma in (2.5, 2.126):
            dist = power_law_distribution(gamma, 1_000_000)
            sample = sample_degree_sequence(dist, 200_000, seed=31)
            fit = fit_gamma_mle(sample, k_min=10)
            self.assertAlmostEqual(fit.gamma_hat, gamma, delta=0.1)
            self.assertEqual(fit.method, FitMethod.MLE_HILL)
            self.assertAlmostEqual(
                fit.standard_error, (fit.gamma_hat - 1) / np.sqrt(fit.sample_size)
            )


class LargeSampleCalibrationTests(SimpleTestCase):
    """Both fitters on 10**6 draws at the two exponents the experiment cares about."""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.samples = {
            gamma: sample_degree_sequence(
                power_law_distribution(gamma, 1_000_000), 1_000_000, seed=31
            )
            for gamma in (2.126, 2.5)
        }

    def test_mle_is_calibrated(self):
        for gamma, sample in self.samples.items():
            with self.subTest(gamma=gamma):
                fit = fit_gamma_mle(sample, k_min=10)
                self.assertAlmostEqual(fit.gamma_hat, gamma, delta=0.02)
                self.assertLessEqual(
                    abs(fit.gamma_hat - gamma), 2 * fit.standard_error
                )

    def test_sparse_tail_pulls_the_regression_low(self):
        # every distinct degree weighs the same, and above a few hundred the
        # empirical CCDF is a staircase of single draws
        for gamma, sample in self.samples.items():
            with self.subTest(gamma=gamma):
                fit = fit_gamma_regression(ccdf(degree_histogram(sample)), k_min=10)
                self.assertLess(fit.gamma_hat, gamma)
                self.assertGreater(fit.gamma_hat, gamma - 0.12)


class QuantileSampleTests(SimpleTestCase):
    def test_both_fitters_recover_the_exponent(self):
        for gamma in (2.126, 2.5):
            with self.subTest(gamma=gamma):
                sample = quantile_sample(gamma, 1_000_000)
                regression = fit_gamma_regression(
                    ccdf(degree_histogram(sample)), k_min=10
                )
                self.assertAlmostEqual(regression.gamma_hat, gamma, delta=0.03)
                mle = fit_gamma_mle(sample, k_min=10)
                self.assertAlmostEqual(mle.gamma_hat, gamma, delta=0.01)

    def test_estimators_agree(self):
        for gamma in (2.1, 2.5, 2.9):
            with self.subTest(gamma=gamma):
                sample = quantile_sample(gamma, 100_000)
                regression = fit_gamma_regression(
                    ccdf(degree_histogram(sample)), k_min=10
                )
                mle = fit_gamma_mle(sample, k_min=10)
                combined = np.hypot(regression.standard_error, mle.standard_error)
                self.assertLessEqual(
                    abs(regression.gamma_hat - mle.gamma_hat), 2 * combined
                )


class StratifyTests(SimpleTestCase):
    def setUp(self):
        self.graph = configuration_model([1, 35, 36, 70, 71, 1], seed=2, simplify=False)

    def test_default_groups_close_the_gaps(self):
        groups = stratify_by_degree(self.graph, [(1, 35), (36, 70), (71, None)])
        self.assertEqual([g.tolist() for g in groups], [[0, 1, 5], [2, 3], [4]])

    def test_settings_bounds_are_the_default(self):
        groups = stratify_by_degree(self.graph)
        self.assertEqual([g.tolist() for g in groups], [[0, 1, 5], [2, 3], [4]])

    def test_empty_group(self):
        groups = stratify_by_degree(self.graph, [(1, 1), (100, None)])
        self.assertEqual(groups[1].tolist(), [])

    def test_groups_partition_positive_degrees(self):
        groups = stratify_by_degree(self.graph)
        self.assertEqual(sorted(np.concatenate(groups).tolist()), list(range(6)))

    def test_overlap_is_rejected(self):
        with self.assertRaises(BoundsError):
            stratify_by_degree(self.graph, [(1, 40), (36, 70)])
        with self.assertRaises(BoundsError):
            stratify_by_degree(self.graph, [(71, None), (80, 90)])

    def test_parse_bounds(self):
        self.assertEqual(
            parse_bounds(["1-35", "36-70", "71-"]), [(1, 35), (36, 70), (71, None)]
        )
        self.assertEqual(parse_bounds([[1, 10], [11, None]]), [(1, 10), (11, None)])
        with self.assertRaises(BoundsError):
            parse_bounds(["12"])
