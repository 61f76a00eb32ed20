import numpy as np
from django.test import SimpleTestCase

from octowinding import sde, stats
from octowinding.exceptions import DomainError
from octowinding.geometry import FLAT, PROJECTIVE


def gaussian_batch(n, variance=1.0, seed=0):
    rng = np.random.default_rng(seed)
    clock = np.full(n, variance)
    return sde.WindingBatch(zeta=np.sqrt(variance) * rng.standard_normal((n, 7)), clock=clock, t_end=1.0,
                            provenance=sde.Provenance.TIME_CHANGE, path_indices=np.arange(n))


class TestEstimators(SimpleTestCase):
    def test_mc_mean(self):
        estimate = stats.mc_mean([2.0, 2.0, 2.0])
        self.assertEqual((estimate.value, estimate.std_error, estimate.n_samples), (2.0, 0.0, 3))
        self.assertTrue(estimate.within(2.0))
        with self.assertRaises(DomainError):
            stats.mc_mean([])
        with self.assertRaises(DomainError):
            stats.mc_mean([1.0, np.nan])

    def test_charfn_of_zero_windings(self):
        self.assertEqual(stats.mc_charfn(np.zeros((10, 7)), 1.0).value, 1.0)

    def test_conditional_and_direct_agree(self):
        batch = gaussian_batch(20000, variance=0.5)
        conditional = stats.mc_charfn(batch, 1.0)
        direct = stats.mc_charfn(batch, 1.0, method='direct')
        self.assertEqual(conditional.std_error, 0.0)
        self.assertAlmostEqual(conditional.value, np.exp(-0.25))
        self.assertTrue(direct.within(conditional.value, n_se=4))

    def test_lambda_vector(self):
        batch = gaussian_batch(100)
        vector = np.array([0.6, 0.8, 0, 0, 0, 0, 0])
        self.assertAlmostEqual(stats.mc_charfn(batch, vector).value, stats.mc_charfn(batch, 1.0).value)
        with self.assertRaises(DomainError):
            stats.mc_charfn(batch, [1.0, 1.0])

    def test_conditional_needs_the_clock(self):
        with self.assertRaises(DomainError):
            stats.mc_charfn(np.zeros((10, 7)), 1.0, method='conditional')

    def test_samples_as_a_list(self):
        batch = gaussian_batch(50)
        self.assertEqual(stats.mc_charfn(list(batch), 1.0), stats.mc_charfn(batch, 1.0))

    def test_bad_shapes(self):
        with self.assertRaises(DomainError):
            stats.empirical_cov(np.zeros((10, 3)))
        with self.assertRaises(DomainError):
            stats.empirical_cov(np.zeros((1, 7)))


class TestGaussianTest(SimpleTestCase):
    def test_passes_on_gaussian_data(self):
        report = stats.gaussian_test(gaussian_batch(20000, variance=2.0), 2.0)
        self.assertTrue(report.passed, report.to_text())
        self.assertEqual(len(report.ks_per_marginal), 7)
        self.assertIn('"pass": true', report.to_json())

    def test_scaling(self):
        report = stats.gaussian_test(gaussian_batch(20000, variance=4.0), np.eye(7), scale=0.5)
        self.assertTrue(report.passed, report.to_text())

    def test_fails_on_wrong_variance(self):
        report = stats.gaussian_test(gaussian_batch(20000, variance=2.0), 1.0)
        self.assertFalse(report.passed)
        self.assertGreater(report.max_diag_rel_error, 0.5)
        self.assertIn("FAIL", report.to_text())

    def test_off_diagonal_is_judged_on_the_correlation_scale(self):
        # Raw covariances of N(0, 14/3) windings scatter by about 0.05 at n=10^4; correlations by 0.01.
        report = stats.gaussian_test(gaussian_batch(10000, variance=14.0 / 3.0, seed=5), 14.0 / 3.0)
        self.assertTrue(report.passed, report.to_text())
        self.assertLess(report.max_offdiag, 0.05)

    def test_fails_on_correlated_marginals(self):
        zeta = np.random.default_rng(6).standard_normal((10000, 7))
        zeta[:, 1] = 0.6 * zeta[:, 0] + 0.8 * zeta[:, 1]
        report = stats.gaussian_test(3.0 * zeta, 9.0)
        self.assertFalse(report.passed)
        self.assertAlmostEqual(report.max_offdiag, 0.6, delta=0.05)

    def test_degenerate(self):
        with self.assertRaises(DomainError):
            stats.gaussian_test(np.zeros((500, 7)), 1.0)
        with self.assertRaises(DomainError):
            stats.gaussian_test(gaussian_batch(50), 1.0)
        with self.assertRaises(DomainError):
            stats.gaussian_test(gaussian_batch(500), -np.eye(7))


class TestDistributionChecks(SimpleTestCase):
    def test_stationary_sample(self):
        # cos 2r of the stationary radius is 2 Beta(4, 4) - 1.
        u = np.random.default_rng(3).beta(4.0, 4.0, 20000)
        radii = 0.5 * np.arccos(2.0 * u - 1.0)
        self.assertLess(stats.stationary_density_check(radii, PROJECTIVE), 0.02)
        self.assertGreater(stats.stationary_density_check(np.full(100, 0.3), PROJECTIVE), 0.5)

    def test_stationary_law_is_projective_only(self):
        with self.assertRaises(DomainError):
            stats.stationary_density_check([0.5], FLAT)

    def test_two_sample(self):
        a = np.random.default_rng(4).standard_normal(1000)
        self.assertEqual(stats.ks_two_sample(a, a), 0.0)
        self.assertGreater(stats.ks_two_sample(a, a + 1.0), 0.3)
        with self.assertRaises(DomainError):
            stats.ks_two_sample(a, [])

    def test_girsanov_estimate(self):
        estimate = stats.girsanov_estimate(FLAT, 1.0, np.full(10, 2.0), 2.0, 5.0)
        self.assertEqual(estimate.value, 1.0)
