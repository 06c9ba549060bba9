import math
import unittest

import numpy as np
from scipy.integrate import quad

from ofdmqkd.models.constellation import Constellation, moments
from ofdmqkd.models.enums import FourthMomentConvention, Protocol


class ConstellationTestCase(unittest.TestCase):

    def test_qpsk_moments(self):

        m = moments(Constellation('qpsk'))
        self.assertEqual(m.sigma1_sq, 1.0)
        self.assertEqual(m.sigma2_sq, 1.0)

        m = Constellation('qpsk', fourth_moment='variance-of-square').moments()
        self.assertEqual(m[:2], (1.0, 0.0))
        self.assertEqual((m.raw_fourth, m.raw_sixth), (1.0, 1.0))

    def test_gaussian_moments(self):

        m = Constellation('gaussian').moments()
        self.assertAlmostEqual(m.sigma1_sq, 1 / 9, places=12)
        self.assertAlmostEqual(m.sigma2_sq, 2 / 81, places=12)

        m = Constellation('gauss', clip_sigmas=2.0, fourth_moment='raw').moments()
        self.assertAlmostEqual(m.sigma1_sq, 0.25, places=12)
        self.assertAlmostEqual(m.sigma2_sq, 3 / 16, places=12)

    def test_gaussian_raw_moments(self):

        c = Constellation('gaussian')
        m = c.moments()

        def raw(order):
            density = lambda x: x ** order * math.exp(-x ** 2 / (2 * c.sigma ** 2))  # noqa: E731
            return quad(density, -math.inf, math.inf)[0] / math.sqrt(2 * math.pi * c.sigma ** 2)

        second, fourth, sixth = raw(2), raw(4), raw(6)

        self.assertAlmostEqual(m.sigma1_sq, second, delta=1e-9)
        self.assertAlmostEqual(m.raw_fourth, fourth, delta=1e-9)
        self.assertAlmostEqual(m.raw_sixth, sixth, delta=1e-9)
        self.assertAlmostEqual(m.sigma2_sq, fourth - second ** 2, delta=1e-9)

    def test_qam_moments(self):

        m = Constellation('256qam', nu=0.0).moments()
        self.assertAlmostEqual(m.sigma1_sq, 0.377778, places=5)
        self.assertAlmostEqual(m.sigma2_sq, 0.112832, places=5)

        m = Constellation('256qam', nu=0.04).moments()
        self.assertAlmostEqual(m.sigma1_sq, 0.37, delta=0.01)
        self.assertAlmostEqual(m.sigma2_sq, 0.11, delta=0.01)

        # shaping pulls probability towards the origin
        self.assertLess(m.sigma1_sq, Constellation('qam').moments().sigma1_sq)

        variances = [Constellation('256qam', nu=nu).moments().sigma1_sq for nu in (0, 0.02, 0.04, 0.1, 0.5, 1, 2)]
        for wider, narrower in zip(variances, variances[1:]):
            self.assertGreater(wider, narrower)

    def test_default_conventions(self):

        self.assertEqual(Constellation('qpsk').fourth_moment, FourthMomentConvention.RawFourthMoment)
        self.assertEqual(Constellation('qam').fourth_moment, FourthMomentConvention.VarianceOfSquare)
        self.assertEqual(Constellation('gaussian').fourth_moment, FourthMomentConvention.VarianceOfSquare)

    def test_support(self):

        x, p = Constellation('qam', levels=16, nu=0.04).support()
        self.assertEqual(len(x), 16)
        self.assertAlmostEqual(p.sum(), 1.0, places=12)
        self.assertAlmostEqual(float(np.dot(p, x)), 0.0, places=12)
        self.assertEqual(x.max(), 1.0)
        self.assertAlmostEqual(x[8], 1 / 15)

        self.assertIsNone(Constellation('gaussian').support())

    def test_sample_quadrature(self):

        rng = np.random.default_rng(7)
        c = Constellation('qam', nu=0.04)
        draws = c.sample_quadrature(rng, size=10 ** 6)
        second = draws ** 2
        se = second.std() / np.sqrt(len(draws))
        self.assertLess(abs(second.mean() - c.moments().sigma1_sq), 3 * se)

        draws = Constellation('qpsk').sample_quadrature(rng, size=1000)
        self.assertTrue(set(np.unique(draws)) <= {-1.0, 1.0})

        draws = Constellation('gaussian').sample_quadrature(rng, size=10 ** 5)
        self.assertLessEqual(np.abs(draws).max(), 1.0)
        self.assertAlmostEqual(float(np.mean(draws ** 2)), 1 / 9, delta=0.002)

    def test_invalid(self):

        with self.assertRaises(ValueError):
            Constellation('64psk')
        with self.assertRaises(ValueError):
            Constellation('qam', levels=15)
        with self.assertRaises(ValueError):
            Constellation('qam', nu=-0.1)
        with self.assertRaises(ValueError):
            Constellation('gaussian', clip_sigmas=0)
        with self.assertRaises(ValueError):
            Constellation('qpsk', fourth_moment='kurtosis')

    def test_parse(self):

        c = Constellation.parse({'name': 'qam256', 'levels': 16, 'nu': 0.04})
        self.assertEqual(c.protocol, Protocol.QAM)
        self.assertEqual(c.nu, 0.04)
        self.assertEqual(c.serialize, {'name': 'qam', 'fourthMoment': 'variance-of-square', 'levels': 16, 'nu': 0.04})
