import math
import unittest
from unittest.mock import patch

import numpy as np

from ofdmqkd.exceptions import InvalidParameters, NoThresholdCrossing
from ofdmqkd.models.channel import ChannelDetector, transmittance
from ofdmqkd.models.constellation import Constellation
from ofdmqkd.models.enums import Backend, Detection
from ofdmqkd.security.gaussian import (entropy_g, epr_state,
                                       symplectic_eigenvalues,
                                       von_neumann_entropy)
from ofdmqkd.security.keyrate import (detector_noise_variance,
                                      null_key_threshold, skr_gaussian,
                                      skr_protocol, untrusted_equivalent)


def g(x):
    return (x + 1) * math.log2(x + 1) - (x * math.log2(x) if x > 0 else 0.0)


def reference_rate(v_a, eps, t, eta, v_ele, detection):
    """Closed-form trusted-detector Gaussian-modulation rate terms."""
    v = v_a + 1
    chi_line = 1 / t - 1 + eps
    a = v ** 2 * (1 - 2 * t) + 2 * t + t ** 2 * (v + chi_line) ** 2
    b = t ** 2 * (v * chi_line + 1) ** 2
    l1 = math.sqrt((a + math.sqrt(a ** 2 - 4 * b)) / 2)
    l2 = math.sqrt((a - math.sqrt(a ** 2 - 4 * b)) / 2)

    if detection == Detection.HeterodyneNoSwitch:
        chi_det = (2 - eta + 2 * v_ele) / eta
        chi_tot = chi_line + chi_det / t
        c = (a * chi_det ** 2 + b + 1 + 2 * chi_det * (v * math.sqrt(b) + t * (v + chi_line))
             + 2 * t * (v ** 2 - 1)) / (t * (v + chi_tot)) ** 2
        d = ((v + math.sqrt(b) * chi_det) / (t * (v + chi_tot))) ** 2
        i_ab = math.log2((v + chi_tot) / (1 + chi_tot))
    else:
        chi_det = (1 - eta + v_ele) / eta
        chi_tot = chi_line + chi_det / t
        c = (a * chi_det + v * math.sqrt(b) + t * (v + chi_line)) / (t * (v + chi_tot))
        d = math.sqrt(b) * (v + math.sqrt(b) * chi_det) / (t * (v + chi_tot))
        i_ab = 0.5 * math.log2((v + chi_tot) / (1 + chi_tot))

    l3 = math.sqrt((c + math.sqrt(c ** 2 - 4 * d)) / 2)
    l4 = math.sqrt((c - math.sqrt(c ** 2 - 4 * d)) / 2)
    chi_be = g((l1 - 1) / 2) + g((l2 - 1) / 2) - g((l3 - 1) / 2) - g((l4 - 1) / 2)
    return i_ab, chi_be


class GaussianStateTestCase(unittest.TestCase):

    def test_vacuum(self):

        np.testing.assert_allclose(symplectic_eigenvalues(np.eye(4)), [1.0, 1.0])
        self.assertAlmostEqual(von_neumann_entropy(np.eye(2)), 0.0, places=12)

    def test_epr_is_pure(self):

        gamma = epr_state(6.0)
        np.testing.assert_allclose(symplectic_eigenvalues(gamma), [1.0, 1.0], atol=1e-9)
        self.assertLess(von_neumann_entropy(gamma), 1e-9)

        # either half alone is thermal with variance V
        nu = symplectic_eigenvalues(gamma[:2, :2])
        self.assertAlmostEqual(nu[0], 6.0)
        self.assertAlmostEqual(von_neumann_entropy(gamma[:2, :2]), entropy_g(6.0))

    def test_unphysical(self):

        with self.assertRaises(InvalidParameters):
            symplectic_eigenvalues(0.5 * np.eye(2))


class ChannelTestCase(unittest.TestCase):

    def test_transmittance(self):

        self.assertEqual(ChannelDetector(0).transmittance, 1.0)
        self.assertAlmostEqual(transmittance(ChannelDetector(25, alpha_db_per_km=0.2)), 0.316228, places=6)
        self.assertAlmostEqual(ChannelDetector(50).transmittance, 0.1, places=12)

    def test_invalid(self):

        with self.assertRaises(ValueError):
            ChannelDetector(-1)
        with self.assertRaises(ValueError):
            ChannelDetector(10, eta=0)
        with self.assertRaises(ValueError):
            ChannelDetector(10, beta=1.2)
        with self.assertRaises(ValueError):
            ChannelDetector(10, v_ele=-0.1)
        with self.assertRaises(ValueError):
            ChannelDetector(10, detection='balanced')

    def test_parse(self):

        ch = ChannelDetector.parse({'distance': 30, 'eta': 0.56, 'v_ele': 0.1, 'detection': 'homodyne'})
        self.assertEqual(ch.distance_km, 30.0)
        self.assertEqual(ch.detection, Detection.Homodyne)
        self.assertEqual(ch.with_distance(10).eta, 0.56)


class KeyRateTestCase(unittest.TestCase):

    def test_lossless_identity(self):

        point = skr_gaussian(5.0, 0.0, ChannelDetector(0, eta=1.0, v_ele=0.0))
        self.assertLessEqual(point.chi_be, 1e-9)
        self.assertAlmostEqual(point.i_ab, math.log2(1 + 5.0 / 2), places=9)
        self.assertEqual(point.backend, Backend.Gaussian)

    def test_matches_closed_form(self):

        for detection in Detection:
            for v_a, eps, distance, eta, v_ele in [
                (5.0, 0.03, 25, 0.56, 0.15),
                (5.0, 0.05, 100, 0.56, 0.1),
                (0.45, 0.01, 10, 0.6, 0.05),
                (20.0, 0.01, 50, 1.0, 0.0),
            ]:
                ch = ChannelDetector(distance, eta=eta, v_ele=v_ele, detection=detection)
                point = skr_gaussian(v_a, eps, ch)
                i_ab, chi_be = reference_rate(v_a, eps, ch.transmittance, eta, v_ele, detection)
                self.assertAlmostEqual(point.i_ab, i_ab, places=7)
                self.assertAlmostEqual(point.chi_be, chi_be, places=6)

    def test_clamping(self):

        ch = ChannelDetector(26.1, eta=0.56, v_ele=0.15)
        self.assertEqual(skr_gaussian(0.45, 1.0, ch).r_k, 0.0)
        self.assertEqual(skr_gaussian(5.0, 0.01, ch.replace(beta=0.0)).r_k, 0.0)

    def test_monotone(self):

        ch = ChannelDetector(0, eta=0.56, v_ele=0.15)
        eps_grid = np.linspace(0.0, 0.1, 10)
        l_grid = np.linspace(0.0, 90.0, 10)
        beta_grid = [0.8, 0.85, 0.9, 0.95, 1.0]

        rates = np.array([[[skr_gaussian(5.0, e, ch.replace(distance_km=l, beta=b)).r_k
                            for b in beta_grid] for l in l_grid] for e in eps_grid])
        self.assertTrue(np.all(np.diff(rates, axis=0) <= 1e-12))
        self.assertTrue(np.all(np.diff(rates, axis=1) <= 1e-12))
        self.assertTrue(np.all(np.diff(rates, axis=2) >= -1e-12))

    def test_untrusted_detector(self):

        ch = ChannelDetector(25, eta=0.56, v_ele=0.15)
        trusted = skr_gaussian(5.0, 0.03, ch)
        untrusted = skr_gaussian(5.0, 0.03, ch.replace(trusted_detector=False))
        self.assertLess(untrusted.r_k, trusted.r_k)
        self.assertAlmostEqual(untrusted.i_ab, trusted.i_ab, places=9)

        t, eps, ideal = untrusted_equivalent(0.03, ch)
        self.assertAlmostEqual(t, 0.56 * ch.transmittance)
        self.assertAlmostEqual(eps, 0.03 + 2 * 0.15 / t)
        self.assertEqual((ideal.eta, ideal.v_ele), (1.0, 0.0))

    def test_detector_noise(self):

        self.assertEqual(detector_noise_variance(ChannelDetector(0, eta=0.5, v_ele=0.0)), 1.0)
        self.assertAlmostEqual(detector_noise_variance(ChannelDetector(0, eta=0.5, v_ele=0.1)), 1.4)
        self.assertAlmostEqual(
            detector_noise_variance(ChannelDetector(0, eta=0.5, v_ele=0.1, detection='homodyne')), 1.2)
        with self.assertRaises(InvalidParameters):
            detector_noise_variance(ChannelDetector(0, eta=1.0, v_ele=0.1))

    def test_protocol_backend(self):

        ch = ChannelDetector(25, eta=0.56, v_ele=0.15)
        point = skr_protocol(Constellation('256qam', nu=0.04), 5.0, 0.03, ch, k=7)
        self.assertEqual(point.backend, Backend.GaussianEquivalent)
        self.assertEqual(point.k, 7)
        self.assertGreater(point.r_k, 0)

        point = skr_protocol(Constellation('gaussian'), 5.0, 0.03, ch)
        self.assertEqual(point.backend, Backend.Gaussian)

    def test_invalid(self):

        with self.assertRaises(ValueError):
            skr_gaussian(0.0, 0.01, ChannelDetector(10))
        with self.assertRaises(ValueError):
            skr_gaussian(5.0, -0.01, ChannelDetector(10))

    @patch('ofdmqkd.security.keyrate.von_neumann_entropy', side_effect=[1.0, 1.5])
    def test_negative_holevo_bound(self, entropy):

        with self.assertRaises(InvalidParameters) as cm:
            skr_gaussian(5.0, 0.01, ChannelDetector(25))
        self.assertEqual(cm.exception.code, 3)
        self.assertIn('chi(B:E) = -0.5', cm.exception.errors[0])

    @patch('ofdmqkd.security.keyrate.von_neumann_entropy', side_effect=[1.0, 1.0 + 1e-12])
    def test_rounding_holevo_bound(self, entropy):

        self.assertEqual(skr_gaussian(5.0, 0.01, ChannelDetector(25)).chi_be, 0.0)


class ThresholdTestCase(unittest.TestCase):

    def test_threshold_contract(self):

        ch = ChannelDetector(25, eta=0.56, v_ele=0.15)
        thr = null_key_threshold(0.45, ch)
        self.assertGreater(thr, 0)
        self.assertGreater(skr_gaussian(0.45, thr / 2, ch).r_k, 0)
        self.assertEqual(skr_gaussian(0.45, 2 * thr, ch).r_k, 0)

        qpsk = Constellation('qpsk')
        self.assertEqual(skr_protocol(qpsk, 0.45, thr * 1.1, ch).r_k, 0)

    def test_threshold_falls_with_distance(self):

        thresholds = [null_key_threshold(0.45, ChannelDetector(length, eta=0.56, v_ele=0.15))
                      for length in (5, 10, 25, 50)]
        self.assertGreater(thresholds[-1], 0)
        for shorter, longer in zip(thresholds, thresholds[1:]):
            self.assertGreater(shorter, longer)

    def test_untrusted_detector_threshold(self):

        # electronic noise folded into the channel leaves no key even without modulation noise
        ch = ChannelDetector(25, eta=0.56, v_ele=0.15, trusted_detector=False)
        self.assertEqual(null_key_threshold(0.45, ch), 0.0)

    def test_zero_beta(self):

        self.assertEqual(null_key_threshold(5.0, ChannelDetector(25, beta=0.0)), 0.0)

    @patch('ofdmqkd.security.keyrate._raw_rate', return_value=(2.0, 0.5))
    def test_no_crossing(self, raw_rate):

        with self.assertRaises(NoThresholdCrossing) as cm:
            null_key_threshold(5.0, ChannelDetector(0, beta=1.0))
        self.assertEqual(cm.exception.code, 3)
        self.assertGreater(cm.exception.rate_at_high, 0)
