import logging
import math
from typing import Any, Dict, NamedTuple

import numpy as np
from scipy.optimize import bisect

from ofdmqkd.exceptions import InvalidParameters, NoThresholdCrossing
from ofdmqkd.models.channel import ChannelDetector
from ofdmqkd.models.constellation import Constellation
from ofdmqkd.models.enums import Backend, Detection, Protocol
from ofdmqkd.security.gaussian import (PHYSICAL_TOLERANCE, beamsplitter,
                                       channel_state, direct_sum, epr_state,
                                       heterodyne_conditional,
                                       homodyne_conditional, reorder,
                                       von_neumann_entropy)

LOG = logging.getLogger('ofdmqkd.security')

THRESHOLD_XTOL = 1e-6

# modes of the purified state: Alice, Bob, detector noise and its purification
A, B, F, G = range(4)


class SkrPoint(NamedTuple):
    k: int
    i_ab: float
    chi_be: float
    r_k: float
    backend: Backend
    params_echo: Dict[str, Any]

    @property
    def serialize(self) -> Dict[str, Any]:
        return {
            'k': self.k,
            'iAB': self.i_ab,
            'chiBE': self.chi_be,
            'rK': self.r_k,
            'backend': self.backend.value,
            'params': self.params_echo
        }


def detector_noise_variance(ch: ChannelDetector) -> float:
    """Variance of the EPR mode that models a trusted detector's electronic noise."""
    if ch.v_ele == 0:
        return 1.0
    if ch.eta >= 1:
        raise InvalidParameters('electronic noise needs detector efficiency below 1 in the trusted detector model')
    ports = 2 if ch.detection == Detection.HeterodyneNoSwitch else 1
    return 1 + ports * ch.v_ele / (1 - ch.eta)


def detector_added_noise(ch: ChannelDetector) -> float:
    """Detection noise referred to Bob's input, in shot-noise units."""
    if ch.detection == Detection.HeterodyneNoSwitch:
        return (2 - ch.eta + 2 * ch.v_ele) / ch.eta
    return (1 - ch.eta + ch.v_ele) / ch.eta


def untrusted_equivalent(eps: float, ch: ChannelDetector):
    """Fold detector loss and noise into the channel: returns (T', eps', ideal detector)."""
    t = ch.transmittance
    chi_line = 1 / t - 1 + eps
    ideal_noise = 2 if ch.detection == Detection.HeterodyneNoSwitch else 1
    eps_prime = chi_line + detector_added_noise(ch) / t - ideal_noise / (ch.eta * t) + 1
    return ch.eta * t, eps_prime, ch.replace(eta=1.0, v_ele=0.0)


def _mutual_information(gamma: np.ndarray, detection: Detection) -> float:
    """I(A:B) between Alice's heterodyne data and Bob's detected mode (last mode)."""
    b = gamma[-2, -2]
    b_given_a = heterodyne_conditional(reorder(gamma, [1, 0]))[0, 0]
    if detection == Detection.HeterodyneNoSwitch:
        return math.log2((b + 1) / (b_given_a + 1))
    return 0.5 * math.log2(b / b_given_a)


def _raw_rate(v_a: float, eps: float, ch: ChannelDetector):
    t = ch.transmittance
    if not ch.trusted_detector:
        t, eps, ch = untrusted_equivalent(eps, ch)

    gamma_ab = channel_state(v_a, t, eps)
    v = detector_noise_variance(ch)

    gamma = direct_sum(gamma_ab, epr_state(v))
    s = beamsplitter(4, B, F, ch.eta)
    gamma = s @ gamma @ s.T

    i_ab = _mutual_information(reorder(gamma, [A, B]), ch.detection)

    # Eve holds the purification of (A, B): chi = S(AB) - S(A F G | B')
    rest = reorder(gamma, [A, F, G, B])
    if ch.detection == Detection.HeterodyneNoSwitch:
        conditional = heterodyne_conditional(rest)
    else:
        conditional = homodyne_conditional(rest)
    chi_be = von_neumann_entropy(gamma_ab) - von_neumann_entropy(conditional)
    if chi_be < -PHYSICAL_TOLERANCE:
        raise InvalidParameters(
            'Holevo bound is negative',
            errors=[f'chi(B:E) = {chi_be!r} for vA={v_a!r}, eps={eps!r}, T={t!r}']
        )
    # rounding only
    chi_be = max(chi_be, 0.0)

    return i_ab, chi_be


def skr_gaussian(v_a: float, eps: float, ch: ChannelDetector, k: int = 1,
                 backend: Backend = Backend.Gaussian) -> SkrPoint:
    if v_a <= 0:
        raise ValueError(f'modulation variance must be positive, not {v_a}')
    if eps < 0:
        raise ValueError(f'excess noise must not be negative, not {eps}')

    i_ab, chi_be = _raw_rate(v_a, eps, ch)
    r_k = max(0.0, ch.beta * i_ab - chi_be)

    return SkrPoint(
        k=k,
        i_ab=i_ab,
        chi_be=chi_be,
        r_k=r_k,
        backend=backend,
        params_echo={
            'vA': v_a,
            'eps': eps,
            'channel': ch.serialize
        }
    )


def skr_protocol(protocol: Constellation, v_a: float, eps: float, ch: ChannelDetector, k: int = 1) -> SkrPoint:
    if protocol.protocol == Protocol.Gaussian:
        return skr_gaussian(v_a, eps, ch, k=k, backend=Backend.Gaussian)
    LOG.debug('Rate for %s evaluated with the Gaussian-modulation bound', protocol.protocol.value)
    return skr_gaussian(v_a, eps, ch, k=k, backend=Backend.GaussianEquivalent)


def backend_for(protocol: Constellation) -> Backend:
    return Backend.Gaussian if protocol.protocol == Protocol.Gaussian else Backend.GaussianEquivalent


def null_key_threshold(v_a: float, ch: ChannelDetector) -> float:
    """Excess noise at which the key rate drops to zero, searched on [0, 1] SNU."""

    def margin(eps):
        i_ab, chi_be = _raw_rate(v_a, eps, ch)
        return ch.beta * i_ab - chi_be

    low, high = margin(0.0), margin(1.0)
    if low <= 0:
        return 0.0
    if high > 0:
        raise NoThresholdCrossing(
            f'key rate stays positive up to 1 SNU of excess noise at {ch.distance_km} km',
            rate_at_low=low, rate_at_high=high
        )
    return float(bisect(margin, 0.0, 1.0, xtol=THRESHOLD_XTOL))
