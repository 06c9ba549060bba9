import logging
import math
from typing import Any, Dict, NamedTuple, Optional, Tuple

import numpy as np

from ofdmqkd.models.constellation import Moments
from ofdmqkd.models.enums import (DistinctnessRule, MixingVariance,
                                  TupleCounting)
from ofdmqkd.models.intermod import count_arrays, image_counts

LOG = logging.getLogger('ofdmqkd.models.noise')

JSON = Dict[str, Any]

MAX_MODULATION_INDEX = 0.5


class ModulatorConfig:

    def __init__(self, n_total: int, mu: float, **kwargs) -> None:
        if n_total is None or int(n_total) < 1:
            raise ValueError(f'total carrier number must be at least 1, not {n_total}')
        if not 0 < mu <= MAX_MODULATION_INDEX:
            raise ValueError(f'modulation index must be in (0, {MAX_MODULATION_INDEX}], not {mu}')

        self.n_total = int(n_total)
        self.mu = float(mu)
        self.kappa = float(kwargs.get('kappa', 1.0))
        self.theta = float(kwargs.get('theta', 0.0))
        self.a_sig = float(kwargs.get('a_sig', 1.0))
        self.delta_f = float(kwargs.get('delta_f', 1e6))
        self.intermod = bool(kwargs.get('intermod', True))
        self.distinctness = DistinctnessRule(kwargs.get('distinctness', None) or DistinctnessRule.Strict)
        self.tuples = TupleCounting(kwargs.get('tuples', None) or TupleCounting.Ordered)
        self.mixing_variance = MixingVariance(kwargs.get('mixing_variance', None) or MixingVariance.Coherent)

        if self.kappa <= 0:
            raise ValueError(f'gain imbalance kappa must be positive, not {self.kappa}')
        if abs(self.theta) >= math.pi / 2:
            raise ValueError(f'quadrature skew theta must satisfy |theta| < pi/2, not {self.theta}')
        if self.a_sig <= 0:
            raise ValueError(f'signal amplitude must be positive, not {self.a_sig}')
        if self.delta_f <= 0:
            raise ValueError(f'subcarrier spacing must be positive, not {self.delta_f}')

    @classmethod
    def ideal(cls, n_total: int, mu: float, **kwargs) -> 'ModulatorConfig':
        """Balanced modulator without mixing products."""
        kwargs.update(kappa=1.0, theta=0.0, intermod=False)
        return ModulatorConfig(n_total, mu, **kwargs)

    def with_n(self, n_total: int) -> 'ModulatorConfig':
        return ModulatorConfig(n_total, self.mu, **self._kwargs())

    def with_mu(self, mu: float) -> 'ModulatorConfig':
        return ModulatorConfig(self.n_total, mu, **self._kwargs())

    def _kwargs(self) -> Dict[str, Any]:
        return dict(
            kappa=self.kappa,
            theta=self.theta,
            a_sig=self.a_sig,
            delta_f=self.delta_f,
            intermod=self.intermod,
            distinctness=self.distinctness,
            tuples=self.tuples,
            mixing_variance=self.mixing_variance
        )

    @property
    def iq_factor(self) -> float:
        return self.kappa ** 2 + 1 - 2 * self.kappa * math.cos(self.theta)

    @property
    def mixing_factor(self) -> float:
        return 1 + 2 * self.kappa * math.cos(self.theta) + self.kappa ** 2

    @classmethod
    def parse(cls, json: JSON, n_total: int = 1) -> 'ModulatorConfig':
        return ModulatorConfig(
            n_total=json.get('n_total', n_total),
            mu=json.get('mu', 0.01),
            kappa=json.get('kappa', 1.0),
            theta=json.get('theta', 0.0),
            a_sig=json.get('a_sig', 1.0),
            delta_f=json.get('delta_f', 1e6),
            intermod=json.get('intermod', True),
            distinctness=json.get('distinctness', None),
            tuples=json.get('tuples', None),
            mixing_variance=json.get('mixing_variance', None)
        )

    @property
    def serialize(self) -> Dict[str, Any]:
        return {
            'nTotal': self.n_total,
            'mu': self.mu,
            'kappa': self.kappa,
            'theta': self.theta,
            'aSig': self.a_sig,
            'deltaF': self.delta_f,
            'intermod': self.intermod,
            'distinctness': self.distinctness.value,
            'tuples': self.tuples.value,
            'mixingVariance': self.mixing_variance.value
        }

    def __repr__(self) -> str:
        return ('ModulatorConfig(n_total={!r}, mu={!r}, kappa={!r}, theta={!r}, intermod={!r}, '
                'mixing_variance={!r})').format(
            self.n_total, self.mu, self.kappa, self.theta, self.intermod, self.mixing_variance.value)


class NoiseBudget(NamedTuple):
    """Modulation noise on one subcarrier, in shot-noise units referred to the channel input."""
    k: int
    eps_iq: float
    eps_third_m: float
    eps_third_w: float
    eps_mod: float
    eps_single: Optional[float] = None
    eps_multi: Optional[float] = None
    eps_self: float = 0.0

    @property
    def serialize(self) -> Dict[str, Any]:
        return self._asdict()


def _coherent(cfg: ModulatorConfig, moments: Moments, v_a: float) -> Dict[str, np.ndarray]:
    n = cfg.n_total
    eps_iq = np.full(n, v_a / 4 * cfg.iq_factor)

    if cfg.intermod:
        c = {name: counts.astype(float) for name, counts in count_arrays(n, cfg.distinctness, cfg.tuples).items()}
        scale = v_a * cfg.mu ** 4 / 32 * cfg.mixing_factor
        s1_sq, s2_sq = moments.sigma1_sq, moments.sigma2_sq
        eps_third_m = scale * ((c['m1'] + c['m2']) ** 2 * s2_sq + 2 * (c['m1'] - c['m2']) ** 2 * s1_sq ** 2)
        eps_third_w = scale * 2 * (c['w1'] ** 2 + c['w2'] ** 2 + c['w3'] ** 2) * s1_sq ** 2
    else:
        eps_third_m = np.zeros(n)
        eps_third_w = np.zeros(n)

    return {
        'eps_iq': eps_iq,
        'eps_self': np.zeros(n),
        'eps_third_m': eps_third_m,
        'eps_third_w': eps_third_w
    }


def _independent(cfg: ModulatorConfig, moments: Moments, v_a: float) -> Dict[str, np.ndarray]:
    """
    Third-order noise with every distinct mixing product added in power.

    Products are counted once per index set under the pairwise rule, and the
    M-type products folded in from the image at -f_k are included. Products
    of distinct carriers are uncorrelated with each other and with the signal.
    The terms that carry z_k itself, z_k (2 sum_{m != k} |z_m|^2 + |z_k|^2),
    compress the subcarrier gain and are kept with the IQ error (eps_self).
    Every part is referred to the variance of the demodulated X_k, so that
    V_A is the quadrature variance actually transmitted. The 3m = k product
    is left out.
    """
    if moments.raw_fourth is None or moments.raw_sixth is None:
        raise ValueError('independent mixing variance needs the raw fourth and sixth quadrature moments')

    n, mu = cfg.n_total, cfg.mu
    s2, m4, m6 = moments.sigma1_sq, moments.raw_fourth, moments.raw_sixth
    a = (1 + cfg.kappa * math.cos(cfg.theta)) / 2
    b = cfg.kappa * math.sin(cfg.theta) / 2
    u = mu ** 2 / 8 if cfg.intermod else 0.0

    # E[R I_k^2] and E[R^2 I_k^2] for the compression factor R
    others = n - 1
    r_i2 = 4 * others * s2 ** 2 + m4 + s2 ** 2
    r2_i2 = (4 * s2 * (4 * others ** 2 * s2 ** 2 + 2 * others * (m4 - s2 ** 2))
             + 8 * others * s2 * (m4 + s2 ** 2) + m6 + 3 * m4 * s2)

    # per mu^2, with the error mu[(a - 1 - a u R) I_k + b (1 - u R) Q_k]
    iq = ((a - 1) ** 2 + b ** 2) * s2
    linear = ((a - 1) ** 2 * s2 - 2 * (a - 1) * a * u * r_i2 + a ** 2 * u ** 2 * r2_i2
              + b ** 2 * (s2 - 2 * u * r_i2 + u ** 2 * r2_i2))

    if cfg.intermod:
        c = count_arrays(n, DistinctnessRule.Pairwise, TupleCounting.Unordered)
        products_w = (c['w1'] + c['w2'] + c['w3']).astype(float)
        products_m = (c['m1'] + c['m2'] + image_counts(n)).astype(float)
        third_w = cfg.mixing_factor * mu ** 4 * s2 ** 3 * products_w / 16
        third_m = cfg.mixing_factor * mu ** 4 * s2 * (m4 + s2 ** 2) * products_m / 128
    else:
        third_w = np.zeros(n)
        third_m = np.zeros(n)

    total = linear + third_m + third_w
    signal = s2 + 2 * ((a - 1) * s2 - a * u * r_i2) + total
    scale = v_a / signal

    return {
        'eps_iq': scale * iq,
        'eps_self': scale * (linear - iq),
        'eps_third_m': scale * third_m,
        'eps_third_w': scale * third_w
    }


def noise_profile(cfg: ModulatorConfig, moments: Moments, v_a: float) -> Dict[str, np.ndarray]:
    """Noise budget components for every subcarrier k = 1..N."""
    if v_a <= 0:
        raise ValueError(f'modulation variance must be positive, not {v_a}')

    if cfg.mixing_variance == MixingVariance.Independent:
        parts = _independent(cfg, moments, v_a)
    else:
        parts = _coherent(cfg, moments, v_a)

    parts['k'] = np.arange(1, cfg.n_total + 1)
    parts['eps_mod'] = parts['eps_iq'] + parts['eps_self'] + parts['eps_third_m'] + parts['eps_third_w']
    return parts


def _budget(profile: Dict[str, np.ndarray], k: int) -> NoiseBudget:
    i = k - 1
    return NoiseBudget(
        k=k,
        eps_iq=float(profile['eps_iq'][i]),
        eps_third_m=float(profile['eps_third_m'][i]),
        eps_third_w=float(profile['eps_third_w'][i]),
        eps_mod=float(profile['eps_mod'][i]),
        eps_self=float(profile['eps_self'][i])
    )


def eps_mod(cfg: ModulatorConfig, k: int, moments: Moments, v_a: float) -> NoiseBudget:
    if not 1 <= k <= cfg.n_total:
        raise ValueError(f'subcarrier index k={k} is outside [1, {cfg.n_total}]')
    return _budget(noise_profile(cfg, moments, v_a), k)


def eps_mod_ratio(cfg: ModulatorConfig, k: int, moments: Moments) -> float:
    """Modulation noise over the squared field amplitude, independent of A_sig."""
    v_a_per_amplitude = 4 * cfg.mu ** 2 * moments.sigma1_sq
    return eps_mod(cfg, k, moments, v_a_per_amplitude).eps_mod


def eps_multi(budget: NoiseBudget, eps_single: float) -> NoiseBudget:
    if eps_single < 0:
        raise ValueError(f'single-carrier excess noise must not be negative, not {eps_single}')
    return budget._replace(eps_single=eps_single, eps_multi=budget.eps_mod + eps_single)


def worst_subcarrier(cfg: ModulatorConfig, moments: Moments, v_a: float) -> Tuple[int, NoiseBudget]:
    profile = noise_profile(cfg, moments, v_a)
    k_worst = int(np.argmax(profile['eps_mod'])) + 1
    return k_worst, _budget(profile, k_worst)
