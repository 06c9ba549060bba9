from typing import Any, Dict, NamedTuple, Optional, Tuple, Union

import numpy as np

from ofdmqkd.models.enums import FourthMomentConvention, Protocol

JSON = Dict[str, Any]

DEFAULT_CONVENTION = {
    Protocol.QPSK: FourthMomentConvention.RawFourthMoment,
    Protocol.QAM: FourthMomentConvention.VarianceOfSquare,
    Protocol.Gaussian: FourthMomentConvention.VarianceOfSquare
}


def _default(value, default):
    return default if value is None else value


class Moments(NamedTuple):
    sigma1_sq: float
    sigma2_sq: float
    # raw E[I^4] and E[I^6], whatever the fourth moment convention
    raw_fourth: Optional[float] = None
    raw_sixth: Optional[float] = None


class Constellation:
    """
    Marginal distribution of one quadrature amplitude on a subcarrier.

    QPSK draws from {-1, +1}. QAM places `levels` equispaced odd points
    +-(2j-1)/(levels-1) on [-1, 1] with Maxwell-Boltzmann weights exp(-nu x^2).
    The Gaussian protocol scales a standard normal so that `clip_sigmas`
    standard deviations map to the unit amplitude.
    """

    def __init__(self, protocol: Union[Protocol, str], **kwargs) -> None:
        self.protocol = Protocol.from_name(protocol) if not isinstance(protocol, Protocol) else protocol
        self.levels = int(_default(kwargs.get('levels'), 16))
        self.nu = float(_default(kwargs.get('nu'), 0.0))
        self.clip_sigmas = float(_default(kwargs.get('clip_sigmas'), 3.0))

        fourth_moment = kwargs.get('fourth_moment', None)
        if fourth_moment is None:
            self.fourth_moment = DEFAULT_CONVENTION[self.protocol]
        else:
            try:
                self.fourth_moment = FourthMomentConvention(fourth_moment)
            except ValueError:
                raise ValueError(f"fourth moment convention must be one of {', '.join(FourthMomentConvention)}")

        if self.protocol == Protocol.QAM:
            if self.levels < 2 or self.levels % 2:
                raise ValueError('QAM levels per quadrature must be an even integer of at least 2')
            if self.nu < 0:
                raise ValueError(f'Maxwell-Boltzmann parameter nu must not be negative, not {self.nu}')
        if self.protocol == Protocol.Gaussian and self.clip_sigmas <= 0:
            raise ValueError(f'clip sigmas must be positive, not {self.clip_sigmas}')

    @property
    def sigma(self) -> float:
        """Standard deviation of the unclipped Gaussian amplitude."""
        return 1.0 / self.clip_sigmas

    def support(self) -> Optional[Tuple[np.ndarray, np.ndarray]]:
        """Amplitudes and probabilities of a discrete constellation, None for Gaussian."""
        if self.protocol == Protocol.QPSK:
            return np.array([-1.0, 1.0]), np.array([0.5, 0.5])
        if self.protocol == Protocol.QAM:
            half = (2 * np.arange(1, self.levels // 2 + 1) - 1) / (self.levels - 1)
            x = np.concatenate([-half[::-1], half])
            weights = np.exp(-self.nu * x ** 2)
            return x, weights / weights.sum()
        return None

    def moments(self) -> Moments:
        discrete = self.support()
        if discrete is not None:
            x, p = discrete
            second = float(np.dot(p, x ** 2))
            fourth = float(np.dot(p, x ** 4))
            sixth = float(np.dot(p, x ** 6))
        else:
            second = self.sigma ** 2
            fourth = 3 * self.sigma ** 4
            sixth = 15 * self.sigma ** 6

        if self.fourth_moment == FourthMomentConvention.VarianceOfSquare:
            return Moments(second, fourth - second ** 2, fourth, sixth)
        return Moments(second, fourth, fourth, sixth)

    def sample_quadrature(self, rng: np.random.Generator, size=None) -> Union[float, np.ndarray]:
        discrete = self.support()
        if discrete is not None:
            x, p = discrete
            return rng.choice(x, size=size, p=p)
        return np.clip(rng.normal(0.0, self.sigma, size=size), -1.0, 1.0)

    @classmethod
    def parse(cls, json: JSON) -> 'Constellation':
        return Constellation(
            protocol=json.get('name', 'qpsk'),
            levels=json.get('levels', None),
            nu=json.get('nu', None),
            clip_sigmas=json.get('clip_sigmas', None),
            fourth_moment=json.get('fourth_moment', None)
        )

    @property
    def serialize(self) -> Dict[str, Any]:
        data = {
            'name': self.protocol.value,
            'fourthMoment': self.fourth_moment.value
        }  # type: Dict[str, Any]
        if self.protocol == Protocol.QAM:
            data['levels'] = self.levels
            data['nu'] = self.nu
        if self.protocol == Protocol.Gaussian:
            data['clipSigmas'] = self.clip_sigmas
        return data

    def __repr__(self) -> str:
        return 'Constellation(protocol={!r}, levels={!r}, nu={!r}, clip_sigmas={!r}, fourth_moment={!r})'.format(
            self.protocol.value, self.levels, self.nu, self.clip_sigmas, self.fourth_moment.value)


def moments(c: Constellation) -> Moments:
    return c.moments()


def sample_quadrature(c: Constellation, rng: np.random.Generator, size=None) -> Union[float, np.ndarray]:
    return c.sample_quadrature(rng, size=size)
