from typing import Any, Dict, Union

from ofdmqkd.models.enums import Detection

JSON = Dict[str, Any]

DEFAULT_ALPHA_DB_PER_KM = 0.2


class ChannelDetector:

    def __init__(self, distance_km: float = 0.0, **kwargs) -> None:
        self.distance_km = float(distance_km)
        alpha = kwargs.get('alpha_db_per_km', None)
        self.alpha_db_per_km = float(DEFAULT_ALPHA_DB_PER_KM if alpha is None else alpha)
        self.eta = float(kwargs.get('eta', 1.0))
        self.v_ele = float(kwargs.get('v_ele', 0.0))
        self.beta = float(kwargs.get('beta', 0.95))
        self.detection = Detection(kwargs.get('detection', None) or Detection.HeterodyneNoSwitch)
        self.trusted_detector = bool(kwargs.get('trusted_detector', True))

        if self.distance_km < 0:
            raise ValueError(f'fiber length must not be negative, not {self.distance_km} km')
        if self.alpha_db_per_km < 0:
            raise ValueError(f'fiber loss must not be negative, not {self.alpha_db_per_km} dB/km')
        if not 0 < self.eta <= 1:
            raise ValueError(f'detector efficiency eta must be in (0, 1], not {self.eta}')
        if self.v_ele < 0:
            raise ValueError(f'electronic noise must not be negative, not {self.v_ele}')
        if not 0 <= self.beta <= 1:
            raise ValueError(f'reconciliation efficiency beta must be in [0, 1], not {self.beta}')

    @property
    def transmittance(self) -> float:
        return 10 ** (-self.alpha_db_per_km * self.distance_km / 10)

    def with_distance(self, distance_km: float) -> 'ChannelDetector':
        return self.replace(distance_km=distance_km)

    def replace(self, **kwargs) -> 'ChannelDetector':
        params = dict(
            distance_km=self.distance_km,
            alpha_db_per_km=self.alpha_db_per_km,
            eta=self.eta,
            v_ele=self.v_ele,
            beta=self.beta,
            detection=self.detection,
            trusted_detector=self.trusted_detector
        )
        params.update(kwargs)
        return ChannelDetector(**params)

    @classmethod
    def parse(cls, json: JSON, distance_km: Union[float, None] = None) -> 'ChannelDetector':
        return ChannelDetector(
            distance_km=json.get('distance', 0.0) if distance_km is None else distance_km,
            alpha_db_per_km=json.get('alpha_db_per_km', None),
            eta=json.get('eta', 1.0),
            v_ele=json.get('v_ele', 0.0),
            beta=json.get('beta', 0.95),
            detection=json.get('detection', None),
            trusted_detector=json.get('trusted_detector', True)
        )

    @property
    def serialize(self) -> Dict[str, Any]:
        return {
            'distanceKm': self.distance_km,
            'alphaDbPerKm': self.alpha_db_per_km,
            'transmittance': self.transmittance,
            'eta': self.eta,
            'vEle': self.v_ele,
            'beta': self.beta,
            'detection': self.detection.value,
            'trustedDetector': self.trusted_detector
        }

    def __repr__(self) -> str:
        return ('ChannelDetector(distance_km={!r}, alpha_db_per_km={!r}, eta={!r}, '
                'v_ele={!r}, beta={!r}, detection={!r})').format(
            self.distance_km, self.alpha_db_per_km, self.eta, self.v_ele, self.beta, self.detection.value)


def transmittance(ch: ChannelDetector) -> float:
    return ch.transmittance
