import copy
import hashlib
import json
import logging
import math
from typing import Any, Dict, List, Optional

import yaml

from ofdmqkd.exceptions import ConfigError
from ofdmqkd.models.channel import ChannelDetector
from ofdmqkd.models.constellation import Constellation
from ofdmqkd.models.enums import (OutputFormat, Protocol, Study,
                                  TupleCounting)
from ofdmqkd.models.noise import ModulatorConfig
from ofdmqkd.utils.collections import merge, unknown_keys
from ofdmqkd.utils.format import custom_json_dumps

LOG = logging.getLogger('ofdmqkd.pipeline')

JSON = Dict[str, Any]

# Every key a study config may set. None means "use the protocol default".
DEFAULTS = {
    'protocol': {
        'name': 'qpsk',
        'levels': 16,
        'nu': 0.0,
        'clip_sigmas': 3.0,
        'fourth_moment': None,
        'v_a': None
    },
    'modulator': {
        'mu': 0.01,
        'kappa': 0.98,
        'theta': math.pi / 50,
        'a_sig': 1.0,
        'delta_f': 1e6,
        'tuples': 'ordered',
        'distinctness': 'strict',
        'mixing_variance': 'coherent',
        'intermod': True
    },
    'channel': {
        'eps_single': None,
        'alpha_db_per_km': None,
        'eta': None,
        'v_ele': None,
        'beta': 0.95,
        'detection': 'heterodyne',
        'trusted_detector': True,
        'distance': 25.0
    },
    'sweep': {
        'study': 'noise-vs-n',
        'n_values': None,
        'l_values_km': None,
        'mu_values': None,
        'exact_total': False,
        'seed': 0,
        'symbols': 100000,
        'samples_per_symbol': None
    },
    'output': {
        'path': None,
        'format': 'csv'
    }
}  # type: Dict[str, Dict[str, Any]]

# System values quoted for each protocol
PROTOCOL_DEFAULTS = {
    Protocol.QPSK: {'v_a': 0.45, 'eps_single': 0.007, 'eta': 0.56, 'v_ele': 0.15},
    Protocol.QAM: {'v_a': 5.0, 'eps_single': 0.03, 'eta': 0.56, 'v_ele': 0.15, 'nu': 0.04},
    Protocol.Gaussian: {'v_a': 5.0, 'eps_single': 0.03, 'eta': 0.56, 'v_ele': 0.1}
}

DEFAULT_L_VALUES = [5.0, 10.0, 25.0]
DEFAULT_MU_VALUES = [0.01, 0.02, 0.04, 0.06, 0.08, 0.1]


def expand_grid(value: Any, name: str) -> List[Any]:
    """Accept a list, a scalar or an inclusive {start, stop, step} range."""
    if isinstance(value, dict):
        extra = set(value) - {'start', 'stop', 'step'}
        if extra or 'start' not in value or 'stop' not in value:
            raise ConfigError(f'{name} range needs start and stop (and optionally step)', errors=sorted(extra))
        start, stop, step = value['start'], value['stop'], value.get('step', 1)
        if step <= 0:
            raise ConfigError(f'{name} range step must be positive, not {step}')
        values = []
        x = start
        while x <= stop + 1e-9 * abs(step):
            values.append(x)
            x = start + len(values) * step
        return values
    if isinstance(value, (list, tuple)):
        return list(value)
    return [value]


class SweepSpec:

    def __init__(self, document: JSON, settings: Dict[str, Any] = None) -> None:
        settings = settings or {}
        self.assumptions = []  # type: List[str]

        unknown = unknown_keys(DEFAULTS, document)
        if unknown:
            raise ConfigError('unknown keys in study config', errors=unknown)
        for section, body in document.items():
            if body is not None and not isinstance(body, dict):
                raise ConfigError(f"section '{section}' must be a mapping")

        resolved = copy.deepcopy(DEFAULTS)
        merge(resolved, {k: v for k, v in document.items() if v})
        protocol_section, modulator, channel = resolved['protocol'], resolved['modulator'], resolved['channel']
        sweep, output = resolved['sweep'], resolved['output']

        try:
            protocol = Protocol.from_name(protocol_section['name'])
            protocol_defaults = PROTOCOL_DEFAULTS[protocol]

            if protocol == Protocol.QAM and 'nu' not in (document.get('protocol') or {}):
                protocol_section['nu'] = protocol_defaults['nu']
            if protocol_section['v_a'] is None:
                protocol_section['v_a'] = protocol_defaults['v_a']
            if channel['eps_single'] is None:
                channel['eps_single'] = protocol_defaults['eps_single']
            if channel['eta'] is None and channel['v_ele'] is None and protocol == Protocol.QPSK:
                self.assumptions.append(
                    'QPSK detector efficiency and electronic noise default to the 256QAM system values '
                    f"(eta={protocol_defaults['eta']}, v_ele={protocol_defaults['v_ele']})"
                )
            if channel['eta'] is None:
                channel['eta'] = protocol_defaults['eta']
            if channel['v_ele'] is None:
                channel['v_ele'] = protocol_defaults['v_ele']
            if channel['alpha_db_per_km'] is None:
                channel['alpha_db_per_km'] = settings.get('DEFAULT_ALPHA_DB_PER_KM', 0.2)
                self.assumptions.append(f"fiber loss alpha={channel['alpha_db_per_km']} dB/km assumed")

            self.study = Study(sweep['study'])
            self.constellation = Constellation.parse(protocol_section)
            self.v_a = float(protocol_section['v_a'])
            self.modulator = ModulatorConfig.parse(modulator, n_total=1)
            self.eps_single = float(channel['eps_single'])
            self.channel = ChannelDetector.parse(channel)
            self.output_format = OutputFormat(output['format'])
        except ValueError as e:
            raise ConfigError(str(e))

        if self.v_a <= 0:
            raise ConfigError(f'modulation variance v_a must be positive, not {self.v_a}')
        if self.eps_single < 0:
            raise ConfigError(f'single-carrier excess noise must not be negative, not {self.eps_single}')

        max_carriers = settings.get('MAX_CARRIERS', 512)
        if sweep['n_values'] is None:
            if self.study == Study.OptimalN:
                sweep['n_values'] = {'start': 1, 'stop': max_carriers}
            else:
                sweep['n_values'] = [1, 10, 25, 40, 60]
        if sweep['l_values_km'] is None:
            sweep['l_values_km'] = [self.channel.distance_km] if self.study == Study.NoiseVsN else DEFAULT_L_VALUES
        if sweep['mu_values'] is None:
            sweep['mu_values'] = DEFAULT_MU_VALUES

        self.n_values = [int(n) for n in expand_grid(sweep['n_values'], 'n_values')]
        self.l_values_km = [float(x) for x in expand_grid(sweep['l_values_km'], 'l_values_km')]
        self.mu_values = [float(x) for x in expand_grid(sweep['mu_values'], 'mu_values')]
        if not self.n_values:
            raise ConfigError('n_values must not be empty')
        if any(n < 1 for n in self.n_values):
            raise ConfigError('every N in n_values must be at least 1')
        if not self.l_values_km:
            raise ConfigError('l_values_km must not be empty')
        if any(x < 0 for x in self.l_values_km):
            raise ConfigError('fiber lengths must not be negative')
        if not self.mu_values or any(not 0 < x <= 0.5 for x in self.mu_values):
            raise ConfigError('mu_values must be a non-empty list of modulation indices in (0, 0.5]')

        self.exact_total = bool(sweep['exact_total'])
        self.seed = int(sweep['seed'])
        self.symbols = int(sweep['symbols'])
        self.samples_per_symbol = sweep['samples_per_symbol']
        self.output_path = output['path']

        if self.constellation.protocol != Protocol.Gaussian:
            self.assumptions.append(
                f'{self.constellation.protocol.value} key rates use the Gaussian-modulation bound '
                '(gaussian-equivalent backend)'
            )
        self.assumptions.append('P-quadrature modulation noise taken equal to the X-quadrature noise')

        self.resolved = resolved

    @property
    def counting(self) -> TupleCounting:
        return self.modulator.tuples

    @property
    def run_id(self) -> str:
        digest = hashlib.sha1(custom_json_dumps(self.resolved).encode('utf-8')).hexdigest()
        return digest[:12]

    @classmethod
    def parse(cls, json: Optional[JSON], settings: Dict[str, Any] = None,
              overrides: Optional[JSON] = None) -> 'SweepSpec':
        """Build a spec; overrides (e.g. command-line options) are merged in before defaults resolve."""
        if json is None:
            json = {}
        if not isinstance(json, dict):
            raise ConfigError('study config must be a mapping of sections')
        if overrides:
            json = copy.deepcopy(json)
            merge(json, overrides)
        return SweepSpec(json, settings=settings)

    @classmethod
    def from_file(cls, path: str, settings: Dict[str, Any] = None, overrides: Optional[JSON] = None) -> 'SweepSpec':
        try:
            with open(path, encoding='utf-8') as f:
                document = yaml.safe_load(f)
        except OSError as e:
            raise ConfigError(f'could not read study config {path}', errors=[str(e)])
        except yaml.YAMLError as e:
            raise ConfigError(f'malformed study config {path}', errors=[str(e)])
        return cls.parse(document, settings=settings, overrides=overrides)

    @property
    def serialize(self) -> Dict[str, Any]:
        return json.loads(custom_json_dumps(self.resolved))

    def __repr__(self) -> str:
        return 'SweepSpec(study={!r}, protocol={!r}, n_values={}..{}, l_values_km={!r})'.format(
            self.study.value, self.constellation.protocol.value, self.n_values[0], self.n_values[-1], self.l_values_km)
