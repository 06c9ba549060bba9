import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from ofdmqkd.exceptions import NoOptimum, NoThresholdCrossing
from ofdmqkd.models.enums import Backend, Study
from ofdmqkd.models.noise import eps_multi, noise_profile, worst_subcarrier
from ofdmqkd.pipeline.sweep import SweepSpec
from ofdmqkd.security.keyrate import (backend_for, null_key_threshold,
                                      skr_protocol)

LOG = logging.getLogger('ofdmqkd.pipeline')

COLUMNS = {
    Study.RatioVsMu: ['protocol', 'N', 'mu', 'k', 'eps_mod_ratio'],
    Study.NoiseVsN: ['protocol', 'backend', 'N', 'L_km', 'k_worst', 'eps_iq', 'eps_self', 'eps_third_m',
                     'eps_third_w', 'eps_mod', 'eps_single', 'eps_multi', 'eps_threshold', 'r_kworst', 'positive_key'],
    Study.SkrVsDistance: ['protocol', 'backend', 'N', 'L_km', 'T', 'V_A', 'k_worst', 'eps_mod', 'eps_multi',
                          'i_ab', 'chi_be', 'r_kworst', 'r_total', 'r_total_exact'],
    Study.Gain: ['protocol', 'backend', 'N', 'L_km', 'k_worst', 'eps_multi', 'r_kworst', 'r_total',
                 'r_single', 'gain'],
    Study.OptimalN: ['protocol', 'backend', 'L_km', 'n_opt', 'r_total_opt', 'gain_opt', 'n_min', 'n_max']
}


class SweepResult:

    def __init__(self, study: Study, rows: List[Dict[str, Any]], **kwargs) -> None:
        self.study = study
        self.rows = rows
        self.columns = COLUMNS[study]
        self.backend = kwargs.get('backend', None)  # type: Optional[Backend]
        self.optimal_n_per_l = kwargs.get('optimal_n_per_l', None) or {}  # type: Dict[float, Optional[int]]
        self.null_key_n_per_l = kwargs.get('null_key_n_per_l', None) or {}  # type: Dict[float, Optional[int]]

    @property
    def serialize(self) -> Dict[str, Any]:
        return {
            'study': self.study.value,
            'backend': self.backend.value if self.backend else None,
            'columns': self.columns,
            'rows': self.rows,
            'optimalN': {repr(l): n for l, n in self.optimal_n_per_l.items()},
            'nullKeyN': {repr(l): n for l, n in self.null_key_n_per_l.items()}
        }

    def __repr__(self) -> str:
        return 'SweepResult(study={!r}, rows={!r})'.format(self.study.value, len(self.rows))


def _parallel(func: Callable, values: List[Any], workers: int) -> List[Any]:
    # executor.map yields in submission order
    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        return list(executor.map(func, values))


def _log_conventions(spec: SweepSpec) -> None:
    LOG.info('Intermod counting: %s tuples, %s distinctness, %s mixing variance',
             spec.modulator.tuples.value, spec.modulator.distinctness.value, spec.modulator.mixing_variance.value)
    if backend_for(spec.constellation) == Backend.GaussianEquivalent:
        LOG.warning('%s key rates use the gaussian-equivalent backend', spec.constellation.protocol.value)
    for assumption in spec.assumptions:
        LOG.info('Assumption: %s', assumption)


def _worst(spec: SweepSpec, n_total: int):
    cfg = spec.modulator.with_n(n_total)
    k_worst, budget = worst_subcarrier(cfg, spec.constellation.moments(), spec.v_a)
    return cfg, k_worst, eps_multi(budget, spec.eps_single)


def run_ratio_vs_mu(spec: SweepSpec, workers: int = 1) -> SweepResult:
    moments = spec.constellation.moments()

    def per_n(n_total):
        rows = []
        for mu in spec.mu_values:
            cfg = spec.modulator.with_n(n_total).with_mu(mu)
            profile = noise_profile(cfg, moments, 4 * mu ** 2 * moments.sigma1_sq)
            for k, ratio in zip(profile['k'], profile['eps_mod']):
                rows.append({
                    'protocol': spec.constellation.protocol.value,
                    'N': n_total,
                    'mu': mu,
                    'k': int(k),
                    'eps_mod_ratio': float(ratio)
                })
        return rows

    _log_conventions(spec)
    rows = [row for chunk in _parallel(per_n, spec.n_values, workers) for row in chunk]
    return SweepResult(Study.RatioVsMu, rows)


def run_noise_vs_n(spec: SweepSpec, workers: int = 1) -> SweepResult:
    backend = backend_for(spec.constellation)
    thresholds = {}  # type: Dict[float, Optional[float]]
    for distance in spec.l_values_km:
        try:
            thresholds[distance] = null_key_threshold(spec.v_a, spec.channel.with_distance(distance))
        except NoThresholdCrossing as e:
            LOG.warning(e.message)
            thresholds[distance] = None

    def per_n(n_total):
        _, k_worst, budget = _worst(spec, n_total)
        rows = []
        for distance in spec.l_values_km:
            ch = spec.channel.with_distance(distance)
            point = skr_protocol(spec.constellation, spec.v_a, budget.eps_multi, ch, k=k_worst)
            rows.append({
                'protocol': spec.constellation.protocol.value,
                'backend': backend.value,
                'N': n_total,
                'L_km': distance,
                'k_worst': k_worst,
                'eps_iq': budget.eps_iq,
                'eps_self': budget.eps_self,
                'eps_third_m': budget.eps_third_m,
                'eps_third_w': budget.eps_third_w,
                'eps_mod': budget.eps_mod,
                'eps_single': budget.eps_single,
                'eps_multi': budget.eps_multi,
                'eps_threshold': thresholds[distance],
                'r_kworst': point.r_k,
                'positive_key': point.r_k > 0
            })
        return rows

    _log_conventions(spec)
    rows = [row for chunk in _parallel(per_n, spec.n_values, workers) for row in chunk]
    return SweepResult(Study.NoiseVsN, rows, backend=backend, null_key_n_per_l=null_key_n_per_l(rows))


def null_key_n_per_l(rows: List[Dict[str, Any]]) -> Dict[float, Optional[int]]:
    """Smallest N on the grid with a zero worst-subcarrier key rate, per fiber length."""
    out = {}  # type: Dict[float, Optional[int]]
    for row in sorted(rows, key=lambda r: (r['L_km'], r['N'])):
        out.setdefault(row['L_km'], None)
        if out[row['L_km']] is None and not row['r_kworst'] > 0:
            out[row['L_km']] = row['N']
    return out


def _skr_rows(spec: SweepSpec, workers: int, exact: bool = False) -> List[Dict[str, Any]]:
    backend = backend_for(spec.constellation)
    moments = spec.constellation.moments()

    def per_n(n_total):
        cfg, k_worst, budget = _worst(spec, n_total)
        profile = noise_profile(cfg, moments, spec.v_a) if exact else None
        rows = []
        for distance in spec.l_values_km:
            ch = spec.channel.with_distance(distance)
            point = skr_protocol(spec.constellation, spec.v_a, budget.eps_multi, ch, k=k_worst)
            row = {
                'protocol': spec.constellation.protocol.value,
                'backend': point.backend.value,
                'N': n_total,
                'L_km': distance,
                'T': ch.transmittance,
                'V_A': spec.v_a,
                'k_worst': k_worst,
                'eps_mod': budget.eps_mod,
                'eps_multi': budget.eps_multi,
                'i_ab': point.i_ab,
                'chi_be': point.chi_be,
                'r_kworst': point.r_k,
                'r_total': n_total * point.r_k,
                'r_total_exact': None
            }
            if profile is not None:
                row['r_total_exact'] = float(sum(
                    skr_protocol(spec.constellation, spec.v_a, float(e) + spec.eps_single, ch, k=int(k)).r_k
                    for k, e in zip(profile['k'], profile['eps_mod'])
                ))
            rows.append(row)
        return rows

    LOG.debug('Key rate grid with %s backend for %d carrier counts', backend.value, len(spec.n_values))
    return [row for chunk in _parallel(per_n, spec.n_values, workers) for row in chunk]


def run_skr_vs_distance(spec: SweepSpec, workers: int = 1) -> SweepResult:
    _log_conventions(spec)
    rows = _skr_rows(spec, workers, exact=spec.exact_total)
    return SweepResult(Study.SkrVsDistance, rows, backend=backend_for(spec.constellation))


def single_carrier_rates(spec: SweepSpec) -> Dict[float, float]:
    """Key rate without modulation noise at each fiber length."""
    return {
        distance: skr_protocol(spec.constellation, spec.v_a, spec.eps_single, spec.channel.with_distance(distance)).r_k
        for distance in spec.l_values_km
    }


def run_gain(spec: SweepSpec, workers: int = 1) -> SweepResult:
    _log_conventions(spec)
    single = single_carrier_rates(spec)
    rows = []
    for row in _skr_rows(spec, workers):
        r_single = single[row['L_km']]
        rows.append({
            'protocol': row['protocol'],
            'backend': row['backend'],
            'N': row['N'],
            'L_km': row['L_km'],
            'k_worst': row['k_worst'],
            'eps_multi': row['eps_multi'],
            'r_kworst': row['r_kworst'],
            'r_total': row['r_total'],
            'r_single': r_single,
            'gain': row['r_total'] / r_single if r_single > 0 else None
        })
    for distance, r_single in single.items():
        if r_single <= 0:
            LOG.warning('Single-carrier key rate is zero at %s km, gain is undefined there', distance)
    return SweepResult(Study.Gain, rows, backend=backend_for(spec.constellation))


def optimize_n(spec: SweepSpec, workers: int = 1, gain: SweepResult = None) -> Dict[float, Optional[int]]:
    """Carrier count maximizing the total key rate at each fiber length, by exhaustive scan."""
    gain = gain or run_gain(spec, workers)
    optimum = {}  # type: Dict[float, Optional[int]]
    for distance in spec.l_values_km:
        rows = sorted((r for r in gain.rows if r['L_km'] == distance), key=lambda r: r['N'])
        rates = np.array([r['r_total'] for r in rows])
        if not np.any(rates > 0):
            LOG.warning('No carrier count in [%d, %d] gives a positive key rate at %s km',
                        spec.n_values[0], spec.n_values[-1], distance)
            optimum[distance] = None
            continue
        # argmax returns the first maximum, i.e. the smallest N on ties
        optimum[distance] = rows[int(np.argmax(rates))]['N']
    if all(n is None for n in optimum.values()):
        raise NoOptimum(f'key rate is zero for every carrier count at every fiber length {spec.l_values_km}')
    return optimum


def run_optimal_n(spec: SweepSpec, workers: int = 1) -> SweepResult:
    gain = run_gain(spec, workers)
    optimum = optimize_n(spec, workers, gain=gain)
    rows = []
    for distance, n_opt in optimum.items():
        best = next((r for r in gain.rows if r['L_km'] == distance and r['N'] == n_opt), None)
        rows.append({
            'protocol': spec.constellation.protocol.value,
            'backend': gain.backend.value,
            'L_km': distance,
            'n_opt': n_opt,
            'r_total_opt': best['r_total'] if best else None,
            'gain_opt': best['gain'] if best else None,
            'n_min': min(spec.n_values),
            'n_max': max(spec.n_values)
        })
        LOG.info('Optimal carrier number at %s km: %s', distance, n_opt)
    return SweepResult(Study.OptimalN, rows, backend=gain.backend, optimal_n_per_l=optimum)


STUDIES = {
    Study.RatioVsMu: run_ratio_vs_mu,
    Study.NoiseVsN: run_noise_vs_n,
    Study.SkrVsDistance: run_skr_vs_distance,
    Study.Gain: run_gain,
    Study.OptimalN: run_optimal_n
}


def run_study(spec: SweepSpec, workers: int = 1) -> SweepResult:
    LOG.info('Running %r', spec)
    return STUDIES[spec.study](spec, workers=workers)
