"""
Waveform-level Monte Carlo check of the modulation noise model.

One OFDM symbol is synthesized at baseband from the IQ modulator transfer
function, every subcarrier is read back from the DFT grid, and the deviation
from the ideal quadrature 2 A_sig mu I_k is accumulated over many symbols.
"""
import csv
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.special import jv

from ofdmqkd.exceptions import OutputError
from ofdmqkd.models.constellation import Constellation
from ofdmqkd.models.noise import ModulatorConfig

LOG = logging.getLogger('ofdmqkd.oracle')

MIN_SYMBOLS = 1000
MIN_OVERSAMPLING = 4
DEFAULT_OVERSAMPLING = 8


class WaveformRun:

    def __init__(self, cfg: ModulatorConfig, constellation: Constellation, **kwargs) -> None:
        self.cfg = cfg
        self.constellation = constellation
        self.samples_per_symbol = int(kwargs.get('samples_per_symbol', None) or DEFAULT_OVERSAMPLING * cfg.n_total)
        self.n_symbols = int(kwargs.get('n_symbols', None) or 100000)
        self.rng_seed = int(kwargs.get('rng_seed', 0))
        self.bessel_truncation_order = int(kwargs.get('bessel_truncation_order', None) or 4)

        if self.samples_per_symbol < MIN_OVERSAMPLING * cfg.n_total:
            raise ValueError('samples per symbol must be at least {} x N = {}, not {}'.format(
                MIN_OVERSAMPLING, MIN_OVERSAMPLING * cfg.n_total, self.samples_per_symbol))
        if self.n_symbols < MIN_SYMBOLS:
            raise ValueError(f'at least {MIN_SYMBOLS} symbols are needed for a variance estimate, not {self.n_symbols}')
        if self.bessel_truncation_order < 1:
            raise ValueError('Bessel truncation order must be at least 1')

    @property
    def time_axis(self) -> np.ndarray:
        return np.arange(self.samples_per_symbol) / (self.samples_per_symbol * self.cfg.delta_f)

    def carrier_phases(self) -> np.ndarray:
        """2 pi f_k t on the sample grid, shape (N, samples)."""
        k = np.arange(1, self.cfg.n_total + 1)
        n = np.arange(self.samples_per_symbol)
        return 2 * np.pi * np.outer(k, n) / self.samples_per_symbol

    @property
    def imbalance(self) -> Tuple[complex, complex]:
        g1 = (1 + self.cfg.kappa * np.exp(1j * self.cfg.theta)) / 2
        g2 = (1 + self.cfg.kappa * np.exp(-1j * self.cfg.theta)) / 2
        return g1, g2

    @property
    def serialize(self) -> Dict[str, Any]:
        return {
            'modulator': self.cfg.serialize,
            'constellation': self.constellation.serialize,
            'samplesPerSymbol': self.samples_per_symbol,
            'nSymbols': self.n_symbols,
            'seed': self.rng_seed,
            'besselTruncationOrder': self.bessel_truncation_order
        }

    def __repr__(self) -> str:
        return ('WaveformRun(cfg={!r}, constellation={!r}, samples_per_symbol={!r}, '
                'n_symbols={!r}, rng_seed={!r})').format(
            self.cfg, self.constellation, self.samples_per_symbol, self.n_symbols, self.rng_seed)


class MeasuredNoise:

    def __init__(self, **kwargs) -> None:
        self.per_k_delta_var = np.asarray(kwargs['per_k_delta_var'])
        self.per_k_delta_var_p = np.asarray(kwargs['per_k_delta_var_p'])
        self.per_k_signal_var = np.asarray(kwargs['per_k_signal_var'])
        self.standard_errors = np.asarray(kwargs['standard_errors'])
        self.standard_errors_p = np.asarray(kwargs['standard_errors_p'])
        self.n_symbols = kwargs['n_symbols']

    def in_snu(self, v_a: float) -> np.ndarray:
        """Excess variance rescaled so the measured variance of X_k equals v_a."""
        return self.per_k_delta_var / self.per_k_signal_var * v_a

    def standard_errors_snu(self, v_a: float) -> np.ndarray:
        return self.standard_errors / self.per_k_signal_var * v_a

    @property
    def serialize(self) -> Dict[str, Any]:
        return {
            'deltaVar': self.per_k_delta_var,
            'deltaVarP': self.per_k_delta_var_p,
            'signalVar': self.per_k_signal_var,
            'standardErrors': self.standard_errors,
            'standardErrorsP': self.standard_errors_p,
            'nSymbols': self.n_symbols
        }

    def __repr__(self) -> str:
        return 'MeasuredNoise(n_carriers={!r}, n_symbols={!r})'.format(len(self.per_k_delta_var), self.n_symbols)


def _check_draws(run: WaveformRun, i_k: np.ndarray, q_k: np.ndarray) -> None:
    if i_k.shape != q_k.shape or i_k.shape[-1] != run.cfg.n_total:
        raise ValueError('expected {} quadrature draws per symbol, got I {} and Q {}'.format(
            run.cfg.n_total, i_k.shape, q_k.shape))


def synthesize_field(run: WaveformRun, i_k, q_k, phases: np.ndarray = None) -> np.ndarray:
    """
    Baseband field of the IQ modulator driven by one OFDM symbol.

    Accepts draws of shape (N,) or a batch of shape (symbols, N) and returns
    samples of shape (samples,) or (symbols, samples).
    """
    i_k, q_k = np.asarray(i_k, dtype=float), np.asarray(q_k, dtype=float)
    _check_draws(run, i_k, q_k)
    if phases is None:
        phases = run.carrier_phases()
    cos, sin = np.cos(phases), np.sin(phases)

    mu = run.cfg.mu
    i_s = i_k @ cos - q_k @ sin
    q_s = i_k @ sin + q_k @ cos
    g1, g2 = run.imbalance
    return 2 * run.cfg.a_sig * (g1 * np.sin(mu * i_s) + 1j * g2 * np.sin(mu * q_s))


def demodulate(field: np.ndarray, run: WaveformRun) -> Tuple[np.ndarray, np.ndarray]:
    """Quadratures (X_k, P_k) of every subcarrier, shape (..., N)."""
    field = np.asarray(field)
    if field.shape[-1] != run.samples_per_symbol:
        raise ValueError(f'field has {field.shape[-1]} samples, expected {run.samples_per_symbol}')
    spectrum = np.fft.fft(field, axis=-1) / run.samples_per_symbol
    k = np.arange(1, run.cfg.n_total + 1)
    # the image at -f_k carries the IQ imbalance mirror term
    combined = spectrum[..., k] + spectrum[..., run.samples_per_symbol - k]
    return combined.real, combined.imag


def demodulate_subcarrier(field: np.ndarray, run: WaveformRun, k: int) -> Tuple[float, float]:
    if not 1 <= k <= run.cfg.n_total:
        raise ValueError(f'subcarrier index k={k} is outside [1, {run.cfg.n_total}]')
    if 2 * k >= run.samples_per_symbol:
        raise ValueError(f'subcarrier {k} lies above the Nyquist frequency of {run.samples_per_symbol} samples')
    x, p = demodulate(field, run)
    return float(x[k - 1]), float(p[k - 1])


def _batch_sums(run: WaveformRun, seed: np.random.SeedSequence, size: int, phases: np.ndarray) -> np.ndarray:
    rng = np.random.default_rng(seed)
    n = run.cfg.n_total
    i_k = run.constellation.sample_quadrature(rng, size=(size, n))
    q_k = run.constellation.sample_quadrature(rng, size=(size, n))

    x, p = demodulate(synthesize_field(run, i_k, q_k, phases=phases), run)
    scale = 2 * run.cfg.a_sig * run.cfg.mu
    dx = (x - scale * i_k) ** 2
    dp = (p - scale * q_k) ** 2

    return np.stack([
        dx.sum(axis=0),
        (dx ** 2).sum(axis=0),
        dp.sum(axis=0),
        (dp ** 2).sum(axis=0),
        x.sum(axis=0),
        (x ** 2).sum(axis=0)
    ])


def measure_noise(run: WaveformRun, workers: int = 1, batch_size: int = 4096) -> MeasuredNoise:
    sizes = [batch_size] * (run.n_symbols // batch_size)
    if run.n_symbols % batch_size:
        sizes.append(run.n_symbols % batch_size)
    seeds = np.random.SeedSequence(run.rng_seed).spawn(len(sizes))
    phases = run.carrier_phases()

    LOG.info('Measuring modulation noise for N=%d, mu=%g over %d symbols in %d batches',
             run.cfg.n_total, run.cfg.mu, run.n_symbols, len(sizes))

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        batches = list(executor.map(lambda args: _batch_sums(run, args[0], args[1], phases), zip(seeds, sizes)))

    # fixed reduction order keeps results independent of scheduling
    totals = np.zeros_like(batches[0])
    for sums in batches:
        totals += sums

    n = run.n_symbols
    dx, dx_sq, dp, dp_sq, x_mean, x_sq = totals / n
    return MeasuredNoise(
        per_k_delta_var=dx,
        per_k_delta_var_p=dp,
        per_k_signal_var=x_sq - x_mean ** 2,
        standard_errors=np.sqrt(np.maximum(dx_sq - dx ** 2, 0.0) / n),
        standard_errors_p=np.sqrt(np.maximum(dp_sq - dp ** 2, 0.0) / n),
        n_symbols=n
    )


def bessel_terms(gamma: np.ndarray, truncation: int) -> Tuple[np.ndarray, np.ndarray]:
    """Orders p = -P..P and the table J_p(gamma_k), shape (2P + 1, N)."""
    if truncation < 1:
        raise ValueError(f'truncation order must be at least 1, not {truncation}')
    p = np.arange(-truncation, truncation + 1)
    return p, jv(p[:, None], np.asarray(gamma, dtype=float)[None, :])


def bessel_series_field(run: WaveformRun, i_k, q_k, truncation: Optional[int] = None) -> np.ndarray:
    """Field of one symbol from the truncated Jacobi-Anger expansion of both modulator arms."""
    i_k, q_k = np.asarray(i_k, dtype=float), np.asarray(q_k, dtype=float)
    _check_draws(run, i_k, q_k)
    if i_k.ndim != 1:
        raise ValueError('the series evaluator takes a single symbol')
    truncation = run.bessel_truncation_order if truncation is None else truncation

    gamma = run.cfg.mu * np.hypot(i_k, q_k)
    phi = np.arctan2(q_k, i_k)
    p, table = bessel_terms(gamma, truncation)

    psi = run.carrier_phases() + phi[:, None]
    harmonics = np.exp(1j * p[:, None, None] * psi[None, :, :])  # (2P + 1, N, samples)

    # exp(j g cos psi) = sum_p j^p J_p(g) e^{j p psi}; exp(j g sin psi) = sum_p J_p(g) e^{j p psi}
    cos_arm = np.prod(np.einsum('pk,pks->ks', (1j ** p)[:, None] * table, harmonics), axis=0)
    sin_arm = np.prod(np.einsum('pk,pks->ks', table, harmonics), axis=0)

    g1, g2 = run.imbalance
    return 2 * run.cfg.a_sig * (g1 * cos_arm.imag + 1j * g2 * sin_arm.imag)


def dump_symbol(run: WaveformRun, path: str) -> List[Dict[str, float]]:
    """Write the time series and spectrum of one seeded symbol as CSV."""
    rng = np.random.default_rng(run.rng_seed)
    n = run.cfg.n_total
    i_k = run.constellation.sample_quadrature(rng, size=n)
    q_k = run.constellation.sample_quadrature(rng, size=n)
    field = synthesize_field(run, i_k, q_k)
    spectrum = np.fft.fft(field) / run.samples_per_symbol

    rows = [
        {
            'sample': s,
            'time_s': float(t),
            'field_re': float(e.real),
            'field_im': float(e.imag),
            'frequency_hz': float(s * run.cfg.delta_f),
            'spectrum_re': float(c.real),
            'spectrum_im': float(c.imag)
        }
        for s, (t, e, c) in enumerate(zip(run.time_axis, field, spectrum))
    ]
    try:
        with open(path, 'w', newline='') as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        raise OutputError(f'could not write symbol dump to {path}', errors=[str(e)])
    return rows


def analytic_comparison(measured: MeasuredNoise, analytic: np.ndarray, v_a: float,
                        rel_tol: float = 0.1, n_se: float = 3.0) -> List[Dict[str, Any]]:
    """Per-k table of analytic vs measured noise with a pass flag."""
    snu = measured.in_snu(v_a)
    se = measured.standard_errors_snu(v_a)
    rows = []
    for k, (model, value, err) in enumerate(zip(analytic, snu, se), start=1):
        tolerance = max(rel_tol * abs(model), n_se * err)
        rows.append({
            'k': k,
            'eps_mod_analytic': float(model),
            'eps_mod_measured': float(value),
            'standard_error': float(err),
            'ratio': float(value / model) if model else None,
            'pass': bool(abs(value - model) <= tolerance)
        })
    return rows
