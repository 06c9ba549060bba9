import logging
import math
import sys
from typing import Any, Dict, List

import click

from ofdmqkd.app import create_app
from ofdmqkd.exceptions import ConfigError, handle_error
from ofdmqkd.models.channel import ChannelDetector
from ofdmqkd.models.constellation import Constellation
from ofdmqkd.models.enums import (Detection, DistinctnessRule,
                                  FourthMomentConvention, MixingVariance,
                                  OutputFormat, Protocol, Study,
                                  TupleCounting)
from ofdmqkd.models.noise import ModulatorConfig, noise_profile
from ofdmqkd.oracle.waveform import (WaveformRun, analytic_comparison,
                                     dump_symbol, measure_noise)
from ofdmqkd.pipeline.output import to_csv, write_result
from ofdmqkd.pipeline.studies import run_study
from ofdmqkd.pipeline.sweep import PROTOCOL_DEFAULTS, SweepSpec
from ofdmqkd.security.keyrate import null_key_threshold, skr_protocol
from ofdmqkd.utils.logging import set_context
from ofdmqkd.version import __version__

LOG = logging.getLogger('ofdmqkd.commands')

PROTOCOLS = ['qpsk', '256qam', 'qam', 'gaussian']


def protocol_options(func):
    func = click.option('--fourth-moment', type=click.Choice([c.value for c in FourthMomentConvention]),
                        help='Fourth-moment convention (default depends on protocol)')(func)
    func = click.option('--clip-sigmas', type=float, help='Gaussian amplitude range in standard deviations')(func)
    func = click.option('--nu', type=float, help='Maxwell-Boltzmann shaping parameter for QAM')(func)
    func = click.option('--levels', type=int, help='QAM levels per quadrature')(func)
    func = click.option('--protocol', '-p', type=click.Choice(PROTOCOLS, case_sensitive=False), default='qpsk',
                        show_default=True, help='Modulation protocol')(func)
    return func


def modulator_options(func):
    func = click.option('--mixing-variance', type=click.Choice([v.value for v in MixingVariance]), default='coherent',
                        show_default=True, help='Add mixing products coherently or as independent powers')(func)
    func = click.option('--distinctness', type=click.Choice([r.value for r in DistinctnessRule]), default='strict',
                        show_default=True, help='Index distinctness rule for mixing products')(func)
    func = click.option('--tuples', type=click.Choice([t.value for t in TupleCounting]), default='ordered',
                        show_default=True, help='Count ordered or unordered index tuples')(func)
    func = click.option('--theta', type=float, default=math.pi / 50, show_default=True,
                        help='Quadrature skew in radians')(func)
    func = click.option('--kappa', type=float, default=0.98, show_default=True, help='Gain imbalance')(func)
    func = click.option('--mu', type=float, default=0.01, show_default=True, help='Modulation index')(func)
    func = click.option('--n', '-N', 'n_total', type=int, default=10, show_default=True,
                        help='Total carrier number')(func)
    return func


def _constellation(protocol, levels, nu, clip_sigmas, fourth_moment) -> Constellation:
    try:
        if Protocol.from_name(protocol) == Protocol.QAM and nu is None:
            nu = PROTOCOL_DEFAULTS[Protocol.QAM]['nu']
        return Constellation(protocol, levels=levels, nu=nu, clip_sigmas=clip_sigmas, fourth_moment=fourth_moment)
    except ValueError as e:
        raise ConfigError(str(e))


def _modulator(n_total, mu, kappa, theta, tuples, distinctness, mixing_variance, intermod=True) -> ModulatorConfig:
    try:
        return ModulatorConfig(n_total, mu, kappa=kappa, theta=theta, tuples=tuples, distinctness=distinctness,
                               mixing_variance=mixing_variance, intermod=intermod)
    except ValueError as e:
        raise ConfigError(str(e))


def _default(constellation: Constellation, key: str, value):
    return PROTOCOL_DEFAULTS[constellation.protocol][key] if value is None else value


@click.group()
@click.version_option(version=__version__)
@click.option('--debug', is_flag=True, help='Log at DEBUG level')
@click.pass_context
def cli(ctx, debug):
    """
    Modulation noise and key rate tool for OFDM multi-carrier CV-QKD.
    """
    config_override = {'DEBUG': True} if debug else {}
    try:
        ctx.obj = create_app(config_override)
    except RuntimeError as e:
        raise ConfigError(str(e))


@cli.command('moments', short_help='Print constellation moments')
@protocol_options
def moments(protocol, levels, nu, clip_sigmas, fourth_moment):
    """
    Print the quadrature moments sigma1^2 and sigma2^2 of a constellation.
    """
    c = _constellation(protocol, levels, nu, clip_sigmas, fourth_moment)
    m = c.moments()
    click.echo(f'protocol={c.protocol.value} fourth_moment={c.fourth_moment.value}')
    click.echo(f'sigma1_sq={m.sigma1_sq:.6g} sigma2_sq={m.sigma2_sq:.6g}')
    click.echo(f'raw_fourth={m.raw_fourth:.6g} raw_sixth={m.raw_sixth:.6g}')


@cli.command('noise', short_help='Print the per-subcarrier noise budget')
@protocol_options
@modulator_options
@click.option('--v-a', type=float, help='Modulation variance in SNU (default depends on protocol)')
@click.option('--eps-single', type=float, help='Single-carrier excess noise in SNU (default depends on protocol)')
@click.option('--ideal', is_flag=True, help='Drop the mixing products from the model')
def noise(protocol, levels, nu, clip_sigmas, fourth_moment, n_total, mu, kappa, theta, tuples, distinctness,
          mixing_variance, v_a, eps_single, ideal):
    """
    Print eps_mod(k) and its parts for every subcarrier as CSV.
    """
    c = _constellation(protocol, levels, nu, clip_sigmas, fourth_moment)
    cfg = _modulator(n_total, mu, kappa, theta, tuples, distinctness, mixing_variance, intermod=not ideal)
    v_a = _default(c, 'v_a', v_a)
    eps_single = _default(c, 'eps_single', eps_single)
    if v_a <= 0 or eps_single < 0:
        raise ConfigError('v_a must be positive and eps_single must not be negative')

    profile = noise_profile(cfg, c.moments(), v_a)
    k_worst = int(profile['eps_mod'].argmax()) + 1
    rows = []
    for i, k in enumerate(profile['k']):
        rows.append({
            'N': n_total,
            'k': int(k),
            'eps_iq': float(profile['eps_iq'][i]),
            'eps_self': float(profile['eps_self'][i]),
            'eps_third_m': float(profile['eps_third_m'][i]),
            'eps_third_w': float(profile['eps_third_w'][i]),
            'eps_mod': float(profile['eps_mod'][i]),
            'eps_multi': float(profile['eps_mod'][i]) + eps_single,
            'worst': int(k) == k_worst
        })
    click.echo(to_csv(list(rows[0]), rows), nl=False)


@cli.command('oracle', short_help='Compare the noise model with a waveform simulation')
@protocol_options
@modulator_options
@click.option('--symbols', type=int, default=100000, show_default=True, help='Monte Carlo symbols')
@click.option('--samples-per-symbol', type=int, help='Samples per OFDM symbol (default 8N)')
@click.option('--seed', type=int, default=0, show_default=True, help='Random seed')
@click.option('--dump', type=click.Path(dir_okay=False, writable=True), help='Write one symbol to this CSV file')
@click.pass_obj
def oracle(app, protocol, levels, nu, clip_sigmas, fourth_moment, n_total, mu, kappa, theta, tuples, distinctness,
           mixing_variance, symbols, samples_per_symbol, seed, dump):
    """
    Measure the modulation noise of every subcarrier by Monte Carlo and
    compare it with the analytic model.
    """
    c = _constellation(protocol, levels, nu, clip_sigmas, fourth_moment)
    cfg = _modulator(n_total, mu, kappa, theta, tuples, distinctness, mixing_variance)
    try:
        run = WaveformRun(cfg, c, samples_per_symbol=samples_per_symbol, n_symbols=symbols, rng_seed=seed)
    except ValueError as e:
        raise ConfigError(str(e))
    set_context(study='oracle', run_id=f'seed-{seed}')

    if dump:
        dump_symbol(run, dump)

    v_a = _default(c, 'v_a', None)
    measured = measure_noise(run, workers=app.config['WORKERS'], batch_size=app.config['ORACLE_BATCH_SIZE'])
    analytic = noise_profile(cfg, c.moments(), v_a)['eps_mod']
    rows = analytic_comparison(measured, analytic, v_a)
    click.echo(to_csv(list(rows[0]), rows), nl=False)


@cli.command('skr', short_help='Print the key rate of one subcarrier')
@protocol_options
@click.option('--v-a', type=float, help='Modulation variance in SNU (default depends on protocol)')
@click.option('--eps', type=float, help='Total excess noise in SNU (default: single-carrier value)')
@click.option('--distance', '-L', type=float, default=25.0, show_default=True, help='Fiber length in km')
@click.option('--alpha', type=float, help='Fiber loss in dB/km')
@click.option('--eta', type=float, help='Detector efficiency (default depends on protocol)')
@click.option('--v-ele', type=float, help='Electronic noise in SNU (default depends on protocol)')
@click.option('--beta', type=float, default=0.95, show_default=True, help='Reconciliation efficiency')
@click.option('--detection', type=click.Choice([d.value for d in Detection]), default='heterodyne', show_default=True)
@click.option('--untrusted', is_flag=True, help='Attribute detector noise to the eavesdropper')
@click.option('--threshold', is_flag=True, help='Also print the null key rate excess noise')
@click.pass_obj
def skr(app, protocol, levels, nu, clip_sigmas, fourth_moment, v_a, eps, distance, alpha, eta, v_ele, beta,
        detection, untrusted, threshold):
    """
    Print I(A:B), chi(B:E) and the secret key rate for one set of channel parameters.
    """
    c = _constellation(protocol, levels, nu, clip_sigmas, fourth_moment)
    v_a = _default(c, 'v_a', v_a)
    eps = _default(c, 'eps_single', eps)
    try:
        ch = ChannelDetector(
            distance_km=distance,
            alpha_db_per_km=app.config['DEFAULT_ALPHA_DB_PER_KM'] if alpha is None else alpha,
            eta=_default(c, 'eta', eta),
            v_ele=_default(c, 'v_ele', v_ele),
            beta=beta,
            detection=detection,
            trusted_detector=not untrusted
        )
        point = skr_protocol(c, v_a, eps, ch)
    except ValueError as e:
        raise ConfigError(str(e))

    click.echo(f'backend={point.backend.value} L_km={distance!r} T={ch.transmittance!r}')
    click.echo(f'i_ab={point.i_ab!r} chi_be={point.chi_be!r} r_k={point.r_k!r}')
    if threshold:
        click.echo(f'eps_threshold={null_key_threshold(v_a, ch)!r}')


def _run_config(app, config_file, output, fmt, study=None):
    overrides = {}  # type: Dict[str, Dict[str, Any]]
    if study:
        overrides['sweep'] = {'study': study.value}
    if fmt:
        overrides['output'] = {'format': fmt}
    spec = SweepSpec.from_file(config_file, settings=app.config, overrides=overrides)
    set_context(study=spec.study.value, run_id=spec.run_id)

    result = run_study(spec, workers=app.config['WORKERS'])
    text = write_result(spec, result, path=output, settings=app.config)
    if text is not None:
        click.echo(text, nl=False)
    return result


@cli.command('sweep', short_help='Run the study described by a config file')
@click.argument('config_file', type=click.Path(dir_okay=False))
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Output file (overrides the config)')
@click.option('--format', '-f', 'fmt', type=click.Choice([f.value for f in OutputFormat]), help='Output format')
@click.pass_obj
def sweep(app, config_file, output, fmt):
    """
    Run a noise, key rate or gain sweep and write CSV or JSON plus a run manifest.
    """
    _run_config(app, config_file, output, fmt)


@cli.command('optimize', short_help='Find the optimal carrier number per distance')
@click.argument('config_file', type=click.Path(dir_okay=False))
@click.option('--output', '-o', type=click.Path(dir_okay=False), help='Output file (overrides the config)')
@click.option('--format', '-f', 'fmt', type=click.Choice([f.value for f in OutputFormat]), help='Output format')
@click.pass_obj
def optimize(app, config_file, output, fmt):
    """
    Scan the carrier number grid of a config file and report the N that
    maximizes the total key rate at each fiber length.
    """
    result = _run_config(app, config_file, output, fmt, study=Study.OptimalN)
    for distance, n_opt in result.optimal_n_per_l.items():
        LOG.info('L=%s km: N*=%s', distance, n_opt)


def cli_main(argv: List[str] = None) -> int:
    try:
        cli.main(args=argv, prog_name='ofdmqkd', standalone_mode=False)
    except click.exceptions.Exit as e:
        return e.exit_code
    except click.Abort:
        click.echo('Aborted!', err=True)
        return 1
    except click.UsageError as e:
        e.show()
        return 2
    except Exception as e:
        return handle_error(e)
    return 0


def main() -> None:
    sys.exit(cli_main(sys.argv[1:]))
