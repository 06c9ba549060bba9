import json
import os
import tempfile
import unittest

from click.testing import CliRunner

from ofdmqkd.commands import cli, cli_main
from ofdmqkd.version import __version__
from tests.helpers.utils import write_study

STUDY = """
protocol:
  name: qpsk
sweep:
  study: gain
  n_values: [1, 10, 40]
  l_values_km: [5, 25]
"""


class CommandsTestCase(unittest.TestCase):

    def setUp(self):
        self.runner = CliRunner()
        self.tmp = tempfile.TemporaryDirectory()
        self.study = write_study(self.tmp.name, STUDY)

    def tearDown(self):
        self.tmp.cleanup()

    def test_version(self):

        result = self.runner.invoke(cli, ['--version'])
        self.assertEqual(result.exit_code, 0)
        self.assertIn(__version__, result.output)

    def test_moments_cmd(self):

        result = self.runner.invoke(cli, ['moments', '--protocol', 'gaussian'])
        self.assertEqual(result.exit_code, 0)
        self.assertIn('sigma1_sq=0.111111 sigma2_sq=0.0246914', result.output)

        result = self.runner.invoke(cli, ['moments', '--protocol', '256qam', '--nu', '0'])
        self.assertEqual(result.exit_code, 0)
        self.assertIn('sigma1_sq=0.377778', result.output)

    def test_noise_cmd(self):

        result = self.runner.invoke(cli, ['noise', '--protocol', 'qpsk', '-N', '10', '--mu', '0.01'])
        self.assertEqual(result.exit_code, 0)
        lines = result.output.strip().splitlines()
        self.assertEqual(lines[0], 'N,k,eps_iq,eps_self,eps_third_m,eps_third_w,eps_mod,eps_multi,worst')
        self.assertEqual(len(lines), 11)
        self.assertEqual(sum(line.endswith(',true') for line in lines[1:]), 1)

    def test_oracle_cmd(self):

        result = self.runner.invoke(cli, ['oracle', '-N', '4', '--mu', '0.01', '--symbols', '4000', '--seed', '3'])
        self.assertEqual(result.exit_code, 0, result.output)
        lines = result.output.strip().splitlines()
        self.assertEqual(lines[0], 'k,eps_mod_analytic,eps_mod_measured,standard_error,ratio,pass')
        self.assertEqual(len(lines), 5)

        result = self.runner.invoke(cli, ['oracle', '-N', '4', '--mu', '0.05', '--symbols', '4000', '--seed', '3',
                                          '--mixing-variance', 'independent'])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertEqual(len(result.output.strip().splitlines()), 5)

        result = self.runner.invoke(cli, ['noise', '-N', '4', '--mixing-variance', 'partial'])
        self.assertEqual(result.exit_code, 2)

    def test_skr_cmd(self):

        result = self.runner.invoke(cli, ['skr', '--protocol', '256qam', '--distance', '25', '--threshold'])
        self.assertEqual(result.exit_code, 0, result.output)
        self.assertIn('backend=gaussian-equivalent', result.output)
        self.assertIn('eps_threshold=', result.output)

    def test_sweep_cmd(self):

        output = os.path.join(self.tmp.name, 'gain.csv')
        result = self.runner.invoke(cli, ['sweep', self.study, '--output', output])
        self.assertEqual(result.exit_code, 0, result.output)

        with open(output, newline='') as f:
            self.assertEqual(len(f.read().splitlines()), 1 + 3 * 2)
        with open(output + '.manifest.json') as f:
            self.assertEqual(json.load(f)['study'], 'gain')

    def test_optimize_cmd(self):

        output = os.path.join(self.tmp.name, 'optimal.json')
        result = self.runner.invoke(cli, ['optimize', self.study, '--format', 'json', '-o', output])
        self.assertEqual(result.exit_code, 0, result.output)
        with open(output) as f:
            data = json.load(f)
        self.assertEqual(data['study'], 'optimal-n')
        self.assertEqual(set(data['optimalN']), {'5.0', '25.0'})

        with open(output + '.manifest.json') as f:
            manifest = json.load(f)
        self.assertEqual(manifest['study'], 'optimal-n')
        self.assertEqual(manifest['config']['sweep']['study'], 'optimal-n')
        self.assertEqual(manifest['config']['output']['format'], 'json')
        self.assertEqual(manifest['config']['sweep']['n_values'], [1, 10, 40])


class ExitCodeTestCase(unittest.TestCase):

    def test_ok(self):

        self.assertEqual(cli_main(['moments']), 0)

    def test_config_error(self):

        with tempfile.TemporaryDirectory() as tmp:
            path = write_study(tmp, 'modulator:\n  mu: 0.01\n  kapa: 0.98\n', name='bad.yaml')
            self.assertEqual(cli_main(['sweep', path]), 2)

        self.assertEqual(cli_main(['noise', '--mu', '0.9']), 2)
        self.assertEqual(cli_main(['sweep', '/nonexistent/study.yaml']), 2)
        self.assertEqual(cli_main(['moments', '--protocol', 'ofdm']), 2)

    def test_numeric_error(self):

        with tempfile.TemporaryDirectory() as tmp:
            path = write_study(tmp, 'protocol:\n  name: gaussian\nchannel:\n  eps_single: 0.5\n'
                               'sweep:\n  study: optimal-n\n  n_values: [1, 2]\n  l_values_km: [150]\n',
                               name='dark.yaml')
            self.assertEqual(cli_main(['sweep', path]), 3)

    def test_output_error(self):

        with tempfile.TemporaryDirectory() as tmp:
            path = write_study(tmp, STUDY)
            self.assertEqual(cli_main(['sweep', path, '--output', '/nonexistent/dir/out.csv']), 4)
