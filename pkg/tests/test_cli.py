# rabi
# Copyright (C) 2026 The rabi developers
#
# rabi is free software: you can redistribute it and/or modify
# it under the terms of the GNU General Public License as published by
# the Free Software Foundation, either version 3 of the License, or
# (at your option) any later version.
#
# This program is distributed in the hope that it will be useful,
# but WITHOUT ANY WARRANTY; without even the implied warranty of
# MERCHANTABILITY or FITNESS FOR A PARTICULAR PURPOSE.  See the
# GNU General Public License for more details.
#
# You should have received a copy of the GNU General Public License
# along with this program.  If not, see <http://www.gnu.org/licenses/>.

import logging
from pathlib import Path
from tempfile import TemporaryDirectory
from unittest import IsolatedAsyncioTestCase, mock

from rabi.cli import EXIT_CONFIG, EXIT_NUMERICAL, EXIT_OK, Cli, environ_overrides
from rabi.config import RunConfig
from rabi.exceptions import CollapseError, ConfigError
from rabi.results import (
    read_collapse,
    read_curves,
    read_excitation,
    read_exponents,
    read_fits,
    read_peaks,
    read_spectrum,
)

SMALL = '''
# two curves only, so fit and collapse are skipped
eta_list = 300, 700
r_orders = 2
g_min = 0.95
g_max = 1.05
g_step = 0.01
workers = 2
plot = true
'''


class TestCli(IsolatedAsyncioTestCase):
    def setUp(self):
        self.tmp = TemporaryDirectory()
        self.dir = Path(self.tmp.name)
        self.env = mock.patch.dict('os.environ', {'RABI_OUTPUT_DIR': str(self.dir / 'out')})
        self.env.start()

    def tearDown(self):
        self.env.stop()
        self.tmp.cleanup()
        logging.root.handlers = []

    async def test_scan_analyze_plot(self):
        conf = self.dir / 'small.conf'
        conf.write_text(SMALL, 'utf8')
        out = self.dir / 'out'

        self.assertEqual(await Cli().main(['scan', '--config', str(conf)]), EXIT_OK)
        curves, config = read_curves(out)
        self.assertEqual(len(curves), 2)
        self.assertEqual(config.output_dir, out)
        assert all(c.converged for c in curves)

        self.assertEqual(await Cli().main(['analyze', '--in', str(out)]), EXIT_OK)
        peaks = read_peaks(out)
        self.assertEqual([p.eta for p in peaks], [300, 700])
        # the peak approaches g = 1 from above
        assert peaks[0].g_m > peaks[1].g_m > 1
        assert abs(peaks[0].g_m - 1) > abs(peaks[1].g_m - 1)
        assert peaks[0].chi_max < peaks[1].chi_max
        self.assertEqual(read_exponents(out), [])
        assert (out / 'excitation.csv').exists()
        assert (out / 'chi_f_curves.svg').exists()

    async def test_partial_analysis(self):
        conf = self.dir / 'three.conf'
        conf.write_text(SMALL.replace('300, 700', '300, 500, 700'), 'utf8')
        out = self.dir / 'out'
        self.assertEqual(await Cli().main(['scan', '--config', str(conf)]), EXIT_OK)

        with mock.patch('rabi.pipeline.optimize_collapse', side_effect=CollapseError('No minimum')):
            code = await Cli().main(['analyze', '--in', str(out)])
        self.assertEqual(code, EXIT_NUMERICAL)
        self.assertEqual(len(read_peaks(out)), 3)
        self.assertEqual([f.r_order for f in read_fits(out)], [2])
        self.assertEqual(read_collapse(out), [])
        assert (out / 'exponents.csv').exists()
        assert (out / 'excitation.csv').exists()
        assert (out / 'chi_f_curves.svg').exists()

    async def test_peak_outside_window(self):
        conf = self.dir / 'below.conf'
        conf.write_text('eta_list = 300, 500, 700\nr_orders = 2\ng_min = 0.95\ng_max = 1.0\ng_step = 0.01\n', 'utf8')
        out = self.dir / 'out'
        self.assertEqual(await Cli().main(['scan', '--config', str(conf)]), EXIT_OK)
        self.assertEqual(await Cli().main(['analyze', '--in', str(out)]), EXIT_NUMERICAL)
        self.assertEqual(read_peaks(out), [])
        self.assertEqual(read_fits(out), [])
        self.assertEqual(len(read_excitation(out)), 6)

    async def test_non_finite_config(self):
        conf = self.dir / 'nan.conf'
        conf.write_text('eta_list = nan\n', 'utf8')
        self.assertEqual(await Cli().main(['scan', '--config', str(conf)]), EXIT_CONFIG)

    async def test_missing_config(self):
        code = await Cli().main(['scan', '--config', str(self.dir / 'nope.conf')])
        self.assertEqual(code, EXIT_CONFIG)

    async def test_invalid_config(self):
        conf = self.dir / 'bad.conf'
        conf.write_text('g_step = -1\n', 'utf8')
        self.assertEqual(await Cli().main(['scan', '--config', str(conf)]), EXIT_CONFIG)

    async def test_analyze_empty(self):
        self.assertEqual(await Cli().main(['analyze', '--in', str(self.dir)]), EXIT_CONFIG)

    async def test_not_converged(self):
        conf = self.dir / 'tight.conf'
        conf.write_text('eta_list = 300\nr_orders = 2\ng_min = 0.9\ng_max = 0.92\ng_step = 0.01\n'
                        'n_start = 8\nn_cap = 8\n', 'utf8')
        self.assertEqual(await Cli().main(['scan', '--config', str(conf)]), EXIT_NUMERICAL)
        curves, _ = read_curves(self.dir / 'out')
        assert not curves[0].converged

    async def test_spectrum(self):
        path = self.dir / 'spectrum.csv'
        code = await Cli().main(['spectrum', '--eta', '300', '--g', '0', '--n-max', '4', '--out', str(path)])
        self.assertEqual(code, EXIT_OK)
        rows = read_spectrum(path)
        self.assertEqual(len(rows), 1)
        self.assertAlmostEqual(rows[0].omega, 301, places=10)
        self.assertAlmostEqual(rows[0].weight, 75, places=10)


class TestEnviron(IsolatedAsyncioTestCase):
    async def test_workers(self):
        with mock.patch.dict('os.environ', {'RABI_WORKERS': '7'}):
            self.assertEqual(environ_overrides(RunConfig()).workers, 7)

    async def test_bad_workers(self):
        with mock.patch.dict('os.environ', {'RABI_WORKERS': 'lots'}):
            with self.assertRaises(ConfigError):
                environ_overrides(RunConfig())

    async def test_nothing(self):
        with mock.patch.dict('os.environ', {}, clear=True):
            self.assertEqual(environ_overrides(RunConfig()), RunConfig())
