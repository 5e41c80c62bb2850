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

from pathlib import Path
from tempfile import TemporaryDirectory
import unittest

from rabi.config import RunConfig
from rabi.exceptions import ResultFormatError
from rabi.results import (
    ExponentRow,
    curve_filename,
    read_collapse,
    read_curves,
    read_exponents,
    read_fits,
    read_master,
    read_peaks,
    read_spectrum,
    write_collapse,
    write_curve,
    write_exponents,
    write_fits,
    write_master,
    write_peaks,
    write_spectrum,
)
from rabi.scaling import (
    CollapseResult,
    CurvePoint,
    DynamicalExponent,
    GridSpec,
    PeakEstimate,
    ScalingFit,
    SusceptibilityCurve,
)
from rabi.susceptibility import NoiseSpectrum, SpectralLine

CONFIG = RunConfig(eta_list=[300.0, 400.0], r_orders=[2], g_min=0.9, g_max=0.91, g_step=0.005)


def curve(eta: float, converged: bool = True) -> SusceptibilityCurve:
    points = (
        CurvePoint(0.9, 0.1 + 0.2, 96, True),
        CurvePoint(0.905, 1 / 3, 144, converged),
        CurvePoint(0.91, 2.0 ** 0.5 * eta, 216, True),
    )
    return SusceptibilityCurve(eta, 2, points, CONFIG.grid)


class TestCurves(unittest.TestCase):
    def test_round_trip(self):
        with TemporaryDirectory() as d:
            d = Path(d)
            written = [curve(400.0), curve(300.0, converged=False)]
            for c in written:
                write_curve(d, CONFIG, c)
            curves, config = read_curves(d)
        self.assertEqual(config, CONFIG)
        self.assertEqual(curves, sorted(written, key=lambda c: c.eta))
        assert not curves[0].converged
        self.assertEqual(curves[0].grid, GridSpec(0.9, 0.91, 0.005))

    def test_header(self):
        with TemporaryDirectory() as d:
            path = write_curve(Path(d), CONFIG, curve(300.0))
            lines = path.read_text('utf8').splitlines()
        self.assertEqual(path.name, curve_filename(300.0, 2))
        self.assertEqual(lines[0], '# schema = rabi-curve/1')
        for line in CONFIG.render():
            self.assertIn('# config: ' + line, lines)
        self.assertIn('eta,r_order,g,chi,n_fock,converged', lines)
        self.assertEqual(lines[-3], '300,2,0.90000000000000002,0.30000000000000004,96,True')

    def test_deterministic(self):
        with TemporaryDirectory() as d:
            a = write_curve(Path(d), CONFIG, curve(300.0)).read_bytes()
            b = write_curve(Path(d), CONFIG, curve(300.0)).read_bytes()
        self.assertEqual(a, b)

    def test_no_files(self):
        with TemporaryDirectory() as d:
            with self.assertRaises(ResultFormatError):
                read_curves(Path(d))

    def test_mixed_configs(self):
        with TemporaryDirectory() as d:
            write_curve(Path(d), CONFIG, curve(300.0))
            write_curve(Path(d), CONFIG.with_overrides(seed=1), curve(400.0))
            with self.assertRaises(ResultFormatError):
                read_curves(Path(d))


class TestCorrupt(unittest.TestCase):
    def corrupt(self, edit) -> ResultFormatError:
        with TemporaryDirectory() as d:
            path = write_curve(Path(d), CONFIG, curve(300.0))
            lines = path.read_text('utf8').splitlines()
            edit(lines)
            path.write_text('\n'.join(lines) + '\n', 'utf8')
            with self.assertRaises(ResultFormatError) as ctx:
                read_curves(Path(d))
        return ctx.exception

    def test_schema(self):
        def edit(lines):
            lines[0] = '# schema = rabi-curve/99'
        e = self.corrupt(edit)
        self.assertEqual(e.line, 1)

    def test_bad_value(self):
        def edit(lines):
            lines[-2] = lines[-2].replace('144', 'many')
        e = self.corrupt(edit)
        self.assertEqual(e.line, len(CONFIG.render()) + 4)
        self.assertIn(curve_filename(300.0, 2), str(e))

    def test_missing_value(self):
        def edit(lines):
            lines[-1] = '300,2,0.91,,216,True'
        e = self.corrupt(edit)
        self.assertEqual(e.line, len(CONFIG.render()) + 5)

    def test_columns(self):
        def edit(lines):
            i = lines.index('eta,r_order,g,chi,n_fock,converged')
            lines[i] = 'eta,order,g,chi,n_fock,converged'
        self.corrupt(edit)

    def test_unsorted(self):
        def edit(lines):
            lines[-1], lines[-2] = lines[-2], lines[-1]
        self.corrupt(edit)


class TestAnalysisFiles(unittest.TestCase):
    def test_round_trip(self):
        peaks = [PeakEstimate(300.0, 2, 0.98, 1234.5, 3), PeakEstimate(400.0, 2, 0.985, 1 / 7, 2)]
        fit = ScalingFit(2, 1.34, -0.1, 0.01, 0.999, ((1.0, 2.0),), (0.0,))
        collapse = CollapseResult(2, 1.49, 1e-5, ((300.0, 0.98, 1234.5),), ((-1.0, 0.5), (0.0, 1.0)), (1.0, 2.0), 1e-3)
        z = DynamicalExponent(0.34, 0.02)
        with TemporaryDirectory() as d:
            d = Path(d)
            write_peaks(d, CONFIG, peaks)
            write_fits(d, CONFIG, [fit])
            write_collapse(d, CONFIG, [collapse])
            write_master(d, CONFIG, collapse)
            write_exponents(d, CONFIG, [fit], [collapse], z)
            self.assertEqual([(i.eta, i.r_order, i.g_m, i.chi_max) for i in read_peaks(d)],
                             [(p.eta, p.r_order, p.g_m, p.chi_max) for p in peaks])
            self.assertEqual(tuple(read_fits(d)[0]), (2, 1.34, -0.1, 0.01, 0.999))
            self.assertEqual(tuple(read_collapse(d)[0]), (2, 1.49, 1e-5))
            self.assertEqual([tuple(i) for i in read_master(d, 2)], [(-1.0, 0.5), (0.0, 1.0)])
            exponents = {i.name: i for i in read_exponents(d)}
        self.assertEqual(exponents['mu_2'], ExponentRow('mu_2', 1.34, 0.01, 4 / 3))
        self.assertEqual(exponents['nu_2'].exact, 1.5)
        self.assertEqual(exponents['z'], ExponentRow('z', 0.34, 0.02, 1 / 3))

    def test_empty(self):
        with TemporaryDirectory() as d:
            write_fits(Path(d), CONFIG, [])
            self.assertEqual(read_fits(Path(d)), [])

    def test_spectrum(self):
        spectrum = NoiseSpectrum((SpectralLine(301.0, 75.0), SpectralLine(1 / 3, 1e-20)))
        with TemporaryDirectory() as d:
            path = write_spectrum(Path(d) / 'spectrum.csv', CONFIG, spectrum)
            rows = read_spectrum(path)
        self.assertEqual([tuple(i) for i in rows], [(301.0, 75.0), (1 / 3, 1e-20)])
