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

import unittest

import numpy as np

from rabi.eigensolve import diagonalize_full, ground_pair
from rabi.exceptions import InvalidParameterError
from rabi.hamiltonian import ModelParams, OperatorMatrix, Truncation, build_h1, build_hamiltonian, parity_sector
from rabi.susceptibility import (
    Method,
    NoiseSpectrum,
    SusceptibilityValue,
    chi_central_difference,
    chi_finite_difference,
    chi_resolvent,
    chi_richardson,
    chi_spectral,
    drive_variance,
    excitation_probability,
    fidelity,
    moment,
    noise_spectrum,
)
from rabi.truncation import converged_chi

CHI_F_300 = 75 / 90601
CHI_4_300 = 75 / 90601 ** 2


class TestUncoupled(unittest.TestCase):
    '''
    At g = 0 the drive couples |↓,0⟩ only to |↑,1⟩, weight η/4 at gap 1 + η.
    '''
    def setUp(self):
        self.trunc = Truncation(6)
        self.h = build_hamiltonian(ModelParams(300, 0), self.trunc)
        self.h1 = build_h1(300, self.trunc)
        self.decomp = diagonalize_full(self.h)

    def test_spectral(self):
        chi = chi_spectral(self.decomp, self.h1, 0, 6)
        self.assertAlmostEqual(chi.value / CHI_F_300, 1, places=12)
        self.assertEqual(chi.order, 2)
        self.assertEqual(chi.method, Method.SPECTRAL_SUM)
        self.assertEqual(chi.n_max, 6)
        chi = chi_spectral(self.decomp, self.h1, 1)
        self.assertAlmostEqual(chi.value / CHI_4_300, 1, places=12)
        self.assertEqual(chi.order, 4)
        self.assertEqual(chi.r, 1)

    def test_resolvent(self):
        e0, psi0 = ground_pair(self.h)
        for r, expected in ((0, CHI_F_300), (1, CHI_4_300)):
            chi = chi_resolvent(self.h, e0, psi0, self.h1, r)
            self.assertAlmostEqual(chi.value / expected, 1, places=12)
            self.assertEqual(chi.method, Method.RESOLVENT)

    def test_finite_difference(self):
        chi = chi_finite_difference(ModelParams(300, 0), 1e-4, self.trunc)
        self.assertAlmostEqual(chi.value / CHI_F_300, 1, places=5)
        self.assertEqual(chi.method, Method.FINITE_DIFFERENCE)

    def test_fidelity_expansion(self):
        f = fidelity(ModelParams(300, 0), 1e-3, self.trunc)
        self.assertAlmostEqual((1 - f) / (CHI_F_300 * 1e-6 / 2), 1, places=4)

    def test_identity_drive(self):
        chi = chi_spectral(self.decomp, OperatorMatrix(np.eye(self.h.dim)), 0)
        self.assertAlmostEqual(chi.value, 0, places=20)

    def test_single_line(self):
        spectrum = noise_spectrum(self.decomp, self.h1)
        self.assertEqual(len(spectrum.lines), 1)
        self.assertAlmostEqual(spectrum.lines[0].omega, 301, places=10)
        self.assertAlmostEqual(spectrum.lines[0].weight, 75, places=10)

    def test_variance(self):
        self.assertAlmostEqual(drive_variance(self.decomp.ground_state, self.h1), 75, places=10)


class TestCoupled(unittest.TestCase):
    def setUp(self):
        self.params = ModelParams(300, 0.9)
        self.trunc = Truncation(120)
        self.block = parity_sector(self.params, self.trunc)
        self.decomp = diagonalize_full(self.block.hamiltonian)

    def test_resolvent_matches_spectral(self):
        e0, psi0 = ground_pair(self.block.hamiltonian)
        for r in (0, 1, 2):
            spectral = chi_spectral(self.decomp, self.block.drive, r).value
            resolvent = chi_resolvent(self.block.hamiltonian, e0, psi0, self.block.drive, r).value
            self.assertAlmostEqual(resolvent / spectral, 1, places=8)

    def test_richardson_matches_spectral(self):
        spectral = chi_spectral(self.decomp, self.block.drive, 0).value
        chi = chi_richardson(self.params, 1e-4, self.trunc)
        self.assertAlmostEqual(chi.value / spectral, 1, places=6)

    def test_central_difference(self):
        spectral = chi_spectral(self.decomp, self.block.drive, 0).value
        chi = chi_central_difference(self.params, 1e-4, self.trunc)
        self.assertLess(abs(chi.value / spectral - 1), 1e-4)
        plus = chi_finite_difference(self.params, 1e-4, self.trunc).value
        minus = chi_finite_difference(self.params, -1e-4, self.trunc).value
        self.assertAlmostEqual(chi.value, (plus + minus) / 2, places=12)

    def test_mirror_coupling(self):
        mirrored = parity_sector(ModelParams(300, -0.9), self.trunc)
        decomp = diagonalize_full(mirrored.hamiltonian)
        for r in (0, 1):
            a = chi_spectral(self.decomp, self.block.drive, r).value
            b = chi_spectral(decomp, mirrored.drive, r).value
            self.assertAlmostEqual(b / a, 1, places=9)

    def test_sector_matches_full(self):
        full = build_hamiltonian(self.params, self.trunc)
        decomp = diagonalize_full(full)
        a = chi_spectral(decomp, build_h1(300, self.trunc), 0).value
        b = chi_spectral(self.decomp, self.block.drive, 0).value
        self.assertAlmostEqual(a / b, 1, places=9)

    def test_fidelity_symmetric(self):
        plus = chi_finite_difference(self.params, 1e-4, self.trunc).value
        minus = chi_finite_difference(self.params, -1e-4, self.trunc).value
        self.assertLess(abs(plus / minus - 1), 1e-2)

    def test_fidelity_range(self):
        f = fidelity(self.params, 1e-3, self.trunc)
        assert 0 < f <= 1

    def test_sum_rule(self):
        spectrum = noise_spectrum(self.decomp, self.block.drive)
        variance = drive_variance(self.decomp.ground_state, self.block.drive)
        self.assertAlmostEqual(spectrum.total_weight / variance, 1, places=8)

    def test_moments(self):
        spectrum = noise_spectrum(self.decomp, self.block.drive)
        for k in (2, 4):
            chi = chi_spectral(self.decomp, self.block.drive, k // 2 - 1).value
            self.assertAlmostEqual(moment(spectrum, k) / chi, 1, places=10)

    def test_ordering(self):
        spectrum = noise_spectrum(self.decomp, self.block.drive)
        chi_f = moment(spectrum, 2)
        chi_4 = moment(spectrum, 4)
        self.assertLessEqual(chi_4, chi_f / spectrum.omegas.min() ** 2 * (1 + 1e-12))
        self.assertGreaterEqual(chi_4 * (1 + 1e-12), chi_f / spectrum.omegas.max() ** 2)


class TestOracleGrid(unittest.TestCase):
    '''
    Richardson finite difference against the resolvent at the converged cutoff.
    '''
    def test_grid(self):
        for eta in (300, 500, 700):
            for g in (0.2, 0.6, 0.95):
                params = ModelParams(eta, g)
                result = converged_chi(params, 0)
                assert result.converged, (eta, g)
                chi = chi_richardson(params, 1e-4, Truncation(result.n_used))
                self.assertLess(abs(chi.value / result.value.value - 1), 1e-6, (eta, g))


class TestRandomCouplings(unittest.TestCase):
    def setUp(self):
        rng = np.random.default_rng(1234)
        self.samples = [(float(eta), float(g)) for eta, g in zip(rng.uniform(10, 700, 6), rng.uniform(-1.1, 1.1, 6))]
        self.trunc = Truncation(60)

    def sector(self, eta, g):
        block = parity_sector(ModelParams(eta, g), self.trunc)
        return diagonalize_full(block.hamiltonian), block.drive

    def test_positive(self):
        for eta, g in self.samples:
            decomp, drive = self.sector(eta, g)
            for r in (0, 1, 2):
                self.assertGreater(chi_spectral(decomp, drive, r).value, 0, (eta, g, r))

    def test_even_in_g(self):
        for eta, g in self.samples:
            a = chi_spectral(*self.sector(eta, g), 0).value
            b = chi_spectral(*self.sector(eta, -g), 0).value
            self.assertAlmostEqual(b / a, 1, places=9, msg=(eta, g))

    def test_sum_rule(self):
        for eta, g in self.samples:
            decomp, drive = self.sector(eta, g)
            spectrum = noise_spectrum(decomp, drive)
            variance = drive_variance(decomp.ground_state, drive)
            self.assertAlmostEqual(spectrum.total_weight / variance, 1, places=8, msg=(eta, g))

    def test_moments(self):
        for eta, g in self.samples:
            decomp, drive = self.sector(eta, g)
            spectrum = noise_spectrum(decomp, drive)
            for k in (2, 4):
                chi = chi_spectral(decomp, drive, k // 2 - 1).value
                self.assertAlmostEqual(moment(spectrum, k) / chi, 1, places=10, msg=(eta, g, k))

    def test_ordering(self):
        for eta, g in self.samples:
            spectrum = noise_spectrum(*self.sector(eta, g))
            chi_f = moment(spectrum, 2)
            chi_4 = moment(spectrum, 4)
            self.assertLessEqual(chi_4, chi_f / spectrum.omegas.min() ** 2 * (1 + 1e-12), (eta, g))
            self.assertGreaterEqual(chi_4 * (1 + 1e-12), chi_f / spectrum.omegas.max() ** 2, (eta, g))


class TestErrors(unittest.TestCase):
    def test_fidelity_no_shift(self):
        self.assertEqual(fidelity(ModelParams(300, 0.5), 0, Truncation(10)), 1.0)

    def test_zero_delta(self):
        with self.assertRaises(InvalidParameterError):
            chi_finite_difference(ModelParams(300, 0.5), 0, Truncation(10))

    def test_large_delta(self):
        with self.assertRaises(InvalidParameterError):
            chi_finite_difference(ModelParams(300, 0.9), 0.5, Truncation(80))

    def test_negative_order(self):
        decomp = diagonalize_full(build_hamiltonian(ModelParams(3, 0.5), Truncation(4)))
        with self.assertRaises(InvalidParameterError):
            chi_spectral(decomp, build_h1(3, Truncation(4)), -1)

    def test_moment_order(self):
        spectrum = NoiseSpectrum(())
        for k in (0, 1, 3, -2):
            with self.assertRaises(InvalidParameterError):
                moment(spectrum, k)

    def test_empty_spectrum(self):
        self.assertEqual(moment(NoiseSpectrum(()), 2), 0)


class TestExcitation(unittest.TestCase):
    def test_no_ramp(self):
        chi = SusceptibilityValue(4, CHI_4_300, Method.SPECTRAL_SUM, 10)
        self.assertEqual(excitation_probability(0, chi), 0)

    def test_value(self):
        chi = SusceptibilityValue(4, 9.1368e-9, Method.SPECTRAL_SUM, 10)
        self.assertAlmostEqual(excitation_probability(1e-3, chi, 1) / 9.1368e-15, 1, places=12)

    def test_clamped(self):
        chi = SusceptibilityValue(2, 1e8, Method.SPECTRAL_SUM, 10)
        with self.assertLogs(level='WARNING'):
            self.assertEqual(excitation_probability(0.01, chi), 1.0)

    def test_order_mismatch(self):
        chi = SusceptibilityValue(2, 1.0, Method.SPECTRAL_SUM, 10)
        with self.assertRaises(InvalidParameterError):
            excitation_probability(1e-3, chi, 1)
