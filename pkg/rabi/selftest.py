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

'''
Fast analytic and cross-pipeline checks, run by `rabi verify`.
'''

import itertools
import logging
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .eigensolve import diagonalize_full, ground_pair
from .exceptions import RabiError
from .hamiltonian import ModelParams, Truncation, build_hamiltonian, parity_operator, parity_sector
from .scaling import (
    CurvePoint,
    GridSpec,
    PeakEstimate,
    SusceptibilityCurve,
    collapse_objective,
    fit_adiabatic_dimension,
    optimize_collapse,
)
from .susceptibility import (
    chi_resolvent,
    chi_richardson,
    chi_spectral,
    drive_variance,
    moment,
    noise_spectrum,
)
from .truncation import converged_chi

__all__ = [
    'Check',
    'CHECKS',
    'analytic_chi',
    'synthetic_peaks',
    'synthetic_curves',
    'run_checks',
]


class Check(NamedTuple):
    name: str
    passed: bool
    detail: str


CHECKS: list[Callable[[], Check]] = []


def check(func: Callable[[], Check]) -> Callable[[], Check]:
    CHECKS.append(func)
    return func


def analytic_chi(eta: float, r: int) -> float:
    '''
    χ_{2r+2} at g = 0: a single term, weight η/4 and gap 1 + η.
    '''
    return eta / 4 / (1 + eta) ** (2 * r + 2)


def synthetic_peaks(etas: Sequence[float], mu: float, amplitude: float, r_order: int = 2) -> list[PeakEstimate]:
    return [PeakEstimate(eta, r_order, 1 - eta ** (-2 / 3), amplitude * eta ** mu, 0) for eta in etas]


def synthetic_curves(
        etas: Sequence[float],
        nu: float,
        grid: GridSpec = GridSpec(),
        width: float = 10.0) -> tuple[list[SusceptibilityCurve], list[PeakEstimate]]:
    '''
    Curves following χ = η^{2/ν}·f((g − g_m)η^{1/ν}) exactly,
    with f a Gaussian of the given width.
    '''
    g = grid.values()
    curves = []
    peaks = []
    for eta in etas:
        g_m = 1 - 0.5 * eta ** (-2 / 3)
        chi_max = eta ** (2 / nu)
        x = eta ** (1 / nu) * (g - g_m)
        chi = chi_max * np.exp(-0.5 * (x / width) ** 2)
        points = tuple(CurvePoint(float(a), float(b), 0, True) for a, b in zip(g, chi))
        curves.append(SusceptibilityCurve(eta, 2, points, grid))
        peaks.append(PeakEstimate(eta, 2, g_m, chi_max, 0))
    return curves, peaks


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


@check
def analytic_anchor() -> Check:
    worst = 0.0
    for eta in (300.0, 700.0):
        for r in (0, 1):
            value = converged_chi(ModelParams(eta, 0.0), r).value.value
            worst = max(worst, _rel(value, analytic_chi(eta, r)))
    return Check('analytic anchor at g=0', worst < 1e-10, f'max relative error {worst:.2e}')


@check
def pipeline_equivalence() -> Check:
    worst = 0.0
    for eta, g in itertools.product((300.0, 500.0, 700.0), (0.2, 0.6, 0.95)):
        params = ModelParams(eta, g)
        trunc = Truncation(converged_chi(params, 0).n_used)
        block = parity_sector(params, trunc)
        spectral = chi_spectral(diagonalize_full(block.hamiltonian), block.drive, 0).value
        e0, psi0 = ground_pair(block.hamiltonian)
        resolvent = chi_resolvent(block.hamiltonian, e0, psi0, block.drive, 0).value
        richardson = chi_richardson(params, 1e-4, trunc).value
        worst = max(worst, _rel(resolvent, spectral), _rel(richardson, spectral))
    return Check('spectral, resolvent and finite difference agree', worst < 1e-6,
                 f'max relative difference {worst:.2e}')


@check
def parity_symmetry() -> Check:
    trunc = Truncation(60)
    h = build_hamiltonian(ModelParams(300.0, 0.5), trunc).entries
    p = parity_operator(trunc).entries
    commutator = float(np.max(np.abs(h @ p - p @ h)))
    plus = diagonalize_full(build_hamiltonian(ModelParams(300.0, 0.5), trunc)).energies
    minus = diagonalize_full(build_hamiltonian(ModelParams(300.0, -0.5), trunc)).energies
    mirror = float(np.max(np.abs(plus - minus)))
    scale = float(np.max(np.abs(h)))
    ok = commutator <= 1e-12 * scale and mirror <= 1e-9 * scale
    return Check('parity and g -> -g symmetry', ok, f'[H,P]={commutator:.2e} spectrum shift={mirror:.2e}')


@check
def noise_spectrum_identities() -> Check:
    params = ModelParams(300.0, 0.9)
    block = parity_sector(params, Truncation(120))
    decomp = diagonalize_full(block.hamiltonian)
    spectrum = noise_spectrum(decomp, block.drive)
    variance = drive_variance(decomp.ground_state, block.drive)
    sum_rule = _rel(spectrum.total_weight, variance)
    chi_f = chi_spectral(decomp, block.drive, 0).value
    chi_4 = chi_spectral(decomp, block.drive, 1).value
    moments = max(_rel(moment(spectrum, 2), chi_f), _rel(moment(spectrum, 4), chi_4))
    gaps = spectrum.omegas
    margin = 1 + 1e-12
    ordering = chi_f / gaps.max() ** 2 <= chi_4 * margin and chi_4 <= margin * chi_f / gaps.min() ** 2
    ok = sum_rule < 1e-8 and moments < 1e-10 and ordering
    return Check('noise spectrum sum rule, moments and ordering', ok,
                 f'sum rule {sum_rule:.2e}, moments {moments:.2e}, ordering {ordering}')


@check
def power_law_recovery() -> Check:
    fit = fit_adiabatic_dimension(synthetic_peaks([300.0, 400.0, 500.0, 600.0, 700.0], 1.5, 2.0))
    error = abs(fit.mu - 1.5)
    return Check('power law slope recovery', error < 1e-10, f'mu={fit.mu!r}')


@check
def collapse_recovery() -> Check:
    etas = [300.0, 400.0, 500.0, 600.0, 700.0]
    details = []
    ok = True
    for width, tol in ((10.0, 0.01), (1.0, 0.02)):
        curves, peaks = synthetic_curves(etas, 1.5, width=width)
        result = optimize_collapse(curves, peaks)
        by_eta = {p.eta: p for p in peaks}
        nearby = min(collapse_objective(curves, by_eta, result.nu + i) for i in (-0.2, 0.2))
        ok = ok and abs(result.nu - 1.5) <= tol and nearby >= 2 * result.objective
        details.append(f'width={width:g} nu={result.nu:.4f} objective={result.objective:.2e} at nu±0.2={nearby:.2e}')
    return Check('collapse exponent recovery', ok, ', '.join(details))


def run_checks(checks: Sequence[Callable[[], Check]] = CHECKS) -> list[Check]:
    results = []
    for func in checks:
        try:
            result = func()
        except RabiError as e:
            result = Check(func.__name__, False, f'error: {e}')
        if result.passed:
            logging.info('PASS %s: %s', result.name, result.detail)
        else:
            logging.error('FAIL %s: %s', result.name, result.detail)
        results.append(result)
    return results
