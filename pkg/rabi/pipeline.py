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
The scan and analysis stages, independent of files and of the
command line.
'''

import logging
from typing import NamedTuple, Optional, Sequence

from .config import RunConfig
from .exceptions import CollapseError, FitError, PeakNotFoundError
from .hamiltonian import ModelParams
from .results import ExcitationRow
from .scaling import (
    CollapseResult,
    DynamicalExponent,
    PeakEstimate,
    ScalingFit,
    SusceptibilityCurve,
    chi_evaluator,
    derive_dynamical_exponent,
    find_peak,
    fit_adiabatic_dimension,
    optimize_collapse,
    scan_curve,
)
from .susceptibility import excitation_probability
from .truncation import converged_chi

__all__ = [
    'G_CRITICAL',
    'Analysis',
    'scan_all',
    'analyze',
]

#: Critical coupling of the η → ∞ limit
G_CRITICAL = 1.0


class Analysis(NamedTuple):
    peaks: list[PeakEstimate]
    fits: list[ScalingFit]
    collapses: list[CollapseResult]
    z: Optional[DynamicalExponent]
    excitation: list[ExcitationRow]
    failures: list[str]


async def scan_all(config: RunConfig) -> list[SusceptibilityCurve]:
    '''
    One curve per (order, eta), sorted that way.
    '''
    grid = config.grid
    g_values = grid.values()
    curves = []
    for r in config.r_values:
        for eta in config.eta_list:
            curves.append(await scan_curve(
                eta, r, g_values, config.policy,
                workers=config.workers,
                parity_reduce=config.parity_sector,
                grid=grid,
            ))
    return curves


def _excitation(config: RunConfig, r: int) -> list[ExcitationRow]:
    rows = []
    for eta in config.eta_list:
        result = converged_chi(ModelParams(eta, G_CRITICAL), r, config.policy,
                               parity_reduce=config.parity_sector)
        if not result.converged:
            logging.warning('chi_%d at the critical point is not converged for eta=%g',
                            result.value.order, eta)
        for b in config.ramp_amplitudes:
            p_ex = excitation_probability(b, result.value, r)
            rows.append(ExcitationRow(eta, result.value.order, G_CRITICAL, b, result.value.value, p_ex))
    return rows


def _pick_nu(collapses: Sequence[CollapseResult], r_order: int) -> Optional[float]:
    by_order = {c.r_order: c.nu for c in collapses}
    if 2 in by_order:
        return by_order[2]
    return by_order.get(r_order)


def _order_analysis(
        family: Sequence[SusceptibilityCurve],
        config: RunConfig,
        r_order: int,
        analysis: Analysis) -> None:
    r = (r_order - 2) // 2
    family_peaks = []
    for c in family:
        try:
            family_peaks.append(find_peak(c, chi_evaluator(c.eta, r, config.policy, config.parity_sector)))
        except PeakNotFoundError as e:
            logging.error('Order %d eta=%g: %s', r_order, c.eta, e)
            analysis.failures.append(f'peak order={r_order} eta={c.eta:g}: {e}')
    analysis.peaks.extend(family_peaks)

    found = {p.eta for p in family_peaks}
    family = [c for c in family if c.eta in found]
    if len(family) < 3:
        logging.warning('Only %d curves of order %d with a peak, skipping fit and collapse', len(family), r_order)
        return
    try:
        analysis.fits.append(fit_adiabatic_dimension(family_peaks))
    except FitError as e:
        logging.error('Order %d: %s', r_order, e)
        analysis.failures.append(f'fit order={r_order}: {e}')
    try:
        analysis.collapses.append(optimize_collapse(
            family, family_peaks,
            nu_min=config.nu_min, nu_max=config.nu_max, tol=config.nu_tol,
        ))
    except CollapseError as e:
        logging.error('Order %d: %s', r_order, e)
        analysis.failures.append(f'collapse order={r_order}: {e}')


def analyze(curves: Sequence[SusceptibilityCurve], config: RunConfig) -> Analysis:
    '''
    Peaks, μ fits, collapses and z for every order in the curves.

    Orders with fewer than 3 peaks get peaks only. A peak, fit or
    collapse that fails is logged and listed in failures, and the
    rest of the analysis goes on.
    '''
    analysis = Analysis([], [], [], None, [], [])

    for r_order in sorted({c.r_order for c in curves}):
        family = sorted((c for c in curves if c.r_order == r_order), key=lambda c: c.eta)
        _order_analysis(family, config, r_order, analysis)
        analysis.excitation.extend(_excitation(config, (r_order - 2) // 2))

    higher = [f for f in analysis.fits if f.r_order >= 4]
    if higher:
        fit = min(higher, key=lambda f: f.r_order)
        nu = _pick_nu(analysis.collapses, fit.r_order)
        if nu is not None:
            z = derive_dynamical_exponent(fit, nu)
            logging.info('z=%.4f ± %.4f from order %d and nu=%.4f', z.z, z.stderr, fit.r_order, nu)
            analysis = analysis._replace(z=z)
    return analysis
