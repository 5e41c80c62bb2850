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
SVG figures of the scans and of the scaling analysis.
'''

import logging
from pathlib import Path
from typing import Sequence

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .results import (  # noqa: E402
    FitRow,
    MasterRow,
    PeakRow,
    read_collapse,
    read_curves,
    read_fits,
    read_master,
    read_peaks,
)
from .scaling import SusceptibilityCurve  # noqa: E402

__all__ = [
    'figure_names',
    'plot_curves',
    'plot_fit',
    'plot_collapse',
    'plot_directory',
]

# One entry per eta, in the order of the scan
STYLES = [
    ('black', '-'),
    ('tab:orange', '--'),
    ('m', ':'),
    ('tab:blue', '-.'),
    ('purple', (0, (3, 1))),
]

params = {
    'axes.labelsize': 11,
    'font.family': 'serif',
    'font.size': 9,
    'mathtext.fontset': 'stix',
    'legend.fontsize': 8,
    'figure.figsize': [4.5, 3.2],
    'lines.linewidth': 1.2,
    'lines.markersize': 5,
    'svg.hashsalt': 'rabi',
    'svg.fonttype': 'path',
}


def _symbol(r_order: int) -> str:
    return r'\chi_F' if r_order == 2 else rf'\chi_{{{r_order}}}'


def figure_names(r_order: int) -> tuple[str, str, str]:
    '''
    Curves, fit and collapse file names for one order.
    '''
    tag = 'f' if r_order == 2 else str(r_order)
    return f'chi_{tag}_curves.svg', f'mu_{tag}_fit.svg', f'chi_{tag}_collapse.svg'


def _save(fig, path: Path) -> Path:
    fig.tight_layout()
    fig.savefig(path, format='svg', metadata={'Date': None})
    plt.close(fig)
    logging.info('Wrote %s', path)
    return path


def plot_curves(curves: Sequence[SusceptibilityCurve], path: Path) -> Path:
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for i, curve in enumerate(curves):
            color, style = STYLES[i % len(STYLES)]
            g, chi = curve.usable()
            ax.plot(g, chi, color=color, linestyle=style, label=rf'$\eta={curve.eta:g}$')
        ax.set_xlabel(r'$g$')
        ax.set_ylabel(rf'${_symbol(curves[0].r_order)}$')
        ax.legend()
        return _save(fig, path)


def plot_fit(fit: FitRow, peaks: Sequence[PeakRow], path: Path) -> Path:
    x = np.log([p.eta for p in peaks])
    y = np.log([p.chi_max for p in peaks])
    line = np.linspace(x.min(), x.max(), 2)
    symbol = _symbol(fit.r_order)
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        ax.plot(x, y, 'o', markerfacecolor='none', color='tab:blue', label='numerical')
        ax.plot(line, fit.intercept + fit.mu * line, '-', color='tab:red',
                label=f'${fit.intercept:+.2f}{fit.mu:+.2f}x$')
        ax.text(0.05, 0.9, rf'$\mu={fit.mu:.2f}$', transform=ax.transAxes)
        ax.set_xlabel(r'$\ln\,\eta$')
        ax.set_ylabel(rf'$\ln\,{symbol}(g_m)$')
        ax.legend(loc='lower right')
        return _save(fig, path)


def plot_collapse(
        curves: Sequence[SusceptibilityCurve],
        peaks: Sequence[PeakRow],
        nu: float,
        master: Sequence[MasterRow],
        path: Path) -> Path:
    by_eta = {p.eta: p for p in peaks}
    symbol = _symbol(curves[0].r_order)
    with plt.rc_context(params):
        fig, ax = plt.subplots()
        for i, curve in enumerate(curves):
            color, style = STYLES[i % len(STYLES)]
            peak = by_eta[curve.eta]
            g, chi = curve.usable()
            ax.plot(curve.eta ** (1 / nu) * (g - peak.g_m), chi / peak.chi_max,
                    color=color, linestyle=style, label=rf'$\eta={curve.eta:g}$')
        if master:
            ax.plot([m.x for m in master], [m.y for m in master], color='0.6', linewidth=3,
                    alpha=0.5, zorder=0, label='master curve')
        ax.text(0.05, 0.9, rf'$\nu={nu:.2f}$', transform=ax.transAxes)
        ax.set_xlabel(r'$\eta^{1/\nu}(g-g_m)$')
        ax.set_ylabel(rf'${symbol}/{symbol}(g_m)$')
        ax.legend()
        return _save(fig, path)


def plot_directory(directory: Path) -> list[Path]:
    '''
    Three figures per susceptibility order, from the files written
    by the scan and the analysis.
    '''
    curves, _ = read_curves(directory)
    peaks = read_peaks(directory)
    fits = {f.r_order: f for f in read_fits(directory)}
    collapses = {c.r_order: c for c in read_collapse(directory)}

    written = []
    for r_order in sorted({c.r_order for c in curves}):
        family = [c for c in curves if c.r_order == r_order]
        family_peaks = [p for p in peaks if p.r_order == r_order]
        curves_name, fit_name, collapse_name = figure_names(r_order)
        written.append(plot_curves(family, directory / curves_name))
        if r_order in fits:
            written.append(plot_fit(fits[r_order], family_peaks, directory / fit_name))
        if r_order in collapses:
            master = read_master(directory, r_order)
            written.append(plot_collapse(family, family_peaks, collapses[r_order].nu,
                                         master, directory / collapse_name))
    return written
