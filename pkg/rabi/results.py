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
CSV persistence of scan and analysis results.

Every file starts with a block of # lines: the schema version and the
echo of the run configuration. Floats are written with 17 significant
digits, so reading a file back gives the same values bit for bit.
'''

import logging
from pathlib import Path
import re
from typing import Any, Iterable, NamedTuple, Optional, Sequence, Type, TypeVar

import pandas as pd
from typedload import dataloader
from typedload.exceptions import TypedloadException

from .config import RunConfig, parse_config
from .exceptions import ConfigError, ResultFormatError
from .scaling import (
    CollapseResult,
    CurvePoint,
    DynamicalExponent,
    PeakEstimate,
    ScalingFit,
    SusceptibilityCurve,
)
from .susceptibility import NoiseSpectrum

__all__ = [
    'SCHEMA_VERSION',
    'CurveRow',
    'PeakRow',
    'FitRow',
    'CollapseRow',
    'ExponentRow',
    'ExcitationRow',
    'MasterRow',
    'SpectrumRow',
    'curve_filename',
    'write_curve',
    'read_curves',
    'write_peaks',
    'read_peaks',
    'write_fits',
    'read_fits',
    'write_collapse',
    'read_collapse',
    'write_master',
    'read_master',
    'write_exponents',
    'read_exponents',
    'write_excitation',
    'read_excitation',
    'write_spectrum',
    'read_spectrum',
]

T = TypeVar('T')

SCHEMA_VERSION = 1
FLOAT_FORMAT = '%.17g'

_SCHEMA_PREFIX = '# schema = '
_CONFIG_PREFIX = '# config: '
_PANDAS_LINE_RE = re.compile(r'line (\d+)')

_loader = dataloader.Loader(basiccast=True, failonextra=True)


class CurveRow(NamedTuple):
    eta: float
    r_order: int
    g: float
    chi: float
    n_fock: int
    converged: bool


class PeakRow(NamedTuple):
    eta: float
    r_order: int
    g_m: float
    chi_max: float


class FitRow(NamedTuple):
    r_order: int
    mu: float
    intercept: float
    stderr: float
    R2: float


class CollapseRow(NamedTuple):
    r_order: int
    nu: float
    objective: float


class ExponentRow(NamedTuple):
    name: str
    value: float
    stderr: float
    exact: float


class ExcitationRow(NamedTuple):
    eta: float
    r_order: int
    g: float
    b: float
    chi: float
    p_ex: float


class MasterRow(NamedTuple):
    x: float
    y: float


class SpectrumRow(NamedTuple):
    omega: float
    weight: float


def _columns(row_type: Type[Any]) -> list[str]:
    return list(row_type._fields)


def _header(kind: str, config: RunConfig) -> list[str]:
    lines = [f'{_SCHEMA_PREFIX}rabi-{kind}/{SCHEMA_VERSION}']
    lines += [_CONFIG_PREFIX + i for i in config.render()]
    return lines


def _write(path: Path, kind: str, config: RunConfig, row_type: Type[Any], rows: Iterable[NamedTuple]) -> Path:
    df = pd.DataFrame([tuple(i) for i in rows], columns=_columns(row_type))
    try:
        with open(path, 'w', encoding='utf8', newline='') as f:
            for line in _header(kind, config):
                f.write(line + '\n')
            df.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        raise ResultFormatError(f'Unable to write: {e.strerror}', str(path)) from e
    logging.info('Wrote %s (%d rows)', path, len(df))
    return path


def _read(path: Path, kind: str, row_type: Type[T]) -> tuple[list[T], RunConfig]:
    '''
    Read one result file, checking schema and columns.

    Returns the typed rows and the configuration recovered from the echo.
    '''
    try:
        with open(path, encoding='utf8') as f:
            header = []
            for line in f:
                if not line.startswith('#'):
                    break
                header.append(line.rstrip('\n'))
    except (FileNotFoundError, PermissionError, IsADirectoryError) as e:
        raise ResultFormatError('Unable to open the file', str(path)) from e

    expected = f'{_SCHEMA_PREFIX}rabi-{kind}/{SCHEMA_VERSION}'
    if not header or header[0] != expected:
        raise ResultFormatError(f'Missing or wrong schema line, expected {expected!r}', str(path), 1)
    try:
        config = parse_config(i[len(_CONFIG_PREFIX):] for i in header[1:] if i.startswith(_CONFIG_PREFIX))
    except ConfigError as e:
        raise ResultFormatError(f'Invalid configuration echo: {e}', str(path)) from e

    try:
        df = pd.read_csv(path, skiprows=len(header), float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        m = _PANDAS_LINE_RE.search(str(e))
        line = int(m.group(1)) + len(header) if m else None
        raise ResultFormatError(f'Malformed CSV: {e}', str(path), line) from e
    columns = _columns(row_type)
    if list(df.columns) != columns:
        raise ResultFormatError(f'Expected columns {",".join(columns)}', str(path), len(header) + 1)

    rows = []
    for i, record in enumerate(df.to_dict('records')):
        # header block, column names, then 1 based rows
        line = len(header) + 2 + i
        if any(pd.isna(v) for v in record.values()):
            raise ResultFormatError('Missing value', str(path), line)
        try:
            rows.append(_loader.load(record, row_type))
        except TypedloadException as e:
            raise ResultFormatError(f'Invalid row: {e}', str(path), line) from e
    return rows, config


def _one_config(configs: Sequence[RunConfig], where: Path) -> RunConfig:
    if any(i != configs[0] for i in configs[1:]):
        raise ResultFormatError('Files were produced with different configurations', str(where))
    return configs[0]


def curve_filename(eta: float, r_order: int) -> str:
    return f'curve_eta{eta:g}_order{r_order}.csv'


def write_curve(directory: Path, config: RunConfig, curve: SusceptibilityCurve) -> Path:
    rows = (CurveRow(curve.eta, curve.r_order, p.g, p.chi, p.n_used, p.converged) for p in curve.points)
    return _write(directory / curve_filename(curve.eta, curve.r_order), 'curve', config, CurveRow, rows)


def read_curves(directory: Path) -> tuple[list[SusceptibilityCurve], RunConfig]:
    '''
    All curve files of a directory, sorted by (order, eta).
    '''
    paths = sorted(directory.glob('curve_eta*_order*.csv'))
    if not paths:
        raise ResultFormatError('No curve files found', str(directory))
    curves = []
    configs = []
    for path in paths:
        rows, config = _read(path, 'curve', CurveRow)
        if not rows:
            raise ResultFormatError('Empty curve', str(path))
        if len({(i.eta, i.r_order) for i in rows}) != 1:
            raise ResultFormatError('A curve file must hold a single (eta, r_order)', str(path))
        if any(b.g <= a.g for a, b in zip(rows, rows[1:])):
            raise ResultFormatError('Rows are not sorted by g', str(path))
        configs.append(config)
        curves.append(SusceptibilityCurve(
            rows[0].eta,
            rows[0].r_order,
            tuple(CurvePoint(i.g, i.chi, i.n_fock, i.converged) for i in rows),
            config.grid,
        ))
    curves.sort(key=lambda c: (c.r_order, c.eta))
    return curves, _one_config(configs, directory)


def write_peaks(directory: Path, config: RunConfig, peaks: Iterable[PeakEstimate]) -> Path:
    rows = (PeakRow(p.eta, p.r_order, p.g_m, p.chi_max) for p in peaks)
    return _write(directory / 'peaks.csv', 'peaks', config, PeakRow, rows)


def read_peaks(directory: Path) -> list[PeakRow]:
    return _read(directory / 'peaks.csv', 'peaks', PeakRow)[0]


def write_fits(directory: Path, config: RunConfig, fits: Iterable[ScalingFit]) -> Path:
    rows = (FitRow(f.r_order, f.mu, f.intercept, f.stderr, f.r_squared) for f in fits)
    return _write(directory / 'fits.csv', 'fits', config, FitRow, rows)


def read_fits(directory: Path) -> list[FitRow]:
    return _read(directory / 'fits.csv', 'fits', FitRow)[0]


def write_collapse(directory: Path, config: RunConfig, results: Iterable[CollapseResult]) -> Path:
    rows = (CollapseRow(c.r_order, c.nu, c.objective) for c in results)
    return _write(directory / 'collapse.csv', 'collapse', config, CollapseRow, rows)


def read_collapse(directory: Path) -> list[CollapseRow]:
    return _read(directory / 'collapse.csv', 'collapse', CollapseRow)[0]


def master_filename(r_order: int) -> str:
    return f'master_order{r_order}.csv'


def write_master(directory: Path, config: RunConfig, result: CollapseResult) -> Path:
    rows = (MasterRow(x, y) for x, y in result.master)
    return _write(directory / master_filename(result.r_order), 'master', config, MasterRow, rows)


def read_master(directory: Path, r_order: int) -> list[MasterRow]:
    return _read(directory / master_filename(r_order), 'master', MasterRow)[0]


def write_exponents(
        directory: Path,
        config: RunConfig,
        fits: Iterable[ScalingFit],
        collapses: Iterable[CollapseResult],
        z: Optional[DynamicalExponent]) -> Path:
    '''
    Exponent summary, each value next to the exact one of the
    Rabi transition (ν = 3/2, z = 1/3, μ = 2/ν + 2zr).
    '''
    nu_exact = 1.5
    z_exact = 1 / 3
    rows = []
    for f in fits:
        r = (f.r_order - 2) // 2
        rows.append(ExponentRow(f'mu_{f.r_order}', f.mu, f.stderr, 2 / nu_exact + 2 * z_exact * r))
    for c in collapses:
        rows.append(ExponentRow(f'nu_{c.r_order}', c.nu, c.tol / 2, nu_exact))
    if z is not None:
        rows.append(ExponentRow('z', z.z, z.stderr, z_exact))
    return _write(directory / 'exponents.csv', 'exponents', config, ExponentRow, rows)


def read_exponents(directory: Path) -> list[ExponentRow]:
    return _read(directory / 'exponents.csv', 'exponents', ExponentRow)[0]


def write_excitation(directory: Path, config: RunConfig, rows: Iterable[ExcitationRow]) -> Path:
    return _write(directory / 'excitation.csv', 'excitation', config, ExcitationRow, rows)


def read_excitation(directory: Path) -> list[ExcitationRow]:
    return _read(directory / 'excitation.csv', 'excitation', ExcitationRow)[0]


def write_spectrum(path: Path, config: RunConfig, spectrum: NoiseSpectrum) -> Path:
    rows = (SpectrumRow(i.omega, i.weight) for i in spectrum.lines)
    return _write(path, 'spectrum', config, SpectrumRow, rows)


def read_spectrum(path: Path) -> list[SpectrumRow]:
    return _read(path, 'spectrum', SpectrumRow)[0]
