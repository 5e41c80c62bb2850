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
Run configuration.

The file format is flat text, one `key = value` per line. Lines
starting with # are comments, lists are comma separated and booleans
are true or false. Unknown or repeated keys are errors.
'''

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
import typing
from typing import Any, Iterable, NamedTuple, Optional

from typedload import dataloader
from typedload.exceptions import TypedloadException

from .exceptions import ConfigError
from .scaling import G_LIMITS, GridSpec
from .truncation import ConvergencePolicy

__all__ = [
    'ConfigEntry',
    'RunConfig',
    'config_entries',
    'parse_config',
    'load_config',
]

_BOOLEANS = {
    'true': True,
    'yes': True,
    'false': False,
    'no': False,
}


class ConfigEntry(NamedTuple):
    key: str
    value: str
    line: int


@dataclass(frozen=True)
class RunConfig:
    eta_list: list[float] = field(default_factory=lambda: [300.0, 400.0, 500.0, 600.0, 700.0])
    r_orders: list[int] = field(default_factory=lambda: [2, 4])
    g_min: float = 0.8
    g_max: float = 1.05
    g_step: float = 0.002
    n_start: int = 64
    growth: float = 1.5
    rel_tol: float = 1e-8
    n_cap: int = 4096
    nu_min: float = 1.0
    nu_max: float = 2.0
    nu_tol: float = 1e-3
    output_dir: Path = Path('results')
    plot: bool = False
    #: Unused by the numerics, kept in the echo for bookkeeping
    seed: int = 0
    workers: int = 4
    ramp_amplitudes: list[float] = field(default_factory=lambda: [0.001, 0.01])
    parity_sector: bool = True

    @property
    def policy(self) -> ConvergencePolicy:
        return ConvergencePolicy(self.n_start, self.growth, self.rel_tol, self.n_cap)

    @property
    def grid(self) -> GridSpec:
        return GridSpec(self.g_min, self.g_max, self.g_step)

    @property
    def r_values(self) -> list[int]:
        return [(i - 2) // 2 for i in self.r_orders]

    def verify(self) -> Optional[str]:
        '''
        Make sure that the configuration is correct.

        In that case return None. Otherwise an error string,
        starting with the name of the offending field.
        '''
        for f in fields(self):
            value = getattr(self, f.name)
            numbers = value if isinstance(value, list) else [value]
            if any(isinstance(i, float) and not math.isfinite(i) for i in numbers):
                return f'{f.name}: values must be finite'
        if not self.eta_list:
            return 'eta_list: at least one value is needed'
        if any(i <= 0 for i in self.eta_list):
            return 'eta_list: values must be positive'
        if len(set(self.eta_list)) != len(self.eta_list):
            return 'eta_list: values must be distinct'
        if not self.r_orders:
            return 'r_orders: at least one order is needed'
        if any(i < 2 or i % 2 for i in self.r_orders):
            return 'r_orders: orders must be even and at least 2'
        if len(set(self.r_orders)) != len(self.r_orders):
            return 'r_orders: orders must be distinct'
        if self.g_step <= 0:
            return 'g_step: must be positive'
        if not G_LIMITS[0] <= self.g_min < self.g_max <= G_LIMITS[1]:
            return f'g_min: need {G_LIMITS[0]} <= g_min < g_max <= {G_LIMITS[1]}'
        policy_error = self.policy.verify()
        if policy_error is not None:
            return f'policy: {policy_error}'
        if not 0 < self.nu_min < self.nu_max:
            return 'nu_min: need 0 < nu_min < nu_max'
        if not 0 < self.nu_tol < self.nu_max - self.nu_min:
            return 'nu_tol: must be positive and smaller than the search interval'
        if self.workers < 1:
            return 'workers: must be at least 1'
        if any(i < 0 for i in self.ramp_amplitudes):
            return 'ramp_amplitudes: values must be non negative'
        return None

    def render(self) -> list[str]:
        '''
        Canonical key = value lines, parsed back by parse_config.
        '''
        r = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, list):
                text = ','.join(repr(i) for i in value)
            elif isinstance(value, bool):
                text = 'true' if value else 'false'
            elif isinstance(value, Path):
                text = str(value)
            else:
                text = repr(value)
            r.append(f'{f.name} = {text}')
        return r

    def with_overrides(self, **kwargs: Any) -> 'RunConfig':
        return replace(self, **kwargs)


def config_entries(lines: Iterable[str]) -> Iterable[ConfigEntry]:
    '''
    Yields the key = value entries, skipping comments and blank lines.
    '''
    for lineno, line in enumerate(lines, 1):
        line = line.strip()
        if not line or line.startswith('#'):
            continue
        if '=' not in line:
            raise ConfigError(f'Line {lineno} is not a key = value pair: {line!r}')
        key, value = line.split('=', 1)
        yield ConfigEntry(key.strip(), value.strip(), lineno)


_loader = dataloader.Loader(basiccast=True, failonextra=True)
_hints = typing.get_type_hints(RunConfig)


def _convert(entry: ConfigEntry) -> Any:
    type_ = _hints[entry.key]
    if type_ is bool:
        try:
            return _BOOLEANS[entry.value.lower()]
        except KeyError:
            raise ConfigError(f'Line {entry.line}: {entry.value!r} is not a boolean', entry.key)
    if typing.get_origin(type_) is list:
        raw: Any = [i.strip() for i in entry.value.split(',') if i.strip()]
    else:
        raw = entry.value
    try:
        return _loader.load(raw, type_)
    except TypedloadException as e:
        raise ConfigError(f'Line {entry.line}: invalid value {entry.value!r}', entry.key) from e


def parse_config(lines: Iterable[str]) -> RunConfig:
    values: dict[str, Any] = {}
    for entry in config_entries(lines):
        if entry.key not in _hints:
            raise ConfigError(f'Line {entry.line}: unknown key', entry.key)
        if entry.key in values:
            raise ConfigError(f'Line {entry.line}: key given twice', entry.key)
        values[entry.key] = _convert(entry)
    config = RunConfig(**values)
    error = config.verify()
    if error is not None:
        raise ConfigError(error, error.split(':', 1)[0])
    return config


def load_config(path: Path) -> RunConfig:
    try:
        text = path.read_text('utf8')
    except IsADirectoryError:
        raise ConfigError(f'Not a file {path}')
    except (FileNotFoundError, PermissionError):
        raise ConfigError(f'Unable to open the config file {path}')
    return parse_config(text.splitlines())
