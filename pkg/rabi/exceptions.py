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

from typing import Optional


class RabiError(Exception):
    """
    Base exception for all errors raised by the rabi package
    """
    def __init__(self, msg: str, detail: Optional[str] = None) -> None:
        super().__init__(msg)
        self.msg = msg
        self.detail = detail

    def __str__(self) -> str:
        if self.detail:
            return f'{self.msg} ({self.detail})'
        return self.msg


class InvalidParameterError(RabiError, ValueError):
    pass


class AsymmetricMatrixError(RabiError, ValueError):
    pass


class EigensolverError(RabiError):
    pass


class DegenerateGroundStateError(EigensolverError):
    def __init__(self, gap: float) -> None:
        super().__init__('Ground state is degenerate', f'gap={gap:.3e}')
        self.gap = gap


class NotOrthogonalError(RabiError, ValueError):
    pass


class IllConditionedError(RabiError):
    def __init__(self, message: str, rcond: Optional[float] = None) -> None:
        super().__init__(message, None if rcond is None else f'rcond={rcond:.3e}')
        self.rcond = rcond


class PeakNotFoundError(RabiError):
    pass


class FitError(RabiError):
    pass


class CollapseError(RabiError):
    pass


class ConfigError(RabiError):
    def __init__(self, message: str, field: Optional[str] = None) -> None:
        super().__init__(message, None if field is None else f'field {field}')
        self.field = field


class ResultFormatError(RabiError):
    def __init__(self, message: str, path: str, line: Optional[int] = None) -> None:
        where = path if line is None else f'{path}:{line}'
        super().__init__(message, where)
        self.path = path
        self.line = line
