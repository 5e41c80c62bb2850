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
Truncated quantum Rabi Hamiltonian.

Energies are in units of the cavity frequency. The product basis
(spin ⊗ Fock) is ordered as k = 2n + s, where n is the photon number
and s = 0 (spin down) or s = 1 (spin up). Every module that looks at
eigenvector components relies on this ordering.

    H = a†a + (η/2)σz − (g√η/2)(a + a†)σx = H0 + g·H1
'''

from dataclasses import dataclass
import math
from typing import NamedTuple

import numpy as np

from .exceptions import InvalidParameterError

__all__ = [
    'ModelParams',
    'Truncation',
    'OperatorMatrix',
    'SectorBlock',
    'build_h0',
    'build_h1',
    'build_hamiltonian',
    'parity_operator',
    'parity_sector',
]


def _check_eta(eta: float) -> None:
    if not math.isfinite(eta) or eta <= 0:
        raise InvalidParameterError('eta must be a positive number', f'eta={eta}')


class ModelParams(NamedTuple):
    """
    A point in parameter space.

    eta is Ω/ω0, g is 2λ/√(Ωω0). Negative g is accepted, physical
    scans only use g >= 0.
    """
    eta: float
    g: float

    def verify(self) -> None:
        _check_eta(self.eta)
        if not math.isfinite(self.g):
            raise InvalidParameterError('g must be finite', f'g={self.g}')

    def shifted(self, delta_g: float) -> 'ModelParams':
        return ModelParams(self.eta, self.g + delta_g)


class Truncation(NamedTuple):
    """
    Fock space cutoff: photon numbers 0..n_max.
    """
    n_max: int

    @property
    def dim(self) -> int:
        return 2 * (self.n_max + 1)

    def verify(self) -> None:
        if isinstance(self.n_max, bool) or not isinstance(self.n_max, (int, np.integer)) or self.n_max < 0:
            raise InvalidParameterError('n_max must be a non negative integer', f'n_max={self.n_max!r}')

    def photon_numbers(self) -> np.ndarray:
        return np.arange(self.dim) // 2

    def spins(self) -> np.ndarray:
        return np.arange(self.dim) % 2


@dataclass(frozen=True)
class OperatorMatrix:
    """
    A dense real symmetric operator. The array is made read only.
    """
    entries: np.ndarray

    def __post_init__(self) -> None:
        entries = np.array(self.entries, dtype=np.float64)
        if entries.ndim != 2 or entries.shape[0] != entries.shape[1]:
            raise InvalidParameterError('Operator matrix must be square', f'shape={entries.shape}')
        entries.setflags(write=False)
        object.__setattr__(self, 'entries', entries)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def max_abs(self) -> float:
        if self.dim == 0:
            return 0.0
        return float(np.max(np.abs(self.entries)))

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.entries, self.entries.T))

    def restrict(self, indices: np.ndarray) -> 'OperatorMatrix':
        return OperatorMatrix(self.entries[np.ix_(indices, indices)])


class SectorBlock(NamedTuple):
    """
    H and H1 restricted to one parity sector.

    indices maps block rows back to the full basis.
    """
    hamiltonian: OperatorMatrix
    drive: OperatorMatrix
    indices: np.ndarray

    def embed(self, vector: np.ndarray, dim: int) -> np.ndarray:
        full = np.zeros(dim)
        full[self.indices] = vector
        return full


def build_h0(eta: float, trunc: Truncation) -> OperatorMatrix:
    '''
    H0 = a†a + (η/2)σz, diagonal in the product basis.
    '''
    _check_eta(eta)
    trunc.verify()
    sz = 2 * trunc.spins() - 1
    return OperatorMatrix(np.diag(trunc.photon_numbers() + 0.5 * eta * sz))


def build_h1(eta: float, trunc: Truncation) -> OperatorMatrix:
    '''
    H1 = −(√η/2)(a + a†)σx.

    The only nonzero elements couple (s, n) with (1 − s, n + 1) and
    are −(√η/2)√(n + 1).
    '''
    _check_eta(eta)
    trunc.verify()
    m = np.zeros((trunc.dim, trunc.dim))
    n = np.arange(trunc.n_max)
    amplitude = -0.5 * math.sqrt(eta) * np.sqrt(n + 1.0)
    for s in (0, 1):
        rows = 2 * n + s
        cols = 2 * (n + 1) + (1 - s)
        m[rows, cols] = amplitude
        m[cols, rows] = amplitude
    return OperatorMatrix(m)


def build_hamiltonian(params: ModelParams, trunc: Truncation) -> OperatorMatrix:
    '''
    H = H0 + g·H1.

    H0 and H1 have disjoint sparsity patterns, so every entry is a
    single term and the decomposition is exact.
    '''
    params.verify()
    h0 = build_h0(params.eta, trunc)
    h1 = build_h1(params.eta, trunc)
    return OperatorMatrix(h0.entries + params.g * h1.entries)


def parity_operator(trunc: Truncation) -> OperatorMatrix:
    '''
    Π = σz·(−1)^(a†a). Both H0 and H1 commute with it.
    '''
    trunc.verify()
    return OperatorMatrix(np.diag(_parities(trunc).astype(np.float64)))


def _parities(trunc: Truncation) -> np.ndarray:
    return (2 * trunc.spins() - 1) * (1 - 2 * (trunc.photon_numbers() % 2))


def parity_sector(params: ModelParams, trunc: Truncation, sign: int = -1) -> SectorBlock:
    '''
    Restrict H and H1 to the sector where Π = sign.

    The ground state lives in the Π = −1 sector for every g (it is
    |↓,0⟩ at g = 0 and the ground level never crosses). Inside the
    sector the states (↓,0), (↑,1), (↓,2), ... are consecutive, so
    the block of H is tridiagonal.
    '''
    if sign not in (-1, 1):
        raise InvalidParameterError('Parity sign must be +1 or -1', f'sign={sign}')
    indices = np.flatnonzero(_parities(trunc) == sign)
    h = build_hamiltonian(params, trunc)
    h1 = build_h1(params.eta, trunc)
    return SectorBlock(h.restrict(indices), h1.restrict(indices), indices)
