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
Eigenpairs of real symmetric operators.

Two paths are provided: the full decomposition, needed for spectral
sums, and the ground pair with deflated linear solves, which is what
the truncation scans use.
'''

import logging
import re
from typing import NamedTuple
import warnings

import numpy as np
from numpy.linalg import LinAlgError
import scipy.linalg
from scipy.linalg import LinAlgWarning

from .exceptions import (
    AsymmetricMatrixError,
    DegenerateGroundStateError,
    EigensolverError,
    IllConditionedError,
    NotOrthogonalError,
)
from .hamiltonian import OperatorMatrix

__all__ = [
    'DEGENERACY_THRESHOLD',
    'SpectralDecomposition',
    'GroundPair',
    'diagonalize_full',
    'ground_pair',
    'deflated_solve',
]

#: Absolute gap (units of ω0) below which the ground state counts as degenerate
DEGENERACY_THRESHOLD = 1e-12

#: Level shift applied to the ground state direction in deflated solves
_DEFLATION_SHIFT = 1.0

_RCOND_RE = re.compile(r'rcond\s*=\s*([0-9.eE+-]+)')


class SpectralDecomposition(NamedTuple):
    """
    energies are ascending, vectors[:, n] belongs to energies[n].
    """
    energies: np.ndarray
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return len(self.energies)

    @property
    def ground_energy(self) -> float:
        return float(self.energies[0])

    @property
    def ground_state(self) -> np.ndarray:
        return self.vectors[:, 0]


class GroundPair(NamedTuple):
    energy: float
    vector: np.ndarray


def _require_symmetric(h: OperatorMatrix) -> None:
    if not h.is_symmetric():
        delta = float(np.max(np.abs(h.entries - h.entries.T)))
        raise AsymmetricMatrixError('Operator is not symmetric', f'max|H - Hᵀ|={delta:.3e}')


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    '''
    Flip each column so that its largest magnitude component is positive.
    '''
    if vectors.size == 0:
        return vectors
    rows = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[rows, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def diagonalize_full(h: OperatorMatrix) -> SpectralDecomposition:
    _require_symmetric(h)
    try:
        energies, vectors = scipy.linalg.eigh(h.entries, check_finite=True)
    except (LinAlgError, ValueError) as e:
        raise EigensolverError('Full diagonalization failed', f'dim={h.dim}: {e}') from e
    logging.debug('Diagonalized operator of dimension %d', h.dim)
    return SpectralDecomposition(energies, _fix_signs(vectors))


def ground_pair(h: OperatorMatrix) -> GroundPair:
    '''
    Lowest eigenpair only.

    The second eigenvalue is computed too, to check that the ground
    state is not degenerate. Raises DegenerateGroundStateError so that
    the caller can fall back to a full decomposition.
    '''
    _require_symmetric(h)
    last = min(1, h.dim - 1)
    try:
        energies, vectors = scipy.linalg.eigh(h.entries, subset_by_index=[0, last])
    except (LinAlgError, ValueError) as e:
        raise EigensolverError('Ground state computation failed', f'dim={h.dim}: {e}') from e
    if last == 1:
        gap = float(energies[1] - energies[0])
        if gap <= DEGENERACY_THRESHOLD:
            raise DegenerateGroundStateError(gap)
    return GroundPair(float(energies[0]), _fix_signs(vectors[:, :1])[:, 0])


def deflated_solve(h: OperatorMatrix, e0: float, psi0: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    '''
    Solve (H − e0)x = Q·rhs with x orthogonal to psi0, Q = 1 − psi0·psi0ᵀ.

    The singular direction is lifted by solving with
    H − e0 + psi0·psi0ᵀ, which has the same action on the orthogonal
    complement and is nonsingular.

    The residual is checked against 1e-9·‖rhs‖·max(1, max|H|). A backward
    stable solve leaves a residual proportional to ‖H‖‖x‖, and max|H| is
    about η/2 here, so an unscaled bound would reject good solves at
    large η.
    '''
    rhs = np.asarray(rhs, dtype=np.float64)
    norm = float(np.linalg.norm(rhs))
    overlap = float(psi0 @ rhs)
    if abs(overlap) > 1e-10 * norm:
        raise NotOrthogonalError('Right hand side is not orthogonal to the ground state',
                                 f'overlap={overlap:.3e}')
    b = rhs - overlap * psi0
    if norm == 0.0:
        return np.zeros_like(b)

    a = h.entries - e0 * np.eye(h.dim) + _DEFLATION_SHIFT * np.outer(psi0, psi0)
    with warnings.catch_warnings():
        warnings.simplefilter('error', LinAlgWarning)
        try:
            x = scipy.linalg.solve(a, b, assume_a='sym')
        except LinAlgWarning as w:
            m = _RCOND_RE.search(str(w))
            rcond = float(m.group(1)) if m else None
            raise IllConditionedError('Deflated system is ill conditioned', rcond) from w
        except LinAlgError as e:
            raise IllConditionedError('Deflated system is singular') from e
    x -= (psi0 @ x) * psi0

    residual = float(np.linalg.norm(h.entries @ x - e0 * x - b))
    if residual > 1e-9 * norm * max(1.0, h.max_abs):
        raise IllConditionedError(f'Deflated solve residual too large: {residual:.3e}')
    return x
