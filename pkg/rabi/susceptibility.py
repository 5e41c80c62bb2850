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
Fidelity, fidelity susceptibility and generalized adiabatic
susceptibilities of H(g) = H0 + g·H1.

    χ_{2r+2}(g) = Σ_{n≠0} |⟨Ψn|H1|Ψ0⟩|² / (En − E0)^{2r+2}

r = 0 is the fidelity susceptibility χ_F. The same number is computed
three ways: as a spectral sum, with deflated linear solves, and from
the overlap of neighbouring ground states.
'''

from enum import Enum
import logging
import math
from typing import NamedTuple, Optional

import numpy as np

from .eigensolve import SpectralDecomposition, deflated_solve, diagonalize_full, ground_pair
from .exceptions import EigensolverError, IllConditionedError, InvalidParameterError
from .hamiltonian import (
    ModelParams,
    OperatorMatrix,
    Truncation,
    build_hamiltonian,
    parity_sector,
)

__all__ = [
    'Method',
    'SusceptibilityValue',
    'SpectralLine',
    'NoiseSpectrum',
    'fidelity',
    'chi_spectral',
    'chi_resolvent',
    'chi_finite_difference',
    'chi_central_difference',
    'chi_richardson',
    'noise_spectrum',
    'moment',
    'excitation_probability',
    'drive_variance',
]

#: Default step for the finite difference oracle
DEFAULT_DELTA_G = 1e-4

#: Relative weight below which a noise spectrum line is rounding noise
_WEIGHT_CUTOFF = 1e-16


class Method(Enum):
    SPECTRAL_SUM = 'spectral-sum'
    RESOLVENT = 'resolvent'
    FINITE_DIFFERENCE = 'finite-difference'


class SusceptibilityValue(NamedTuple):
    order: int
    value: float
    method: Method
    n_max: Optional[int] = None

    @property
    def r(self) -> int:
        return (self.order - 2) // 2


class SpectralLine(NamedTuple):
    omega: float
    weight: float


class NoiseSpectrum(NamedTuple):
    """
    S_Q(ω) as a list of δ lines, ascending in omega.
    """
    lines: tuple[SpectralLine, ...]

    @property
    def omegas(self) -> np.ndarray:
        return np.array([i.omega for i in self.lines])

    @property
    def weights(self) -> np.ndarray:
        return np.array([i.weight for i in self.lines])

    @property
    def total_weight(self) -> float:
        return float(sum(i.weight for i in self.lines))


def _order(r: int) -> int:
    if isinstance(r, bool) or not isinstance(r, (int, np.integer)) or r < 0:
        raise InvalidParameterError('r must be a non negative integer', f'r={r!r}')
    return 2 * int(r) + 2


def _matrix_elements(decomp: SpectralDecomposition, h1: OperatorMatrix) -> tuple[np.ndarray, np.ndarray]:
    '''
    Excitation gaps and weights |⟨Ψn|H1|Ψ0⟩|² for n ≥ 1.
    '''
    if decomp.dim != h1.dim:
        raise InvalidParameterError('Decomposition and drive have different dimensions',
                                    f'{decomp.dim} != {h1.dim}')
    gaps = decomp.energies[1:] - decomp.energies[0]
    if np.any(gaps <= 0):
        raise EigensolverError('Non positive excitation gap', f'min gap={float(np.min(gaps)):.3e}')
    elements = decomp.vectors[:, 1:].T @ (h1.entries @ decomp.ground_state)
    return gaps, elements ** 2


def drive_variance(psi0: np.ndarray, h1: OperatorMatrix) -> float:
    '''
    ⟨H1²⟩ − ⟨H1⟩² in the state psi0.
    '''
    v = h1.entries @ psi0
    mean = float(psi0 @ v)
    return float(v @ v) - mean * mean


def _ground_vector(params: ModelParams, trunc: Truncation, parity_reduce: bool) -> np.ndarray:
    if parity_reduce:
        block = parity_sector(params, trunc)
        return ground_pair(block.hamiltonian).vector
    return ground_pair(build_hamiltonian(params, trunc)).vector


def _overlap_loss(params: ModelParams, delta_g: float, trunc: Truncation, parity_reduce: bool) -> float:
    '''
    Returns ‖Qψ(g+δg)‖² = 1 − F², Q projecting out ψ(g).

    Computing the orthogonal residual directly avoids the cancellation
    in 1 − F.
    '''
    a = _ground_vector(params, trunc, parity_reduce)
    b = _ground_vector(params.shifted(delta_g), trunc, parity_reduce)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    residual = b - (a @ b) * a
    return min(1.0, float(residual @ residual))


def fidelity(params: ModelParams, delta_g: float, trunc: Truncation, *, parity_reduce: bool = True) -> float:
    '''
    F(g, δg) = |⟨Ψ0(g)|Ψ0(g + δg)⟩|
    '''
    if delta_g == 0:
        return 1.0
    return math.sqrt(1.0 - _overlap_loss(params, delta_g, trunc, parity_reduce))


def chi_spectral(
        decomp: SpectralDecomposition,
        h1: OperatorMatrix,
        r: int,
        n_max: Optional[int] = None) -> SusceptibilityValue:
    order = _order(r)
    gaps, weights = _matrix_elements(decomp, h1)
    value = float(np.sum(weights / gaps ** order))
    return SusceptibilityValue(order, value, Method.SPECTRAL_SUM, n_max)


def chi_resolvent(
        h: OperatorMatrix,
        e0: float,
        psi0: np.ndarray,
        h1: OperatorMatrix,
        r: int,
        n_max: Optional[int] = None) -> SusceptibilityValue:
    '''
    χ_{2r+2} = ‖(H − E0)^{−(r+1)} Q H1 Ψ0‖², with r + 1 deflated solves.

    Falls back to the spectral sum when a solve is ill conditioned.
    '''
    order = _order(r)
    x = h1.entries @ psi0
    x = x - (psi0 @ x) * psi0
    try:
        for _ in range(r + 1):
            x = deflated_solve(h, e0, psi0, x)
    except IllConditionedError as e:
        logging.warning('Resolvent failed, using the spectral sum: %s', e)
        return chi_spectral(diagonalize_full(h), h1, r, n_max)
    return SusceptibilityValue(order, float(x @ x), Method.RESOLVENT, n_max)


def chi_finite_difference(
        params: ModelParams,
        delta_g: float,
        trunc: Truncation,
        *,
        parity_reduce: bool = True) -> SusceptibilityValue:
    '''
    χ_F ≈ −2 ln F(g, δg) / δg².

    One sided: ln F has odd terms in δg, so the error is O(δg).
    '''
    if delta_g == 0 or not math.isfinite(delta_g):
        raise InvalidParameterError('delta_g must be finite and nonzero', f'delta_g={delta_g}')
    loss = _overlap_loss(params, delta_g, trunc, parity_reduce)
    # 1 - F < 0.1
    if loss > 0.19:
        raise InvalidParameterError('delta_g too large for the finite difference', f'1-F²={loss:.3e}')
    value = -math.log1p(-loss) / delta_g ** 2
    return SusceptibilityValue(2, value, Method.FINITE_DIFFERENCE, trunc.n_max)


def chi_central_difference(
        params: ModelParams,
        delta_g: float,
        trunc: Truncation,
        *,
        parity_reduce: bool = True) -> SusceptibilityValue:
    '''
    Mean of the +δg and −δg one sided estimates. The odd terms cancel.
    '''
    plus = chi_finite_difference(params, delta_g, trunc, parity_reduce=parity_reduce)
    minus = chi_finite_difference(params, -delta_g, trunc, parity_reduce=parity_reduce)
    value = (plus.value + minus.value) / 2
    return SusceptibilityValue(2, value, Method.FINITE_DIFFERENCE, trunc.n_max)


def chi_richardson(
        params: ModelParams,
        delta_g: float,
        trunc: Truncation,
        *,
        parity_reduce: bool = True) -> SusceptibilityValue:
    '''
    Richardson extrapolation of the central difference pair (δg, δg/2).

    The central estimates have O(δg²) error, the extrapolated value O(δg⁴).
    '''
    coarse = chi_central_difference(params, delta_g, trunc, parity_reduce=parity_reduce)
    fine = chi_central_difference(params, delta_g / 2, trunc, parity_reduce=parity_reduce)
    value = (4 * fine.value - coarse.value) / 3
    return SusceptibilityValue(2, value, Method.FINITE_DIFFERENCE, trunc.n_max)


def noise_spectrum(decomp: SpectralDecomposition, h1: OperatorMatrix) -> NoiseSpectrum:
    gaps, weights = _matrix_elements(decomp, h1)
    total = float(np.sum(weights))
    keep = weights > _WEIGHT_CUTOFF * total
    return NoiseSpectrum(tuple(
        SpectralLine(float(omega), float(weight))
        for omega, weight in zip(gaps[keep], weights[keep])
    ))


def moment(spectrum: NoiseSpectrum, k: int) -> float:
    '''
    ∫ dω S_Q(ω)/ω^k, a finite sum over the lines.
    '''
    if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or k < 2 or k % 2:
        raise InvalidParameterError('Moment order must be a positive even integer', f'k={k!r}')
    if not spectrum.lines:
        return 0.0
    return float(np.sum(spectrum.weights / spectrum.omegas ** k))


def excitation_probability(b: float, chi: SusceptibilityValue, r: Optional[int] = None) -> float:
    '''
    P_ex = b²·χ_{2r+2}(g_c) for the ramp g(t) = g_c + b·tʳ/r!.

    The formula is perturbative; values above 1 are clamped.
    '''
    if r is not None and chi.order != _order(r):
        raise InvalidParameterError('Susceptibility order does not match the ramp exponent',
                                    f'order={chi.order} r={r}')
    p = b * b * chi.value
    if p > 1.0:
        logging.warning('Excitation probability %g out of the perturbative range, clamped to 1', p)
        return 1.0
    return p
