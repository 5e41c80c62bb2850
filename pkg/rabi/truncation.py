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
Adaptive choice of the Fock cutoff.

The cutoff is grown geometrically until both the susceptibility and
the ground energy stop changing.
'''

import logging
import math
from typing import NamedTuple, Optional

from .eigensolve import diagonalize_full, ground_pair
from .exceptions import DegenerateGroundStateError, InvalidParameterError
from .hamiltonian import ModelParams, Truncation, build_h1, build_hamiltonian, parity_sector
from .susceptibility import SusceptibilityValue, chi_resolvent, chi_spectral

__all__ = [
    'ConvergencePolicy',
    'Iterate',
    'ConvergedChi',
    'converged_chi',
    'evaluate_chi',
]

#: Relative ground energy change accepted as converged
ENERGY_REL_TOL = 1e-10


class ConvergencePolicy(NamedTuple):
    n_start: int = 64
    growth: float = 1.5
    rel_tol: float = 1e-8
    n_cap: int = 4096

    def verify(self) -> Optional[str]:
        '''
        Make sure that the policy is usable.

        In that case return None. Otherwise an error string.
        '''
        if self.n_start < 8:
            return f'n_start must be at least 8, not {self.n_start}'
        if not 1 < self.growth <= 2:
            return f'growth must be in (1, 2], not {self.growth}'
        if not 0 < self.rel_tol <= 1e-6:
            return f'rel_tol must be in (0, 1e-6], not {self.rel_tol}'
        if self.n_cap < self.n_start:
            return f'n_cap ({self.n_cap}) is smaller than n_start ({self.n_start})'
        return None

    def cutoffs(self):
        '''
        n_start, ⌈growth·n⌉, ... up to and including n_cap.
        '''
        n = self.n_start
        while True:
            yield n
            if n >= self.n_cap:
                return
            n = min(self.n_cap, math.ceil(self.growth * n))


class Iterate(NamedTuple):
    n_max: int
    chi: float
    e0: float


class ConvergedChi(NamedTuple):
    value: SusceptibilityValue
    n_used: int
    trace: tuple[Iterate, ...]
    converged: bool


def evaluate_chi(params: ModelParams, r: int, trunc: Truncation, parity_reduce: bool = True) -> tuple[SusceptibilityValue, float]:
    '''
    χ_{2r+2} and E0 at a fixed cutoff, through the resolvent.
    '''
    if parity_reduce:
        block = parity_sector(params, trunc)
        h, h1 = block.hamiltonian, block.drive
    else:
        h, h1 = build_hamiltonian(params, trunc), build_h1(params.eta, trunc)

    try:
        e0, psi0 = ground_pair(h)
    except DegenerateGroundStateError as e:
        logging.warning('%s at eta=%g g=%g n_max=%d, using the full decomposition',
                        e, params.eta, params.g, trunc.n_max)
        decomp = diagonalize_full(h)
        return chi_spectral(decomp, h1, r, trunc.n_max), decomp.ground_energy
    return chi_resolvent(h, e0, psi0, h1, r, trunc.n_max), e0


def _stable(current: Iterate, previous: Iterate, rel_tol: float) -> bool:
    if current.chi == 0:
        chi_ok = previous.chi == 0
    else:
        chi_ok = abs(current.chi - previous.chi) / abs(current.chi) < rel_tol
    return chi_ok and abs(current.e0 - previous.e0) < ENERGY_REL_TOL * abs(current.e0)


def converged_chi(
        params: ModelParams,
        r: int,
        policy: ConvergencePolicy = ConvergencePolicy(),
        *,
        parity_reduce: bool = True) -> ConvergedChi:
    '''
    Grow the cutoff until χ and E0 are stable.

    If n_cap is reached first, the last value is returned with
    converged=False.
    '''
    error = policy.verify()
    if error is not None:
        raise InvalidParameterError('Invalid convergence policy', error)
    params.verify()

    trace: list[Iterate] = []
    value: Optional[SusceptibilityValue] = None
    for n in policy.cutoffs():
        value, e0 = evaluate_chi(params, r, Truncation(n), parity_reduce)
        trace.append(Iterate(n, value.value, e0))
        logging.debug('eta=%g g=%g order=%d n_max=%d chi=%.17g e0=%.17g',
                      params.eta, params.g, value.order, n, value.value, e0)
        if len(trace) > 1 and _stable(trace[-1], trace[-2], policy.rel_tol):
            return ConvergedChi(value, n, tuple(trace), True)

    assert value is not None
    logging.warning('chi_%d not converged at eta=%g g=%g with n_cap=%d',
                    value.order, params.eta, params.g, policy.n_cap)
    return ConvergedChi(value, trace[-1].n_max, tuple(trace), False)
