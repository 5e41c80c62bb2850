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
Finite size scaling, with η playing the role of the system size.

    χ_{2r+2}(g_m) ∝ η^μ
    χ_{2r+2}(g) = η^μ f_r((g − g_m)·η^{1/ν})
    μ = 2/ν + 2zr
'''

import asyncio
import logging
import math
from typing import Callable, Iterable, NamedTuple, Optional, Sequence

import numpy as np
from scipy import stats

from .exceptions import CollapseError, FitError, InvalidParameterError, PeakNotFoundError
from .hamiltonian import ModelParams
from .truncation import ConvergencePolicy, converged_chi

__all__ = [
    'GridSpec',
    'CurvePoint',
    'SusceptibilityCurve',
    'PeakEstimate',
    'ScalingFit',
    'CollapseResult',
    'DynamicalExponent',
    'scan_curve',
    'chi_evaluator',
    'find_peak',
    'fit_adiabatic_dimension',
    'golden_section',
    'collapse_objective',
    'optimize_collapse',
    'derive_dynamical_exponent',
]

#: Scans are restricted to this coupling window
G_LIMITS = (0.0, 1.1)

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


class GridSpec(NamedTuple):
    g_min: float = 0.8
    g_max: float = 1.05
    g_step: float = 0.002

    def values(self) -> np.ndarray:
        '''
        g_min + i·g_step, not accumulated, so grids are reproducible.
        '''
        if not all(math.isfinite(i) for i in self):
            raise InvalidParameterError('Non finite g grid', repr(self))
        if self.g_step <= 0 or self.g_max < self.g_min:
            raise InvalidParameterError('Empty g grid', repr(self))
        count = int(math.floor((self.g_max - self.g_min) / self.g_step + 1e-9)) + 1
        return self.g_min + self.g_step * np.arange(count)


class CurvePoint(NamedTuple):
    g: float
    chi: float
    n_used: int
    converged: bool


class SusceptibilityCurve(NamedTuple):
    eta: float
    r_order: int
    points: tuple[CurvePoint, ...]
    grid: Optional[GridSpec] = None

    @property
    def converged(self) -> bool:
        return all(p.converged for p in self.points)

    def usable(self) -> tuple[np.ndarray, np.ndarray]:
        '''
        g and χ of the converged points only.
        '''
        pts = [p for p in self.points if p.converged]
        return np.array([p.g for p in pts]), np.array([p.chi for p in pts])


class PeakEstimate(NamedTuple):
    eta: float
    r_order: int
    g_m: float
    chi_max: float
    iterations: int
    hwhm: Optional[float] = None


class ScalingFit(NamedTuple):
    r_order: int
    mu: float
    intercept: float
    stderr: float
    r_squared: float
    points: tuple[tuple[float, float], ...]
    residuals: tuple[float, ...]


class CollapseResult(NamedTuple):
    r_order: int
    nu: float
    objective: float
    peaks: tuple[tuple[float, float, float], ...]
    master: tuple[tuple[float, float], ...]
    interval: tuple[float, float]
    tol: float


class DynamicalExponent(NamedTuple):
    z: float
    stderr: float


def _order_to_r(r_order: int) -> int:
    if r_order < 2 or r_order % 2:
        raise InvalidParameterError('Susceptibility order must be even and at least 2', f'order={r_order}')
    return (r_order - 2) // 2


async def scan_curve(
        eta: float,
        r: int,
        g_grid: Iterable[float],
        policy: ConvergencePolicy = ConvergencePolicy(),
        *,
        workers: int = 1,
        parity_reduce: bool = True,
        grid: Optional[GridSpec] = None) -> SusceptibilityCurve:
    '''
    Converged χ_{2r+2} at every grid point.

    Points are evaluated concurrently in worker threads, the result
    is ordered by g whatever the completion order.
    '''
    gs = [float(g) for g in g_grid]
    if not gs:
        raise InvalidParameterError('Empty g grid')
    if min(gs) < G_LIMITS[0] or max(gs) > G_LIMITS[1]:
        raise InvalidParameterError('g grid outside the scan window', f'{G_LIMITS}')
    if any(b <= a for a, b in zip(gs, gs[1:])):
        raise InvalidParameterError('g grid must be strictly increasing')
    error = policy.verify()
    if error is not None:
        raise InvalidParameterError('Invalid convergence policy', error)

    semaphore = asyncio.Semaphore(max(1, workers))

    async def point(g: float) -> CurvePoint:
        async with semaphore:
            result = await asyncio.to_thread(
                converged_chi, ModelParams(eta, g), r, policy, parity_reduce=parity_reduce)
        return CurvePoint(g, result.value.value, result.n_used, result.converged)

    points = await asyncio.gather(*(point(g) for g in gs))
    curve = SusceptibilityCurve(float(eta), 2 * r + 2, tuple(sorted(points)), grid)
    if not curve.converged:
        logging.warning('Curve eta=%g order=%d has %d non converged points',
                        eta, curve.r_order, sum(not p.converged for p in points))
    logging.info('Scanned eta=%g order=%d: %d points', eta, curve.r_order, len(points))
    return curve


def chi_evaluator(
        eta: float,
        r: int,
        policy: ConvergencePolicy = ConvergencePolicy(),
        parity_reduce: bool = True) -> Callable[[float], float]:
    '''
    Returns g → converged χ_{2r+2}(η, g), for peak refinement.
    '''
    def evaluate(g: float) -> float:
        result = converged_chi(ModelParams(eta, g), r, policy, parity_reduce=parity_reduce)
        if not result.converged:
            logging.warning('Peak refinement used a non converged value at g=%.17g', g)
        return result.value.value
    return evaluate


def _parabola_vertex(x: Sequence[float], y: Sequence[float]) -> Optional[float]:
    x1, x2, x3 = x
    y1, y2, y3 = y
    num = (x2 - x1) ** 2 * (y2 - y3) - (x2 - x3) ** 2 * (y2 - y1)
    den = (x2 - x1) * (y2 - y3) - (x2 - x3) * (y2 - y1)
    if den == 0:
        return None
    return x2 - 0.5 * num / den


def _half_width(g: np.ndarray, chi: np.ndarray, peak: int, chi_max: float) -> Optional[float]:
    half = chi_max / 2

    def crossing(indices: Iterable[int]) -> Optional[float]:
        prev = peak
        for i in indices:
            if chi[i] < half:
                return float(g[i] + (half - chi[i]) * (g[prev] - g[i]) / (chi[prev] - chi[i]))
            prev = i
        return None

    left = crossing(range(peak - 1, -1, -1))
    right = crossing(range(peak + 1, len(g)))
    if left is None or right is None:
        return None
    return (right - left) / 2


def find_peak(
        curve: SusceptibilityCurve,
        evaluator: Callable[[float], float],
        *,
        tol: float = 1e-5,
        max_iterations: int = 50) -> PeakEstimate:
    '''
    Locate the maximum of a unimodal curve.

    Successive three point parabolic interpolation on (g, ln χ),
    starting from the grid maximum and re-evaluating χ at each vertex,
    until the vertex moves less than tol.
    '''
    g, chi = curve.usable()
    if len(g) < 3:
        raise PeakNotFoundError('Not enough converged points', f'eta={curve.eta} order={curve.r_order}')
    if np.any(chi <= 0):
        raise PeakNotFoundError('Susceptibility must be positive to take logarithms')

    peak = int(np.argmax(chi))
    if peak == 0 or peak == len(g) - 1:
        raise PeakNotFoundError('Maximum on the window boundary', f'eta={curve.eta} g={g[peak]}')
    slopes = np.sign(np.diff(chi))
    slopes = slopes[slopes != 0]
    changes = int(np.count_nonzero(slopes[1:] != slopes[:-1]))
    if changes != 1:
        raise PeakNotFoundError('Curve is not unimodal', f'eta={curve.eta} slope changes={changes}')

    known = {float(a): math.log(b) for a, b in zip(g, chi)}
    lo, hi = float(g[0]), float(g[-1])
    g_m = float(g[peak])
    iterations = 0
    while iterations < max_iterations:
        xs = sorted(known)
        best = max(range(len(xs)), key=lambda i: known[xs[i]])
        if best == 0 or best == len(xs) - 1:
            break
        triple = xs[best - 1:best + 2]
        vertex = _parabola_vertex(triple, [known[i] for i in triple])
        if vertex is None or not triple[0] < vertex < triple[2]:
            break
        iterations += 1
        if vertex not in known:
            known[vertex] = math.log(evaluator(vertex))
        step = abs(vertex - g_m)
        g_m = vertex
        if step < tol:
            break

    g_m = max(known, key=lambda i: known[i])
    chi_max = math.exp(known[g_m])
    if not lo < g_m < hi:
        raise PeakNotFoundError('Refined maximum left the scan window', f'g_m={g_m}')
    estimate = PeakEstimate(curve.eta, curve.r_order, g_m, chi_max, iterations,
                            _half_width(g, chi, peak, chi_max))
    logging.info('Peak eta=%g order=%d: g_m=%.8f chi_max=%.10g (%d iterations)',
                 curve.eta, curve.r_order, g_m, chi_max, iterations)
    return estimate


def fit_adiabatic_dimension(peaks: Sequence[PeakEstimate]) -> ScalingFit:
    '''
    Least squares fit of ln χ(g_m) against ln η. The slope is μ.
    '''
    if len(peaks) < 3:
        raise FitError('At least 3 peaks are needed', f'got {len(peaks)}')
    orders = {p.r_order for p in peaks}
    if len(orders) != 1:
        raise FitError('Peaks of different orders', repr(sorted(orders)))
    etas = [p.eta for p in peaks]
    if len(set(etas)) != len(etas):
        raise FitError('Peaks must be at distinct eta')

    x = np.log(np.array(etas, dtype=np.float64))
    y = np.log(np.array([p.chi_max for p in peaks], dtype=np.float64))
    if np.ptp(x) == 0:
        raise FitError('Zero variance in ln(eta)')
    fit = stats.linregress(x, y)
    residuals = y - (fit.intercept + fit.slope * x)
    result = ScalingFit(
        r_order=orders.pop(),
        mu=float(fit.slope),
        intercept=float(fit.intercept),
        stderr=float(fit.stderr),
        r_squared=float(fit.rvalue ** 2),
        points=tuple((float(a), float(b)) for a, b in zip(x, y)),
        residuals=tuple(float(i) for i in residuals),
    )
    logging.info('Order %d: mu=%.4f ± %.4f intercept=%.4f R²=%.6f',
                 result.r_order, result.mu, result.stderr, result.intercept, result.r_squared)
    return result


def golden_section(f: Callable[[float], float], a: float, b: float, tol: float = 1e-3) -> tuple[float, float]:
    '''
    Golden-section search.

    Given a function f with a single local minimum in
    the interval [a,b], returns the midpoint of the final
    bracket, of width <= tol, and f there.
    '''
    a, b = min(a, b), max(a, b)
    h = b - a
    if h > tol:
        c = a + INV_PHI_SQUARE * h
        d = a + INV_PHI * h
        yc = f(c)
        yd = f(d)
        while h > tol:
            if yc < yd:
                b = d
                d = c
                yd = yc
                h = INV_PHI * h
                c = a + INV_PHI_SQUARE * h
                yc = f(c)
            else:
                a = c
                c = d
                yc = yd
                h = INV_PHI * h
                d = a + INV_PHI * h
                yd = f(d)
    x = (a + b) / 2
    return x, f(x)


class _Rescaled(NamedTuple):
    curves: tuple[tuple[np.ndarray, np.ndarray], ...]
    window: tuple[float, float]


def _rescale(curves: Sequence[SusceptibilityCurve], peaks: dict[float, PeakEstimate], nu: float) -> _Rescaled:
    '''
    (η^{1/ν}(g − g_m), χ/χ_max) per curve, x increasing, and the x
    window shared by all curves.
    '''
    rescaled = []
    lo, hi = -math.inf, math.inf
    for curve in curves:
        g, chi = curve.usable()
        if len(g) < 2:
            raise CollapseError('Curve with less than 2 converged points', f'eta={curve.eta}')
        peak = peaks[curve.eta]
        x = curve.eta ** (1 / nu) * (g - peak.g_m)
        rescaled.append((x, chi / peak.chi_max))
        lo = max(lo, float(x[0]))
        hi = min(hi, float(x[-1]))
    if not lo < hi:
        raise CollapseError('Rescaled curves do not overlap', f'nu={nu}')
    return _Rescaled(tuple(rescaled), (lo, hi))


def collapse_objective(curves: Sequence[SusceptibilityCurve], peaks: dict[float, PeakEstimate], nu: float) -> float:
    '''
    Mean over ordered pairs of curves (i, j) of the mean squared
    distance between the points of i and the linear interpolant of j,
    on the x range of j.
    '''
    rescaled = _rescale(curves, peaks, nu)
    pairs = []
    for i, (xi, yi) in enumerate(rescaled.curves):
        for j, (xj, yj) in enumerate(rescaled.curves):
            if i == j:
                continue
            inside = (xi >= xj[0]) & (xi <= xj[-1])
            if not np.any(inside):
                continue
            deviations = yi[inside] - np.interp(xi[inside], xj, yj)
            pairs.append(float(np.mean(deviations ** 2)))
    if not pairs:
        raise CollapseError('No pair of rescaled curves shares a point', f'nu={nu}')
    return float(np.mean(pairs))


def _master_curve(rescaled: _Rescaled, samples: int) -> tuple[np.ndarray, np.ndarray]:
    '''
    Mean of the curve interpolants on the shared window.
    '''
    xs = np.linspace(rescaled.window[0], rescaled.window[1], samples)
    ys = np.mean([np.interp(xs, x, y) for x, y in rescaled.curves], axis=0)
    return xs, ys


def optimize_collapse(
        curves: Sequence[SusceptibilityCurve],
        peaks: Sequence[PeakEstimate],
        *,
        nu_min: float = 1.0,
        nu_max: float = 2.0,
        tol: float = 1e-3,
        master_samples: int = 101) -> CollapseResult:
    '''
    Find ν such that χ/χ_max against η^{1/ν}(g − g_m) falls on one curve.
    '''
    if len(curves) < 3:
        raise CollapseError('At least 3 curves are needed', f'got {len(curves)}')
    orders = {c.r_order for c in curves}
    if len(orders) != 1:
        raise CollapseError('Curves of different orders', repr(sorted(orders)))
    by_eta = {p.eta: p for p in peaks}
    missing = [c.eta for c in curves if c.eta not in by_eta]
    if missing:
        raise CollapseError('Missing peak estimates', f'eta={missing}')

    def objective(nu: float) -> float:
        return collapse_objective(curves, by_eta, nu)

    nu, best = golden_section(objective, nu_min, nu_max, tol)
    if nu - nu_min < tol or nu_max - nu < tol:
        raise CollapseError('Collapse optimum on the search interval boundary', f'nu={nu}')
    edges = objective(nu_min), objective(nu_max)
    if not best < min(edges):
        raise CollapseError('Collapse objective is not lower inside the interval',
                            f'nu={nu} objective={best:.3e} edges={edges[0]:.3e},{edges[1]:.3e}')

    xs, ms = _master_curve(_rescale(curves, by_eta, nu), master_samples)
    result = CollapseResult(
        r_order=orders.pop(),
        nu=nu,
        objective=best,
        peaks=tuple((c.eta, by_eta[c.eta].g_m, by_eta[c.eta].chi_max) for c in curves),
        master=tuple((float(a), float(b)) for a, b in zip(xs, ms)),
        interval=(nu_min, nu_max),
        tol=tol,
    )
    logging.info('Order %d: collapse nu=%.4f objective=%.4e', result.r_order, nu, best)
    return result


def derive_dynamical_exponent(fit: ScalingFit, nu: float) -> DynamicalExponent:
    '''
    z = (μ − 2/ν)/(2r) for a fit of χ_{2r+2}, r >= 1.
    '''
    r = _order_to_r(fit.r_order)
    if r < 1:
        raise InvalidParameterError('z needs a susceptibility of order 4 or more', f'order={fit.r_order}')
    if nu <= 0:
        raise InvalidParameterError('nu must be positive', f'nu={nu}')
    return DynamicalExponent((fit.mu - 2 / nu) / (2 * r), fit.stderr / (2 * r))
