"""Checkable surrogates of Fourier-support localization.

Unit-sphere superpositions must be exact eigenfunctions of Phi(-Laplacian)
with eigenvalue Phi(1); functions with spectral mass away from the sphere
and the origin must leave a residual at least min |Phi(|xi|^2) - Phi(1)|
times their norm.  Near z = 1 the quotient (t-1)^j0 / (Phi(t) - Phi(1)) stays
bounded and tends to j0! / Phi^(j0)(1).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .multiplier import (
    GridFunction,
    ResidualReport,
    forward_transform,
    frequency_norm_sq,
    helmholtz_residual,
    polyharmonic_residual,
)
from .symbols import (
    J0_TOL,
    DomainError,
    Symbol,
    detect_j0,
    eval_derivative,
    eval_symbol,
    evaluate,
)

__all__ = [
    "SupportProfile",
    "ContrapositiveResult",
    "QuotientProfile",
    "J0Check",
    "spectral_support_profile",
    "unit_sphere_modes",
    "random_sphere_function",
    "run_forward_check",
    "run_contrapositive_check",
    "quotient_profile",
    "run_j0_check",
]


@dataclass(frozen=True)
class SupportProfile:
    mass_at_zero: float
    mass_on_sphere: float
    mass_elsewhere: float
    delta: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _energy(gf: GridFunction) -> tuple:
    spec = forward_transform(gf).data
    return np.abs(spec) ** 2, np.sqrt(frequency_norm_sq(gf))


def spectral_support_profile(gf: GridFunction, delta: float = 0.1) -> SupportProfile:
    """Fractions of spectral energy at xi = 0, near |xi| = 1, and elsewhere."""
    if not 0 < delta < 0.5:
        raise DomainError("delta must lie in (0, 0.5)")
    e, r = _energy(gf)
    total = float(e.sum())
    if total == 0:
        raise ValueError("zero function has no spectral profile")
    zero = float(e[r == 0].sum()) / total
    sphere = float(e[(np.abs(r - 1.0) <= delta) & (r > 0)].sum()) / total
    return SupportProfile(zero, sphere, max(0.0, 1.0 - zero - sphere), delta)


def unit_sphere_modes(shape, box) -> np.ndarray:
    """Integer index vectors k with |2 pi k / L| = 1 that fit the grid."""
    ranges = []
    for n, L in zip(shape, box):
        kmax = math.floor(L / (2 * math.pi) + 1e-9)
        ranges.append(range(-min(kmax, n // 2 - 1), min(kmax, n // 2 - 1) + 1))
    modes = []
    for k in itertools.product(*ranges):
        xi2 = sum((2 * math.pi * ki / L) ** 2 for ki, L in zip(k, box))
        if abs(xi2 - 1.0) <= 1e-12:
            modes.append(k)
    return np.array(modes, dtype=int).reshape(-1, len(shape))


def random_sphere_function(rng: np.random.Generator, shape, box, n_terms: int) -> GridFunction:
    """Real superposition of ``n_terms`` cos/sin waves on the discrete unit sphere."""
    modes = unit_sphere_modes(shape, box)
    if modes.shape[0] == 0:
        raise DomainError("box does not resolve the unit sphere")
    axes = [np.arange(n) * (L / n) for n, L in zip(shape, box)]
    coords = np.meshgrid(*axes, indexing="ij")
    u = np.zeros(tuple(shape))
    for _ in range(n_terms):
        k = modes[rng.integers(modes.shape[0])]
        phase = sum(2 * math.pi * ki / L * x for ki, L, x in zip(k, box, coords))
        a, b = rng.standard_normal(2)
        u = u + a * np.cos(phase) + b * np.sin(phase)
    return GridFunction(len(shape), tuple(shape), tuple(box), u)


def run_forward_check(sym: Symbol, d: int, n_modes: int = 8, seed: int = 0,
                      box_multiple: int = 1, points: int = 8, n_terms: int = 4) -> float:
    """Largest relative Helmholtz residual over ``n_modes`` random sphere functions."""
    if d < 1:
        raise DomainError("dimension must be >= 1")
    rng = np.random.default_rng(seed)
    shape = (points * box_multiple,) * d
    box = (2 * math.pi * box_multiple,) * d
    worst = 0.0
    for _ in range(n_modes):
        gf = random_sphere_function(rng, shape, box, n_terms)
        worst = max(worst, helmholtz_residual(sym, gf).relative_l2)
    return worst


class ContrapositiveResult(NamedTuple):
    passed: bool
    lower_bound: float
    observed: float


def run_contrapositive_check(sym: Symbol, gf: GridFunction, delta: float = 0.1) -> ContrapositiveResult:
    """Residual lower bound for functions with no mass near the sphere or origin."""
    e, r = _energy(gf)
    occupied = e > 1e-24 * max(float(e.max(initial=0.0)), 1e-300)
    if not np.any(occupied):
        raise ValueError("zero function")
    near = occupied & ((r == 0) | (np.abs(r - 1.0) <= delta))
    if np.any(near):
        k = tuple(int(i) for i in np.argwhere(near)[0])
        raise ValueError(f"occupied mode at |xi| = {r[k]:.6g} (index {k}) lies in the excluded set")
    rep: ResidualReport = helmholtz_residual(sym, gf)
    bound = rep.per_mode_bound
    return ContrapositiveResult(rep.residual_l2 >= bound - 1e-9, bound, rep.residual_l2)


@dataclass(frozen=True)
class QuotientProfile:
    t: np.ndarray
    values: np.ndarray
    limit_at_one: float
    max_abs: float
    expected_limit: float

    @property
    def limit_error(self) -> float:
        return abs(self.limit_at_one - self.expected_limit) / abs(self.expected_limit)


def _quotient(sym: Symbol, j0: int, t: np.ndarray, phi1: float) -> np.ndarray:
    den = np.asarray(evaluate(sym, t), dtype=float) - phi1
    if np.any(den == 0):
        bad = t[den == 0][0]
        raise ArithmeticError(f"Phi(t) = Phi(1) at t = {bad}: univalence violated")
    # a sign change between two probes on the same side of 1 brackets a level crossing
    side = np.sign(t - 1.0)
    flips = (np.sign(den[1:]) != np.sign(den[:-1])) & (side[1:] == side[:-1])
    if np.any(flips):
        i = int(np.argmax(flips))
        raise ArithmeticError(f"Phi(t) = Phi(1) for t in [{t[i]}, {t[i + 1]}]: univalence violated")
    return (t - 1.0) ** j0 / den


def _richardson_limit(sym: Symbol, j0: int, phi1: float) -> float:
    # symmetric average cancels odd error terms; each step shrinks h by 10
    h = 10.0 ** -np.arange(2, 7)
    sym_avg = 0.5 * (_quotient(sym, j0, 1 + h, phi1) + _quotient(sym, j0, 1 - h, phi1))
    table = [list(sym_avg)]
    for j in range(1, len(h)):
        prev = table[-1]
        f = 100.0**j
        table.append([(f * prev[i + 1] - prev[i]) / (f - 1) for i in range(len(prev) - 1)])
    best, best_err = table[0][-1], abs(table[0][-1] - table[0][-2])
    for j, row in enumerate(table[1:], start=1):
        for i in range(1, len(row)):
            err = abs(row[i] - row[i - 1])
            if err < best_err:
                best, best_err = row[i], err
        # compare against the previous column as well
        for i in range(len(row)):
            err = abs(row[i] - table[j - 1][i + 1])
            if err < best_err:
                best, best_err = row[i], err
    return float(best)


def quotient_profile(sym: Symbol, j0: int, window: float = 0.2, n_points: int = 201) -> QuotientProfile:
    """Sample q(t) = (t-1)^j0 / (Phi(t) - Phi(1)) on [1-window, 1+window] minus t=1."""
    if j0 < 1:
        raise DomainError("j0 must be >= 1")
    if not 0 < window <= 0.5:
        raise DomainError("window must lie in (0, 0.5]")
    phi1 = eval_symbol(sym, 1.0)
    t = np.linspace(1 - window, 1 + window, n_points)
    t = t[np.abs(t - 1.0) > 1e-12]
    q = _quotient(sym, j0, t, phi1)
    limit = _richardson_limit(sym, j0, phi1)
    dj = eval_derivative(sym, j0, 1.0)
    expected = math.factorial(j0) / dj if dj != 0 else math.inf
    return QuotientProfile(t, q, limit, float(np.max(np.abs(np.append(q, limit)))), expected)


class J0Check(NamedTuple):
    j0: int
    quotient_bounded: bool
    scaling_exponent: float
    polyharmonic_relative: float


def run_j0_check(sym: Symbol, d: int, tol: float = J0_TOL, points: int = 8) -> J0Check:
    """Detect j0, check quotient boundedness and fit |Phi(t) - Phi(1)| ~ |t-1|^s."""
    j0, _ = detect_j0(sym, tol=tol)
    if j0 is None:
        raise ValueError(f"no nonzero derivative of {sym.name} at z = 1")
    prof = quotient_profile(sym, j0)
    bounded = bool(np.all(np.isfinite(prof.values)) and math.isfinite(prof.limit_at_one))
    phi1 = eval_symbol(sym, 1.0)
    h = np.geomspace(1e-4, 1e-2, 17)
    slopes = []
    for side in (1.0, -1.0):
        diff = np.abs(np.asarray(evaluate(sym, 1.0 + side * h)) - phi1)
        slopes.append(np.polyfit(np.log(h), np.log(diff), 1)[0])
    exponent = float(np.mean(slopes))
    gf = random_sphere_function(np.random.default_rng(0), (points,) * d, (2 * math.pi,) * d, 3)
    poly = polyharmonic_residual(gf, j0).relative_l2
    return J0Check(j0, bounded, exponent, poly)
