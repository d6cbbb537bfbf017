"""Low-frequency kernel of Phi(-Laplacian) and its L^1 norm.

The kernel is the inverse Fourier transform of Phi(|xi|^2) chi(xi), with chi
a smooth radial bump supported in |xi| <= eps0.  It is radial, and

    beta1(r) = int_0^eps0 chi(rho) Phi(rho^2) F_d(rho r) rho^(d-1) drho

where F_d is the Fourier transform of the sphere measure (F_1 = 2 cos).
Its L^1 norm is compared with the sum of the weighted small-z derivative
integrals of Phi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bessel import sphere_area, surface_fourier
from .symbols import DomainError, Symbol, check_singularity, evaluate

__all__ = [
    "CutoffSpec",
    "KernelProfile",
    "KernelBoundCheck",
    "kernel_profile",
    "kernel_l1_norm",
    "rhs_bound",
    "verify_kernel_bound",
]

TAIL_RATIO_LIMIT = 0.6
STABILITY_LIMIT = 0.10
_GRADING_LEVELS = 60
_END_LEVELS = 12
_NEGLIGIBLE_SHELL = 1e-12


def _smooth_zero(x):
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)


@dataclass(frozen=True)
class CutoffSpec:
    """Radial bump chi and the even transition function chi1."""

    eps0: float = 0.5
    chi1_inner: float = 0.9
    chi1_outer: float = 1.0

    def __post_init__(self):
        if not self.eps0 > 0:
            raise DomainError("cutoff radius must be > 0")
        if not 0 < self.chi1_inner < self.chi1_outer:
            raise DomainError("chi1 needs 0 < inner < outer")

    def chi(self, rho):
        """exp(1 - 1/(1 - (rho/eps0)^2)) inside the ball, 0 outside."""
        u = np.asarray(rho, dtype=float) / self.eps0
        inside = np.abs(u) < 1
        with np.errstate(divide="ignore", over="ignore"):
            val = np.exp(1.0 - 1.0 / (1.0 - np.where(inside, u * u, 0.0)))
        return np.where(inside, val, 0.0)

    def chi1(self, z):
        """1 for |z| <= inner, 0 for |z| >= outer, smooth in between."""
        u = (np.abs(np.asarray(z, dtype=float)) - self.chi1_inner) / (self.chi1_outer - self.chi1_inner)
        a, b = _smooth_zero(1.0 - u), _smooth_zero(u)
        return a / (a + b)


@dataclass(frozen=True)
class KernelProfile:
    """Samples of beta1 on a geometric radius grid plus L^1 bookkeeping.

    ``inner_bound`` is the contribution of the ball below the first grid
    radius, bounded by sup|beta1| <= int chi |Phi|.  ``shells`` are the L^1
    contributions of the dyadic shells [r_min 2^n, r_min 2^(n+1)].
    ``quadrature_error`` is |beta1(N nodes) - beta1(2N nodes)| per radius.
    """

    d: int
    r_grid: np.ndarray
    values: np.ndarray
    l1_estimate: float
    tail_ratio: float
    shells: np.ndarray
    inner_bound: float
    beta_bound: float
    quadrature_error: np.ndarray
    quadrature_ok: np.ndarray

    @property
    def cumulative_l1(self) -> np.ndarray:
        return self.inner_bound + np.concatenate([[0.0], np.cumsum(self._segments())])

    def _segments(self) -> np.ndarray:
        f = np.abs(self.values) * sphere_area(self.d - 1) * self.r_grid**self.d
        logr = np.log(self.r_grid)
        return 0.5 * (f[1:] + f[:-1]) * np.diff(logr)

    def shell_contribution(self) -> np.ndarray:
        """Per grid point share of the L^1 norm (0 at the first radius)."""
        return np.concatenate([[0.0], self._segments()])


def _radial_density(sym: Symbol, cutoff: CutoffSpec, d: int, rho: np.ndarray) -> np.ndarray:
    return cutoff.chi(rho) * evaluate(sym, rho * rho) * rho ** (d - 1)


def _sphere_factor(d: int, lam: np.ndarray) -> np.ndarray:
    if d == 1:
        return 2.0 * np.cos(lam)
    out = np.empty_like(lam)
    small = lam < 1e-8
    out[small] = sphere_area(d - 1)
    if np.any(~small):
        out[~small] = surface_fourier(d, lam[~small], method="bessel")
    return out


def _panels(r: float, eps0: float) -> tuple:
    """Half-period panels of the oscillatory factor.

    Panels are capped at eps0/16, graded dyadically towards rho = 0 (where
    Phi may be singular) and towards rho = eps0 (where the bump flattens out).
    """
    width = min(math.pi / r, eps0 / 16) if r > 0 else eps0 / 16
    n = max(2, math.ceil(eps0 / width - 1e-9))
    edges = np.linspace(0.0, eps0, n + 1)
    first, last = edges[1], edges[-2]
    left = first * 2.0 ** -np.arange(_GRADING_LEVELS, -1, -1)
    right = eps0 - (eps0 - last) * 2.0 ** -np.arange(_END_LEVELS + 1)
    pts = np.concatenate([[0.0], left, edges[2:-2], right, [eps0]])
    return pts[:-1], pts[1:]


def _beta_at(sym, cutoff, d, r, nodes, weights) -> float:
    lo, hi = _panels(r, cutoff.eps0)
    half = 0.5 * (hi - lo)
    rho = (0.5 * (hi + lo))[:, None] + half[:, None] * nodes[None, :]
    f = _radial_density(sym, cutoff, d, rho) * _sphere_factor(d, rho * r)
    return float(np.sum(half * (f @ weights)))


def _radius_grid(cutoff: CutoffSpec, r_max: float, points_per_decade: int) -> tuple:
    r_min = 0.1 / cutoff.eps0
    per_octave = max(1, math.ceil(points_per_decade * math.log10(2.0)))
    n_oct = max(1, math.ceil(math.log2(r_max / r_min) - 1e-12))
    grid = r_min * 2.0 ** (np.arange(n_oct * per_octave + 1) / per_octave)
    return grid, per_octave


def kernel_profile(sym: Symbol, d: int, cutoff: Optional[CutoffSpec] = None,
                   r_max: Optional[float] = None, points_per_decade: int = 32,
                   nodes: int = 16) -> KernelProfile:
    """Sample beta1 on r in [0.1/eps0, r_max].

    Each radius is integrated panel by panel over half-periods of the
    oscillatory factor with ``nodes``-point Gauss-Legendre rules, the first
    panel graded dyadically towards the origin.  The grid is extended to a
    whole number of octaves above the first radius.
    """
    cutoff = cutoff or CutoffSpec()
    if d < 1:
        raise DomainError("dimension must be >= 1")
    if r_max is None:
        r_max = 0.1 / cutoff.eps0 * 2.0**13
    if r_max < 10 / cutoff.eps0:
        raise DomainError(f"r_max must be >= 10/eps0 = {10 / cutoff.eps0}")
    grid, per_octave = _radius_grid(cutoff, r_max, points_per_decade)

    x1, w1 = np.polynomial.legendre.leggauss(nodes)
    x2, w2 = np.polynomial.legendre.leggauss(2 * nodes)
    coarse = np.array([_beta_at(sym, cutoff, d, r, x1, w1) for r in grid])
    values = np.array([_beta_at(sym, cutoff, d, r, x2, w2) for r in grid])

    # sup |beta1| <= int chi |Phi| over the ball
    lo, hi = _panels(0.0, cutoff.eps0)
    half = 0.5 * (hi - lo)
    rho = (0.5 * (hi + lo))[:, None] + half[:, None] * x2[None, :]
    bound = sphere_area(d - 1) * float(np.sum(half * (np.abs(_radial_density(sym, cutoff, d, rho)) @ w2)))
    inner = bound * sphere_area(d - 1) * grid[0] ** d / d

    err = np.abs(values - coarse)
    ok = err <= 1e-6 * np.abs(values) + 1e-12 * bound

    f = np.abs(values) * sphere_area(d - 1) * grid**d
    seg = 0.5 * (f[1:] + f[:-1]) * np.diff(np.log(grid))
    shells = seg.reshape(-1, per_octave).sum(axis=1)
    l1 = inner + float(seg.sum())
    tail = _ratio(shells[-1], shells[-2], l1) if shells.size >= 2 else math.inf
    return KernelProfile(d, grid, values, l1, tail, shells, inner, bound, err, ok)


def _ratio(cur: float, prev: float, total: float) -> float:
    if cur <= _NEGLIGIBLE_SHELL * total:
        return 0.0
    if prev <= 0:
        return math.inf
    return cur / prev


def kernel_l1_norm(profile: KernelProfile):
    """Return ``(norm, converged)``.

    Converged when the last two shell-to-shell ratios are below 0.6; shells
    below 1e-12 of the running total count as zero.
    """
    s = profile.shells
    if profile.l1_estimate == 0:
        return 0.0, True
    if s.size < 3:
        return profile.l1_estimate, False
    total = profile.l1_estimate
    ratios = [_ratio(s[-1], s[-2], total), _ratio(s[-2], s[-3], total)]
    return profile.l1_estimate, all(r < TAIL_RATIO_LIMIT for r in ratios)


def rhs_bound(sym: Symbol, d: int, eps0: Optional[float] = None) -> float:
    """Sum over j = 0..d+1 of int_0^eps0 z^j |d^j Phi(z)| dz/z (inf if divergent)."""
    _, terms = check_singularity(sym, d, eps0)
    return float(sum(terms))


@dataclass(frozen=True)
class KernelBoundCheck:
    ratio: float
    passed: bool
    l1: float
    rhs: float
    converged: bool
    l1_refined: float
    relative_change: float
    divergent_terms: tuple
    contradiction: bool

    def to_dict(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def verify_kernel_bound(sym: Symbol, d: int, cutoff: Optional[CutoffSpec] = None,
                        r_max: Optional[float] = None, nodes: int = 16) -> KernelBoundCheck:
    """Compare the kernel L^1 norm with the small-z derivative integrals.

    Passes when the right side is finite, the L^1 estimate converges, and it
    moves by less than 10% when both r_max and the node count are doubled.
    A finite right side with a non-convergent L^1 estimate is flagged as a
    contradiction.
    """
    cutoff = cutoff or CutoffSpec()
    _, terms = check_singularity(sym, d, cutoff.eps0)
    divergent = tuple(j for j, t in enumerate(terms) if not math.isfinite(t))
    rhs = float(sum(terms))
    base = kernel_profile(sym, d, cutoff, r_max, nodes=nodes)
    l1, converged = kernel_l1_norm(base)
    refined = kernel_profile(sym, d, cutoff, 2 * base.r_grid[-1], nodes=2 * nodes)
    l1_ref, _ = kernel_l1_norm(refined)
    if l1 == 0 and l1_ref == 0:
        change = 0.0
    else:
        change = abs(l1_ref - l1) / max(l1, l1_ref)
    if rhs == 0 and l1 == 0:
        ratio = 0.0
    elif rhs == 0 or not math.isfinite(rhs):
        ratio = math.inf if rhs == 0 else 0.0
    else:
        ratio = l1 / rhs
    finite_rhs = math.isfinite(rhs)
    passed = finite_rhs and converged and change < STABILITY_LIMIT and math.isfinite(ratio)
    return KernelBoundCheck(ratio, passed, l1, rhs, converged, l1_ref, change, divergent,
                            contradiction=finite_rhs and not converged)
