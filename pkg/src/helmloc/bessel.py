"""Bessel functions of the first kind and the Fourier transform of the sphere.

J_nu is evaluated by its ascending power series below the switch point
``max(12, 2 nu)`` and by the large-argument asymptotic expansion above it.
The expansion is also exposed in the cos/sin form

    J_nu(x) ~ x**-0.5 * (cos(x) * sum_j alpha_j x**-j + sin(x) * sum_j beta_j x**-j)

and lifted to F_d(x), the Fourier transform of the surface measure of the
unit sphere in R^d.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.special import roots_jacobi

from .symbols import DomainError

__all__ = [
    "BesselExpansion",
    "ExpansionCheck",
    "bessel_j",
    "asymptotic_coeffs",
    "build_expansion",
    "expansion_eval",
    "sphere_area",
    "sphere_constant",
    "surface_fourier",
    "fd_expansion_eval",
    "verify_bessel_expansion",
    "verify_fd_expansion",
]

_ASYMPTOTIC_TERMS = 60
_SERIES_LIMIT = 12.0


def _switch_point(nu: float) -> float:
    return max(12.0, 2.0 * nu)


def _series(nu: float, x: np.ndarray) -> np.ndarray:
    half = x / 2.0
    term = half**nu / math.gamma(nu + 1.0)
    total = term.copy()
    peak = np.abs(term)
    q = -half * half
    m = 0
    while True:
        m += 1
        term = term * q / (m * (m + nu))
        total = total + term
        peak = np.maximum(peak, np.abs(term))
        if m > 2 and np.all(np.abs(term) <= 1e-18 * peak):
            return total
        if m > 1000:
            raise ArithmeticError("Bessel power series failed to converge")


def asymptotic_coeffs(nu: float, K: int) -> list:
    """a_k(nu) for k = 0..K by the running product.

    a_k = (4 nu^2 - 1)(4 nu^2 - 9)...(4 nu^2 - (2k-1)^2) / (k! 8^k)
    """
    if K < 0:
        raise DomainError("K must be >= 0")
    mu = 4.0 * nu * nu
    out = [1.0]
    for k in range(1, K + 1):
        out.append(out[-1] * (mu - (2 * k - 1) ** 2) / (8.0 * k))
    return out


def _asymptotic(nu: float, x: np.ndarray) -> tuple:
    """Optimally truncated large-argument expansion and its error estimate."""
    a = asymptotic_coeffs(nu, _ASYMPTOTIC_TERMS)
    inv = 1.0 / x
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    power = np.ones_like(x)
    prev = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k, ak in enumerate(a):
        term = ak * power
        mag = np.abs(term)
        # optimal truncation: stop once the terms start growing
        active &= mag <= prev
        if not np.any(active):
            break
        sign = 1.0 if (k // 2) % 2 == 0 else -1.0
        contrib = np.where(active, sign * term, 0.0)
        if k % 2 == 0:
            p += contrib
        else:
            q += contrib
        active &= mag > 1e-17 * np.abs(p)
        prev = np.where(active, mag, prev)
        power = power * inv
    omega = x - 0.5 * nu * math.pi - 0.25 * math.pi
    scale = np.sqrt(2.0 / (math.pi * x))
    return scale * (np.cos(omega) * p - np.sin(omega) * q), scale * prev


def _low_order(order: float, x: np.ndarray) -> np.ndarray:
    """J of order in [0, 2): series up to 12, asymptotic beyond."""
    out = np.empty_like(x)
    small = x <= _SERIES_LIMIT
    if np.any(small):
        out[small] = _series(order, x[small])
    if np.any(~small):
        out[~small] = _asymptotic(order, x[~small])[0]
    return out


def _recurrence(nu: float, x: np.ndarray) -> np.ndarray:
    """Three-term recurrence anchored at orders nu0 and nu0 + 1, nu0 in [0, 1).

    Forward recurrence is stable while the order stays below x; otherwise
    Miller's backward recurrence is run from well above nu and normalized by
    least squares against the two anchor values.
    """
    n = int(math.floor(nu))
    nu0 = nu - n
    j0, j1 = _low_order(nu0, x), _low_order(nu0 + 1.0, x)
    if n <= 1:
        return j0 if n == 0 else j1
    out = np.empty_like(x)
    fwd = x > nu
    if np.any(fwd):
        xf = x[fwd]
        lo, hi = j0[fwd], j1[fwd]
        for k in range(1, n):
            lo, hi = hi, 2.0 * (nu0 + k) / xf * hi - lo
        out[fwd] = hi
    if np.any(~fwd):
        xb = x[~fwd]
        start = n + 20 + int(math.sqrt(40.0 * n))
        nxt = np.zeros_like(xb)
        cur = np.full_like(xb, 1e-280)
        at_n = np.zeros_like(xb)
        for k in range(start, 0, -1):
            prev = 2.0 * (nu0 + k) / xb * cur - nxt
            nxt, cur = cur, prev
            if k - 1 == n:
                at_n = cur.copy()
            big = np.abs(cur) > 1e250
            if np.any(big):
                f = np.where(big, 1e-250, 1.0)
                cur, nxt, at_n = cur * f, nxt * f, at_n * f
        norm = np.hypot(cur, nxt)
        f0, f1, at_n = cur / norm, nxt / norm, at_n / norm
        out[~fwd] = at_n * (f0 * j0[~fwd] + f1 * j1[~fwd])
    return out


def _large_argument(nu: float, x: np.ndarray) -> np.ndarray:
    val, err = _asymptotic(nu, x)
    bad = err > 1e-14 * np.sqrt(2.0 / (math.pi * x))
    if np.any(bad) and nu >= 1:
        val[bad] = _recurrence(nu, x[bad])
    return val


def bessel_j(nu: float, lam):
    """J_nu(lam) for nu >= 0, lam > 0 (scalar or array).

    Power series for lam <= 12, the large-argument expansion above
    max(12, 2 nu) when its optimal truncation reaches full accuracy, and the
    three-term recurrence in between (only reached for nu > 6).
    """
    if nu < 0:
        raise DomainError("order must be >= 0")
    x = np.asarray(lam, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("Bessel argument must be finite and > 0")
    flat = x.ravel()
    out = np.empty_like(flat)
    small = flat <= _SERIES_LIMIT
    mid = ~small & (flat <= _switch_point(nu))
    large = flat > _switch_point(nu)
    if np.any(small):
        out[small] = _series(nu, flat[small])
    if np.any(mid):
        out[mid] = _recurrence(nu, flat[mid])
    if np.any(large):
        out[large] = _large_argument(nu, flat[large])
    out = out.reshape(x.shape)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class BesselExpansion:
    """Truncated large-argument expansion of J_nu in cos/sin form.

    ``a`` holds a_0..a_{K+1}; the last entry sizes the leading omitted term.
    """

    nu: float
    K: int
    a: tuple
    alpha: tuple
    beta: tuple


def _cos_sin_coefficients(nu: float, a: Sequence[float], K: int):
    phase = 0.5 * nu * math.pi + 0.25 * math.pi
    c, s = math.cos(phase), math.sin(phase)
    scale = math.sqrt(2.0 / math.pi)
    alpha, beta = [], []
    for j in range(K + 1):
        if j % 2 == 0:
            p, q = (-1) ** (j // 2) * a[j], 0.0
        else:
            p, q = 0.0, (-1) ** ((j - 1) // 2) * a[j]
        # cos(w) P - sin(w) Q with w = x - phase, expanded by angle addition
        alpha.append(scale * (c * p + s * q))
        beta.append(scale * (s * p - c * q))
    return tuple(alpha), tuple(beta)


def build_expansion(nu: float, K: int) -> BesselExpansion:
    if K < 1:
        raise DomainError("K must be >= 1")
    if nu < 0:
        raise DomainError("order must be >= 0")
    a = tuple(asymptotic_coeffs(nu, K + 1))
    alpha, beta = _cos_sin_coefficients(nu, a, K)
    return BesselExpansion(float(nu), int(K), a, alpha, beta)


def _eval_cos_sin(alpha, beta, x, power):
    x = np.asarray(x, dtype=float)
    inv = 1.0 / x
    pa = np.zeros_like(x)
    pb = np.zeros_like(x)
    for j in range(len(alpha) - 1, -1, -1):
        pa = pa * inv + alpha[j]
        pb = pb * inv + beta[j]
    out = x**-power * (np.cos(x) * pa + np.sin(x) * pb)
    return float(out) if out.ndim == 0 else out


def expansion_eval(exp: BesselExpansion, lam):
    """Evaluate the truncated expansion; valid for lam >= 10."""
    x = np.asarray(lam, dtype=float)
    if np.any(x < 10):
        raise DomainError("the expansion is only used for lam >= 10")
    return _eval_cos_sin(exp.alpha, exp.beta, x, 0.5)


# ---------------------------------------------------------------------------
# sphere transform
# ---------------------------------------------------------------------------

def sphere_area(n: int) -> float:
    """Surface measure of the unit sphere S^{n} in R^{n+1} (S^0 has measure 2)."""
    return 2.0 * math.pi ** ((n + 1) / 2) / math.gamma((n + 1) / 2)


def sphere_constant(d: int) -> float:
    """Constant c with F_d(x) = c x^{-(d-2)/2} J_{(d-2)/2}(x).

    Follows from the reduction to (1 - t^2)^{(d-3)/2} weight and the integral
    representation of J_nu; equals (2 pi)^{d/2}.
    """
    nu = (d - 2) / 2.0
    return sphere_area(d - 2) * 2.0**nu * math.gamma(nu + 0.5) * math.sqrt(math.pi)


@lru_cache(maxsize=64)
def _gegenbauer_rule(n: int, a: float):
    t, w = roots_jacobi(n, a, a)
    return t, w


def _sphere_quadrature(d: int, x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    a = (d - 3) / 2.0
    n = max(256, int(2 ** math.ceil(math.log2(0.75 * float(np.max(x, initial=0.0)) + 64))))
    scale = sphere_area(d - 1)
    prev = None
    while True:
        t, w = _gegenbauer_rule(n, a)
        vals = sphere_area(d - 2) * (np.cos(np.multiply.outer(x, t)) @ w)
        if prev is not None and np.max(np.abs(vals - prev), initial=0.0) <= tol * scale:
            return vals
        if n >= 2**15:
            raise ArithmeticError("sphere quadrature did not stabilise")
        prev = vals
        n *= 2


def surface_fourier(d: int, lam, method: str = "quadrature"):
    """F_d(lam): integral of exp(i lam w.e1) over the unit sphere S^{d-1}.

    ``quadrature`` integrates cos(lam t)(1-t^2)^{(d-3)/2} with a Gauss rule
    matched to the weight (Chebyshev for d = 2, Legendre for d = 3);
    ``bessel`` uses the closed form through J_{(d-2)/2}.
    """
    if d < 2:
        raise DomainError("F_d needs d >= 2")
    x = np.asarray(lam, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x <= 0):
        raise DomainError("F_d argument must be finite and > 0")
    if method == "quadrature":
        out = _sphere_quadrature(d, x.ravel()).reshape(x.shape)
    elif method == "bessel":
        nu = (d - 2) / 2.0
        out = sphere_constant(d) * x**-nu * bessel_j(nu, x)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def fd_expansion_eval(d: int, K: int, lam):
    """Truncated cos/sin expansion of F_d (valid for lam >= 10)."""
    x = np.asarray(lam, dtype=float)
    if np.any(x < 10):
        raise DomainError("the expansion is only used for lam >= 10")
    exp = build_expansion((d - 2) / 2.0, K)
    c = sphere_constant(d)
    a = [c * v for v in exp.alpha]
    b = [c * v for v in exp.beta]
    return _eval_cos_sin(a, b, x, (d - 1) / 2.0)


# ---------------------------------------------------------------------------
# remainder verification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExpansionCheck:
    """Remainder of a truncated expansion over a set of arguments.

    ``errors`` are remainder amplitudes.  Over [lam, lam + pi) the remainder
    times x^p is fitted by a cos x + b sin x and the amplitude is
    hypot(a, b) lam^-p; this removes the phase-dependent zeros of the
    oscillating remainder.  ``fitted_decay`` is the log-log slope of the
    amplitudes; ``max_scaled_error`` the largest amplitude times lam^p with p
    the predicted decay order.
    """

    lambdas: tuple
    errors: tuple
    scaled_errors: tuple
    predicted_decay: float
    fitted_decay: float
    max_scaled_error: float

    @property
    def scaled_spread(self) -> float:
        s = np.asarray(self.scaled_errors)
        return float(s.max() / s.min()) if s.min() > 0 else math.inf


_PHASES = np.linspace(0.0, math.pi, 32, endpoint=False)


def _remainder_check(reference, approx, lambdas, order) -> ExpansionCheck:
    lam = np.asarray(lambdas, dtype=float)
    if np.any(lam < 10):
        raise DomainError("remainder checks need every lam >= 10")
    pts = lam[:, None] + _PHASES[None, :]
    rem = (reference(pts.ravel()) - approx(pts.ravel())).reshape(pts.shape)
    # demodulate: x^order R(x) ~ a cos x + b sin x over half a period
    y = rem * pts**order
    scaled = np.empty(lam.size)
    for i in range(lam.size):
        basis = np.column_stack([np.cos(pts[i]), np.sin(pts[i])])
        coef, *_ = np.linalg.lstsq(basis, y[i], rcond=None)
        scaled[i] = math.hypot(*coef)
    err = scaled * lam**-order
    if lam.size >= 2 and np.all(err > 0):
        slope = float(np.polyfit(np.log(lam), np.log(err), 1)[0])
    else:
        slope = -math.inf if np.all(err == 0) else math.nan
    return ExpansionCheck(tuple(lam.tolist()), tuple(err.tolist()), tuple(scaled.tolist()),
                          -order, slope, float(np.max(scaled)))


def verify_bessel_expansion(nu: float, K: int, lambdas: Sequence[float]) -> ExpansionCheck:
    """Remainder of the K-term expansion of J_nu against ``bessel_j``."""
    exp = build_expansion(nu, K)
    return _remainder_check(lambda x: bessel_j(nu, x), lambda x: expansion_eval(exp, x),
                            lambdas, K + 1.5)


def verify_fd_expansion(d: int, K: int, lambdas: Sequence[float]) -> ExpansionCheck:
    """Remainder of the K-term expansion of F_d against direct quadrature."""
    if d < 2:
        raise DomainError("F_d needs d >= 2")
    return _remainder_check(lambda x: surface_fourier(d, x, "quadrature"),
                            lambda x: fd_expansion_eval(d, K, x),
                            lambdas, K + (d + 1) / 2.0)
