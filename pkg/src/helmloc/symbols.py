"""Symbols Phi: [0, inf) -> R and admissibility checks.

A symbol defines the Fourier multiplier Phi(-Laplacian).  This module holds
the built-in catalogue, derivative evaluation, and the numerical checkers for
growth at infinity, integrability of weighted derivatives at the origin, and
uni-valence at the level Phi(1).

All checks return numerical evidence with explicit witnesses; none of them
is a proof.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, NamedTuple, Optional, Sequence

import numpy as np
from scipy.special import poch

__all__ = [
    "DomainError",
    "DerivativeAccuracyWarning",
    "Symbol",
    "Witness",
    "ConditionReport",
    "eval_symbol",
    "evaluate",
    "eval_derivative",
    "derivative_values",
    "finite_difference_derivative",
    "builtin_symbol",
    "BUILTIN_NAMES",
    "check_growth",
    "check_singularity",
    "check_univalence",
    "detect_j0",
    "full_condition_report",
]

DEFAULT_Z0 = 2.0
DEFAULT_EPS0 = 0.5
J0_TOL = 1e-9

# dyadic ratio test for the small-z integrals
_RATIO_THRESHOLD = 0.9
_RATIO_WINDOW = 10
_MIN_BLOCKS = 30
_MAX_BLOCKS = 400
_GAUSS_ORDER = 16

_UNIVALENCE_POINTS = 4096
_UNIVALENCE_DELTA = 1e-3


class DomainError(ValueError):
    """Argument outside the domain of an operation."""


class DerivativeAccuracyWarning(RuntimeWarning):
    """Richardson extrapolation of a finite-difference derivative stagnated."""


@dataclass(frozen=True)
class Symbol:
    """An evaluable symbol with optional closed-form derivatives.

    ``func`` must accept numpy arrays.  When ``holomorphic`` is set it must
    also accept complex arrays; derivatives are then taken by contour
    integration instead of finite differences.  ``analytic_radius`` is the
    distance from the origin to the nearest singularity of the continuation
    (0 for a branch point at the origin, inf for entire functions).
    """

    name: str
    func: Callable[[np.ndarray], np.ndarray]
    params: Mapping[str, float] = field(default_factory=dict)
    derivative: Optional[Callable[[int, np.ndarray], np.ndarray]] = None
    holomorphic: bool = False
    analytic_radius: float = 0.0
    z0: float = DEFAULT_Z0
    eps0: float = DEFAULT_EPS0

    def __post_init__(self):
        if not self.z0 >= 2:
            raise DomainError(f"z0 must be >= 2, got {self.z0}")
        if not 0 < self.eps0 <= 0.5:
            raise DomainError(f"eps0 must lie in (0, 1/2], got {self.eps0}")

    def __call__(self, z):
        return evaluate(self, z)

    def scaled(self, c: float) -> "Symbol":
        """Return the symbol c * Phi."""
        func, deriv = self.func, self.derivative
        new_deriv = None
        if deriv is not None:
            def new_deriv(k, z):
                return c * np.asarray(deriv(k, z))
        return replace(
            self,
            name=f"{c!r}*{self.name}",
            func=lambda z: c * np.asarray(func(z)),
            derivative=new_deriv,
        )

    def describe(self) -> dict:
        return {"name": self.name, "params": dict(self.params),
                "z0": self.z0, "eps0": self.eps0}


class Witness(NamedTuple):
    """A probe point where a condition failed or was borderline."""

    tag: str
    z: float
    value: float
    bracket: Optional[tuple] = None

    def to_dict(self) -> dict:
        out = {"tag": self.tag, "z": self.z, "value": self.value}
        if self.bracket is not None:
            out["bracket"] = list(self.bracket)
        return out


@dataclass(frozen=True)
class ConditionReport:
    d: int
    mode: str
    growth_pass: bool
    growth_exponents: list
    singularity_terms: list
    singularity_pass: bool
    univalence_pass: bool
    phi_at_one: float
    j0: Optional[int]
    first_nonzero_derivative: float
    failure_witnesses: list

    @property
    def passed(self) -> bool:
        return self.growth_pass and self.singularity_pass and self.univalence_pass

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "mode": self.mode,
            "growth_pass": self.growth_pass,
            "growth_exponents": [float(x) for x in self.growth_exponents],
            "singularity_terms": [float(x) for x in self.singularity_terms],
            "singularity_pass": self.singularity_pass,
            "univalence_pass": self.univalence_pass,
            "phi_at_one": self.phi_at_one,
            "j0": self.j0,
            "first_nonzero_derivative": self.first_nonzero_derivative,
            "failure_witnesses": [w.to_dict() for w in self.failure_witnesses],
            "passed": self.passed,
        }


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def _call_vectorized(func, z: np.ndarray) -> np.ndarray:
    try:
        out = np.asarray(func(z))
        if out.shape == z.shape:
            return out
        if out.shape == ():
            return np.full(z.shape, out[()])
    except (TypeError, ValueError):
        pass
    return np.array([func(v) for v in z.ravel()]).reshape(z.shape)


def evaluate(sym: Symbol, z) -> np.ndarray:
    """Vectorized Phi(z) for z >= 0."""
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)) or np.any(z < 0):
        raise DomainError("symbol argument must be finite and >= 0")
    with np.errstate(all="ignore"):
        out = _call_vectorized(sym.func, z)
    return np.real(out).astype(float)


def eval_symbol(sym: Symbol, z: float) -> float:
    return float(evaluate(sym, np.asarray(float(z))))


def _central_difference(func, k: int, z: float, h: float) -> tuple:
    """k-th central difference and its roundoff level."""
    offsets = (k / 2.0 - np.arange(k + 1)) * h
    coeffs = np.array([(-1) ** i * math.comb(k, i) for i in range(k + 1)], dtype=float)
    vals = np.real(_call_vectorized(func, z + offsets))
    noise = np.finfo(float).eps * float(np.dot(np.abs(coeffs), np.abs(vals))) / h**k
    return float(np.dot(coeffs, vals) / h**k), noise


def _initial_step(k: int, z: float) -> float:
    # Base step from the 1st-derivative rule; higher orders need a wider
    # stencil against roundoff (error ~ eps / h^k).  The stencil reaches
    # z - k h / 2 and must stay inside (0, inf).  Rounding down to a power of
    # two makes every node z + j h / 2 exactly representable.
    h = min(max(1e-3, 1e-3 * z) * 10.0 ** min(k - 1, 3), 1.8 * z / k)
    return 2.0 ** math.floor(math.log2(h))


def finite_difference_derivative(sym: Symbol, k: int, z: float, levels: int = 6) -> float:
    """k-th derivative by central differences with Richardson extrapolation.

    The step is halved ``levels - 1`` times; the tableau entry with the
    smallest error estimate is returned, so roundoff at small steps cannot
    spoil an already converged value.  Error estimates include the roundoff
    level of the finest difference used; a warning is raised only when the
    tableau disagreement exceeds what roundoff explains.
    """
    if k == 0:
        return eval_symbol(sym, z)
    h = _initial_step(k, z)
    rows = [_central_difference(sym.func, k, z, h / 2**i) for i in range(levels)]
    table = [[value] for value, _ in rows]
    best, err, floor = table[0][0], math.inf, 0.0
    for i in range(1, levels):
        for j in range(1, i + 1):
            factor = 4.0**j
            table[i].append(table[i][j - 1] + (table[i][j - 1] - table[i - 1][j - 1]) / (factor - 1))
            e = max(abs(table[i][j] - table[i][j - 1]), abs(table[i][j] - table[i - 1][j - 1]))
            e += 2.0 * rows[i][1]
            if e < err:
                best, err, floor = table[i][j], e, 4.0 * rows[i][1]
    # a vanishing derivative is judged against the natural size |Phi(z)| / z^k
    natural = 1e-3 * abs(float(np.real(_call_vectorized(sym.func, np.array([z]))[0]))) / z**k
    scale = max(abs(best), max(abs(row[0]) for row in table) * 1e-8, natural, 1e-300)
    # an estimate within the roundoff floor is as good as the arithmetic allows
    if not math.isfinite(best) or err > 1e-6 * scale + floor:
        warnings.warn(
            f"finite-difference derivative k={k} at z={z!r} did not converge "
            f"(error estimate {err:.3g})",
            DerivativeAccuracyWarning,
            stacklevel=2,
        )
    return best


def _cauchy_radius(z: np.ndarray, analytic_radius: float) -> np.ndarray:
    # Stay at half the distance to the nearest singularity; the cap keeps
    # exponentially varying symbols from losing everything to cancellation.
    return np.minimum(0.5 * (z + analytic_radius), np.maximum(4.0, z / 16.0))


def _cauchy_derivative(func, k: int, z: np.ndarray, analytic_radius: float = 0.0,
                       n: int = 64) -> np.ndarray:
    n = max(n, 4 * k + 8)
    r = _cauchy_radius(z, analytic_radius)
    theta = 2 * np.pi * np.arange(n) / n
    circle = np.exp(1j * theta)
    w = z[..., None] + r[..., None] * circle
    with np.errstate(all="ignore"):
        vals = np.asarray(func(w))
    coeff = np.mean(vals * np.exp(-1j * k * theta), axis=-1)
    return np.real(coeff) * math.factorial(k) / r**k


def derivative_values(sym: Symbol, k: int, z, method: Optional[str] = None) -> np.ndarray:
    """Vectorized k-th derivative at points z > 0.

    ``method`` is one of ``"analytic"``, ``"cauchy"``, ``"richardson"``; the
    default picks the most accurate one the symbol supports.
    """
    z = np.asarray(z, dtype=float)
    if k < 0:
        raise DomainError("derivative order must be >= 0")
    if not np.all(np.isfinite(z)) or np.any(z <= 0):
        raise DomainError("derivative argument must be finite and > 0")
    if method is None:
        if sym.derivative is not None:
            method = "analytic"
        elif sym.holomorphic:
            method = "cauchy"
        else:
            method = "richardson"
    if k == 0 and method != "richardson":
        return evaluate(sym, z)
    if method == "analytic":
        if sym.derivative is None:
            raise ValueError(f"symbol {sym.name!r} has no analytic derivative")
        with np.errstate(all="ignore"):
            return np.asarray(sym.derivative(k, z), dtype=float) * np.ones_like(z)
    if method == "cauchy":
        if not sym.holomorphic:
            raise ValueError(f"symbol {sym.name!r} cannot be evaluated off the real axis")
        return _cauchy_derivative(sym.func, k, z, sym.analytic_radius)
    if method == "richardson":
        if z.size == 1:
            return np.array(finite_difference_derivative(sym, k, float(z.ravel()[0]))).reshape(z.shape)
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DerivativeAccuracyWarning)
            flat = [finite_difference_derivative(sym, k, float(v)) for v in z.ravel()]
        stalled = [w for w in caught if issubclass(w.category, DerivativeAccuracyWarning)]
        if stalled:
            warnings.warn(
                f"finite-difference derivative k={k} did not converge at {len(stalled)} of "
                f"{z.size} points ({stalled[0].message})",
                DerivativeAccuracyWarning,
                stacklevel=2,
            )
        return np.array(flat, dtype=float).reshape(z.shape)
    raise ValueError(f"unknown derivative method {method!r}")


def eval_derivative(sym: Symbol, k: int, z: float, method: Optional[str] = None) -> float:
    """Return the k-th derivative of the symbol at z > 0."""
    return float(derivative_values(sym, k, np.asarray(float(z)), method))


# ---------------------------------------------------------------------------
# catalogue
# ---------------------------------------------------------------------------

def _falling(a: float, k: int) -> float:
    """a (a-1) ... (a-k+1)."""
    return float(poch(a - k + 1, k)) if k else 1.0


def _power(s: float) -> Symbol:
    def func(z):
        return np.power(z, s)

    def deriv(k, z):
        return _falling(s, k) * np.power(z, s - k)

    return Symbol("power", func, {"s": s}, deriv, holomorphic=True)


def _relativistic(s: float, m: float) -> Symbol:
    def func(z):
        return np.power(m * m + z, s / 2) - m

    def deriv(k, z):
        return _falling(s / 2, k) * np.power(m * m + z, s / 2 - k)

    return Symbol("relativistic", func, {"s": s, "m": m}, deriv, holomorphic=True)


def _tanh_dn(z):
    x = np.sqrt(z)
    return x * np.tanh(x)


def _coth_dn(z):
    x = np.sqrt(z)
    small = np.abs(x) < 1e-6
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 3.0, safe / np.tanh(safe))


def _exp_bump(z):
    return z * np.exp(1.0 - z)


BUILTIN_NAMES = ("power", "relativistic", "tanh_dn", "coth_dn", "exp_bump", "custom")


def _positive_param(params: Mapping[str, float], key: str, name: str) -> float:
    if key not in params:
        raise ValueError(f"symbol {name!r} requires parameter {key!r}")
    value = float(params[key])
    if not value > 0:
        raise ValueError(f"parameter {key} must be > 0 for {name!r}, got {value}")
    return value


def builtin_symbol(name: str, params: Optional[Mapping[str, float]] = None, *,
                   func: Optional[Callable] = None, holomorphic: bool = False,
                   z0: float = DEFAULT_Z0, eps0: float = DEFAULT_EPS0) -> Symbol:
    """Build a catalogue symbol.

    ``power``         z**s
    ``relativistic``  (m**2 + z)**(s/2) - m
    ``tanh_dn``       sqrt(z) tanh(sqrt(z))
    ``coth_dn``       sqrt(z) / tanh(sqrt(z))
    ``exp_bump``      z exp(1 - z)
    ``custom``        wraps ``func``
    """
    params = dict(params or {})
    if name == "power":
        sym = _power(_positive_param(params, "s", name))
    elif name == "relativistic":
        sym = _relativistic(_positive_param(params, "s", name), _positive_param(params, "m", name))
    elif name == "tanh_dn":
        # even in sqrt(z): analytic up to the pole at -(pi/2)**2
        sym = Symbol(name, _tanh_dn, {}, holomorphic=True, analytic_radius=math.pi**2 / 4)
    elif name == "coth_dn":
        sym = Symbol(name, _coth_dn, {}, holomorphic=True, analytic_radius=math.pi**2)
    elif name == "exp_bump":
        sym = Symbol(name, _exp_bump, {}, holomorphic=True, analytic_radius=math.inf)
    elif name == "custom":
        if func is None:
            raise ValueError("custom symbol requires an evaluator")
        sym = Symbol(name, func, params, holomorphic=holomorphic)
    else:
        raise ValueError(f"unknown symbol {name!r}; expected one of {BUILTIN_NAMES}")
    return replace(sym, z0=z0, eps0=eps0)


# ---------------------------------------------------------------------------
# condition (a): growth at infinity
# ---------------------------------------------------------------------------

def _slope(logx: np.ndarray, logy: np.ndarray) -> float:
    if logx.size < 2:
        return -math.inf
    return float(np.polyfit(logx, logy, 1)[0])


def check_growth(sym: Symbol, kmax: int = 3, zmax: float = 1e4, n_points: int = 64,
                 witnesses: Optional[list] = None):
    """Fit log|d^k Phi| against log z on [z0, zmax] for k = 0..kmax.

    Passes when no upper-half-window slope exceeds the full-window slope by
    more than 0.5.  Returns ``(passed, exponents)`` where the exponents are
    the upper-window slopes (the asymptotic estimates of n_k).  Points where
    the derivative vanishes are dropped from the fit; a symbol whose
    derivative vanishes everywhere gets exponent -inf.
    """
    if kmax < 0:
        raise DomainError("kmax must be >= 0")
    if not zmax >= 4 * sym.z0:
        raise DomainError(f"zmax must be >= 4*z0 = {4 * sym.z0}")
    z = np.geomspace(sym.z0, zmax, n_points)
    upper = z >= math.sqrt(sym.z0 * zmax)
    passed = True
    exponents = []
    for k in range(kmax + 1):
        vals = derivative_values(sym, k, z)
        bad = ~np.isfinite(vals)
        if np.any(bad):
            i = int(np.argmax(bad))
            if witnesses is not None:
                witnesses.append(Witness(f"a:k={k}:nonfinite", float(z[i]), float(vals[i])))
            passed = False
            exponents.append(math.inf)
            continue
        keep = np.abs(vals) > 0
        logz, logv = np.log(z[keep]), np.log(np.abs(vals[keep]))
        full = _slope(logz, logv)
        up = _slope(logz[upper[keep]], logv[upper[keep]])
        exponents.append(up)
        if up > full + 0.5:
            passed = False
            if witnesses is not None:
                witnesses.append(Witness(f"a:k={k}:superpolynomial", float(zmax), up - full))
    return passed, exponents


# ---------------------------------------------------------------------------
# condition (b): mild singularity at 0
# ---------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GAUSS_ORDER)


def _singularity_term(sym: Symbol, j: int, eps0: float):
    """Integral of z^(j-1) |d^j Phi(z)| over (0, eps0] by dyadic blocks.

    Returns ``(value, converged, witness)``.
    """
    blocks: list = []
    n = 0
    chunk = 40
    while n < _MAX_BLOCKS:
        idx = np.arange(n, n + chunk)
        hi = eps0 * 2.0 ** (-idx)
        lo = hi / 2
        half = (hi - lo) / 2
        zz = (lo + hi)[:, None] / 2 + half[:, None] * _GL_NODES[None, :]
        try:
            dv = derivative_values(sym, j, zz)
        except (ArithmeticError, ValueError) as exc:
            return math.inf, False, Witness(f"b:j={j}:evaluation", float(zz.min()), math.nan)
        with np.errstate(all="ignore"):
            f = zz ** (j - 1) * np.abs(dv)
        sums = half * (f @ _GL_WEIGHTS)
        for i, s in enumerate(sums):
            if not math.isfinite(s):
                return math.inf, False, Witness(f"b:j={j}:nonfinite", float(hi[i]), float(s))
        blocks.extend(sums.tolist())
        n += chunk
        if n >= _MIN_BLOCKS and _ratio_test(blocks):
            total = sum(blocks)
            if blocks[-1] <= 1e-17 * total or total == 0:
                break
    b = np.array(blocks)
    total = float(b.sum())
    if not _ratio_test(blocks):
        return math.inf, False, Witness(f"b:j={j}:divergent", float(eps0 * 2.0 ** (-len(blocks))), float(b[-1]))
    q = _tail_ratio(b)
    if 0 < q < 1:
        total += float(b[-1]) * q / (1 - q)
    return total, True, None


def _ratios(b: np.ndarray) -> np.ndarray:
    prev, cur = b[:-1], b[1:]
    with np.errstate(all="ignore"):
        r = np.where(prev > 0, cur / np.where(prev > 0, prev, 1.0), np.where(cur > 0, np.inf, 0.0))
    return r


def _ratio_test(blocks) -> bool:
    b = np.asarray(blocks[-(_RATIO_WINDOW + 1):])
    return bool(np.all(_ratios(b) < _RATIO_THRESHOLD))


def _tail_ratio(b: np.ndarray) -> float:
    r = _ratios(b[-(_RATIO_WINDOW + 1):])
    return float(np.mean(r))


def check_singularity(sym: Symbol, d: int, eps0: Optional[float] = None,
                      witnesses: Optional[list] = None):
    """The d+2 integrals of z^(j-1) |d^j Phi| over (0, eps0], j = 0..d+1.

    Returns ``(passed, terms)``; a divergent term is reported as +inf.
    """
    if d < 1:
        raise DomainError("dimension must be >= 1")
    eps0 = sym.eps0 if eps0 is None else eps0
    terms = []
    passed = True
    for j in range(d + 2):
        value, ok, witness = _singularity_term(sym, j, eps0)
        terms.append(value)
        if not ok:
            passed = False
            if witnesses is not None and witness is not None:
                witnesses.append(witness)
    return passed, terms


# ---------------------------------------------------------------------------
# condition (c): uni-valence at z = 1
# ---------------------------------------------------------------------------

def _bisect_bracket(g, a: float, b: float, ga: float, iters: int = 60):
    for _ in range(iters):
        m = 0.5 * (a + b)
        if m in (a, b):
            break
        gm = g(m)
        if gm == 0:
            return m, m
        if (gm > 0) == (ga > 0):
            a, ga = m, gm
        else:
            b = m
    return a, b


def _level_crossings(sym: Symbol, zmax: float, tol: float,
                     delta: float = _UNIVALENCE_DELTA, n_points: int = _UNIVALENCE_POINTS):
    """Witnesses where Phi(t) reaches the level Phi(1) away from t = 1."""
    half = n_points // 2
    left = np.unique(np.concatenate([
        np.geomspace(1e-9, 0.5, half),
        1.0 - np.geomspace(0.5, delta, half),
    ]))
    right = 1.0 + np.geomspace(delta, zmax - 1.0, n_points)
    level = eval_symbol(sym, 1.0)

    def g(t):
        return eval_symbol(sym, t) - level

    found = []
    for grid in (left, right):
        vals = evaluate(sym, grid) - level
        for i in np.flatnonzero(~np.isfinite(vals)):
            found.append(Witness("c:nonfinite", float(grid[i]), float(vals[i])))
        sign = np.sign(vals)
        for i in np.flatnonzero(sign[:-1] * sign[1:] < 0):
            a, b = _bisect_bracket(g, float(grid[i]), float(grid[i + 1]), float(vals[i]))
            mid = 0.5 * (a + b)
            found.append(Witness("c:crossing", mid, g(mid), (float(grid[i]), float(grid[i + 1]))))
        for i in np.flatnonzero(np.abs(vals) <= tol):
            found.append(Witness("c:touch", float(grid[i]), float(vals[i])))
    return found


def check_univalence(sym: Symbol, zmax: float = 100.0, tol: float = 1e-10,
                     delta: float = _UNIVALENCE_DELTA):
    """Check Phi'(1) != 0 and Phi(t) != Phi(1) for t in (0, 1) u (1, zmax].

    Returns ``(passed, witnesses)``.  Crossings are reported with the grid
    bracket that contains them.
    """
    if zmax < 10:
        raise DomainError("zmax must be >= 10")
    witnesses = _level_crossings(sym, zmax, tol, delta)
    slope = eval_derivative(sym, 1, 1.0)
    if not abs(slope) > tol:
        witnesses.append(Witness("c:derivative", 1.0, slope))
    return not witnesses, witnesses


def detect_j0(sym: Symbol, jmax: int = 8, tol: float = J0_TOL):
    """Order of the first derivative at z = 1 exceeding ``tol`` in size.

    Returns ``(j0, value)``; ``j0`` is None when every tested derivative is
    below the threshold.
    """
    if jmax < 1:
        raise DomainError("jmax must be >= 1")
    for j in range(1, jmax + 1):
        value = eval_derivative(sym, j, 1.0)
        if abs(value) > tol:
            return j, value
    return None, 0.0


MODES = ("strict_c", "general_c3")


def full_condition_report(sym: Symbol, d: int, mode: str = "strict_c", *,
                          kmax: int = 3, zmax_growth: float = 1e4,
                          zmax_univalence: float = 100.0, tol: float = J0_TOL) -> ConditionReport:
    """Run every checker and aggregate the verdicts.

    ``strict_c`` requires Phi'(1) != 0; ``general_c3`` requires Phi(1) != 0
    and a finite order j0 of the first non-vanishing derivative at 1.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if d < 1:
        raise DomainError("dimension must be >= 1")
    witnesses: list = []
    growth_pass, exponents = check_growth(sym, kmax, zmax_growth, witnesses=witnesses)
    sing_pass, terms = check_singularity(sym, d, witnesses=witnesses)

    crossings = _level_crossings(sym, zmax_univalence, tol)
    witnesses.extend(crossings)
    phi1 = eval_symbol(sym, 1.0)
    j0, value = detect_j0(sym, tol=tol)
    phi1_nonzero = abs(phi1) > tol
    if mode == "strict_c":
        slope = eval_derivative(sym, 1, 1.0)
        clause = abs(slope) > tol
        if not clause:
            witnesses.append(Witness("c:derivative", 1.0, slope))
    else:
        clause = phi1_nonzero and j0 is not None
        if not phi1_nonzero:
            witnesses.append(Witness("c3:phi_at_one", 1.0, phi1))
        if j0 is None:
            witnesses.append(Witness("c3:j0", 1.0, value))
    if not phi1_nonzero:
        j0, value = None, 0.0
    return ConditionReport(
        d=d,
        mode=mode,
        growth_pass=growth_pass,
        growth_exponents=exponents,
        singularity_terms=terms,
        singularity_pass=sing_pass,
        univalence_pass=clause and not crossings,
        phi_at_one=phi1,
        j0=j0,
        first_nonzero_derivative=value,
        failure_witnesses=witnesses,
    )
