"""Complete Bernstein symbols with finitely many atoms.

    Phi(lam) = c1 + c2 lam + sum_i w_i lam / ((lam + s_i) s_i)

Every summand is increasing and concave, which gives lam Phi'(lam) <= Phi(lam)
and strictly positive Phi(1), Phi'(1) for any nontrivial instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .symbols import DomainError, Symbol

__all__ = [
    "BernsteinSymbol",
    "BoundCheck",
    "bernstein_eval",
    "bernstein_derivative",
    "bernstein_derivative_k",
    "verify_derivative_bound",
    "verify_nondegeneracy",
    "as_symbol",
    "random_bernstein",
]


@dataclass(frozen=True)
class BernsteinSymbol:
    c1: float = 0.0
    c2: float = 0.0
    atoms: tuple = ()

    def __post_init__(self):
        if not (self.c1 >= 0 and self.c2 >= 0) or not (math.isfinite(self.c1) and math.isfinite(self.c2)):
            raise DomainError("c1 and c2 must be finite and >= 0")
        atoms = tuple((float(s), float(w)) for s, w in self.atoms)
        for s, w in atoms:
            if not (s > 0 and w > 0 and math.isfinite(s) and math.isfinite(w)):
                raise DomainError(f"atom ({s}, {w}) needs positive finite location and weight")
        object.__setattr__(self, "atoms", atoms)

    @property
    def trivial(self) -> bool:
        """True when Phi vanishes identically."""
        return self.c1 == 0 and self.c2 == 0 and not self.atoms

    def _arrays(self):
        if not self.atoms:
            return np.zeros(0), np.zeros(0)
        s, w = np.array(self.atoms).T
        return s, w

    def to_dict(self) -> dict:
        return {"c1": self.c1, "c2": self.c2, "atoms": [list(a) for a in self.atoms]}


def _as_array(lam):
    x = np.asarray(lam, dtype=float)
    return x, x.ndim == 0


def bernstein_eval(bs: BernsteinSymbol, lam):
    x, scalar = _as_array(lam)
    if np.any(x < 0) or np.any(~np.isfinite(x)):
        raise DomainError("lambda must be finite and >= 0")
    s, w = bs._arrays()
    xs = x[..., None]
    out = bs.c1 + bs.c2 * x + np.sum(w * xs / ((xs + s) * s), axis=-1)
    return float(out) if scalar else out


def bernstein_derivative_k(bs: BernsteinSymbol, k: int, lam):
    """k-th derivative; for k >= 2 only the atoms contribute."""
    if k < 0:
        raise DomainError("derivative order must be >= 0")
    if k == 0:
        return bernstein_eval(bs, lam)
    x, scalar = _as_array(lam)
    if np.any(x <= 0) or np.any(~np.isfinite(x)):
        raise DomainError("lambda must be finite and > 0")
    s, w = bs._arrays()
    xs = x[..., None]
    # d^k/dlam^k [lam/(lam+s)] = (-1)^(k+1) k! s / (lam+s)^(k+1)
    atoms = (-1) ** (k + 1) * math.factorial(k) * np.sum(w / (xs + s) ** (k + 1), axis=-1)
    out = atoms + (bs.c2 if k == 1 else 0.0)
    return float(out) if scalar else out


def bernstein_derivative(bs: BernsteinSymbol, lam):
    return bernstein_derivative_k(bs, 1, lam)


class BoundCheck(NamedTuple):
    passed: bool
    max_ratio: float
    violations: int


def verify_derivative_bound(bs: BernsteinSymbol, lambdas: Sequence[float]) -> BoundCheck:
    """Check lam Phi'(lam) <= Phi(lam) + 1e-12 at every probe."""
    if bs.trivial:
        raise DomainError("the zero symbol is excluded")
    lam = np.asarray(lambdas, dtype=float)
    lhs = lam * bernstein_derivative(bs, lam)
    rhs = bernstein_eval(bs, lam)
    bad = int(np.sum(lhs > rhs + 1e-12))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, 0.0)
    return BoundCheck(bad == 0, float(np.max(ratio, initial=0.0)), bad)


def verify_nondegeneracy(bs: BernsteinSymbol) -> tuple:
    """(|Phi(1)| > 1e-12, |Phi'(1)| > 1e-12); needs c2 > 0 or at least one atom."""
    if bs.c2 == 0 and not bs.atoms:
        raise DomainError("symbol has no c2 term and no atoms; Phi'(1) vanishes identically")
    return abs(bernstein_eval(bs, 1.0)) > 1e-12, abs(bernstein_derivative(bs, 1.0)) > 1e-12


def as_symbol(bs: BernsteinSymbol, name: str = "bernstein") -> Symbol:
    """Wrap as a Symbol with closed-form derivatives of every order."""
    if bs.c1 > 0:
        raise DomainError(
            f"c1 = {bs.c1} > 0 gives Phi(0) = c1 != 0, so the small-z integral "
            "of Phi(z)/z diverges; c1 must be 0"
        )
    if bs.trivial:
        raise DomainError("the zero symbol is excluded")
    s, _ = bs._arrays()
    radius = float(s.min()) if s.size else math.inf
    return Symbol(
        name,
        lambda z: bernstein_eval(bs, z),
        {"c2": bs.c2, "n_atoms": len(bs.atoms)},
        derivative=lambda k, z: bernstein_derivative_k(bs, k, z),
        holomorphic=True,
        analytic_radius=radius,
    )


def random_bernstein(rng: np.random.Generator, n_atoms: int = 5, c2: float | None = None) -> BernsteinSymbol:
    """Atoms with log-uniform locations in [1e-2, 1e2] and weights in [1e-2, 10]."""
    s = 10.0 ** rng.uniform(-2, 2, n_atoms)
    w = 10.0 ** rng.uniform(-2, 1, n_atoms)
    if c2 is None:
        c2 = float(rng.uniform(0, 1)) if rng.uniform() < 0.5 else 0.0
    return BernsteinSymbol(0.0, c2, tuple(zip(s.tolist(), w.tolist())))
