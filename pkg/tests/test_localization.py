import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from helmloc.localization import (
    quotient_profile,
    random_sphere_function,
    run_contrapositive_check,
    run_forward_check,
    run_j0_check,
    spectral_support_profile,
    unit_sphere_modes,
)
from helmloc.multiplier import GridFunction, sample
from helmloc.symbols import DomainError, builtin_symbol

TWO_PI = 2 * math.pi
SQRT = builtin_symbol("power", {"s": 0.5})
EXP_BUMP = builtin_symbol("exp_bump")
BUILTINS = [
    builtin_symbol("power", {"s": 0.25}),
    SQRT,
    builtin_symbol("power", {"s": 1}),
    builtin_symbol("power", {"s": 2}),
    builtin_symbol("relativistic", {"s": 1, "m": 1}),
    builtin_symbol("relativistic", {"s": 2, "m": 1}),
    builtin_symbol("tanh_dn"),
]


def symbolic_derivative(expr, j, at=1):
    z = sp.Symbol("z", positive=True)
    return float(sp.diff(expr(z), z, j).subs(z, at))


# -- support profiles --------------------------------------------------------

def test_support_examples():
    shape, box = (16,), (TWO_PI,)
    p = spectral_support_profile(sample(lambda x: np.cos(x), shape, box))
    assert p.mass_on_sphere == pytest.approx(1.0, abs=1e-14)
    p = spectral_support_profile(sample(lambda x: np.ones_like(x), shape, box))
    assert p.mass_at_zero == pytest.approx(1.0, abs=1e-14)
    p = spectral_support_profile(sample(lambda x: np.cos(x) + np.cos(2 * x), shape, box))
    assert p.mass_on_sphere == pytest.approx(0.5, abs=1e-14)
    assert p.mass_elsewhere == pytest.approx(0.5, abs=1e-14)


def test_support_rejects_bad_input():
    gf = sample(lambda x: np.cos(x), (8,), (TWO_PI,))
    with pytest.raises(DomainError):
        spectral_support_profile(gf, 0.5)
    with pytest.raises(ValueError):
        spectral_support_profile(gf.with_data(np.zeros(8)))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.floats(1e-3, 1e3), st.floats(0.01, 0.49))
def test_support_fractions_scale_free(seed, c, delta):
    rng = np.random.default_rng(seed)
    gf = GridFunction(2, (8, 8), (TWO_PI, 2 * TWO_PI), rng.standard_normal((8, 8)))
    p = spectral_support_profile(gf, delta)
    q = spectral_support_profile(gf.with_data(c * gf.data), delta)
    assert p.mass_at_zero + p.mass_on_sphere + p.mass_elsewhere == pytest.approx(1.0, abs=1e-10)
    for a, b in zip((p.mass_at_zero, p.mass_on_sphere, p.mass_elsewhere),
                    (q.mass_at_zero, q.mass_on_sphere, q.mass_elsewhere)):
        assert b == pytest.approx(a, abs=1e-12)


# -- forward direction -------------------------------------------------------

def test_unit_sphere_modes():
    m = unit_sphere_modes((8, 8), (TWO_PI, TWO_PI))
    assert sorted(map(tuple, m)) == [(-1, 0), (0, -1), (0, 1), (1, 0)]
    assert unit_sphere_modes((8,), (5.0,)).shape == (0, 1)
    with pytest.raises(DomainError):
        random_sphere_function(np.random.default_rng(0), (8,), (5.0,), 2)


def test_sphere_function_is_on_sphere():
    u = random_sphere_function(np.random.default_rng(1), (8, 8, 8), (2 * TWO_PI,) * 3, 6)
    assert spectral_support_profile(u, 0.01).mass_on_sphere == pytest.approx(1.0, abs=1e-12)
    assert np.max(np.abs(u.data.imag)) == 0


def test_forward_one_dim_classical_solutions():
    assert run_forward_check(SQRT, 1, n_modes=8, seed=0) <= 1e-12


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("sym", BUILTINS + [EXP_BUMP], ids=lambda s: f"{s.name}{dict(s.params)}")
def test_forward_all_builtins(sym, d):
    assert run_forward_check(sym, d, n_modes=8, seed=d) <= 1e-11
    assert run_forward_check(sym, d, n_modes=1, seed=5, n_terms=1) <= 1e-12


def test_forward_is_seeded():
    a = run_forward_check(SQRT, 2, seed=11, box_multiple=2)
    b = run_forward_check(SQRT, 2, seed=11, box_multiple=2)
    assert a == b


# -- contrapositive ----------------------------------------------------------

def test_contrapositive_single_mode():
    u = sample(lambda x: np.cos(2 * x), (16,), (TWO_PI,))
    res = run_contrapositive_check(SQRT, u)
    assert res.passed
    assert res.lower_bound == pytest.approx(u.l2_norm(), rel=1e-12)
    assert res.observed == pytest.approx(u.l2_norm(), rel=1e-12)


def test_contrapositive_two_modes_parseval():
    u = sample(lambda x: np.cos(2 * x) + np.cos(3 * x), (16,), (TWO_PI,))
    res = run_contrapositive_check(SQRT, u)
    # ||cos(kx)||^2 = pi on [0, 2 pi)
    expected = math.sqrt((2 - 1) ** 2 * math.pi + (3 - 1) ** 2 * math.pi)
    assert res.observed == pytest.approx(expected, rel=1e-12)
    assert res.passed and res.lower_bound > 0


def test_contrapositive_rejects_excluded_modes():
    with pytest.raises(ValueError, match="xi"):
        run_contrapositive_check(SQRT, sample(lambda x: np.cos(x) + np.cos(3 * x), (16,), (TWO_PI,)))
    with pytest.raises(ValueError, match="xi"):
        run_contrapositive_check(SQRT, sample(lambda x: 1 + np.cos(3 * x), (16,), (TWO_PI,)))


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(0, len(BUILTINS) - 1))
def test_contrapositive_random_off_sphere(seed, which):
    rng = np.random.default_rng(seed)
    shape = (8, 8)
    coef = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    k = np.meshgrid(*[np.fft.fftfreq(8, 1 / 8)] * 2, indexing="ij")
    r = np.sqrt(k[0] ** 2 + k[1] ** 2)
    coef[(r == 0) | (np.abs(r - 1) <= 0.1)] = 0
    gf = GridFunction(2, shape, (TWO_PI, TWO_PI), np.fft.ifftn(coef))
    res = run_contrapositive_check(BUILTINS[which], gf)
    assert res.passed and res.lower_bound > 0


# -- quotient ----------------------------------------------------------------

@pytest.mark.parametrize("sym,j0,expected", [
    (SQRT, 1, 2.0),
    (builtin_symbol("power", {"s": 2}), 1, 0.5),
    (EXP_BUMP, 2, -2.0),
])
def test_quotient_limit_examples(sym, j0, expected):
    prof = quotient_profile(sym, j0)
    assert prof.limit_at_one == pytest.approx(expected, rel=1e-5)
    assert prof.expected_limit == pytest.approx(expected, rel=1e-5)
    assert np.all(np.isfinite(prof.values))
    assert prof.max_abs >= abs(prof.limit_at_one)


def test_exp_bump_second_derivative_oracle():
    d2 = symbolic_derivative(lambda z: z * sp.exp(1 - z), 2)
    assert d2 == -1.0
    assert quotient_profile(EXP_BUMP, 2).limit_at_one == pytest.approx(2 / d2, rel=1e-5)


@pytest.mark.parametrize("sym,expr", [
    (builtin_symbol("power", {"s": 0.25}), lambda z: z ** sp.Rational(1, 4)),
    (builtin_symbol("power", {"s": 1}), lambda z: z),
    (builtin_symbol("relativistic", {"s": 1, "m": 1}), lambda z: sp.sqrt(1 + z) - 1),
    (builtin_symbol("relativistic", {"s": 2, "m": 1}), lambda z: (1 + z) - 1),
    (builtin_symbol("tanh_dn"), lambda z: sp.sqrt(z) * sp.tanh(sp.sqrt(z))),
])
def test_quotient_limit_all_builtins(sym, expr):
    prof = quotient_profile(sym, 1)
    assert prof.limit_at_one == pytest.approx(1 / symbolic_derivative(expr, 1), rel=1e-5)
    assert prof.limit_error <= 1e-5


def test_quotient_flags_univalence_violation():
    sym = builtin_symbol("custom", func=lambda z: (np.asarray(z, dtype=float) - 1.1) ** 2)
    # Phi(t) - Phi(1) = (t - 1)(t - 1.2) changes sign inside the window
    with pytest.raises(ArithmeticError, match="univalence"):
        quotient_profile(sym, 1, window=0.3)


def test_quotient_domain():
    with pytest.raises(DomainError):
        quotient_profile(SQRT, 0)
    with pytest.raises(DomainError):
        quotient_profile(SQRT, 1, window=0.6)


# -- j0 check ----------------------------------------------------------------

@pytest.mark.parametrize("sym,j0", [
    (SQRT, 1),
    (EXP_BUMP, 2),
    (builtin_symbol("relativistic", {"s": 2, "m": 1}), 1),
])
def test_j0_check_examples(sym, j0):
    chk = run_j0_check(sym, 2)
    assert chk.j0 == j0
    assert chk.quotient_bounded
    assert abs(chk.scaling_exponent - j0) <= 0.05
    assert chk.polyharmonic_relative <= 1e-12


@settings(max_examples=10, deadline=None)
@given(st.floats(0.01, 100))
def test_j0_exponent_scale_invariant(c):
    a = run_j0_check(EXP_BUMP, 1)
    b = run_j0_check(EXP_BUMP.scaled(c), 1)
    assert b.j0 == a.j0
    # Phi(1+h) - Phi(1) ~ h^2/2 at h = 1e-4 carries ~1e-8 relative rounding
    assert b.scaling_exponent == pytest.approx(a.scaling_exponent, abs=1e-6)


def test_j0_check_rejects_constant():
    one = builtin_symbol("custom", func=lambda z: np.ones_like(np.asarray(z, dtype=float)))
    with pytest.raises(ValueError):
        run_j0_check(one, 1)
