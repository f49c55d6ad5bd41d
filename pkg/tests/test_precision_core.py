"""Tests for the precision substrate: contexts, AGM branch policy, root finding."""

import random
from fractions import Fraction

import mpmath as mp
import pytest

from legrel.errors import PrecisionError
from legrel.precision_core import (
    Polynomial,
    agm,
    eps,
    extra_digits,
    get_precision,
    poly_roots,
    set_precision,
    to_mpc,
    working_digits,
)

# Classic AGM reference value, computed independently with mpmath's own
# mp.agm at 80 digits and frozen here to 60.
AGM_24_6 = mp.mpf(
    "13.4581714817256154207668131569743992430538388544396598555129"
)


def test_eps_matches_working_precision():
    assert mp.almosteq(eps(0), mp.mpf(10) ** (-64))
    assert mp.almosteq(eps(5), mp.mpf(10) ** (5 - 64))
    with working_digits(40):
        assert mp.almosteq(eps(0), mp.mpf(10) ** (-40))


def test_working_digits_restores_on_exit_and_error():
    assert get_precision() == 64
    with working_digits(100):
        assert get_precision() == 100
        with extra_digits(20):
            assert get_precision() == 120
        assert get_precision() == 100
    assert get_precision() == 64
    with pytest.raises(RuntimeError):
        with working_digits(80):
            raise RuntimeError("boom")
    assert get_precision() == 64


def test_set_precision_floor():
    with pytest.raises(PrecisionError):
        set_precision(10)
    set_precision(64)


def test_agm_real_reference_value():
    got = agm(mp.mpf(24), mp.mpf(6))
    assert abs(got - AGM_24_6) < eps(7)
    assert abs(agm(1, 1) - 1) < eps(5)


def test_agm_between_means_random_positive():
    rng = random.Random(20260826)
    for _ in range(25):
        a = mp.mpf(rng.uniform(0.1, 50.0))
        b = mp.mpf(rng.uniform(0.1, 50.0))
        m = agm(a, b)
        lo = mp.sqrt(a * b)
        hi = (a + b) / 2
        assert lo - eps(8) <= m.real <= hi + eps(8)
        assert abs(m.imag) < eps(8)


def test_agm_symmetry_and_scaling():
    rng = random.Random(7)
    for _ in range(10):
        a = mp.mpc(rng.uniform(0.2, 3), rng.uniform(-1, 1))
        b = mp.mpc(rng.uniform(0.2, 3), rng.uniform(-1, 1))
        assert abs(agm(a, b) - agm(b, a)) < eps(8)
        c = mp.mpf("2.5")
        assert abs(agm(c * a, c * b) - c * agm(a, b)) < eps(6) * (1 + abs(agm(a, b)))


def test_agm_complex_right_choice_consistency():
    # agm(1, i) has a classical closed-form modulus; independently derived:
    # agm(1, i) = (1+i) * agm(1, 1/sqrt(2)) / sqrt(2)... simpler: freeze the
    # value computed from the defining recursion with the |a-b| <= |a+b| rule
    # carried out by hand at one step and mpmath thereafter.
    got = agm(mp.mpc(1), mp.mpc(0, 1))
    ref = mp.mpc(
        mp.mpf("0.5990701173677961037199612461401619391136063316078257791318"),
        mp.mpf("0.5990701173677961037199612461401619391136063316078257791318"),
    )
    assert abs(got - ref) < eps(8)


def test_polynomial_arithmetic_exact():
    p = Polynomial([Fraction(1), Fraction(2), Fraction(1)])  # 1 + 2x + x^2
    q = Polynomial([Fraction(-1), Fraction(1)])  # x - 1
    prod = p * q
    # (x+1)^2 (x-1) = x^3 + x^2 - x - 1
    assert list(prod.coeffs) == [Fraction(-1), Fraction(-1), Fraction(1), Fraction(1)]
    assert p.degree == 2 and prod.degree == 3
    assert prod(Fraction(2)) == Fraction(9)


def test_polynomial_gcd_and_derivative():
    # gcd((x-1)^2 (x-2), (x-1)(x-3)) = (x-1) up to scaling
    a = Polynomial([Fraction(-2), Fraction(5), Fraction(-4), Fraction(1)])
    b = Polynomial([Fraction(3), Fraction(-4), Fraction(1)])
    g = a.gcd(b)
    assert g.degree == 1
    assert g(Fraction(1)) == 0
    d = a.derivative()
    assert d.degree == 2
    assert d(Fraction(0)) == Fraction(5)


def test_poly_roots_certified_cubic():
    # (x-1)(x-2)(x-3) = x^3 - 6x^2 + 11x - 6
    p = Polynomial([Fraction(-6), Fraction(11), Fraction(-6), Fraction(1)])
    roots = sorted(poly_roots(p), key=lambda r: r.real)
    assert len(roots) == 3
    for r, want in zip(roots, (1, 2, 3)):
        assert abs(r - want) < eps(10)


def test_poly_roots_random_integer_polys():
    rng = random.Random(99)
    for _ in range(5):
        true_roots = sorted(rng.sample(range(-8, 9), 4))
        p = Polynomial([Fraction(1)])
        for r in true_roots:
            p = p * Polynomial([Fraction(-r), Fraction(1)])
        got = sorted(poly_roots(p), key=lambda z: z.real)
        for z, r in zip(got, true_roots):
            assert abs(z - r) < eps(10) * 100


def test_to_mpc_exact_inputs():
    assert to_mpc(Fraction(1, 3)) == mp.mpf(1) / 3
    assert to_mpc("0.5") == mp.mpf("0.5")
    v = to_mpc(complex(1.5, -2.0))
    assert v.real == mp.mpf("1.5") and v.imag == mp.mpf("-2.0")
