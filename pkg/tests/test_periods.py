"""Tests for period computation: AGM route, series oracle, analytic continuation."""

import random

import mpmath as mp
import pytest

from legrel.errors import DegenerateInputError, PrecisionError
from legrel.periods import (
    F_by_agm,
    PeriodPair,
    hypergeometric_F,
    in_lens,
    period_pair,
)
from legrel.precision_core import eps, working_digits

# pi * 2F1(1/2, 1/2; 1; 1/2), computed independently by mpmath's direct
# hypergeometric series at 80 digits and frozen to 60.
F_HALF = mp.mpf(
    "1.18034059901609622604533794055848858723371663488144729951586"
)
PERIOD_HALF = mp.mpf(
    "3.70814935460274383686770069439052009243519764704353381117186"
)


def test_F_reference_value_and_series_oracle():
    assert abs(hypergeometric_F(mp.mpf("0.5")) - F_HALF) < eps(6)
    # independent oracle: mpmath's own hypergeometric implementation
    rng = random.Random(1)
    for _ in range(10):
        t = mp.mpc(rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6))
        if not in_lens(t, margin=mp.mpf("0.05")):
            continue
        ref = mp.hyp2f1(mp.mpf(1) / 2, mp.mpf(1) / 2, 1, t)
        assert abs(hypergeometric_F(t) - ref) < eps(8) * (1 + abs(ref))


def test_agm_route_matches_hypergeometric():
    rng = random.Random(2)
    for _ in range(10):
        t = mp.mpc(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5))
        if not in_lens(t, margin=mp.mpf("0.1")):
            continue
        assert abs(F_by_agm(t) - hypergeometric_F(t)) < eps(8)


def test_period_pair_at_half_is_square_lattice():
    p = period_pair(mp.mpf("0.5"))
    assert abs(p.f - PERIOD_HALF) < eps(6)
    assert abs(p.tau - mp.mpc(0, 1)) < eps(6)
    assert abs(p.g - mp.mpc(0, 1) * p.f) < eps(6)


def test_period_agm_identity_in_lens():
    # f(lambda) * agm(1, sqrt(1 - lambda)) = pi identically
    rng = random.Random(3)
    for _ in range(12):
        lam = mp.mpc(rng.uniform(-0.6, 0.7), rng.uniform(-0.5, 0.5))
        if not in_lens(lam, margin=mp.mpf("0.05")):
            continue
        p = period_pair(lam)
        assert abs(p.f * mp.agm(1, mp.sqrt(1 - lam)) - mp.pi) < eps(8)


def test_tau_in_upper_half_plane():
    rng = random.Random(4)
    pts = [mp.mpc(rng.uniform(-3, 4), rng.uniform(-2, 2)) for _ in range(12)]
    pts += [mp.mpf(2), mp.mpf(5), mp.mpf("-3.5")]  # outside the lens
    for lam in pts:
        if abs(lam) < 0.1 or abs(lam - 1) < 0.1:
            continue
        p = period_pair(lam)
        assert p.tau.imag > 0


def test_continuation_agrees_with_series_on_overlap():
    # force the ODE continuation path and compare against the direct series
    # in the shared domain of validity
    lam = mp.mpc("0.4", "0.3")
    direct = period_pair(lam)
    routed = period_pair(lam, path=[mp.mpf("0.5"), mp.mpc("0.3", "0.4"), lam])
    assert abs(direct.f - routed.f) < eps(10)
    assert abs(direct.g - routed.g) < eps(10)


def test_continuation_outside_lens_satisfies_agm_identity_up_to_branch():
    # outside the lens only |f * agm| = pi is branch-independent
    for lam in (mp.mpc(2, 0), mp.mpc("1.7", "0.1"), mp.mpc(-3, 1)):
        p = period_pair(lam)
        prod = p.f * mp.agm(1, mp.sqrt(1 - lam))
        assert abs(abs(prod) - mp.pi) < eps(8) * 10


def test_legendre_relation():
    # f g' - g f' is constant; equivalent check: the lattice area
    # Im(conj(f) * g) is positive and the pair is non-degenerate
    for lam in (mp.mpf("0.3"), mp.mpc("0.2", "0.6"), mp.mpc(3, 1)):
        p = period_pair(lam)
        area = (mp.conj(p.f) * p.g).imag
        assert area > 0


def test_degenerate_lambda_rejected():
    for bad in (0, 1):
        with pytest.raises(DegenerateInputError):
            period_pair(bad)


def test_precision_tracking():
    with working_digits(96):
        p = period_pair(mp.mpf("0.5"))
        hi = p.f
    p = period_pair(mp.mpf("0.5"))
    assert abs(hi - p.f) < eps(6)


def test_lattice_coords_roundtrip():
    p = period_pair(mp.mpc("0.3", "0.2"))
    rng = random.Random(6)
    for _ in range(8):
        u, v = mp.mpf(rng.uniform(-2, 2)), mp.mpf(rng.uniform(-2, 2))
        z = u * p.f + v * p.g
        cu, cv = p.coords(z)
        assert abs(cu - u) < eps(10) and abs(cv - v) < eps(10)
