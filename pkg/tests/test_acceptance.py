"""Acceptance suite: one test per numbered contract criterion.

Each test prints a single `criterion NN ... : PASS` line on success (visible
with pytest -s; the pytest -v status line carries the same verdict), uses the
pinned tolerance stated in its docstring, and is runnable standalone.
"""

import random
import time
from fractions import Fraction

import mpmath as mp

from legrel.betti import Region, betti_coords, betti_grid, wrap_unit
from legrel.curve import (
    CurvePoint,
    LegendreCurve,
    O,
    add,
    division_poly_lambda,
    scalar_mul,
    to_weierstrass,
)
from legrel.ellog import elliptic_log, exp_map, weierstrass_p
from legrel.heights import (
    conjugate_audit,
    duplicate_abscissa,
    neron_tate,
    rational_point,
    weil_height,
)
from legrel.lattice import integer_relation, recognize_algebraic
from legrel.periods import in_lens, period_pair
from legrel.precision_core import eps, poly_roots, to_mpc, working_digits
from legrel.relations import relation_lattice
from legrel.scanner import count_rational_hits, torsion_scan, two_relation_scan


def _lift(c, x):
    return CurvePoint(x, mp.sqrt(mp.mpc(x * (x - 1) * (x - c.lam))))


def test_criterion_01_period_agm_identity():
    """20-point grid: |f(lambda) * agm(1, sqrt(1-lambda)) - pi| <= 1e-50, < 5 s."""
    start = time.monotonic()
    rng = random.Random(1001)
    count = 0
    while count < 20:
        lam = mp.mpc(rng.uniform(-0.7, 0.8), rng.uniform(-0.6, 0.6))
        if not in_lens(lam, margin=mp.mpf("0.05")):
            continue
        p = period_pair(lam)
        resid = abs(p.f * mp.agm(1, mp.sqrt(1 - lam)) - mp.pi)
        assert resid <= mp.mpf("1e-50"), (lam, resid)
        count += 1
    elapsed = time.monotonic() - start
    assert elapsed < 5.0, elapsed
    print(f"criterion 01 period-agm-identity: PASS ({elapsed:.2f}s)")


def test_criterion_02_symmetry_point():
    """lambda = 1/2: tau = i and g = i f, both to 1e-50."""
    p = period_pair(mp.mpf("0.5"))
    assert abs(p.tau - mp.mpc(0, 1)) <= mp.mpf("1e-50")
    assert abs(p.g - mp.mpc(0, 1) * p.f) <= mp.mpf("1e-50") * abs(p.f)
    print("criterion 02 symmetry-point: PASS")


def test_criterion_03_exp_log_roundtrip():
    """100 points x 3 curves: exp(log(P)) = P and p(z) = x - (lambda+1)/3,
    both to 1e-56."""
    rng = random.Random(1003)
    tol = mp.mpf("1e-56")
    for lam in (mp.mpf("0.5"), mp.mpc("0.3", "0.4"), mp.mpc("-0.6", "0.2")):
        c = LegendreCurve(lam)
        p = period_pair(lam)
        for _ in range(100):
            P = _lift(c, mp.mpc(rng.uniform(-3, 3), rng.uniform(-3, 3)))
            z = elliptic_log(c, P, p).z
            Q = exp_map(z, c, p)
            scale = 1 + abs(P.x) + abs(P.y)
            assert abs(Q.x - P.x) <= tol * scale, (lam, P.x)
            assert abs(Q.y - P.y) <= tol * scale, (lam, P.x)
            pz = weierstrass_p(z, p)[0]
            want = P.x - (lam + 1) / 3
            assert abs(pz - want) <= tol * (1 + abs(want)), (lam, P.x)
    print("criterion 03 exp-log-roundtrip: PASS")


def test_criterion_04_betti_contract():
    """Reconstruction and equivariance to 1e-56; imaginary residues <= 1e-54
    over a grid of ~10^3 samples."""
    rng = random.Random(1004)
    tol = mp.mpf("1e-56")
    p = period_pair(mp.mpc("0.45", "0.25"))
    for _ in range(50):
        z = mp.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
        b = betti_coords(z, p)
        back = b.u * p.f + b.v * p.g
        # reconstruction up to an exact lattice vector
        cu, cv = p.coords(z - back)
        du = mp.re(cu) - mp.nint(mp.re(cu))
        dv = mp.re(cv) - mp.nint(mp.re(cv))
        assert abs(du * p.f + dv * p.g) <= tol * (1 + abs(z))
        # equivariance under lattice shifts
        b2 = betti_coords(z + 2 * p.f - 3 * p.g, p)
        assert abs((b2.u - b.u) - 2) <= tol * (1 + abs(b.u))
        assert abs((b2.v - b.v) + 3) <= tol * (1 + abs(b.v))
    # imaginary residues on a ~10^3 lambda/z grid
    checked = 0
    for i in range(32):
        for j in range(32):
            lam = mp.mpc("0.4", "0.25") + mp.mpc(i - 16, j - 16) * mp.mpf("0.01")
            if not in_lens(lam, margin=mp.mpf("0.05")):
                continue
            if checked >= 1000:
                break
            z = mp.mpf("0.3") * 1 + mp.mpc("0.1", "0.2")
            pp = period_pair(lam)
            u, v = pp.coords(z)
            scale = max(mp.mpf(1), abs(u), abs(v))
            assert abs(mp.im(u)) <= mp.mpf("1e-54") * scale
            assert abs(mp.im(v)) <= mp.mpf("1e-54") * scale
            checked += 1
    assert checked >= 900
    print(f"criterion 04 betti-contract: PASS ({checked} grid samples)")


def test_criterion_05_duplication_and_associativity():
    """x(2P) * 4x(x-1)(x-lambda) = (x^2-lambda)^2 to 1e-56 on 100 samples;
    associativity on 100 random triples."""
    rng = random.Random(1005)
    tol = mp.mpf("1e-56")
    for _ in range(100):
        lam = mp.mpc(rng.uniform(-2, 3), rng.uniform(-2, 2))
        if abs(lam) < 0.1 or abs(lam - 1) < 0.1:
            lam += mp.mpc(0, "0.5")
        c = LegendreCurve(lam)
        x = mp.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2))
        P = _lift(c, x)
        D = add(c, P, P)
        lhs = D.x * 4 * x * (x - 1) * (x - lam)
        rhs = (x * x - lam) ** 2
        assert abs(lhs - rhs) <= tol * (1 + abs(rhs) + abs(lhs)), (lam, x)
    for _ in range(100):
        lam = mp.mpc(rng.uniform(-2, 3), rng.uniform(-2, 2))
        if abs(lam) < 0.1 or abs(lam - 1) < 0.1:
            lam += mp.mpc(0, "0.5")
        c = LegendreCurve(lam)
        P, Q, R = (
            _lift(c, mp.mpc(rng.uniform(-2, 2), rng.uniform(-2, 2)))
            for _ in range(3)
        )
        lhs = add(c, add(c, P, Q), R)
        rhs = add(c, P, add(c, Q, R))
        assert lhs.approx_eq(rhs, tol=eps(12) * (1 + abs(lhs.x)))
    print("criterion 05 duplication-associativity: PASS")


def test_criterion_06_weierstrass_data_exact():
    """lambda = 2 gives (g2, g3, j) = (4, 0, 1728) in exact rational arithmetic."""
    wd = to_weierstrass(LegendreCurve(Fraction(2)))
    assert wd.g2 == Fraction(4)
    assert wd.g3 == Fraction(0)
    assert wd.j == Fraction(1728)
    print("criterion 06 weierstrass-data: PASS")


def test_criterion_07_torsion_oracle_equivalence():
    """torsion_scan(x=2, order 3) returns exactly the psi_3(2, lambda) roots in
    the region, each within 1e-40; < 60 s at resolution 0.02."""
    start = time.monotonic()
    region = Region(mp.mpc("1.66", "0"), mp.mpf("0.15"))
    psi = division_poly_lambda(3, Fraction(2))
    exact_roots = [r for r in poly_roots(psi) if region.contains(r)]
    assert len(exact_roots) == 1  # lambda = -4 + 4 sqrt(2) = 1.6568...
    hits = [h for h in torsion_scan(2, 3, region, resolution="0.02") if h.order == 3]
    assert len(hits) == len(exact_roots), [mp.nstr(h.lambda0, 20) for h in hits]
    for h in hits:
        assert min(abs(h.lambda0 - r) for r in exact_roots) <= mp.mpf("1e-40")
    elapsed = time.monotonic() - start
    assert elapsed < 60.0, elapsed
    print(f"criterion 07 torsion-oracle: PASS ({elapsed:.1f}s)")


def test_criterion_08_negative_control_rank_zero():
    """relation_lattice(6, [2], bound 100) has rank 0 at D in {64, 96}, and the
    per-coefficient residual floor stays above 1e-10 at both precisions."""
    floors = {}
    for D in (64, 96):
        with working_digits(D):
            lat = relation_lattice(Fraction(6), [Fraction(2)], coeff_bound=100)
            assert lat.rank == 0, D
            lam = to_mpc(Fraction(6))
            c = LegendreCurve(lam)
            p = period_pair(lam)
            P = _lift(c, to_mpc(Fraction(2)))
            z = elliptic_log(c, P, p).z
            b = betti_coords(z, p)
            floor = min(
                abs(wrap_unit(a * b.u) * p.f + wrap_unit(a * b.v) * p.g)
                for a in range(1, 101)
            )
            assert floor > mp.mpf("1e-10"), (D, floor)
            floors[D] = floor
    # stability: the floor does not collapse when precision increases
    assert floors[96] > mp.mpf("1e-10")
    print(
        "criterion 08 negative-control: PASS "
        f"(floors {mp.nstr(floors[64], 4)}, {mp.nstr(floors[96], 4)})"
    )


def test_criterion_09_no_two_relation_locus():
    """two_relation_scan((2,3), T=8, disc(0.5, 0.3)) certifies zero rank-2
    records; < 10 min on 4 workers."""
    start = time.monotonic()
    region = Region(mp.mpc("0.5", "0"), mp.mpf("0.3"))
    records = two_relation_scan((2, 3), 8, region, resolution="0.1", workers=4)
    rank2 = [r for r in records if r.rank >= 2]
    assert rank2 == [], [mp.nstr(r.lambda0, 20) for r in rank2]
    elapsed = time.monotonic() - start
    assert elapsed < 600.0, elapsed
    print(
        f"criterion 09 no-two-relations: PASS "
        f"({len(records)} candidate loci, 0 rank-2, {elapsed:.0f}s)"
    )


def test_criterion_10_finiteness_signature():
    """Two-relation counts constant (0) over T in {4,...,64} while one-relation
    counts strictly increase, off the real axis."""
    region = Region(mp.mpc("0.5", "0.26"), mp.mpf("0.14"))
    grid = betti_grid(region, [2, 3, 5], mp.mpf("0.02"))
    report = count_rational_hits(grid, [4, 8, 16, 32, 64], mp.mpf("1e-5"))
    ones = report.one_relation_counts
    twos = report.two_relation_counts
    assert len(set(twos)) == 1, twos  # constant
    assert twos[0] == 0, twos  # and zero
    assert all(b > a for a, b in zip(ones, ones[1:])), ones
    print(f"criterion 10 finiteness-signature: PASS (one={ones}, two={twos})")


def test_criterion_11_bounded_height_audit():
    """Every recognized torsion hit for abscissa 2 up to order 12 has Weil
    height <= 5."""
    region = Region(mp.mpc("1.66", "0"), mp.mpf("0.15"))
    hits = torsion_scan(2, 12, region, resolution="0.05")
    recognized = [h for h in hits if h.recognized is not None]
    assert recognized, "no recognized torsion hits found"
    cap = max(h.weil_height for h in recognized)
    for h in recognized:
        assert h.weil_height <= mp.mpf(5), (h.order, mp.nstr(h.lambda0, 20))
    print(
        f"criterion 11 bounded-height: PASS "
        f"({len(recognized)} hits, max h = {mp.nstr(cap, 5)})"
    )


def test_criterion_12_conjugate_audit():
    """Every recognized torsion lambda0 of order <= 6 has at least half its
    conjugates inside the delta = 0.05 truncated parameter domain."""
    region = Region(mp.mpc("1.66", "0"), mp.mpf("0.15"))
    hits = torsion_scan(2, 6, region, resolution="0.05")
    audited = 0
    for h in hits:
        if h.recognized is None:
            continue
        audit = conjugate_audit(h.recognized, delta=mp.mpf("0.05"))
        assert audit.passed, (h.order, str(h.recognized.minpoly))
        audited += 1
    assert audited >= 1
    print(f"criterion 12 conjugate-audit: PASS ({audited} audited)")


def test_criterion_13_heights():
    """hhat(torsion) <= tail bound; |hhat(2P) - 4 hhat(P)| <= combined bars on
    10 rational non-torsion points; weil_height(sqrt 2) = (1/2) log 2 to 1e-50."""
    # torsion
    rep_t = neron_tate(Fraction(2), Fraction(2), Fraction(0))
    assert rep_t.h <= rep_t.error_bar + mp.mpf("1e-60")
    # ten rational non-torsion points built from the family parametrization
    rng = random.Random(1013)
    done = 0
    while done < 10:
        x = Fraction(rng.randint(2, 30), rng.randint(1, 9))
        y = Fraction(rng.randint(1, 40), rng.randint(1, 9))
        if x in (0, 1) or y == 0:
            continue
        lam = rational_point(x, y)
        if lam in (0, 1):
            continue
        x2 = duplicate_abscissa(x, lam)
        if x2 is None:
            continue
        y2sq = x2 * (x2 - 1) * (x2 - lam)
        # exact rational square root when it exists (always, by construction
        # of the duplication on a rational point)
        from math import isqrt

        num, den = y2sq.numerator, y2sq.denominator
        if num < 0 or isqrt(num) ** 2 != num or isqrt(den) ** 2 != den:
            continue
        y2 = Fraction(isqrt(num), isqrt(den))
        rep1 = neron_tate(lam, x, y, k_max=6)
        if rep1.h == 0:
            continue  # torsion: not part of this sample
        rep2 = neron_tate(lam, x2, y2, k_max=6)
        assert abs(rep2.h - 4 * rep1.h) <= 4 * rep1.error_bar + rep2.error_bar
        done += 1
    # Mahler route
    alg = recognize_algebraic(mp.sqrt(mp.mpf(2)), max_degree=2, max_coeff_digits=2)
    rep = weil_height(alg)
    assert abs(rep.h - mp.log(2) / 2) <= mp.mpf("1e-50")
    print("criterion 13 heights: PASS")


def test_criterion_14_relation_detection():
    """Golden-ratio relation (1, 1, -1); planted 6-torsion relation with the
    correct denominator; doubled-precision persistence on everything found."""
    # golden ratio
    phi = (1 + mp.sqrt(mp.mpf(5))) / 2
    rel = integer_relation([mp.mpf(1), phi, phi * phi], coeff_bound=10)
    assert rel is not None
    rel = [int(c) for c in rel]
    if next(c for c in rel if c) < 0:
        rel = [-c for c in rel]
    assert rel == [1, 1, -1]

    # plant a 6-torsion point: lambda a root of psi_6(2, lambda) that is not
    # already a root of psi_2 or psi_3 at the same abscissa
    psi6 = division_poly_lambda(6, Fraction(2))
    psi3 = division_poly_lambda(3, Fraction(2))
    root = None
    for r in poly_roots(psi6):
        if abs(r - 2) < mp.mpf("1e-20"):
            continue  # the 2-torsion coincidence lambda = 2
        if abs(psi3(r)) < mp.mpf("1e-20"):
            continue
        root = r
        break
    assert root is not None
    c = LegendreCurve(root)
    p = period_pair(root)
    P = _lift(c, mp.mpc(2))
    z = elliptic_log(c, P, p).z
    rel6 = integer_relation([z, p.f, p.g], coeff_bound=12)
    assert rel6 is not None
    a0 = abs(int(rel6[0]))
    assert a0 == 6, rel6
    # the point is genuinely killed by its detected order
    assert scalar_mul(c, a0, P).is_infinity or abs(
        1 / mp.sqrt(1 + abs(scalar_mul(c, a0, P).x) ** 2)
    ) < eps(20)

    # persistence of the detected relation under doubled precision
    resid64 = abs(rel6[0] * z + rel6[1] * p.f + rel6[2] * p.g)
    with working_digits(128):
        root_hi = None
        for r in poly_roots(psi6):
            if abs(r - root) < mp.mpf("1e-30"):
                root_hi = r
                break
        c2 = LegendreCurve(root_hi)
        p2 = period_pair(root_hi)
        z2 = elliptic_log(c2, _lift(c2, mp.mpc(2)), p2).z
        resid128 = abs(rel6[0] * z2 + rel6[1] * p2.f + rel6[2] * p2.g)
    assert resid128 <= max(resid64 * mp.mpf("1e-10"), mp.mpf(10) ** (20 - 128))
    print(f"criterion 14 relation-detection: PASS (planted order divisor {a0})")
