"""Experiment layer: locate parameters lambda0 where prescribed integer
relations hold (Newton against rational Betti targets), scan for fibers
carrying two independent relations, and count near-rational hits on sampled
Betti grids.

Newton runs on the locally holomorphic residual
    F(lambda) = wrap(sum a_j u_j) f + wrap(sum a_j v_j) g
(wrap = distance to the nearest integer), so one complex equation replaces
the 2x2 real system and the derivative comes from central differences.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd

import mpmath as mp

from . import curve as cv
from .betti import BettiGrid, Region, wrap_unit
from .ellog import elliptic_log
from .errors import DegenerateInputError
from .heights import weil_height
from .lattice import AlgebraicNumber, lll_reduce, recognize_algebraic
from .periods import period_pair
from .precision_core import to_mpc
from .relations import (
    RelationLattice,
    RelationVector,
    _projective_gap,
    point_from_abscissa,
    relation_lattice,
)

NEWTON_MAX_ITER = 50
REGION_MARGIN = mp.mpf("0.02")
SEEDS_PER_TARGET = 3
PREFILTER_RESIDUAL = mp.mpf("0.2")


@dataclass(frozen=True)
class TorsionHit:
    lambda0: mp.mpc
    order: int
    betti_target: tuple  # (Fraction, Fraction)
    newton_residual: mp.mpf
    recognized: AlgebraicNumber | None = None
    weil_height: mp.mpf | None = None

    def as_dict(self):
        return {
            "lambda0": mp.nstr(self.lambda0, mp.mp.dps),
            "order": self.order,
            "betti_target": [str(t) for t in self.betti_target],
            "newton_residual": mp.nstr(self.newton_residual, 6),
            "minpoly": str(self.recognized.minpoly) if self.recognized else None,
            "weil_height": mp.nstr(self.weil_height, 12) if self.weil_height is not None else None,
        }


@dataclass(frozen=True)
class IntersectionRecord:
    lambda0: mp.mpc
    first_relation: RelationVector | None
    second_relation: RelationVector | None
    rank: int
    coeff_bound: int
    residuals: tuple = ()

    def as_dict(self):
        return {
            "lambda0": mp.nstr(self.lambda0, mp.mp.dps),
            "first_relation": self.first_relation.as_dict() if self.first_relation else None,
            "second_relation": self.second_relation.as_dict() if self.second_relation else None,
            "rank": self.rank,
            "coeff_bound": self.coeff_bound,
            "residuals": [r.as_dict() for r in self.residuals],
        }


@dataclass(frozen=True)
class CountReport:
    region: Region
    abscissas: tuple
    T_list: tuple
    one_relation_counts: tuple
    two_relation_counts: tuple
    tolerance: mp.mpf
    fitted_exponents: dict

    def as_dict(self):
        return {
            "region": {"center": mp.nstr(self.region.center, 20), "radius": mp.nstr(self.region.radius, 20)},
            "abscissas": [str(x) for x in self.abscissas],
            "T_list": list(self.T_list),
            "one_relation_counts": list(self.one_relation_counts),
            "two_relation_counts": list(self.two_relation_counts),
            "tolerance": mp.nstr(self.tolerance, 6),
            "fitted_exponents": self.fitted_exponents,
        }


def _check_region(region: Region):
    if region.margin_from_degenerate() < REGION_MARGIN:
        raise DegenerateInputError("region touches the excluded parameters 0 or 1")


def _uv(lam, abscissas):
    """Betti coordinates of the principal-branch points over the abscissas."""
    c = cv.LegendreCurve(lam)
    pp = period_pair(lam)
    out = []
    for x in abscissas:
        P = point_from_abscissa(c, x, 1)
        u, v = pp.coords(elliptic_log(c, P, pp).z)
        out.append((mp.re(u), mp.re(v)))
    return pp, out


def _seed_grid(region: Region, abscissas, resolution):
    samples = []
    for lam in region.grid(resolution):
        try:
            _, uv = _uv(lam, abscissas)
        except Exception:
            continue
        samples.append((lam, uv))
    return samples


def _admissible(lam, region: Region) -> bool:
    return region.contains(lam, slack=region.radius / 2) and min(abs(lam), abs(lam - 1)) >= REGION_MARGIN


def _newton(seed, residual, region: Region):
    """Damped Newton iteration for the complex residual; None on divergence.

    The half-step in the backtracking schedule is essential: at 2-torsion
    hits the elliptic log ramifies (z ~ c sqrt(lambda0 - lambda)), where the
    undamped iteration oscillates in a 2-cycle and the half step is exact.
    """
    D = mp.mp.dps
    h = mp.mpf(10) ** (-(D // 3))
    tol_step = mp.mpf(10) ** (-(2 * D) // 3)
    lam = to_mpc(seed)
    try:
        F = residual(lam)
    except Exception:
        return None
    stalls = 0
    for _ in range(NEWTON_MAX_ITER):
        try:
            Fp = (residual(lam + h) - residual(lam - h)) / (2 * h)
        except Exception:
            return None
        if abs(Fp) < mp.mpf(10) ** (-D):
            return None
        step = -F / Fp
        best = None
        for fac in (mp.mpf(1), mp.mpf("0.5"), mp.mpf("0.25")):
            trial = lam + fac * step
            if not _admissible(trial, region):
                continue
            try:
                Ft = residual(trial)
            except Exception:
                continue
            if best is None or abs(Ft) < abs(best[1]):
                best = (trial, Ft, fac)
            if abs(Ft) <= abs(F) * mp.mpf("0.5"):
                break
        if best is None:
            return None
        trial, Ft, fac = best
        stalls = stalls + 1 if abs(Ft) > abs(F) * mp.mpf("0.9") else 0
        lam, F = trial, Ft
        if stalls >= 3:
            return None
        if abs(fac * step) < tol_step:
            return lam, abs(F)
    return None


def _wrapped_gap(value, target) -> mp.mpf:
    return abs(wrap_unit(value - target))


def torsion_targets(max_order: int):
    """Reduced rational pairs (p/m, r/m) of exact order m, 2 <= m <= max_order."""
    for m in range(2, max_order + 1):
        for p in range(m):
            for r in range(m):
                if gcd(gcd(p, r), m) == 1:
                    yield m, Fraction(p, m), Fraction(r, m)


def torsion_scan(abscissa, max_order: int, region: Region, resolution="0.05"):
    """Parameters lambda0 in the region where the point of the given abscissa
    is m-torsion for some m <= max_order.

    Hits are Newton-converged Betti targets, deduplicated, then certified:
    rational abscissas by exact division-polynomial divisibility when the
    parameter is recognized algebraic, all hits by m*P landing numerically
    at O.  Diverging seeds are skipped silently.
    """
    if not 2 <= max_order <= cv.MAX_DIVISION_POLY_ORDER:
        raise DegenerateInputError("max_order out of range")
    x0 = to_mpc(abscissa)
    if x0 == 0 or x0 == 1:
        raise DegenerateInputError("abscissa must avoid 0 and 1")
    _check_region(region)
    D = mp.mp.dps
    seeds = _seed_grid(region, [abscissa], mp.mpf(resolution))
    if not seeds:
        return []

    def make_residual(ut, vt):
        def residual(lam):
            pp, uv = _uv(lam, [abscissa])
            u, v = uv[0]
            return wrap_unit(u - ut) * pp.f + wrap_unit(v - vt) * pp.g

        return residual

    hits = []
    dedupe_tol = mp.mpf(10) ** (-(D // 2))
    exact_x = isinstance(abscissa, (int, Fraction))
    psi_cache = {}

    def certify_and_append(lam0, m, ut, vt, resid):
        if not region.contains(lam0):
            return
        if any(abs(lam0 - h.lambda0) < dedupe_tol for h in hits):
            return
        # certify on the curve: m * P must land at O
        c = cv.LegendreCurve(lam0)
        P = point_from_abscissa(c, abscissa, 1)
        if _projective_gap(cv.scalar_mul(c, m, P)) > mp.mpf(10) ** (6 - D):
            return
        _, uv = _uv(lam0, [abscissa])
        if max(_wrapped_gap(uv[0][0], ut), _wrapped_gap(uv[0][1], vt)) > mp.mpf(10) ** (8 - D):
            return
        recognized = None
        height = None
        try:
            recognized = recognize_algebraic(lam0, max_degree=8, max_coeff_digits=3)
        except Exception:
            recognized = None
        if recognized is not None and exact_x:
            if m not in psi_cache:
                psi_cache[m] = cv.division_poly_lambda(m, Fraction(abscissa)).primitive()
            psi = psi_cache[m]
            if psi.gcd(recognized.minpoly).degree != recognized.minpoly.degree:
                return  # recognition contradicts the exact torsion oracle
        if recognized is not None:
            height = weil_height(recognized).h
        hits.append(
            TorsionHit(
                lambda0=lam0, order=m, betti_target=(ut, vt),
                newton_residual=resid, recognized=recognized, weil_height=height,
            )
        )

    # m = 2 is algebraic, not analytic: y = 0 forces lambda0 = abscissa, and
    # the elliptic log ramifies there (z ~ sqrt(lambda0 - lambda)), which is
    # exactly where Newton cannot reach full precision.  Handle it exactly.
    lam2 = to_mpc(abscissa)
    if region.contains(lam2) and min(abs(lam2), abs(lam2 - 1)) >= REGION_MARGIN:
        try:
            _, uv2 = _uv(lam2, [abscissa])
            ut = Fraction(int(mp.nint(2 * uv2[0][0])), 2) % 1
            vt = Fraction(int(mp.nint(2 * uv2[0][1])), 2) % 1
            resid2 = mp.sqrt(_wrapped_gap(uv2[0][0], ut) ** 2 + _wrapped_gap(uv2[0][1], vt) ** 2)
            certify_and_append(lam2, 2, ut, vt, resid2)
        except Exception:
            pass

    for m, ut, vt in torsion_targets(max_order):
        if m == 2:
            continue
        ranked = sorted(
            seeds,
            key=lambda s: _wrapped_gap(s[1][0][0], ut) ** 2 + _wrapped_gap(s[1][0][1], vt) ** 2,
        )
        nearest = ranked[0]
        if (_wrapped_gap(nearest[1][0][0], ut) ** 2
                + _wrapped_gap(nearest[1][0][1], vt) ** 2) > PREFILTER_RESIDUAL ** 2:
            continue  # no seed comes close: no root of this target in the region
        residual = make_residual(ut, vt)
        for lam_seed, _ in ranked[:SEEDS_PER_TARGET]:
            got = _newton(lam_seed, residual, region)
            if got is None:
                continue
            lam0, resid = got
            certify_and_append(lam0, m, ut, vt, resid)
    hits.sort(key=lambda h: (mp.re(h.lambda0), mp.im(h.lambda0), h.order))
    return hits


def _primitive_vectors(n: int, T: int):
    """Primitive integer vectors of sup-norm <= T, up to global sign."""
    def rec(prefix):
        if len(prefix) == n:
            if any(prefix) and gcd(*prefix, 0) == 1:
                for lead in prefix:
                    if lead != 0:
                        if lead > 0:
                            yield tuple(prefix)
                        return
            return
        for a in range(-T, T + 1):
            yield from rec(prefix + [a])

    yield from rec([])


def _region_cap(samples) -> int:
    """Compactness bound C with |rhs| <= C * sum|a_j|: Betti coordinates over
    the region are bounded, so admissible right-hand sides are too."""
    top = mp.mpf(1)
    for _, uv in samples:
        for u, v in uv:
            top = max(top, abs(u), abs(v))
    return int(mp.ceil(top)) + 1


def _scan_vector(avec, samples, abscissas, region, T, polish_store):
    """Newton runs for one coefficient vector; returns converged lambda0s."""
    n = len(abscissas)
    cap = _region_cap(samples)

    def residual(lam):
        pp, uv = _uv(lam, abscissas)
        su = sum(a * u for a, (u, v) in zip(avec, uv))
        sv = sum(a * v for a, (u, v) in zip(avec, uv))
        return wrap_unit(su) * pp.f + wrap_unit(sv) * pp.g

    scored = []
    for lam, uv in samples:
        su = sum(a * u for a, (u, v) in zip(avec, uv))
        sv = sum(a * v for a, (u, v) in zip(avec, uv))
        if max(abs(mp.nint(su)), abs(mp.nint(sv))) > cap * sum(abs(a) for a in avec):
            continue
        r = mp.sqrt(wrap_unit(su) ** 2 + wrap_unit(sv) ** 2)
        if r < PREFILTER_RESIDUAL:
            scored.append((r, lam))
    scored.sort(key=lambda t: (t[0], mp.re(t[1]), mp.im(t[1])))
    found = []
    D = mp.mp.dps
    dedupe_tol = mp.mpf(10) ** (-(D // 2))
    for _, lam_seed in scored[: SEEDS_PER_TARGET + 1]:
        got = _newton(lam_seed, residual, region)
        if got is None:
            continue
        lam0, resid = got
        if not region.contains(lam0):
            continue
        if any(abs(lam0 - prev) < dedupe_tol for prev in found):
            continue
        found.append(lam0)
        polish_store[_key(lam0)] = (avec, lam0)
    return found


def _key(lam0) -> str:
    return mp.nstr(lam0, 40)


def _worker_args_roundtrip(samples):
    """Serialize grid samples to strings (portable across worker processes)."""
    out = []
    for lam, uv in samples:
        out.append(
            (mp.nstr(mp.re(lam), mp.mp.dps), mp.nstr(mp.im(lam), mp.mp.dps),
             [(mp.nstr(u, mp.mp.dps), mp.nstr(v, mp.mp.dps)) for u, v in uv])
        )
    return out


def _parse_samples(raw):
    return [
        (mp.mpc(mp.mpf(re), mp.mpf(im)), [(mp.mpf(u), mp.mpf(v)) for u, v in uv])
        for re, im, uv in raw
    ]


def _intersect_worker(args):
    (raw_samples, vectors, absc_strs, center_re, center_im, radius, T, dps) = args
    mp.mp.dps = dps
    abscissas = [Fraction(s) for s in absc_strs]
    region = Region(mp.mpc(mp.mpf(center_re), mp.mpf(center_im)), mp.mpf(radius))
    samples = _parse_samples(raw_samples)
    store = {}
    roots = []
    for avec in vectors:
        for lam0 in _scan_vector(tuple(avec), samples, abscissas, region, T, store):
            roots.append((_key(lam0), list(avec)))
    return roots, {
        k: (list(v[0]), (mp.nstr(mp.re(v[1]), dps), mp.nstr(mp.im(v[1]), dps)))
        for k, v in store.items()
    }


def two_relation_scan(abscissas, T: int, region: Region, resolution="0.05", workers: int = 1):
    """Scan the region for fibers where the points over the given abscissas
    satisfy integer relations of coefficient height <= T; every converged
    parameter gets a full relation-lattice computation at bound T, and
    records of rank >= 2 are the unlikely-intersection candidates.
    """
    n = len(abscissas)
    if n < 2:
        raise DegenerateInputError("need at least two abscissas")
    if len(set(map(str, abscissas))) != n:
        raise DegenerateInputError("abscissas must be pairwise distinct")
    _check_region(region)
    D = mp.mp.dps
    samples = _seed_grid(region, abscissas, mp.mpf(resolution))
    vectors = list(_primitive_vectors(n, T))

    store = {}
    if workers <= 1:
        roots = []
        for avec in vectors:
            for lam0 in _scan_vector(avec, samples, abscissas, region, T, store):
                roots.append((_key(lam0), list(avec)))
    else:
        import multiprocessing as mproc

        raw = _worker_args_roundtrip(samples)
        absc_strs = [str(Fraction(x)) for x in abscissas]
        chunks = [vectors[i::workers] for i in range(workers)]
        args = [
            (raw, chunk, absc_strs, mp.nstr(mp.re(region.center), D),
             mp.nstr(mp.im(region.center), D), mp.nstr(region.radius, D), T, D)
            for chunk in chunks if chunk
        ]
        roots = []
        with mproc.Pool(workers) as pool:
            for part_roots, part_store in pool.map(_intersect_worker, args):
                roots.extend([(k, a) for k, a in part_roots])
                for k, (avec, (re_s, im_s)) in part_store.items():
                    store[k] = (tuple(avec), mp.mpc(mp.mpf(re_s), mp.mpf(im_s)))

    # merge roots found by different vectors: one record per parameter
    dedupe_tol = mp.mpf(10) ** (-(D // 2))
    unique = []
    for key, avec in sorted(roots, key=lambda t: t[0]):
        _, lam0 = store[key]
        if any(abs(lam0 - q) < dedupe_tol for q, _ in unique):
            continue
        unique.append((lam0, tuple(avec)))

    records = []
    for lam0, avec in unique:
        def polish(dps, _avec=avec, _lam=lam0):
            old = mp.mp.dps
            mp.mp.dps = dps
            try:
                def residual(lam):
                    pp, uv = _uv(lam, abscissas)
                    su = sum(a * u for a, (u, v) in zip(_avec, uv))
                    sv = sum(a * v for a, (u, v) in zip(_avec, uv))
                    return wrap_unit(su) * pp.f + wrap_unit(sv) * pp.g

                got = _newton(_lam, residual, region)
                return got[0] if got is not None else to_mpc(_lam)
            finally:
                mp.mp.dps = old

        lat = relation_lattice(lam0, abscissas, coeff_bound=T, polish=polish)
        records.append(
            IntersectionRecord(
                lambda0=lam0,
                first_relation=lat.basis[0] if lat.rank >= 1 else None,
                second_relation=lat.basis[1] if lat.rank >= 2 else None,
                rank=lat.rank,
                coeff_bound=T,
                residuals=lat.reports,
            )
        )
    records.sort(key=lambda r: (mp.re(r.lambda0), mp.im(r.lambda0)))
    return records


def _relation_rows(uv, tolerance, T: int, two_sided: bool):
    """LLL basis of the identity-plus-scaled-columns embedding at one sample.

    The column scale T/tolerance balances coefficient size against residual
    at this specific threshold, so the reduction surfaces exactly the
    candidates the T-capped search cares about.
    """
    n = len(uv)
    K = int(mp.nint(T / tolerance))
    rows = []
    for j, (u, v) in enumerate(uv):
        row = [0] * n
        row[j] = 1
        row.append(int(mp.nint(K * u)))
        if two_sided:
            row.append(int(mp.nint(K * v)))
        rows.append(row)
    extra = [0] * n + [K] + ([0] if two_sided else [])
    rows.append(extra)
    if two_sided:
        rows.append([0] * n + [0, K])
    reduced, _ = lll_reduce(rows)
    return reduced


def _one_relation_hit(uv, tolerance, T: int) -> bool:
    """Is there an integer vector, sup-norm <= T, with sum a_j u_j within
    tolerance of an integer?  Searched over the reduced basis and pairwise
    combinations of its rows."""
    n = len(uv)
    reduced = _relation_rows(uv, tolerance, T, two_sided=False)
    cands = [row[:n] for row in reduced]
    for i in range(len(reduced)):
        for j in range(i + 1, len(reduced)):
            cands.append([a + b for a, b in zip(reduced[i][:n], reduced[j][:n])])
            cands.append([a - b for a, b in zip(reduced[i][:n], reduced[j][:n])])
    for a in cands:
        if all(x == 0 for x in a) or max(abs(x) for x in a) > T:
            continue
        su = sum(ai * u for ai, (u, v) in zip(a, uv))
        if abs(wrap_unit(su)) <= tolerance:
            return True
    return False


def _two_relation_hit(uv, tolerance, T: int) -> bool:
    """Are there two independent vectors, sup-norm <= T, whose u- and v-sums
    are both within tolerance of integers?"""
    n = len(uv)
    ok = []
    for row in _relation_rows(uv, tolerance, T, two_sided=True):
        a = row[:n]
        if all(x == 0 for x in a) or max(abs(x) for x in a) > T:
            continue
        su = sum(ai * u for ai, (u, v) in zip(a, uv))
        sv = sum(ai * v for ai, (u, v) in zip(a, uv))
        if abs(wrap_unit(su)) <= tolerance and abs(wrap_unit(sv)) <= tolerance:
            ok.append(tuple(a))
    for i in range(len(ok)):
        for j in range(i + 1, len(ok)):
            if any(
                ok[i][p] * ok[j][q] - ok[i][q] * ok[j][p] != 0
                for p in range(n) for q in range(p + 1, n)
            ):
                return True
    return False


def count_rational_hits(grid: BettiGrid, T_list, tolerance) -> CountReport:
    """Per threshold T, the number of grid samples admitting a one-relation
    (u-side) or a two-independent-relation approximation with coefficients
    <= T and residual <= tolerance; exponents fitted by least squares on
    log count vs log T."""
    tolerance = mp.mpf(tolerance)
    if tolerance <= 0:
        raise DegenerateInputError("tolerance must be positive")
    T_list = sorted(int(t) for t in T_list)
    one_hit = [False] * len(grid.samples)
    two_hit = [False] * len(grid.samples)
    one_counts = []
    two_counts = []
    # a sample once hit stays hit at larger T, making the counts monotone
    for T in T_list:
        for i, (_, uv) in enumerate(grid.samples):
            if not one_hit[i]:
                one_hit[i] = _one_relation_hit(uv, tolerance, T)
            if not two_hit[i]:
                two_hit[i] = _two_relation_hit(uv, tolerance, T)
        one_counts.append(sum(one_hit))
        two_counts.append(sum(two_hit))

    def fit(counts):
        pts = [(mp.log(T), mp.log(c)) for T, c in zip(T_list, counts) if c > 0]
        if len(pts) < 2:
            return None
        mx = sum(p[0] for p in pts) / len(pts)
        my = sum(p[1] for p in pts) / len(pts)
        den = sum((p[0] - mx) ** 2 for p in pts)
        if den == 0:
            return None
        return float(sum((p[0] - mx) * (p[1] - my) for p in pts) / den)

    return CountReport(
        region=grid.region,
        abscissas=tuple(grid.abscissas),
        T_list=tuple(T_list),
        one_relation_counts=tuple(one_counts),
        two_relation_counts=tuple(two_counts),
        tolerance=tolerance,
        fitted_exponents={"one_relation": fit(one_counts), "two_relation": fit(two_counts)},
    )


def hits_to_json_lines(items) -> str:
    return "\n".join(json.dumps(h.as_dict()) for h in items)


_ORDER_COLORS = ["#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def emit_svg(region: Region, torsion_hits=(), records=(), size: int = 480) -> str:
    """Static region plot: the disc outline, torsion hits colored by order,
    rank-2 intersection records highlighted."""
    cx, cy = mp.re(region.center), mp.im(region.center)
    r = region.radius
    pad = r / mp.mpf(5)
    span = 2 * (r + pad)

    def sx(x):
        return float((x - (cx - r - pad)) / span * size)

    def sy(y):
        return float(size - (y - (cy - r - pad)) / span * size)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
        f'<circle cx="{sx(cx)}" cy="{sy(cy)}" r="{float(r / span * size)}" '
        'fill="none" stroke="black" stroke-width="1"/>',
    ]
    for h in torsion_hits:
        color = _ORDER_COLORS[h.order % len(_ORDER_COLORS)]
        parts.append(
            f'<circle cx="{sx(mp.re(h.lambda0))}" cy="{sy(mp.im(h.lambda0))}" r="4" '
            f'fill="{color}"><title>order {h.order}</title></circle>'
        )
    for rec in records:
        color = "#d62728" if rec.rank >= 2 else "#7f7f7f"
        size_px = 7 if rec.rank >= 2 else 3
        parts.append(
            f'<rect x="{sx(mp.re(rec.lambda0)) - size_px / 2}" '
            f'y="{sy(mp.im(rec.lambda0)) - size_px / 2}" '
            f'width="{size_px}" height="{size_px}" fill="{color}">'
            f"<title>rank {rec.rank}</title></rect>"
        )
    parts.append("</svg>")
    return "\n".join(parts)
