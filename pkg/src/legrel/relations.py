"""Relation lattices among points on a Legendre fiber.

A relation is an integer vector a with a_1 z_1 + ... + a_n z_n =
a_{n+1} f + a_{n+2} g for the elliptic logarithms z_j of the points and the
period basis (f, g); equivalently a_1 P_1 + ... + a_n P_n = O on the curve.
Detection runs the scaled LLL embedding of the lattice module; every accepted
relation must survive a doubled-precision recomputation and an independent
group-law check by curve arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from . import curve as cv
from .ellog import elliptic_log
from .errors import DegenerateInputError
from .lattice import integer_relation
from .periods import period_pair
from .precision_core import to_mpc


def point_from_abscissa(c: cv.LegendreCurve, x, ybranch: int = 1) -> cv.CurvePoint:
    """Numeric point with the given abscissa; ybranch = +-1 selects the sign
    of the principal square root of x(x-1)(x-lambda)."""
    x = to_mpc(x)
    lam = to_mpc(c.lam)
    y = mp.sqrt(x * (x - 1) * (x - lam))
    if ybranch < 0:
        y = -y
    return cv.CurvePoint.affine(x, y)


@dataclass(frozen=True)
class RelationVector:
    a: tuple  # point coefficients, length n
    rhs: tuple  # (a_{n+1}, a_{n+2}) period coefficients

    def __post_init__(self):
        if all(x == 0 for x in self.a):
            raise DegenerateInputError("relation with zero point part")

    def as_dict(self):
        return {"a": list(self.a), "rhs": list(self.rhs)}


@dataclass(frozen=True)
class VerificationReport:
    relation: RelationVector
    residual_primary: mp.mpf
    residual_refined: mp.mpf
    group_residual: mp.mpf
    precision: int
    passed: bool

    def as_dict(self):
        return {
            "relation": self.relation.as_dict(),
            "residual_primary": mp.nstr(self.residual_primary, 6),
            "residual_refined": mp.nstr(self.residual_refined, 6),
            "group_residual": mp.nstr(self.group_residual, 6),
            "precision": self.precision,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class RelationLattice:
    lambda0: object
    abscissas: tuple
    basis: tuple  # RelationVector, a-parts in echelon (pivot-disjoint) form
    rank: int
    coeff_bound: int
    precision_used: int
    reports: tuple = field(default=())

    def to_json(self) -> str:
        return json.dumps(
            {
                "lambda0": str(self.lambda0),
                "abscissas": [str(x) for x in self.abscissas],
                "rank": self.rank,
                "basis": [
                    dict(rv.as_dict(), residuals=rep.as_dict())
                    for rv, rep in zip(self.basis, self.reports)
                ],
                "coeff_bound": self.coeff_bound,
                "precision": self.precision_used,
            },
            indent=2,
        )


def _is_exact(v) -> bool:
    return isinstance(v, (int, Fraction, str))


def _logs_and_periods(lambda0, abscissas, ybranches, polish=None):
    # to_mpc reconverts exact inputs (int/Fraction/str) at the current
    # precision; floating inputs keep their stored accuracy, which is why
    # scanner callers supply a polish callback instead.
    lam = polish(mp.mp.dps) if polish is not None else to_mpc(lambda0)
    c = cv.LegendreCurve(lam)
    pp = period_pair(lam)
    zs = []
    for x, s in zip(abscissas, ybranches):
        P = point_from_abscissa(c, x, s)
        zs.append(elliptic_log(c, P, pp).z)
    return c, pp, zs


def _projective_gap(Q: cv.CurvePoint) -> mp.mpf:
    """Projective distance of Q from the point at infinity."""
    if Q.is_infinity:
        return mp.mpf(0)
    return 1 / mp.sqrt(1 + abs(Q.x) ** 2 + abs(Q.y) ** 2)


def _group_combination(c: cv.LegendreCurve, points, a) -> cv.CurvePoint:
    total = cv.O
    for coeff, P in zip(a, points):
        if coeff == 0:
            continue
        total = cv.add(c, total, cv.scalar_mul(c, coeff, P))
    return total


def verify_relation(lambda0, abscissas, ybranches, rel: RelationVector, polish=None) -> VerificationReport:
    """Analytic residual at D and 2D digits plus the group-law residual.

    Pass requires the residual to shrink by >= 10^(D-20) under precision
    doubling (true relations persist; accidental near-relations do not) and
    the curve-arithmetic combination to land within 10^(6-D) of O.
    """
    D = mp.mp.dps
    n = len(abscissas)

    def residual_at(dps):
        old = mp.mp.dps
        mp.mp.dps = dps
        try:
            c, pp, zs = _logs_and_periods(lambda0, abscissas, ybranches, polish)
            r = sum(ai * z for ai, z in zip(rel.a, zs))
            r -= rel.rhs[0] * pp.f + rel.rhs[1] * pp.g
            points = [point_from_abscissa(c, x, s) for x, s in zip(abscissas, ybranches)]
            gap = _projective_gap(_group_combination(c, points, rel.a))
            return abs(r), gap
        finally:
            mp.mp.dps = old

    r1, gap = residual_at(D)
    r2, _ = residual_at(2 * D)
    # Floor under which the refined residual counts as zero.  With exact
    # inputs (or a polish callback) everything is recomputable and the floor
    # sits near the doubled precision; floating-point lambda0 or abscissas
    # carry only ~D digits, so the residual legitimately bottoms out there.
    refinable = polish is not None or (
        _is_exact(lambda0) and all(_is_exact(x) for x in abscissas)
    )
    scale = (sum(abs(ai) for ai in rel.a) + abs(rel.rhs[0]) + abs(rel.rhs[1])) or 1
    floor = scale * mp.mpf(10) ** ((20 - 2 * D) if refinable else (6 - D))
    persists = r2 <= max(r1 * mp.mpf(10) ** (20 - D), floor)
    passed = bool(persists and gap <= mp.mpf(10) ** (6 - D))
    return VerificationReport(rel, r1, r2, gap, D, passed)


def relation_lattice(lambda0, abscissas, ybranches=None, coeff_bound: int = 30, polish=None) -> RelationLattice:
    """Detected relation lattice at lambda0 for the points of the given
    abscissas, searched up to |coefficient| <= coeff_bound.

    Relations are peeled off one at a time: each verified relation fixes a
    pivot point which is dropped from the remaining search, so later basis
    vectors have zero at earlier pivots and the a-parts are independent by
    construction.
    """
    n = len(abscissas)
    if n == 0:
        raise DegenerateInputError("need at least one abscissa")
    if ybranches is None:
        ybranches = [1] * n
    lam0 = to_mpc(lambda0)
    if lam0 == 0 or lam0 == 1:
        raise DegenerateInputError("lambda0 must avoid 0 and 1")
    # x = lambda0 is allowed: (lambda, 0) is the third 2-torsion point.
    for x in abscissas:
        if to_mpc(x) in (mp.mpc(0), mp.mpc(1)):
            raise DegenerateInputError("abscissas must avoid 0 and 1")

    D = mp.mp.dps
    c, pp, zs = _logs_and_periods(lambda0, abscissas, ybranches, polish)

    active = list(range(n))
    basis = []
    reports = []
    while active:
        vals = [zs[i] for i in active] + [pp.f, pp.g]

        idx_snapshot = list(active)

        def refine(dps, _idx=idx_snapshot):
            old = mp.mp.dps
            mp.mp.dps = dps
            try:
                _, pp2, zs2 = _logs_and_periods(lambda0, abscissas, ybranches, polish)
                return [zs2[i] for i in _idx] + [pp2.f, pp2.g]
            finally:
                mp.mp.dps = old

        rel = integer_relation(vals, coeff_bound, refine=refine)
        if rel is None:
            break
        k = len(active)
        a = [0] * n
        for pos, i in enumerate(active):
            a[i] = rel[pos]
        if all(x == 0 for x in a):
            break
        rv = RelationVector(tuple(a), (-rel[k], -rel[k + 1]))
        report = verify_relation(lambda0, abscissas, ybranches, rv, polish)
        if not report.passed:
            break
        basis.append(rv)
        reports.append(report)
        pivot = next(i for i in active if a[i] != 0)
        active.remove(pivot)
    return RelationLattice(
        lambda0=lambda0,
        abscissas=tuple(abscissas),
        basis=tuple(basis),
        rank=len(basis),
        coeff_bound=coeff_bound,
        precision_used=D,
        reports=tuple(reports),
    )


@dataclass(frozen=True)
class BoundSchema:
    """Configurable constants of the explicit bound formulas; the source
    bounds are ineffective, so defaults of 1 make these search caps and
    reporting aids, never correctness claims."""

    gamma1: float = 1.0
    gamma2: float = 1.0
    gamma5: float = 1.0
    gamma6: float = 1.0
    gamma7: float = 1.0
    gamma9: float = 1.0
    n: int = 2

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "gamma5", "gamma6", "gamma7", "gamma9"):
            if getattr(self, name) <= 0:
                raise DegenerateInputError(f"{name} must be positive")


def coefficient_bounds(schema: BoundSchema, kappa: int, h_alpha, q):
    """Generator bound, torsion-order bound and height floor for a fiber of
    degree kappa with parameter height h_alpha and generator height cap q."""
    if kappa < 1:
        raise DegenerateInputError("kappa must be >= 1")
    h = mp.mpf(h_alpha)
    q = mp.mpf(q)
    if h < 0 or q < 1:
        raise DegenerateInputError("need h_alpha >= 0 and q >= 1")
    n = schema.n
    generator = (
        mp.mpf(schema.gamma1)
        * mp.mpf(kappa) ** schema.gamma2
        * (h + 1) ** (2 * n)
        * q ** (mp.mpf(n - 1) / 2)
    )
    omega = mp.mpf(schema.gamma5) * (h + 1) * kappa**2
    w = max(mp.mpf(1), mp.mpf(schema.gamma9) * (h + 1))
    eta = mp.mpf(schema.gamma6) / (
        w * mp.mpf(kappa) ** (schema.gamma7 + 3) * (w + mp.log(kappa)) ** 2
    )
    return {
        "generator_bound": generator,
        "torsion_bound": omega,
        "height_floor": eta,
        "n": n,
        "kappa": kappa,
    }
