"""Weil heights via the Mahler measure, Neron-Tate heights of rational points
by exact duplication, and conjugate-distribution audits.

The canonical height uses the closed-form abscissa duplication on the
Legendre model, x(2P) = (x^2 - lambda)^2 / (4x(x-1)(x-lambda)), evaluated in
exact rational arithmetic so the limit 4^(-k) * h(x_k)/2 carries a certified
geometric tail bound instead of floating-point noise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import DegenerateInputError, ResourceError
from .lattice import AlgebraicNumber
from .precision_core import Polynomial, poly_roots, to_mpc

# |h_k - hhat| <= 4^(-k) * c * (h(lambda0)+1); c is empirical, not pinned.
TAIL_CONSTANT = 3.0
MAX_NUMERATOR_DIGITS = 100000


@dataclass(frozen=True)
class HeightReport:
    subject: object
    h: mp.mpf
    method: str  # mahler | projective | duplication-limit
    precision: int
    error_bar: mp.mpf = mp.mpf(0)

    def as_dict(self):
        return {
            "subject": str(self.subject),
            "h": mp.nstr(self.h, 20),
            "method": self.method,
            "precision": self.precision,
            "error_bar": mp.nstr(self.error_bar, 6),
        }


def _as_algebraic(alpha) -> AlgebraicNumber:
    if isinstance(alpha, AlgebraicNumber):
        return alpha
    q = Fraction(alpha)
    poly = Polynomial([-q.numerator, q.denominator])
    return AlgebraicNumber(minpoly=poly, approx=to_mpc(q), degree=1)


def weil_height(alpha) -> HeightReport:
    """Absolute logarithmic height from the minimal polynomial:
    h = (log|lead| + sum log max(1, |root|)) / degree."""
    a = _as_algebraic(alpha)
    p = a.minpoly.primitive()
    total = mp.log(abs(to_mpc(p.leading)))
    for r in poly_roots(p):
        m = abs(r)
        if m > 1:
            total += mp.log(m)
    h = mp.re(total) / p.degree
    if h < 0:  # rounding guard: heights are non-negative by construction
        h = mp.mpf(0)
    return HeightReport(subject=a, h=h, method="mahler", precision=mp.mp.dps)


def rational_height(q) -> mp.mpf:
    q = Fraction(q)
    return mp.log(max(abs(q.numerator), abs(q.denominator), 1))


def duplicate_abscissa(x: Fraction, lam: Fraction) -> Fraction | None:
    """x(2P) on y^2 = x(x-1)(x-lambda); None when 2P = O (2-torsion)."""
    den = 4 * x * (x - 1) * (x - lam)
    if den == 0:
        return None
    return (x * x - lam) ** 2 / den


def on_curve_rational(x: Fraction, y: Fraction, lam: Fraction) -> bool:
    return y * y == x * (x - 1) * (x - lam)


def neron_tate(lambda0, x, y, k_max: int = 5) -> HeightReport:
    """Canonical height of the rational point (x, y) on E_{lambda0},
    normalized so that h(2P) = 4 h(P); torsion gets exactly 0.

    The reported error_bar is the geometric tail bound
    4^(-k_max) * TAIL_CONSTANT * (h(lambda0) + 1).
    """
    lam = Fraction(lambda0)
    x = Fraction(x)
    y = Fraction(y)
    if lam in (0, 1):
        raise DegenerateInputError("lambda0 must avoid 0 and 1")
    if not on_curve_rational(x, y, lam):
        raise DegenerateInputError("point is not on the curve")
    if k_max < 1:
        raise DegenerateInputError("k_max must be >= 1")

    xk = x
    k = 0
    while k < k_max:
        nxt = duplicate_abscissa(xk, lam)
        if nxt is None:
            # hit a 2-torsion abscissa: the point is torsion, hhat = 0 exactly
            return HeightReport(
                subject=(lambda0, x, y), h=mp.mpf(0),
                method="duplication-limit", precision=mp.mp.dps,
            )
        if max(abs(nxt.numerator), abs(nxt.denominator)).bit_length() > MAX_NUMERATOR_DIGITS * 4:
            raise ResourceError(
                f"duplication coordinates exceeded the big-integer budget at k={k + 1}; "
                f"partial estimate {mp.nstr(mp.mpf(4) ** (-k) * rational_height(xk) / 2, 10)}"
            )
        xk = nxt
        k += 1
    h = mp.mpf(4) ** (-k) * rational_height(xk) / 2
    bar = mp.mpf(4) ** (-k) * TAIL_CONSTANT * (rational_height(lam) + 1)
    return HeightReport(
        subject=(lambda0, x, y), h=h, method="duplication-limit",
        precision=mp.mp.dps, error_bar=bar,
    )


def rational_point(x, y):
    """lambda for which (x, y) lies on the Legendre curve: solving
    y^2 = x(x-1)(x-lambda) for lambda.  Handy for generating test points."""
    x = Fraction(x)
    y = Fraction(y)
    if x in (0, 1):
        raise DegenerateInputError("abscissa must avoid 0 and 1")
    return x - y * y / (x * (x - 1))


@dataclass(frozen=True)
class ConjugateAudit:
    alpha: AlgebraicNumber
    delta: mp.mpf
    total: int
    inside: int
    passed: bool

    @property
    def fraction(self) -> mp.mpf:
        return mp.mpf(self.inside) / self.total

    def as_dict(self):
        return {
            "minpoly": str(self.alpha.minpoly),
            "delta": mp.nstr(self.delta, 6),
            "total": self.total,
            "inside": self.inside,
            "fraction": mp.nstr(self.fraction, 6),
            "passed": self.passed,
        }


def conjugate_audit(alpha, delta, excluded=(0, 1)) -> ConjugateAudit:
    """Count conjugates inside the compact truncation of the lens family:
    |t| <= 1/delta and |t - e| >= delta for each excluded point e
    (default {0, 1}); pass means at least half land inside."""
    delta = mp.mpf(delta)
    if not 0 < delta < mp.mpf("0.5"):
        raise DegenerateInputError("delta must lie in (0, 1/2)")
    a = _as_algebraic(alpha)
    roots = poly_roots(a.minpoly)
    inside = 0
    for t in roots:
        if abs(t) > 1 / delta:
            continue
        if any(abs(t - to_mpc(e)) < delta for e in excluded):
            continue
        inside += 1
    total = len(roots)
    return ConjugateAudit(
        alpha=a, delta=delta, total=total, inside=inside,
        passed=2 * inside >= total,
    )
