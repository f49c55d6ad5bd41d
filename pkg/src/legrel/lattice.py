"""LLL reduction over the integers, integer-relation detection among complex
numbers, and recognition of algebraic numbers from their approximations.

The relation search is the LLL-as-PSLQ construction: an identity block
extended by the real and imaginary parts of the input values scaled by
10^(D-15), leaving 15 guard digits.  Every "none" answer is qualified by the
coefficient bound and the working precision; the method cannot certify
nonexistence absolutely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import PrecisionError
from .precision_core import Polynomial, eps, extra_digits, poly_roots, to_mpc

LOVASZ_DELTA = Fraction(99, 100)


def lll_reduce(rows, delta: Fraction = LOVASZ_DELTA):
    """LLL-reduce an integer basis; returns (reduced_rows, transform).

    transform is unimodular with transform @ rows == reduced_rows (exact).
    Raises ValueError if the rows are linearly dependent.
    """
    n = len(rows)
    b = [[int(x) for x in row] for row in rows]
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def gramschmidt():
        star = []
        mu = [[Fraction(0)] * n for _ in range(n)]
        for i in range(n):
            v = [Fraction(x) for x in b[i]]
            for j in range(i):
                num = sum(Fraction(b[i][k]) * star[j][k] for k in range(len(v)))
                den = norms[j]
                mu[i][j] = num / den if den else Fraction(0)
                v = [x - mu[i][j] * y for x, y in zip(v, star[j])]
            mu[i][i] = Fraction(1)
            star.append(v)
            norms.append(sum(x * x for x in v))
            if norms[i] == 0:
                raise ValueError("lll_reduce: rows are linearly dependent")
        return star, mu

    norms: list = []
    star, mu = gramschmidt()

    def size_reduce(i, j):
        if abs(mu[i][j]) > Fraction(1, 2):
            r = round(mu[i][j])
            b[i] = [x - r * y for x, y in zip(b[i], b[j])]
            u[i] = [x - r * y for x, y in zip(u[i], u[j])]
            for k in range(j + 1):
                mu[i][k] -= r * mu[j][k]

    i = 1
    guard = 0
    while i < n:
        guard += 1
        if guard > 100000:
            raise PrecisionError("LLL failed to terminate")
        for j in range(i - 1, -1, -1):
            size_reduce(i, j)
        if norms[i] >= (delta - mu[i][i - 1] ** 2) * norms[i - 1]:
            i += 1
        else:
            b[i - 1], b[i] = b[i], b[i - 1]
            u[i - 1], u[i] = u[i], u[i - 1]
            norms.clear()
            star, mu = gramschmidt()
            i = max(i - 1, 1)
    return b, u


def _coeff_digits(bound: int) -> int:
    return len(str(abs(int(bound))))


def integer_relation(values, coeff_bound: int, refine=None):
    """Integer vector a (not all zero, |a_i| <= coeff_bound) with
    sum a_i values_i numerically zero, or None.

    If `refine` is given it must map a precision (decimal digits) to the same
    values recomputed at that precision; candidates whose residual does not
    shrink by >= 10 orders at D+20 digits are rejected as spurious.
    """
    if not values:
        raise ValueError("integer_relation needs at least one value")
    k = len(values)
    D = mp.mp.dps
    digits = _coeff_digits(coeff_bound)
    if D < 10 + k * digits + 20:
        raise PrecisionError(
            f"integer relation at bound {coeff_bound} on {k} values needs "
            f">= {10 + k * digits + 20} digits, have {D}"
        )
    vals = [to_mpc(v) for v in values]
    scale = mp.mpf(10) ** (D - 15)
    rows = []
    for i, v in enumerate(vals):
        row = [0] * k
        row[i] = 1
        row += [int(mp.nint(scale * mp.re(v))), int(mp.nint(scale * mp.im(v)))]
        rows.append(row)
    reduced, _ = lll_reduce(rows)
    thresh = mp.mpf(10) ** (k * digits + 15 - D)
    candidates = sorted(reduced, key=lambda r: sum(x * x for x in r))
    for row in candidates:
        a = row[:k]
        if all(x == 0 for x in a):
            continue
        if max(abs(x) for x in a) > coeff_bound:
            continue
        resid = abs(sum(ai * v for ai, v in zip(a, vals)))
        if resid > thresh:
            continue
        if refine is not None:
            with extra_digits(20):
                vals2 = [to_mpc(v) for v in refine(mp.mp.dps)]
                resid2 = abs(sum(ai * v for ai, v in zip(a, vals2)))
            if resid2 > max(resid, thresh) * mp.mpf(10) ** (-10):
                continue
        for x in a:
            if x != 0:
                if x < 0:
                    a = [-y for y in a]
                break
        return list(a)
    return None


@dataclass(frozen=True)
class AlgebraicNumber:
    minpoly: Polynomial  # primitive, positive leading coefficient
    approx: mp.mpc
    degree: int

    def conjugates(self):
        return poly_roots(self.minpoly)

    def __repr__(self) -> str:
        return f"AlgebraicNumber(deg {self.degree}: {self.minpoly})"


def recognize_algebraic(x, max_degree: int, max_coeff_digits: int):
    """Minimal polynomial of x by relation search on (1, x, ..., x^d),
    smallest successful degree first; None if nothing is found below the
    bounds at this precision."""
    x = to_mpc(x)
    D = mp.mp.dps
    if D < max_degree * max_coeff_digits + 30:
        raise PrecisionError(
            f"recognition to degree {max_degree} with {max_coeff_digits}-digit "
            f"coefficients needs >= {max_degree * max_coeff_digits + 30} digits, have {D}"
        )
    bound = 10**max_coeff_digits
    powers = [mp.mpc(1)]
    for d in range(1, max_degree + 1):
        powers.append(powers[-1] * x)
        try:
            # No refine callback: x is given at fixed accuracy and its powers
            # cannot be recomputed any closer, so persistence under raised
            # precision is not a meaningful test here.
            rel = integer_relation(powers, bound)
        except PrecisionError:
            if d == 1:
                raise
            rel = None
        if rel is None:
            continue
        p = Polynomial(rel).primitive()
        if p.degree < 1:
            continue
        if not p.is_squarefree():
            continue
        scale = max(abs(to_mpc(c)) for c in p.coeffs) * max(mp.mpf(1), abs(x)) ** p.degree
        tol = eps(10) * scale
        with extra_digits(20):
            resid = abs(p(x))
        if resid > tol:
            continue
        return AlgebraicNumber(minpoly=p, approx=x, degree=p.degree)
    return None
