"""The Legendre curve Y^2 = X(X-1)(X-lambda): group law, scalar multiples,
Weierstrass conversion, and exact division polynomials.

Points are either exact (Fraction coordinates on a Fraction lambda) or
numerical (mpmath values at the working precision); the chord-tangent law is
implemented directly on the cubic in both modes.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

from .errors import DegenerateInputError, ResourceError
from .precision_core import Polynomial, eps, extra_digits, get_precision, to_mpc

MAX_DIVISION_POLY_ORDER = 64


def _exact(*values) -> bool:
    return all(isinstance(v, (int, Fraction)) for v in values)


class LegendreCurve:
    """E_lambda in Legendre form; lambda may be exact (Fraction) or mpc."""

    __slots__ = ("lam",)

    def __init__(self, lam):
        if isinstance(lam, int):
            lam = Fraction(lam)
        if _exact(lam):
            if lam in (0, 1):
                raise DegenerateInputError(f"lambda = {lam} is not an elliptic curve")
        else:
            lam = to_mpc(lam)
            if abs(lam) < eps(10) or abs(lam - 1) < eps(10):
                raise DegenerateInputError("lambda too close to 0 or 1")
        self.lam = lam

    @property
    def lam_mpc(self) -> mp.mpc:
        return to_mpc(self.lam)

    def rhs(self, x):
        """x(x-1)(x-lambda) in the arithmetic of x."""
        lam = self.lam if _exact(x, self.lam) else self.lam_mpc
        if not _exact(x, self.lam):
            x = to_mpc(x)
        return x * (x - 1) * (x - lam)

    def contains(self, P: "CurvePoint", tol_shift: int = 10) -> bool:
        if P.is_infinity:
            return True
        if _exact(P.x, P.y, self.lam):
            return P.y * P.y == self.rhs(P.x)
        r = abs(to_mpc(P.y) ** 2 - self.rhs(to_mpc(P.x)))
        scale = max(mp.mpf(1), abs(to_mpc(P.x)) ** 3, abs(to_mpc(P.y)) ** 2)
        return r <= eps(tol_shift) * scale

    def point(self, x, y) -> "CurvePoint":
        P = CurvePoint.affine(x, y)
        if not self.contains(P):
            raise ValueError(f"({x}, {y}) is not on E_lambda for lambda={self.lam}")
        return P

    def lift_x(self, x, branch: int = 1) -> "CurvePoint":
        """Point with abscissa x; y = branch * principal sqrt of the cubic."""
        y = mp.sqrt(self.rhs(to_mpc(x)))
        return CurvePoint.affine(to_mpc(x), branch * y)

    def __repr__(self) -> str:
        return f"LegendreCurve(lambda={self.lam})"


@dataclass(frozen=True)
class CurvePoint:
    x: object = None
    y: object = None
    is_infinity: bool = False

    @staticmethod
    def infinity() -> "CurvePoint":
        return CurvePoint(is_infinity=True)

    @staticmethod
    def affine(x, y) -> "CurvePoint":
        if isinstance(x, int):
            x = Fraction(x)
        if isinstance(y, int):
            y = Fraction(y)
        return CurvePoint(x=x, y=y)

    def neg(self) -> "CurvePoint":
        if self.is_infinity:
            return self
        return CurvePoint(x=self.x, y=-self.y)

    def approx_eq(self, other: "CurvePoint", tol=None) -> bool:
        if self.is_infinity or other.is_infinity:
            return self.is_infinity and other.is_infinity
        tol = tol if tol is not None else eps(8)
        scale = max(mp.mpf(1), abs(to_mpc(self.x)), abs(to_mpc(self.y)))
        return (
            abs(to_mpc(self.x) - to_mpc(other.x)) <= tol * scale
            and abs(to_mpc(self.y) - to_mpc(other.y)) <= tol * scale
        )

    def __repr__(self) -> str:
        return "O" if self.is_infinity else f"({self.x}, {self.y})"


O = CurvePoint.infinity()


def _chord_sum(lam, xp, yp, xq, yq, slope):
    one_plus_lam = 1 + lam
    xr = slope * slope + one_plus_lam - xp - xq
    yr = -(yp + slope * (xr - xp))
    return xr, yr


def add(c: LegendreCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    """Chord-tangent sum on Y^2 = X^3 - (1+lambda)X^2 + lambda X."""
    if P.is_infinity:
        return Q
    if Q.is_infinity:
        return P
    exact = _exact(P.x, P.y, Q.x, Q.y, c.lam)
    if exact:
        lam, xp, yp, xq, yq = c.lam, P.x, P.y, Q.x, Q.y
        if xp == xq:
            if yp == -yq:
                return O
            # doubling; yp == yq != 0 here
            slope = (3 * xp * xp - 2 * (1 + lam) * xp + lam) / (2 * yp)
        else:
            slope = (yq - yp) / (xq - xp)
        xr, yr = _chord_sum(lam, xp, yp, xq, yq, slope)
        return CurvePoint.affine(xr, yr)

    lam = c.lam_mpc
    xp, yp, xq, yq = (to_mpc(v) for v in (P.x, P.y, Q.x, Q.y))
    scale = max(mp.mpf(1), abs(xp), abs(xq))
    dx = abs(xp - xq)
    same_x = dx <= eps(-2) * scale
    if same_x:
        if abs(yp + yq) <= eps(-2) * max(mp.mpf(1), abs(yp)):
            return O
        slope = (3 * xp * xp - 2 * (1 + lam) * xp + lam) / (2 * yp)
        xr, yr = _chord_sum(lam, xp, yp, xq, yq, slope)
        return CurvePoint.affine(xr, yr)
    if dx < mp.mpf(10) ** (-get_precision() // 2) * scale:
        # near-degenerate chord: redo at doubled precision to tame cancellation
        with extra_digits(get_precision()):
            slope = (yq - yp) / (xq - xp)
            xr, yr = _chord_sum(lam, xp, yp, xq, yq, slope)
        return CurvePoint.affine(mp.mpc(xr), mp.mpc(yr))
    slope = (yq - yp) / (xq - xp)
    xr, yr = _chord_sum(lam, xp, yp, xq, yq, slope)
    return CurvePoint.affine(xr, yr)


def scalar_mul(c: LegendreCurve, m: int, P: CurvePoint) -> CurvePoint:
    if m == 0 or P.is_infinity:
        return O
    if m < 0:
        return scalar_mul(c, -m, P.neg())
    acc = O
    base = P
    while m:
        if m & 1:
            acc = add(c, acc, base)
        m >>= 1
        if m:
            base = add(c, base, base)
    return acc


@dataclass(frozen=True)
class WeierstrassData:
    g2: object
    g3: object
    j: object
    shift: object  # (lambda + 1) / 3; the map is (x, y) -> (x - shift, 2y)


def to_weierstrass(c: LegendreCurve) -> WeierstrassData:
    """g2, g3, j for the model Ytilde^2 = 4 Xtilde^3 - g2 Xtilde - g3.

    Exact when lambda is rational.
    """
    lam = c.lam
    if _exact(lam):
        g2 = Fraction(4, 3) * (lam * lam - lam + 1)
        g3 = Fraction(4, 27) * (lam - 2) * (lam + 1) * (2 * lam - 1)
        j = 256 * (lam * lam - lam + 1) ** 3 / (lam * lam * (lam - 1) ** 2)
        shift = Fraction(lam + 1, 3)
    else:
        lam = c.lam_mpc
        g2 = mp.mpf(4) / 3 * (lam * lam - lam + 1)
        g3 = mp.mpf(4) / 27 * (lam - 2) * (lam + 1) * (2 * lam - 1)
        j = 256 * (lam * lam - lam + 1) ** 3 / (lam * lam * (lam - 1) ** 2)
        shift = (lam + 1) / 3
    return WeierstrassData(g2=g2, g3=g3, j=j, shift=shift)


# --- division polynomials -------------------------------------------------
#
# For fixed rational abscissa x0, psi_m on E_lambda is computed as a polynomial
# in lambda.  We keep psi_m = q_m(lambda) * y^e with e in {0,1}, eliminating
# y^2 = B(lambda) = x0(x0-1)(x0-lambda) as we go.


class _PsiTable:
    def __init__(self, x0: Fraction):
        self.x0 = x0
        x = x0
        # B(lambda) = x0(x0-1)(x0-lambda)
        self.B = Polynomial([x * x * (x - 1), -x * (x - 1)])
        # a2 = -(1+lambda), a4 = lambda as polynomials in lambda
        P = Polynomial
        a2p = P([-1, -1])
        a4p = P([0, 1])
        xk = lambda k: P([x**k])
        # psi_m = (q, e): q in Q[lambda], e = 1 iff m even
        self.table = {
            0: (P([0]), 0),
            1: (P([1]), 0),
            2: (P([2]), 1),
            # psi3 = 3x^4 + 4 a2 x^3 + 6 a4 x^2 - a4^2  (a6 = 0, b8 = -a4^2)
            3: (xk(4) * P([3]) + a2p * xk(3) * P([4]) + a4p * xk(2) * P([6]) - a4p * a4p, 0),
            4: (
                (
                    xk(6) * P([2])
                    + a2p * xk(5) * P([4])
                    + a4p * xk(4) * P([10])
                    - a4p * a4p * xk(2) * P([10])
                    - a2p * a4p * a4p * xk(1) * P([4])
                    - a4p * a4p * a4p * P([2])
                )
                * P([2]),
                1,
            ),
        }

    def _mul(self, u, v):
        q1, e1 = u
        q2, e2 = v
        e = e1 + e2
        q = q1 * q2
        if e >= 2:
            q = q * self.B ** (e // 2)
            e %= 2
        return (q, e)

    def _sub(self, u, v):
        assert u[1] == v[1], "parity mismatch in psi recurrence"
        return (u[0] - v[0], u[1])

    def _div_psi2(self, u):
        q, e = u
        if e == 1:
            return (Polynomial([c / 2 for c in q.coeffs]), 0)
        quo, rem = q.divmod(self.B)
        if not rem.is_zero():
            raise ArithmeticError("psi recurrence: inexact division by psi2")
        return (Polynomial([c / 2 for c in quo.coeffs]), 1)

    def psi(self, m: int):
        if m in self.table:
            return self.table[m]
        if m > MAX_DIVISION_POLY_ORDER:
            raise ResourceError(f"division polynomial order {m} exceeds cap {MAX_DIVISION_POLY_ORDER}")
        k, r = divmod(m, 2)
        if r:  # m = 2k+1
            t = self._sub(
                self._mul(self.psi(k + 2), self._pow3(self.psi(k))),
                self._mul(self.psi(k - 1), self._pow3(self.psi(k + 1))),
            )
        else:  # m = 2k
            inner = self._sub(
                self._mul(self.psi(k + 2), self._mul(self.psi(k - 1), self.psi(k - 1))),
                self._mul(self.psi(k - 2), self._mul(self.psi(k + 1), self.psi(k + 1))),
            )
            t = self._div_psi2(self._mul(self.psi(k), inner))
        expected_parity = 0 if m % 2 else 1
        assert t[1] == expected_parity
        self.table[m] = t
        return t

    def _pow3(self, u):
        return self._mul(u, self._mul(u, u))


_psi_cache: dict = {}


def _psi_table(x0: Fraction) -> _PsiTable:
    tab = _psi_cache.get(x0)
    if tab is None:
        tab = _PsiTable(x0)
        if len(_psi_cache) > 64:
            _psi_cache.clear()
        _psi_cache[x0] = tab
    return tab


def division_poly_lambda(m: int, x0) -> Polynomial:
    """The m-th division polynomial at fixed abscissa x0, as a polynomial in
    lambda, with odd powers of y stripped via an extra B(lambda) factor.

    The returned polynomial vanishes at lambda0 exactly when (x0, *) is
    m-torsion on E_{lambda0} (order dividing m).
    """
    if m < 1:
        raise ValueError("division polynomial order must be >= 1")
    x0 = Fraction(x0)
    tab = _psi_table(x0)
    q, e = tab.psi(m)
    return q * tab.B if e else q


def division_poly_eval(m: int, x, lam) -> Fraction:
    """Exact value of the (y-stripped) m-th division polynomial at (x, lambda)."""
    return division_poly_lambda(m, Fraction(x))(Fraction(lam))
