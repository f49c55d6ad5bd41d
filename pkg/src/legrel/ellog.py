"""Elliptic logarithm, Weierstrass p-function and the exponential map.

The logarithm is computed through the Carlson symmetric integral
R_F(x - 0, x - 1, x - lambda) on the shifted cubic, its sign fixed by matching
p'(z) to 2y, and the result reduced to the fundamental parallelogram
{u f + v g : u, v in [0,1)}.  Every value is certified against
p(z) = x - (lambda+1)/3; when the principal-branch R_F lands on a wrong sheet
(possible for arguments far from the right half plane) the integral definition
itself is used as a fallback.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp

from .curve import CurvePoint, LegendreCurve, O, to_weierstrass
from .errors import PoleError, PrecisionError
from .periods import PeriodPair
from .precision_core import eps, to_mpc


def carlson_rf(x, y, z) -> mp.mpc:
    """Carlson's symmetric elliptic integral R_F for complex arguments."""
    x, y, z = to_mpc(x), to_mpc(y), to_mpc(z)
    # duplication until the arguments are close enough for the tail series
    target = mp.mpf(10) ** (-(mp.mp.dps + 6) / 6.0)
    for _ in range(40 + 3 * mp.mp.dps):
        mu = (x + y + z) / 3
        if abs(mu) == 0:
            raise PoleError("R_F arguments collapsed to zero")
        dx, dy, dz = 1 - x / mu, 1 - y / mu, 1 - z / mu
        if max(abs(dx), abs(dy), abs(dz)) < target:
            e2 = dx * dy + dy * dz + dz * dx
            e3 = dx * dy * dz
            series = (
                1
                - e2 / 10
                + e3 / 14
                + e2 * e2 / 24
                - 3 * e2 * e3 / 44
                - 5 * e2**3 / 208
                + 3 * e3 * e3 / 104
                + e2 * e2 * e3 / 16
            )
            return series / mp.sqrt(mu)
        sx, sy, sz = mp.sqrt(x), mp.sqrt(y), mp.sqrt(z)
        lam = sx * sy + sy * sz + sz * sx
        x, y, z = (x + lam) / 4, (y + lam) / 4, (z + lam) / 4
    raise PrecisionError("R_F duplication did not converge")


def _laurent_coeffs(g2: mp.mpc, g3: mp.mpc, count: int) -> list:
    """Coefficients c_k of p(z) = z^-2 + sum_{k>=2} c_k z^{2k-2}."""
    c = [mp.mpc(0), mp.mpc(0), g2 / 20, g3 / 28]
    for k in range(4, count):
        s = mp.mpc(0)
        for m in range(2, k - 1):
            s += c[m] * c[k - m]
        c.append(3 * s / ((2 * k + 1) * (k - 3)))
    return c


def _p_series(z: mp.mpc, g2: mp.mpc, g3: mp.mpc):
    zz = z * z
    p = 1 / zz
    pp = -2 / (zz * z)
    c2, c3 = g2 / 20, g3 / 28
    c = [mp.mpc(0), mp.mpc(0), c2, c3]
    power = zz  # z^{2k-2}
    tol = eps(-5)
    k = 2
    quiet = 0
    while True:
        if k >= len(c):
            s = mp.mpc(0)
            for m in range(2, k - 1):
                s += c[m] * c[k - m]
            c.append(3 * s / ((2 * k + 1) * (k - 3)))
        term = c[k] * power
        p += term
        pp += (2 * k - 2) * c[k] * power / z
        quiet = quiet + 1 if abs(term) < tol * max(mp.mpf(1), abs(p)) else 0
        if quiet >= 3:
            return p, pp
        power *= zz
        k += 1
        if k > 80 * mp.mp.dps:
            raise PrecisionError("Weierstrass Laurent series did not converge")


def _duplicate(p: mp.mpc, pp: mp.mpc, g2: mp.mpc, g3: mp.mpc):
    den = 4 * p**3 - g2 * p - g3
    if abs(den) < mp.mpf(10) ** (-2 * mp.mp.dps // 3) * max(mp.mpf(1), abs(p)) ** 3:
        raise PoleError("duplication hit a half-period pole")
    num = p**4 + g2 / 2 * p * p + 2 * g3 * p + g2 * g2 / 16
    dnum = 4 * p**3 + g2 * p + 2 * g3
    dden = 12 * p * p - g2
    p2 = num / den
    pp2 = (dnum * den - num * dden) / (den * den) * pp / 2
    return p2, pp2


def reduce_to_fundamental(z, periods: PeriodPair, centered: bool = False) -> mp.mpc:
    """Translate z by lattice vectors into the fundamental parallelogram
    (or, if centered, as close to 0 as the 3x3 shift neighborhood allows)."""
    z = to_mpc(z)
    u, v = periods.coords(z)

    def shift(w):
        w = mp.re(w)
        if centered:
            return mp.nint(w)
        # Snap coordinates within rounding distance of an integer to that
        # integer, so points on the parallelogram boundary get the same
        # representative at every working precision.
        snap = mp.mpf(10) ** (12 - mp.mp.dps)
        if abs(w - mp.nint(w)) < snap:
            return mp.nint(w)
        return mp.floor(w)

    a = shift(u)
    b = shift(v)
    z = z - a * periods.f - b * periods.g
    if centered:
        best = z
        for da in (-1, 0, 1):
            for db in (-1, 0, 1):
                cand = z - da * periods.f - db * periods.g
                if abs(cand) < abs(best):
                    best = cand
        z = best
    return z


def weierstrass_p(z, periods: PeriodPair):
    """(p(z), p'(z)) for the lattice spanned by (f, g)."""
    z = reduce_to_fundamental(z, periods, centered=True)
    short = periods.min_norm()
    if abs(z) < mp.mpf(10) ** (-mp.mp.dps // 2) * short:
        raise PoleError("p-function evaluated at a lattice point")
    w = to_weierstrass(LegendreCurve(periods.lam))
    g2, g3 = to_mpc(w.g2), to_mpc(w.g3)
    halvings = 0
    while abs(z) > mp.mpf("0.35") * short:
        z = z / 2
        halvings += 1
        if halvings > 8:
            break
    p, pp = _p_series(z, g2, g3)
    for _ in range(halvings):
        p, pp = _duplicate(p, pp, g2, g3)
    return p, pp


@dataclass(frozen=True)
class EllipticLog:
    z: mp.mpc
    periods: PeriodPair
    point: CurvePoint
    method: str = "carlson"


def _certify(z, x_shifted, y, periods: PeriodPair):
    """Check p(z) = x_shifted; return sign-corrected z, or None on failure."""
    try:
        p, pp = weierstrass_p(z, periods)
    except PoleError:
        return None
    scale = max(mp.mpf(1), abs(x_shifted))
    if abs(p - x_shifted) > eps(8) * scale:
        return None
    if abs(pp / 2 - y) > abs(-pp / 2 - y):
        return -z
    return z


def _log_by_integration(c: LegendreCurve, P: CurvePoint) -> mp.mpc:
    """The defining integral int_x^inf dX / (2 sqrt(X(X-1)(X-lambda))),
    straight path to a large radius plus an asymptotic tail."""
    lam = c.lam_mpc
    x, y = to_mpc(P.x), to_mpc(P.y)
    R = 16 * max(mp.mpf(2), abs(lam), abs(x))
    # tail: coefficients of (1-u)^{-1/2}(1-lam u)^{-1/2}, u = 1/X
    tol = eps(-5)
    tail = mp.mpc(0)
    alpha = [mp.mpf(1)]
    for j in range(1, 20 * mp.mp.dps):
        alpha.append(alpha[-1] * (2 * j - 1) / (2 * j))
    rp = 1 / mp.sqrt(R)
    for k in range(0, 20 * mp.mp.dps):
        bk = mp.mpc(0)
        for j in range(0, k + 1):
            bk += alpha[j] * alpha[k - j] * lam ** (k - j)
        term = bk / (2 * k + 1) * rp
        tail += term
        rp /= R
        if k > 2 and abs(term) < tol * max(mp.mpf(1), abs(tail)):
            break
    else:
        raise PrecisionError("elliptic log tail series did not converge")

    # main: X = x + (R - x) w^2 regularizes a (near-)two-torsion endpoint.
    # The continuous determination of sqrt along the path is the principal
    # square root times a piecewise-constant sign, precomputed by marching.
    seg = R - x

    def radicand(w):
        X = x + seg * w * w
        return X * (X - 1) * (X - lam)

    sign0 = 1
    if abs(y) > 0:
        w0 = mp.mpf(1) / 1024
        if abs(-mp.sqrt(radicand(w0)) - y) < abs(mp.sqrt(radicand(w0)) - y):
            sign0 = -1
    # locate branch flips of the principal sqrt: crossings of the negative
    # real axis by the radicand, refined by bisection
    samples = 256
    flips = []
    prev_w = mp.mpf(0)
    prev_val = radicand(prev_w)
    for k in range(1, samples + 1):
        w = mp.mpf(k) / samples
        val = radicand(w)
        if mp.im(prev_val) * mp.im(val) < 0 and (mp.re(prev_val) < 0 or mp.re(val) < 0):
            a, fa, b = prev_w, prev_val, w
            for _ in range(4 * mp.mp.dps):
                m = (a + b) / 2
                fm = radicand(m)
                if mp.im(fa) * mp.im(fm) <= 0:
                    b = m
                else:
                    a, fa = m, fm
            cross = (a + b) / 2
            if mp.re(radicand(cross)) < 0:
                flips.append(cross)
        prev_w, prev_val = w, val
    pieces = sorted(set([mp.mpf(0), mp.mpf(1)] + flips + [mp.mpf(k) / 8 for k in range(1, 8)]))
    main = mp.mpc(0)
    sign = sign0
    remaining = list(flips)
    for a, b in zip(pieces[:-1], pieces[1:]):
        while remaining and remaining[0] <= a:
            sign = -sign
            remaining.pop(0)
        s = sign
        main += mp.quad(lambda w: seg * w / (s * mp.sqrt(radicand(w))), [a, b])
    sign_final = sign0 * (-1) ** len(flips)
    return main + sign_final * tail


def elliptic_log(c: LegendreCurve, P: CurvePoint, periods: PeriodPair) -> EllipticLog:
    """z with exp_lambda(z) = P, reduced to the fundamental parallelogram."""
    if P.is_infinity:
        return EllipticLog(z=mp.mpc(0), periods=periods, point=P)
    lam = c.lam_mpc
    x, y = to_mpc(P.x), to_mpc(P.y)
    shift = (lam + 1) / 3
    z = carlson_rf(x, x - 1, x - lam)
    method = "carlson"
    zc = _certify(z, x - shift, y, periods)
    if zc is None:
        z = _log_by_integration(c, P)
        method = "integral"
        zc = _certify(z, x - shift, y, periods)
        if zc is None:
            raise PrecisionError(f"elliptic log certification failed at lambda={lam}, x={x}")
    z = reduce_to_fundamental(zc, periods)
    return EllipticLog(z=z, periods=periods, point=P, method=method)


def exp_map(z, c: LegendreCurve, periods: PeriodPair) -> CurvePoint:
    """Inverse of elliptic_log: (p(z) + (lambda+1)/3, p'(z)/2), O at lattice points."""
    zr = reduce_to_fundamental(z, periods, centered=True)
    if abs(zr) < mp.mpf(10) ** (-mp.mp.dps // 2) * periods.min_norm():
        return O
    p, pp = weierstrass_p(zr, periods)
    lam = c.lam_mpc
    return CurvePoint.affine(p + (lam + 1) / 3, pp / 2)
