"""Period lattice of E_lambda.

On the lens region Lambda = {|t| < 1, |1-t| < 1} the basis is
f(t) = pi F(1/2,1/2,1;t) and g(t) = pi i F(1/2,1/2,1;1-t), oriented so that
Im(g/f) > 0.  Outside Lambda the same germ is continued analytically along a
path avoiding 0 and 1 by high-order Taylor stepping of the hypergeometric ODE
t(1-t) w'' + (1-2t) w' - w/4 = 0, which both f and g satisfy.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import mpmath as mp

from .errors import DegenerateInputError, PathError, PrecisionError
from .precision_core import agm, eps, to_mpc

SERIES_RADIUS = mp.mpf("0.8")


def hypergeometric_F(t) -> mp.mpc:
    """F(1/2,1/2,1;t) by direct series; requires |t| <= 0.8."""
    t = to_mpc(t)
    if abs(t) > SERIES_RADIUS:
        raise ValueError("series evaluation needs |t| <= 0.8; use the AGM route")
    term = mp.mpc(1)
    total = mp.mpc(1)
    tol = eps(-5)
    m = 0
    # term ratio: ((m + 1/2) / (m + 1))^2 * t
    while True:
        ratio = ((2 * m + 1) / mp.mpf(2 * m + 2)) ** 2
        term = term * ratio * t
        total += term
        m += 1
        # geometric tail dominated by |t| <= 0.8
        if abs(term) <= tol * (1 - abs(t)):
            return total
        if m > 40 * mp.mp.dps:
            raise PrecisionError("hypergeometric series did not meet its tail bound")


def _F_prime(t) -> mp.mpc:
    """Derivative of F(1/2,1/2,1;t) by termwise differentiated series."""
    t = to_mpc(t)
    if abs(t) > SERIES_RADIUS:
        raise ValueError("series derivative needs |t| <= 0.8")
    coef = mp.mpc(1)  # c_m = ((2m)!)^2 / (2^{4m} m!^4)
    total = mp.mpc(0)
    power = mp.mpc(1)  # t^{m-1}
    tol = eps(-5)
    for m in range(1, 40 * mp.mp.dps):
        coef = coef * ((2 * m - 1) / mp.mpf(2 * m)) ** 2
        term = coef * m * power
        total += term
        power *= t
        if m > 2 and abs(term) <= tol * (1 - abs(t)):
            return total
    raise PrecisionError("hypergeometric derivative series did not converge")


def F_by_agm(t) -> mp.mpc:
    """F(1/2,1/2,1;t) = 1/agm(1, sqrt(1-t)); valid on Lambda with principal branch."""
    return 1 / agm(1, mp.sqrt(1 - to_mpc(t)))


def in_lens(t, margin=0) -> bool:
    t = to_mpc(t)
    return abs(t) < 1 - margin and abs(1 - t) < 1 - margin


@dataclass(frozen=True)
class PeriodPair:
    f: mp.mpc
    g: mp.mpc
    lam: mp.mpc
    branch_log: tuple = field(default_factory=tuple)

    @property
    def tau(self) -> mp.mpc:
        return self.g / self.f

    @property
    def delta(self) -> mp.mpc:
        """Delta = f conj(g) - conj(f) g; purely imaginary and nonzero."""
        return self.f * mp.conj(self.g) - mp.conj(self.f) * self.g

    def lattice_shift(self, a: int, b: int) -> mp.mpc:
        return a * self.f + b * self.g

    def coords(self, z) -> tuple:
        """Complex-valued (u, v) with z = u f + v g; imaginary parts are
        rounding residue (the Betti layer checks and strips them)."""
        z = to_mpc(z)
        d = self.delta
        u = (z * mp.conj(self.g) - mp.conj(z) * self.g) / d
        v = -(z * mp.conj(self.f) - mp.conj(z) * self.f) / d
        return u, v

    def min_norm(self) -> mp.mpf:
        """Length of a shortest nonzero vector among small combinations."""
        return min(
            abs(a * self.f + b * self.g)
            for a in (-1, 0, 1)
            for b in (-1, 0, 1)
            if (a, b) != (0, 0)
        )


def _F_value_and_deriv(t):
    if abs(t) > SERIES_RADIUS:
        raise ValueError("base-point evaluation outside series zone")
    return hypergeometric_F(t), _F_prime(t)


def _taylor_step(t0, h, w, wp, tol):
    """Continue (w, w') of the hypergeometric ODE from t0 to t0+h.

    Coefficient recurrence:
    c_{m+2} = [ (m+1/2)^2 c_m - (1-2 t0)(m+1)^2 c_{m+1} ] / (t0(1-t0)(m+1)(m+2)).
    """
    p0 = t0 * (1 - t0)
    q0 = 1 - 2 * t0
    c = [mp.mpc(w), mp.mpc(wp)]
    val = c[0] + c[1] * h
    der = c[1]
    hp = h  # h^m for the derivative accumulation, h^{m+1} for the value
    for m in range(0, 60 * mp.mp.dps):
        cm2 = ((m + mp.mpf("0.5")) ** 2 * c[m] - q0 * (m + 1) ** 2 * c[m + 1]) / (
            p0 * (m + 1) * (m + 2)
        )
        c.append(cm2)
        hp2 = hp * h
        val += cm2 * hp2
        der += cm2 * (m + 2) * hp
        hp = hp2
        if m > 4 and abs(cm2 * hp2) < tol and abs(c[m + 1] * hp) < tol:
            return val, der
    raise PrecisionError("Taylor continuation step did not converge")


def _default_path(target: mp.mpc):
    """Straight segment from the base point 1/2, bent to keep clear of 0 and 1."""
    base = mp.mpc("0.5")
    waypoints = [base]
    for s in (0, 1):
        s = mp.mpc(s)
        seg = target - base
        if abs(seg) == 0:
            continue
        # distance of s from the segment [base, target]
        u = mp.re((s - base) * mp.conj(seg)) / abs(seg) ** 2
        if 0 < u < 1 and abs(base + u * seg - s) < mp.mpf("0.2"):
            # detour point perpendicular to the segment, deterministic side
            perp = mp.mpc(0, 1) * seg / abs(seg)
            waypoints.append(s + mp.mpf("0.35") * perp)
    waypoints.sort(key=lambda w: abs(w - base))
    waypoints.append(target)
    return waypoints


def _continue_pair(path, tol):
    """Analytic continuation of (F(t), F(1-t)) along path; path[0] must be in
    the series zone."""
    t = to_mpc(path[0])
    if abs(t) > SERIES_RADIUS or abs(1 - t) > SERIES_RADIUS:
        raise PathError("continuation path must start near the base point 1/2")
    w1, w1p = _F_value_and_deriv(t)
    w2v, w2vp = _F_value_and_deriv(1 - t)
    w2, w2p = w2v, -w2vp  # d/dt F(1-t) = -F'(1-t)
    steps = []
    for target in path[1:]:
        target = to_mpc(target)
        while abs(target - t) > 0:
            rad = min(abs(t), abs(t - 1))
            if rad < mp.mpf("1e-6"):
                raise PathError(f"continuation path passes through a singular value near {t}")
            h_full = target - t
            step = h_full if abs(h_full) <= rad / 2 else h_full / abs(h_full) * (rad / 2)
            w1, w1p = _taylor_step(t, step, w1, w1p, tol)
            w2, w2p = _taylor_step(t, step, w2, w2p, tol)
            t = t + step
            steps.append(t)
    return (w1, w2, tuple(steps))


def period_pair(lam, path=None) -> PeriodPair:
    """Basis (f, g) of the period lattice of E_lambda with Im(g/f) > 0.

    Inside the lens region the hypergeometric formulas apply directly (series
    where they converge comfortably, AGM elsewhere); outside, the germ at the
    base point 1/2 is continued along `path` (default: a straight segment with
    deterministic detours around 0 and 1).
    """
    lam = to_mpc(lam)
    if abs(lam) < eps(10) or abs(lam - 1) < eps(10):
        raise DegenerateInputError("periods undefined at lambda in {0, 1}")
    branch_log = []
    if path is None and in_lens(lam):
        Fv = hypergeometric_F(lam) if abs(lam) <= SERIES_RADIUS else F_by_agm(lam)
        Gv = hypergeometric_F(1 - lam) if abs(1 - lam) <= SERIES_RADIUS else F_by_agm(1 - lam)
    else:
        wp = path if path is not None else _default_path(lam)
        if abs(to_mpc(wp[-1]) - lam) > eps(0):
            raise PathError("continuation path must end at lambda")
        Fv, Gv, steps = _continue_pair(wp, eps(-8))
        branch_log.append(("continued", len(steps)))
    f = mp.pi * Fv
    g = mp.pi * mp.mpc(0, 1) * Gv
    if mp.im(g / f) <= 0:
        g = -g
        branch_log.append(("orient", -1))
    pair = PeriodPair(f=f, g=g, lam=lam, branch_log=tuple(branch_log))
    if mp.im(pair.tau) <= 0:
        raise PrecisionError("period basis failed orientation normalization")
    return pair
