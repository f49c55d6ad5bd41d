"""Precision context, complex AGM, exact polynomials and complex root finding.

The working precision is a process-global number of decimal digits backed by
mpmath's global context.  All analytic quantities in the toolkit are mpmath
``mpf``/``mpc`` values computed at that precision; exact data (division
polynomials, minimal polynomials, heights of rationals) lives in ``Fraction``
coefficients of :class:`Polynomial`.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from fractions import Fraction

import mpmath as mp

from .errors import DegenerateInputError, PrecisionError

DEFAULT_DIGITS = 64
MIN_DIGITS = 32


def set_precision(digits: int) -> None:
    """Set the global working precision in decimal digits (minimum 32)."""
    if digits < MIN_DIGITS:
        raise PrecisionError(f"working precision must be >= {MIN_DIGITS} digits, got {digits}")
    mp.mp.dps = digits


def get_precision() -> int:
    return mp.mp.dps


@contextmanager
def working_digits(digits: int):
    """Temporarily run at a different working precision."""
    old = mp.mp.dps
    set_precision(digits)
    try:
        yield
    finally:
        mp.mp.dps = old


@contextmanager
def extra_digits(guard: int):
    """Temporarily add guard digits on top of the current precision."""
    old = mp.mp.dps
    mp.mp.dps = old + guard
    try:
        yield
    finally:
        mp.mp.dps = old


set_precision(DEFAULT_DIGITS)


def eps(shift: int = 0) -> mp.mpf:
    """10**(shift - D) at the current working precision D."""
    return mp.mpf(10) ** (shift - mp.mp.dps)


def to_mpc(x) -> mp.mpc:
    if isinstance(x, Fraction):
        return mp.mpc(mp.mpf(x.numerator) / x.denominator)
    return mp.mpc(x)


def to_mpf(x) -> mp.mpf:
    if isinstance(x, Fraction):
        return mp.mpf(x.numerator) / x.denominator
    return mp.mpf(x)


def _agm_sqrt_choice(a1: mp.mpc, prod: mp.mpc) -> mp.mpc:
    """Square root of prod with |a1 - s| <= |a1 + s|, ties toward Im(s) >= 0."""
    s = mp.sqrt(prod)
    d_minus = abs(a1 - s)
    d_plus = abs(a1 + s)
    if d_minus > d_plus * (1 + eps(4)):
        return -s
    if d_plus > d_minus * (1 + eps(4)):
        return s
    # tie: pick the root in the closed upper half plane
    if mp.im(s) < 0 or (mp.im(s) == 0 and mp.re(s) < 0):
        return -s
    return s


def agm(a, b) -> mp.mpc:
    """Arithmetic-geometric mean of complex a, b with the optimal branch choice.

    At every step the square root is picked so that |a_n - b_n| <= |a_n + b_n|,
    which pins the principal ("right choice") AGM value.
    """
    a = to_mpc(a)
    b = to_mpc(b)
    if a == 0 or b == 0:
        raise DegenerateInputError("agm requires nonzero arguments")
    ratio = b / a
    if mp.im(ratio) == 0 and mp.re(ratio) < 0:
        raise DegenerateInputError("agm undefined for b/a on the negative real axis")
    tol = eps(3)  # rounding floor of the iteration is ~10^(2-D)
    max_iter = 8 * (int(math.log2(mp.mp.dps + 2)) + 4)
    for _ in range(max_iter):
        if abs(a - b) <= tol * abs(a):
            return (a + b) / 2
        a, b = (a + b) / 2, _agm_sqrt_choice((a + b) / 2, a * b)
    raise DegenerateInputError("agm did not converge (degenerate input?)")


class Polynomial:
    """Univariate polynomial with exact rational coefficients.

    Coefficients are stored low to high; the representation is normalized so
    that the leading coefficient is nonzero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = [c if isinstance(c, Fraction) else Fraction(c) for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs = tuple(cs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.degree == 0 and self.coeffs[0] == 0

    def __call__(self, x):
        if isinstance(x, (int, Fraction)):
            acc = Fraction(0)
            for c in reversed(self.coeffs):
                acc = acc * x + c
            return acc
        x = to_mpc(x)
        acc = mp.mpc(0)
        for c in reversed(self.coeffs):
            acc = acc * x + to_mpc(c)
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial([0])
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(other.coeffs) + [Fraction(0)] * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + other * Polynomial([-1])

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(out)

    def __pow__(self, n: int) -> "Polynomial":
        if n < 0:
            raise ValueError("negative polynomial power")
        out = Polynomial([Fraction(1)])
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def divmod(self, other: "Polynomial"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        q = [Fraction(0)] * max(1, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lead = other.leading
        for i in range(len(rem) - 1, d - 1, -1):
            if rem[i] == 0:
                continue
            f = rem[i] / lead
            q[i - d] = f
            for j, c in enumerate(other.coeffs):
                rem[i - d + j] -= f * c
        return Polynomial(q), Polynomial(rem)

    def divides(self, other: "Polynomial") -> bool:
        """True if self divides other exactly over Q."""
        _, r = other.divmod(self)
        return r.is_zero()

    def content(self) -> Fraction:
        from math import gcd

        num = 0
        den = 1
        for c in self.coeffs:
            num = gcd(num, abs(c.numerator))
            den = den * c.denominator // gcd(den, c.denominator)
        if num == 0:
            return Fraction(0)
        return Fraction(num, den)

    def primitive(self) -> "Polynomial":
        """Integer-coefficient version with content 1 and positive leading term."""
        c = self.content()
        if c == 0:
            return Polynomial([0])
        p = Polynomial([x / c for x in self.coeffs])
        if p.leading < 0:
            p = p * Polynomial([-1])
        return p

    def gcd(self, other: "Polynomial") -> "Polynomial":
        a, b = self, other
        while not b.is_zero():
            _, r = a.divmod(b)
            a, b = b, r
        if a.is_zero():
            return a
        return Polynomial([c / a.leading for c in a.coeffs])

    def is_squarefree(self) -> bool:
        return self.gcd(self.derivative()).degree == 0

    def __eq__(self, other) -> bool:
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self) -> str:
        terms = []
        for k, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*x")
            else:
                terms.append(f"{c}*x^{k}")
        return " + ".join(terms) if terms else "0"


def _root_sort_key(r: mp.mpc):
    # lexicographic by (re, im), quantized so ties from rounding noise are stable
    q = mp.mpf(10) ** (12 - mp.mp.dps)
    return (mp.nint(mp.re(r) / q), mp.nint(mp.im(r) / q))


def poly_roots(p: Polynomial) -> list:
    """All complex roots of p with multiplicity, ordered lexicographically by (re, im).

    Uses simultaneous (Durand-Kerner) iteration at elevated internal precision;
    every root is residual-checked and a failure raises PrecisionError rather
    than returning silently wrong values.
    """
    if p.degree < 1:
        raise ValueError("poly_roots requires degree >= 1")
    coeffs_desc = [to_mpc(c) for c in reversed(p.coeffs)]
    try:
        roots = mp.polyroots(coeffs_desc, maxsteps=120, extraprec=mp.mp.prec, cleanup=True)
    except mp.libmp.libhyper.NoConvergence as exc:  # pragma: no cover
        raise PrecisionError(f"root finding did not converge: {exc}") from exc
    roots = [mp.mpc(r) for r in roots]
    scale = max(abs(to_mpc(c)) for c in p.coeffs)
    tol = scale * eps(10)
    with extra_digits(15):
        for r in roots:
            grow = max(mp.mpf(1), abs(r)) ** p.degree
            if abs(p(r)) > tol * grow:
                raise PrecisionError(f"root residual {abs(p(r))} exceeds tolerance at root {r}")
    roots.sort(key=_root_sort_key)
    return roots
