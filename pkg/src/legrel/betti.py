"""Betti coordinates: the real pair (u, v) with z = u f + v g, and sampled
grids of the map lambda -> (u_1, v_1, ..., u_n, v_n) over a disc.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp

from .curve import CurvePoint, LegendreCurve
from .ellog import elliptic_log
from .errors import PrecisionError
from .periods import PeriodPair, period_pair
from .precision_core import eps, to_mpc


@dataclass(frozen=True)
class BettiCoords:
    u: mp.mpf
    v: mp.mpf

    def as_tuple(self):
        return (self.u, self.v)


def betti_coords(z, periods: PeriodPair) -> BettiCoords:
    """Real coordinates of z in the basis (f, g); raises if the linear algebra
    leaves an imaginary residue above tolerance (inconsistent inputs)."""
    u, v = periods.coords(z)
    scale = max(mp.mpf(1), abs(u), abs(v))
    if abs(mp.im(u)) > eps(10) * scale or abs(mp.im(v)) > eps(10) * scale:
        raise PrecisionError(
            f"Betti coordinates have imaginary residue {mp.im(u)}, {mp.im(v)}"
        )
    return BettiCoords(u=mp.re(u), v=mp.re(v))


def wrap_unit(x) -> mp.mpf:
    """Signed distance of a real number to the nearest integer."""
    x = mp.re(to_mpc(x))
    return x - mp.nint(x)


@dataclass(frozen=True)
class Region:
    """Closed disc in the lambda plane."""

    center: mp.mpc
    radius: mp.mpf

    def __post_init__(self):
        object.__setattr__(self, "center", to_mpc(self.center))
        object.__setattr__(self, "radius", mp.mpf(self.radius))

    def contains(self, lam, slack=mp.mpf(0)) -> bool:
        return abs(to_mpc(lam) - self.center) <= self.radius + slack

    def margin_from_degenerate(self) -> mp.mpf:
        return min(abs(self.center) - self.radius, abs(self.center - 1) - self.radius)

    def inside_lens(self, margin) -> bool:
        return (
            abs(self.center) + self.radius < 1 - margin
            and abs(self.center - 1) + self.radius < 1 - margin
            and self.margin_from_degenerate() >= margin
        )

    def grid(self, resolution):
        """Row-major deterministic grid covering the disc."""
        res = mp.mpf(resolution)
        n = int(mp.floor(self.radius / res))
        pts = []
        for j in range(-n, n + 1):
            for i in range(-n, n + 1):
                lam = self.center + mp.mpc(i * res, j * res)
                if abs(lam - self.center) <= self.radius:
                    pts.append(lam)
        return pts


DEFAULT_LENS_MARGIN = mp.mpf("0.05")


def _validate_abscissas(abscissas, region: Region):
    out = []
    for x in abscissas:
        xv = to_mpc(x)
        if abs(xv) < 1e-12 or abs(xv - 1) < 1e-12:
            raise ValueError(f"abscissa {x} is identically 2-torsion (0 or 1)")
        if region.contains(xv, slack=mp.mpf("1e-9")):
            raise ValueError(f"abscissa {x} collides with lambda on the region")
        out.append(x)
    return out


@dataclass
class BettiGrid:
    region: Region
    resolution: mp.mpf
    abscissas: list
    samples: list = field(default_factory=list)  # (lam, [(u, v), ...])
    ybranches: list = field(default_factory=list)  # per sample: sign per abscissa

    def to_json(self) -> str:
        def num(x):
            return mp.nstr(x, mp.mp.dps)

        return json.dumps(
            {
                "region": {"center": num(self.region.center), "radius": num(self.region.radius)},
                "resolution": num(self.resolution),
                "abscissas": [str(x) for x in self.abscissas],
                "precision": mp.mp.dps,
                "samples": [
                    {
                        "lambda_re": num(mp.re(lam)),
                        "lambda_im": num(mp.im(lam)),
                        "coords": [[num(u), num(v)] for (u, v) in coords],
                    }
                    for lam, coords in self.samples
                ],
            },
            indent=1,
        )

    def write_csv(self, fh) -> None:
        writer = csv.writer(fh)
        header = ["re_lambda", "im_lambda"]
        for j in range(len(self.abscissas)):
            header += [f"u{j + 1}", f"v{j + 1}"]
        writer.writerow(header)
        for lam, coords in self.samples:
            row = [mp.nstr(mp.re(lam), mp.mp.dps), mp.nstr(mp.im(lam), mp.mp.dps)]
            for u, v in coords:
                row += [mp.nstr(u, mp.mp.dps), mp.nstr(v, mp.mp.dps)]
            writer.writerow(row)


def _continuous_lift(c: LegendreCurve, x0, prev_y):
    """Point with abscissa x0, y chosen by sign continuity against prev_y."""
    y = mp.sqrt(c.rhs(to_mpc(x0)))
    if prev_y is not None and abs(-y - prev_y) < abs(y - prev_y):
        y = -y
    return CurvePoint.affine(to_mpc(x0), y)


def betti_grid(region: Region, abscissas, resolution) -> BettiGrid:
    """Sample the Betti map over a disc inside the lens region.

    The y-branch of every abscissa is the principal square root at the first
    grid point and is propagated by nearest-neighbor sign continuity in
    row-major order, so runs are reproducible at fixed precision.
    """
    if not region.inside_lens(DEFAULT_LENS_MARGIN):
        raise ValueError("region must be a closed disc inside the lens with margin 0.05")
    abscissas = _validate_abscissas(abscissas, region)
    pts = region.grid(resolution)
    grid = BettiGrid(region=region, resolution=mp.mpf(resolution), abscissas=list(abscissas))
    prev_ys = None
    row_start_ys = None
    last_im = None
    for lam in pts:
        curve = LegendreCurve(lam)
        pair = period_pair(lam)
        is_row_start = last_im is None or mp.im(lam) != last_im
        refs = (row_start_ys if is_row_start else prev_ys) or [None] * len(abscissas)
        coords = []
        ys = []
        signs = []
        for x0, ref in zip(abscissas, refs):
            P = _continuous_lift(curve, x0, ref)
            ys.append(to_mpc(P.y))
            principal = mp.sqrt(curve.rhs(to_mpc(x0)))
            signs.append(1 if abs(to_mpc(P.y) - principal) <= abs(to_mpc(P.y) + principal) else -1)
            z = elliptic_log(curve, P, pair).z
            bc = betti_coords(z, pair)
            coords.append((bc.u, bc.v))
        grid.samples.append((lam, coords))
        grid.ybranches.append(signs)
        prev_ys = ys
        if is_row_start:
            row_start_ys = ys
        last_im = mp.im(lam)
    return grid
