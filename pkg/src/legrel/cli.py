"""Command-line surface: one subcommand per toolkit operation, JSON/CSV/SVG
output with a provenance header, deterministic for fixed configuration.

Exit codes: 0 success, 1 input error, 2 precision or resource error.
"""

from __future__ import annotations

import argparse
import hashlib
import io
import json
import sys
from fractions import Fraction

import mpmath as mp

from . import __version__
from . import curve as cv
from .betti import Region, betti_grid
from .ellog import elliptic_log
from .errors import DegenerateInputError, PrecisionError, ResourceError
from .heights import conjugate_audit, neron_tate, weil_height
from .lattice import recognize_algebraic
from .periods import period_pair
from .precision_core import set_precision, to_mpc
from .relations import point_from_abscissa, relation_lattice
from .scanner import count_rational_hits, emit_svg, torsion_scan, two_relation_scan


class InputError(Exception):
    pass


def _parse_complex(text: str) -> mp.mpc:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return mp.mpc(mp.mpf(parts[0]))
        if len(parts) == 2:
            return mp.mpc(mp.mpf(parts[0]), mp.mpf(parts[1]))
    except ValueError:
        pass
    raise InputError(f"cannot parse complex number {text!r} (use 're' or 're,im')")


def _parse_rational_list(text: str):
    out = []
    for item in text.split(","):
        try:
            out.append(Fraction(item))
        except ValueError:
            raise InputError(f"cannot parse rational {item!r}")
    return out


def _parse_int_list(text: str):
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise InputError(f"cannot parse integer list {text!r}")


def _provenance(args) -> dict:
    config = {k: str(v) for k, v in sorted(vars(args).items()) if k != "func"}
    digest = hashlib.sha256(json.dumps(config, sort_keys=True).encode()).hexdigest()[:16]
    return {"version": __version__, "precision": mp.mp.dps, "config_hash": digest}


def _write(args, text: str):
    if getattr(args, "output", None):
        with open(args.output, "w") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")


def _emit_json(args, payload: dict):
    payload = dict(payload)
    payload["_provenance"] = _provenance(args)
    _write(args, json.dumps(payload, indent=2))


def _num(x):
    return mp.nstr(x, mp.mp.dps)


def cmd_periods(args):
    lam = _parse_complex(args.lam)
    pp = period_pair(lam)
    _emit_json(args, {
        "lambda": _num(lam),
        "f": _num(pp.f),
        "g": _num(pp.g),
        "tau": _num(pp.tau),
    })


def cmd_ellog(args):
    lam = _parse_complex(args.lam)
    c = cv.LegendreCurve(lam)
    pp = period_pair(lam)
    P = point_from_abscissa(c, _parse_complex(args.abscissa), args.ybranch)
    log = elliptic_log(c, P, pp)
    _emit_json(args, {
        "lambda": _num(lam),
        "x": _num(P.x),
        "y": _num(P.y),
        "z": _num(log.z),
        "method": log.method,
    })


def _region_from(args) -> Region:
    return Region(_parse_complex(args.center), mp.mpf(args.radius))


def cmd_betti(args):
    grid = betti_grid(_region_from(args), _parse_rational_list(args.abscissas), mp.mpf(args.resolution))
    if args.format == "csv":
        buf = io.StringIO()
        prov = _provenance(args)
        buf.write(f"# legrel {prov['version']} precision={prov['precision']} config={prov['config_hash']}\n")
        grid.write_csv(buf)
        _write(args, buf.getvalue())
    else:
        payload = json.loads(grid.to_json())
        _emit_json(args, payload)


def cmd_relations(args):
    lat = relation_lattice(
        _rational_or_complex(args.lam),
        _parse_rational_list(args.abscissas),
        coeff_bound=args.bound,
    )
    payload = json.loads(lat.to_json())
    _emit_json(args, payload)


def _rational_or_complex(text: str):
    try:
        return Fraction(text)
    except ValueError:
        return _parse_complex(text)


def cmd_torsion_scan(args):
    region = _region_from(args)
    absc = Fraction(args.abscissa)
    hits = torsion_scan(absc, args.max_order, region, resolution=args.resolution)
    if args.format == "svg":
        prov = _provenance(args)
        svg = emit_svg(region, torsion_hits=hits)
        svg = svg.replace(
            "<svg", f"<!-- legrel {prov['version']} precision={prov['precision']} "
                    f"config={prov['config_hash']} -->\n<svg", 1)
        _write(args, svg)
    else:
        _emit_json(args, {"hits": [h.as_dict() for h in hits]})


def cmd_intersect_scan(args):
    region = _region_from(args)
    records = two_relation_scan(
        _parse_rational_list(args.abscissas), args.T, region,
        resolution=args.resolution, workers=args.workers,
    )
    if args.format == "svg":
        prov = _provenance(args)
        svg = emit_svg(region, records=records)
        svg = svg.replace(
            "<svg", f"<!-- legrel {prov['version']} precision={prov['precision']} "
                    f"config={prov['config_hash']} -->\n<svg", 1)
        _write(args, svg)
    else:
        prov = _provenance(args)
        lines = [json.dumps({"_provenance": prov})]
        lines += [json.dumps(r.as_dict()) for r in records]
        _write(args, "\n".join(lines))


def cmd_count(args):
    grid = betti_grid(_region_from(args), _parse_rational_list(args.abscissas), mp.mpf(args.resolution))
    report = count_rational_hits(grid, _parse_int_list(args.T_list), mp.mpf(args.tolerance))
    _emit_json(args, report.as_dict())


def _recognize_input(text: str, max_degree: int, digits: int):
    """Recognition at a precision matched to the input's own length, so a
    value quoted to 50 digits is not rejected against a 64-digit tolerance."""
    from .precision_core import working_digits

    sig = sum(ch.isdigit() for ch in text)
    # Decimal literals are exact, so precision may rise to the recognition
    # entry minimum even for short inputs; the user's --precision still caps it.
    entry_min = (max_degree + 1) * (digits + 1) + 30
    dps = max(32, min(mp.mp.dps, max(sig, entry_min)))
    with working_digits(dps):
        value = _parse_complex(text)
        alg = recognize_algebraic(value, max_degree, digits)
    if alg is None:
        raise InputError("value was not recognized as algebraic within the bounds")
    return alg


def cmd_height(args):
    if args.x is not None:
        if args.y is None:
            raise InputError("--y is required with --x")
        rep = neron_tate(Fraction(args.lam), Fraction(args.x), Fraction(args.y), k_max=args.k_max)
    else:
        alg = _recognize_input(args.value, args.max_degree, args.digits)
        rep = weil_height(alg)
    _emit_json(args, rep.as_dict())


def cmd_audit_conjugates(args):
    if args.coeffs:
        from .precision_core import Polynomial
        from .lattice import AlgebraicNumber

        poly = Polynomial([Fraction(c) for c in args.coeffs.split(",")])
        alg = AlgebraicNumber(minpoly=poly.primitive(), approx=mp.mpc(0), degree=poly.degree)
    else:
        alg = _recognize_input(args.value, args.max_degree, args.digits)
    audit = conjugate_audit(alg, mp.mpf(args.delta))
    _emit_json(args, audit.as_dict())


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(
        prog="legrel",
        description="High-precision toolkit for the Legendre elliptic family "
                    "Y^2 = X(X-1)(X-lambda): periods, elliptic logarithms, "
                    "Betti coordinates, integer relations, and parameter scans.",
    )
    top.add_argument("--precision", type=int, default=64, help="working decimal digits (>= 32)")
    sub = top.add_subparsers(dest="command", required=True)

    def common_region(p):
        p.add_argument("--center", required=True, help="region center, 're' or 're,im'")
        p.add_argument("--radius", required=True)
        p.add_argument("--resolution", default="0.05")

    def common_out(p, formats=("json",)):
        p.add_argument("--format", choices=formats, default="json")
        p.add_argument("--output", help="output path (default stdout)")

    p = sub.add_parser("periods", help="period basis (f, g) and tau at lambda")
    p.add_argument("--lambda", dest="lam", required=True)
    common_out(p)
    p.set_defaults(func=cmd_periods)

    p = sub.add_parser("ellog", help="elliptic logarithm of the point over an abscissa")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--abscissa", required=True)
    p.add_argument("--ybranch", type=int, choices=(1, -1), default=1)
    common_out(p)
    p.set_defaults(func=cmd_ellog)

    p = sub.add_parser("betti", help="Betti coordinate grid over a disc")
    common_region(p)
    p.add_argument("--abscissas", required=True, help="comma-separated rationals")
    common_out(p, formats=("json", "csv"))
    p.set_defaults(func=cmd_betti)

    p = sub.add_parser("relations", help="relation lattice at a parameter")
    p.add_argument("--lambda", dest="lam", required=True)
    p.add_argument("--abscissas", required=True)
    p.add_argument("--bound", type=int, default=30)
    common_out(p)
    p.set_defaults(func=cmd_relations)

    p = sub.add_parser("torsion-scan", help="parameters where the point is torsion")
    p.add_argument("--abscissa", required=True)
    p.add_argument("--max-order", dest="max_order", type=int, default=6)
    common_region(p)
    common_out(p, formats=("json", "svg"))
    p.set_defaults(func=cmd_torsion_scan)

    p = sub.add_parser("intersect-scan", help="scan for fibers with integer relations")
    p.add_argument("--abscissas", required=True)
    p.add_argument("--T", type=int, default=8)
    p.add_argument("--workers", type=int, default=1)
    common_region(p)
    common_out(p, formats=("json", "svg"))
    p.set_defaults(func=cmd_intersect_scan)

    p = sub.add_parser("count", help="one/two-relation counts over a Betti grid")
    common_region(p)
    p.add_argument("--abscissas", required=True)
    p.add_argument("--T-list", dest="T_list", default="4,8,16,32,64")
    p.add_argument("--tolerance", default="1e-5")
    common_out(p)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("height", help="Neron-Tate height (--x/--y) or Weil height (--value)")
    p.add_argument("--lambda", dest="lam")
    p.add_argument("--x")
    p.add_argument("--y")
    p.add_argument("--k-max", dest="k_max", type=int, default=5)
    p.add_argument("--value")
    p.add_argument("--max-degree", dest="max_degree", type=int, default=6)
    p.add_argument("--digits", type=int, default=3)
    common_out(p)
    p.set_defaults(func=cmd_height)

    p = sub.add_parser("audit-conjugates", help="conjugate distribution audit")
    p.add_argument("--value")
    p.add_argument("--coeffs", help="minimal polynomial, low-to-high comma-separated")
    p.add_argument("--delta", default="0.05")
    p.add_argument("--max-degree", dest="max_degree", type=int, default=6)
    p.add_argument("--digits", type=int, default=3)
    common_out(p)
    p.set_defaults(func=cmd_audit_conjugates)

    return top


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 1 if e.code not in (0,) else 0
    try:
        set_precision(args.precision)
    except Exception as e:
        sys.stderr.write(f"error: {e}\n")
        return 1
    try:
        args.func(args)
        return 0
    except (InputError, DegenerateInputError, ValueError) as e:
        sys.stderr.write(f"input error: {e}\n")
        return 1
    except (PrecisionError, ResourceError) as e:
        sys.stderr.write(f"precision/resource error: {e}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
