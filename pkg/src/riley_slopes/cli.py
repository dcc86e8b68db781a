"""Command-line front end: ``riley-slopes <subcommand> ...``.

Exit codes: 0 success, 1 certification or verification failure (including
slopes outside the certified range), 2 invalid input.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import mpmath

from . import __version__
from .certify import (Certificate, CertificationError, InvalidKnot, MalformedCertificate,
                      Slope, certify, check_knot, verify_certificate)
from .polyseq import check_identities, eval_poly, poly_g
from .precision import ENV_VAR, MIN_PRECISION_BITS, PrecisionExhausted, default_precision
from .riley import RileyError, riley_bracket, riley_eval, solve_T
from .slope import g_of, interval_I
from .rep import trace_W

CSV_COLUMNS = ("s", "T", "t", "A", "B", "g")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _range(text: str) -> tuple[int, int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected LO..HI, got {text!r}")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected integers in {text!r}") from None
    if a > b:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return a, b


def _slope(text: str) -> Slope:
    try:
        return Slope.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return v


def _bits(text: str) -> int:
    v = int(text)
    if v < MIN_PRECISION_BITS:
        raise argparse.ArgumentTypeError(f"need at least {MIN_PRECISION_BITS} bits, got {v}")
    return v


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="riley-slopes", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def knot(p):
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--n", type=int, required=True)

    def bits(p):
        p.add_argument("--precision-bits", type=_bits, default=None,
                       help=f"starting working precision (default ${ENV_VAR} or 53)")

    p = sub.add_parser("certify", help="certify a surgery slope")
    knot(p)
    p.add_argument("--slope", type=_slope, required=True, help="p/q")
    p.add_argument("--tol", type=_positive_float, default=1e-8)
    p.add_argument("--out", type=Path)
    bits(p)

    p = sub.add_parser("verify", help="re-verify a certificate file")
    p.add_argument("--in", dest="infile", type=Path, required=True)
    p.add_argument("--tol", type=_positive_float, default=None)

    p = sub.add_parser("curve", help="sample s -> (T, t, A, B, g) as CSV")
    knot(p)
    p.add_argument("--s-min", type=_positive_float, default=1e-6)
    p.add_argument("--s-max", type=_positive_float, default=1e6)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--linear", action="store_true", help="linear instead of log grid")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", type=Path)
    bits(p)

    p = sub.add_parser("identities", help="exact f/g identity suite")
    p.add_argument("--m-range", type=_range, default=(-12, 12))

    p = sub.add_parser("riley", help="Riley polynomial values and the solved T")
    knot(p)
    p.add_argument("--s", type=_positive_float, required=True)
    bits(p)
    return parser


def _cmd_certify(args) -> int:
    cert = certify(args.m, args.n, args.slope, tol=args.tol, prec=args.precision_bits)
    print(f"K({args.m},{args.n}) slope {args.slope}: certified ({cert.branch.value} branch, "
          f"{cert.precision_bits} bits)")
    if cert.s is not None:
        print(f"  s = {mpmath.nstr(cert.s, 15)}  t = {mpmath.nstr(cert.t, 15)}  "
              f"B = {mpmath.nstr(cert.B, 15)}")
        for k, v in cert.residuals.items():
            print(f"  residual {k:<18} {mpmath.nstr(v, 3)}")
    if args.out:
        args.out.write_text(cert.to_json())
        print(f"  written to {args.out}")
    return 0


def _cmd_verify(args) -> int:
    cert = Certificate.from_json(args.infile.read_text())
    report = verify_certificate(cert, args.tol)
    for line in report.lines():
        print(line)
    print("certificate valid" if report.passed else f"certificate INVALID: {', '.join(report.failed())}")
    return 0 if report.passed else 1


def _curve_row(job):
    m, n, s, bits = job
    with mpmath.workprec(bits):
        pt = g_of(m, n, s, prec=bits)
        return [mpmath.nstr(v, 17, strip_zeros=False, min_fixed=-mpmath.inf, max_fixed=mpmath.inf)
                for v in (pt.rep.s, pt.rep.T, pt.rep.t, pt.A, pt.B, pt.g_value)]


def _cmd_curve(args) -> int:
    if not args.s_min < args.s_max:
        raise UsageError("--s-min must be below --s-max")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    check_knot(args.m, args.n)
    bits = args.precision_bits or default_precision()
    with mpmath.workprec(bits):
        if args.linear:
            grid = mpmath.linspace(args.s_min, args.s_max, args.points)
        else:
            lo, hi = mpmath.log(args.s_min), mpmath.log(args.s_max)
            grid = [mpmath.exp(u) for u in mpmath.linspace(lo, hi, args.points)]
        # pin the endpoints against exp/log round-off
        grid[0], grid[-1] = mpmath.mpf(args.s_min), mpmath.mpf(args.s_max)
    jobs = [(args.m, args.n, s, bits) for s in grid]
    if args.jobs > 1:
        with ProcessPoolExecutor(args.jobs) as pool:
            rows = list(pool.map(_curve_row, jobs))
    else:
        rows = [_curve_row(j) for j in jobs]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)
    if args.out:
        args.out.write_text(buf.getvalue())
        print(f"{len(rows)} samples written to {args.out}")
    else:
        sys.stdout.write(buf.getvalue())
    return 0


def _cmd_identities(args) -> int:
    lo, hi = args.m_range
    report = check_identities(lo, hi)
    for name, (ok, total) in report.counts().items():
        print(f"{name:<28} {ok}/{total} pass")
        if report.failures[name]:
            print(f"  failing m: {report.failures[name]}")
    return 0 if report.passed else 1


def _cmd_riley(args) -> int:
    m, n = args.m, args.n
    check_knot(m, n)
    bits = args.precision_bits or default_precision()
    with mpmath.workprec(bits):
        s = mpmath.mpf(args.s)
        print(f"K({m},{n}) at s = {mpmath.nstr(s, 15)}")
        print(f"  phi(T = s + 2) = {mpmath.nstr(riley_eval(m, n, s, s + 2, 0), 15)}")
        br = riley_bracket(m, n, s)
        print(f"  bracket ({br.kind.value}): [{mpmath.nstr(br.T_lo, 17)}, {mpmath.nstr(br.T_hi, 17)}]")
        unit = s * eval_poly(poly_g(m - 1), s) ** 2
        for label, T, ex in (("lo", br.T_lo, br.delta_lo), ("hi", br.T_hi, br.delta_hi)):
            print(f"  phi(T_{label}) = {mpmath.nstr(riley_eval(m, n, s, T, ex / unit), 12)}")
        p = solve_T(m, n, s)
        print(f"  solved T = {mpmath.nstr(p.T, 17)}  t = {mpmath.nstr(p.t, 17)}")
        print(f"  trace W  = {mpmath.nstr(trace_W(m, s, p.T, p.excess), 15)}")
        print(f"  phi(T)   = {mpmath.nstr(riley_eval(m, n, s, p.T, p.excess), 3)}")
    return 0


COMMANDS = {
    "certify": _cmd_certify,
    "verify": _cmd_verify,
    "curve": _cmd_curve,
    "identities": _cmd_identities,
    "riley": _cmd_riley,
}


def _glue_ranges(argv: list[str]) -> list[str]:
    # argparse takes "-12..12" for an option; bind it to its flag
    out, i = [], 0
    while i < len(argv):
        if argv[i] == "--m-range" and i + 1 < len(argv):
            out.append(f"--m-range={argv[i + 1]}")
            i += 2
        else:
            out.append(argv[i])
            i += 1
    return out


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = _glue_ranges(list(sys.argv[1:] if argv is None else argv))
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvalidKnot, MalformedCertificate, OSError, RileyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (CertificationError, PrecisionExhausted, ArithmeticError) as exc:
        print(f"failed: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
