"""End-to-end certificates for surgery slopes on K(m, n).

A certificate records the point (s, t) at which rho_s sends x^p L^q to the
identity, together with residuals of every defining equation. The checker
in :func:`verify_certificate` rebuilds all residuals from (s, t) using word
products only, so it shares nothing with the producer above the polynomial
layer.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from math import gcd
from typing import Any

import mpmath
from mpmath import mpf

from .precision import (PrecisionEscalation, default_precision, escalating,
                        to_decimal_string)
from .rep import Mat2, RepParams, rho_matrices, rho_s_matrices
from .riley import UnsupportedBranch, residual_scale, riley_eval
from .slope import B_product, direct_range, interval_I, solve_s
from .words import eval_word, word_w

SPEC_VERSION = "1"
DEFAULT_TOL = mpf("1e-8")
RESIDUAL_NAMES = ("riley", "relator", "longitude_offdiag", "surgery_eq", "det")
TREFOILS = ((1, -1), (-1, 1))


class CertificationError(Exception):
    """Base class; ``exit_code`` is what the CLI returns for it."""

    exit_code = 1


class InvalidKnot(CertificationError):
    exit_code = 2


class NotHyperbolic(InvalidKnot):
    pass


class SlopeOutOfRange(CertificationError):
    pass


class NoRepresentationBranch(CertificationError):
    """The slope is in I but neither usable branch reaches it."""


class MalformedCertificate(ValueError):
    pass


class Branch(str, Enum):
    DIRECT = "direct"
    MIRROR = "mirror"
    BETTI_ZERO = "betti_zero"


@dataclass(frozen=True)
class Slope:
    p: int
    q: int

    def __post_init__(self):
        if self.q < 1:
            raise ValueError(f"slope denominator must be positive, got {self.q}")
        if gcd(abs(self.p), self.q) != 1:
            raise ValueError(f"slope {self.p}/{self.q} is not reduced")

    @classmethod
    def of(cls, r: "Fraction | int | str") -> "Slope":
        if isinstance(r, str):
            return cls.parse(r)
        r = Fraction(r)
        return cls(r.numerator, r.denominator)

    @classmethod
    def parse(cls, text: str) -> "Slope":
        """'p/q' or an integer; decimals are refused."""
        raw = text.strip()
        num, sep, den = raw.partition("/")
        try:
            p = int(num)
            q = int(den) if sep else 1
        except ValueError:
            raise ValueError(f"slope must be an integer fraction p/q, got {text!r}") from None
        if q == 0:
            raise ValueError("the meridional slope 1/0 is excluded")
        return cls.of(Fraction(p, q))

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)

    def __neg__(self) -> "Slope":
        return Slope(-self.p, self.q)

    def __str__(self) -> str:
        return f"{self.p}/{self.q}"


def check_knot(m: int, n: int) -> None:
    if m == 0 or n == 0:
        raise InvalidKnot("not a genus-one two-bridge knot in this family (m and n must be nonzero)")
    if (m, n) in TREFOILS:
        raise NotHyperbolic(f"K({m},{n}) is not hyperbolic (trefoil)")


def branch_supported(m: int, n: int) -> bool:
    """False for n = 1, m < 0 and n = -1, m > 0 where the Riley root has T < s + 2."""
    return not ((n == 1 and m < 0) or (n == -1 and m > 0))


def mirror_reduce(m: int, n: int, slope: Slope) -> tuple[int, int, Slope, Branch]:
    """Pick the parameters whose slope function reaches the slope.

    K(n, m) is the mirror image of K(m, n), so slope r on K(m, n) is slope -r
    on K(n, m).
    """
    check_knot(m, n)
    if slope.p == 0:
        return m, n, slope, Branch.BETTI_ZERO
    r = slope.fraction
    candidates = ((m, n, slope, Branch.DIRECT), (n, m, -slope, Branch.MIRROR))
    covered = []
    for m2, n2, sl, branch in candidates:
        lo, hi = direct_range(m2)
        if lo < sl.fraction < hi:
            covered.append((m2, n2, sl, branch))
            if branch_supported(m2, n2):
                return m2, n2, sl, branch
    if covered:
        raise NoRepresentationBranch(
            f"slope {slope} on K({m},{n}) is only reached through n = +-1 with the wrong sign of m, "
            f"where Riley's equation has no root with T > s + 2")
    raise SlopeOutOfRange(f"slope {r} is outside the certified interval {interval_I(m, n)} of K({m},{n})")


@dataclass
class Certificate:
    m: int
    n: int
    slope: Slope
    branch: Branch
    s: mpf | None = None
    t: mpf | None = None
    T: mpf | None = None
    A: mpf | None = None
    B: mpf | None = None
    sigma: mpf | None = None
    residuals: dict[str, mpf] = field(default_factory=dict)
    precision_bits: int = 53
    tolerance: mpf = DEFAULT_TOL
    spec_version: str = SPEC_VERSION

    @property
    def valid(self) -> bool:
        return all(v <= self.tolerance for v in self.residuals.values())

    def to_dict(self) -> dict[str, Any]:
        bits = self.precision_bits

        def dec(x):
            return None if x is None else to_decimal_string(x, bits)

        return {
            "m": self.m, "n": self.n, "p": self.slope.p, "q": self.slope.q,
            "branch": self.branch.value,
            "s": dec(self.s), "t": dec(self.t), "T": dec(self.T),
            "A": dec(self.A), "B": dec(self.B), "sigma": dec(self.sigma),
            "residuals": {k: dec(self.residuals[k]) for k in RESIDUAL_NAMES if k in self.residuals},
            "precision_bits": bits,
            "tolerance": to_decimal_string(self.tolerance, 53),
            "spec_version": self.spec_version,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Certificate":
        try:
            bits = int(d["precision_bits"])
            with mpmath.workprec(bits):
                def num(key, src=d):
                    v = src.get(key)
                    if v is None:
                        return None
                    if not isinstance(v, str):
                        raise MalformedCertificate(f"field {key!r} must be a decimal string")
                    return mpf(v)

                res = d.get("residuals") or {}
                unknown = set(res) - set(RESIDUAL_NAMES)
                if unknown:
                    raise MalformedCertificate(f"unknown residuals {sorted(unknown)}")
                return cls(
                    m=_int(d["m"]), n=_int(d["n"]),
                    slope=Slope(_int(d["p"]), _int(d["q"])),
                    branch=Branch(d["branch"]),
                    s=num("s"), t=num("t"), T=num("T"), A=num("A"), B=num("B"),
                    sigma=num("sigma"),
                    residuals={k: num(k, res) for k in res},
                    precision_bits=bits,
                    tolerance=num("tolerance"),
                    spec_version=str(d["spec_version"]),
                )
        except MalformedCertificate:
            raise
        except (KeyError, TypeError, ValueError) as exc:
            raise MalformedCertificate(f"cannot parse certificate: {exc!r}") from exc

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedCertificate(f"not JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise MalformedCertificate("certificate must be a JSON object")
        return cls.from_dict(data)


def _int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise MalformedCertificate(f"expected an integer, got {v!r}")
    return v


def _relator_residual(m: int, n: int, x: Mat2, y: Mat2) -> mpf:
    # max|rho(w^n x) - rho(y w^n)| / max|rho(w^n)|
    Wn = eval_word(word_w(m) ** n, x, y)
    return ((Wn @ x) - (y @ Wn)).max_norm() / Wn.max_norm()


def _surgery_residual(p: int, q: int, log_a: mpf, log_b: mpf) -> mpf:
    e = p * log_a + q * log_b
    return max(abs(e), abs(mpmath.expm1(e)))


def _certify_numeric(m: int, n: int, slope: Slope, m2: int, n2: int, slope2: Slope,
                     branch: Branch, tol: mpf) -> Certificate:
    bits = mpmath.mp.prec
    q = slope2.q
    pt = solve_s(m2, n2, slope2.fraction, tol=tol / (100 * q), prec=bits)
    rep = pt.rep
    x, y = rho_s_matrices(rep)
    B_word, offdiag = B_product(m2, n2, rep)
    residuals = {
        "riley": abs(riley_eval(m2, n2, rep.s, rep.T, rep.excess)) / residual_scale(m2, rep.s),
        "relator": _relator_residual(m2, n2, x, y),
        "longitude_offdiag": offdiag,
        "surgery_eq": _surgery_residual(slope2.p, q, mpmath.log(pt.A), mpmath.log(pt.B)),
        "det": abs(x.det() * y.det() - 1),
    }
    cert = Certificate(m, n, slope, branch, s=rep.s, t=rep.t, T=rep.T, A=pt.A, B=pt.B,
                       sigma=pt.sigma, residuals=residuals, precision_bits=bits, tolerance=tol)
    bad = [k for k, v in residuals.items() if not v <= tol]
    if bad:
        raise PrecisionEscalation(f"residuals {bad} above {mpmath.nstr(tol, 3)} at {bits} bits")
    if abs(B_word - pt.B) > tol * abs(pt.B):
        raise PrecisionEscalation("closed-form and word-product B_s disagree")
    # the serialized numbers are what a checker sees; they must verify too
    report = verify_certificate(Certificate.from_json(cert.to_json()), tol)
    if not report.passed:
        raise PrecisionEscalation(f"serialized certificate fails {report.failed()} at {bits} bits")
    return cert


def certify(m: int, n: int, slope: "Slope | Fraction | str | int", tol=DEFAULT_TOL,
            prec: int | None = None) -> Certificate:
    """Certify that rho_s descends to the r-surgery on K(m, n).

    r = 0 yields a ``betti_zero`` certificate without numerics.
    """
    if not isinstance(slope, Slope):
        slope = Slope.of(slope)
    check_knot(m, n)
    interval = interval_I(m, n)
    if slope.fraction not in interval:
        raise SlopeOutOfRange(f"slope {slope} is outside I = {interval} for K({m},{n})")
    bits = prec if prec is not None else default_precision()
    tol = mpf(tol)
    m2, n2, slope2, branch = mirror_reduce(m, n, slope)
    if branch is Branch.BETTI_ZERO:
        return Certificate(m, n, slope, branch, precision_bits=bits, tolerance=tol)
    try:
        return escalating(_certify_numeric, m, n, slope, m2, n2, slope2, branch, tol, prec=bits)
    except UnsupportedBranch as exc:
        raise NoRepresentationBranch(str(exc)) from exc


@dataclass
class VerificationReport:
    checks: list[tuple[str, bool, str]]

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failed(self) -> list[str]:
        return [name for name, ok, _ in self.checks if not ok]

    def lines(self) -> list[str]:
        return [f"{'PASS' if ok else 'FAIL'}  {name:<20} {detail}" for name, ok, detail in self.checks]


def verify_certificate(cert: Certificate, tol=None) -> VerificationReport:
    """Recompute every check from m, n, p, q, s, t with word products only."""
    checks: list[tuple[str, bool, str]] = []

    def add(name, ok, detail=""):
        checks.append((name, bool(ok), detail))

    add("spec_version", cert.spec_version == SPEC_VERSION, cert.spec_version)
    try:
        m2, n2, slope2, branch = mirror_reduce(cert.m, cert.n, cert.slope)
        add("knot_and_slope", cert.slope.fraction in interval_I(cert.m, cert.n),
            f"K({cert.m},{cert.n}) slope {cert.slope}")
    except (CertificationError, ValueError) as exc:
        add("knot_and_slope", False, str(exc))
        return VerificationReport(checks)
    add("branch", branch == cert.branch, f"expected {branch.value}, recorded {cert.branch.value}")
    if branch is Branch.BETTI_ZERO or cert.branch is Branch.BETTI_ZERO:
        add("no_numerics", cert.branch is Branch.BETTI_ZERO and cert.s is None and not cert.residuals)
        return VerificationReport(checks)
    if cert.s is None or cert.t is None:
        add("numbers_present", False, "s and t are required")
        return VerificationReport(checks)

    with mpmath.workprec(cert.precision_bits):
        tol = mpf(tol) if tol is not None else cert.tolerance
        s, t = +cert.s, +cert.t
        add("t_gt_1", t > 1, mpmath.nstr(t, 12))
        excess = t + 1 / t - s - 2
        add("T_gt_s_plus_2", excess > 0 and s > 0, mpmath.nstr(excess, 6))
        if not (t > 1 and s > 0 and excess > 0):
            return VerificationReport(checks)
        rep = RepParams(s, t, t + 1 / t, mpmath.sqrt(t), excess)
        wm = word_w(m2)

        rx, ry = rho_matrices(rep)
        Z = eval_word(wm ** n2, rx, ry)
        phi_terms = max(mpf(1), abs(Z.a), abs((1 - t) * Z.b))
        riley = abs(Z.a + (1 - t) * Z.b) / phi_terms
        add("riley", riley <= tol, mpmath.nstr(riley, 3))

        x, y = rho_s_matrices(rep)
        tr = eval_word(wm, x, y).trace()
        add("trace_window", -2 < tr < 2, mpmath.nstr(tr, 12))
        rel = _relator_residual(m2, n2, x, y)
        add("relator", rel <= tol, mpmath.nstr(rel, 3))
        B, offdiag = B_product(m2, n2, rep)
        add("longitude_offdiag", offdiag <= tol, mpmath.nstr(offdiag, 3))
        add("B_positive", B > 0, mpmath.nstr(B, 12))
        if B > 0:
            surg = _surgery_residual(slope2.p, slope2.q, mpmath.log(x.a), mpmath.log(B))
            add("surgery_eq", surg <= tol, mpmath.nstr(surg, 3))
        det = abs(x.det() * y.det() - 1)
        add("det", det <= tol, mpmath.nstr(det, 3))
        if cert.B is not None:
            dev = abs(cert.B - B) / abs(B)
            add("recorded_B", dev <= tol, mpmath.nstr(dev, 3))
    return VerificationReport(checks)
