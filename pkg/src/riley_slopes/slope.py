"""Longitude eigenvalue, the slope function g(s) and its inverse.

At a solved point (s, t) the meridian and longitude act diagonally under
rho_s with (1,1) entries A = sqrt(t) and B. A surgery slope p/q is realised
exactly when p log A + q log B = 0, i.e. g(s) = -log B / log A = p/q.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
from mpmath import mpf

from .polyseq import eval_poly, fg, poly_f
from .precision import PrecisionEscalation, current_bits, escalating
from .rep import RepParams, rho_s_matrices
from .riley import DEFAULT_TOL, solve_T
from .words import eval_word, word_longitude

SCAN_S_MIN = mpf("1e-8")
SCAN_S_MAX = mpf("1e8")
SCAN_POINTS = 400
MAX_SLOPE_BISECTIONS = 200


class RegimeError(ValueError):
    """The point is not on the T > s + 2 side of the Riley curve."""


class TargetNotBracketed(ArithmeticError):
    pass


@dataclass(frozen=True)
class SlopeInterval:
    lower: Fraction
    upper: Fraction
    lower_closed: bool
    upper_closed: bool

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("empty slope interval")

    def __contains__(self, r) -> bool:
        r = Fraction(r)
        above = r >= self.lower if self.lower_closed else r > self.lower
        below = r <= self.upper if self.upper_closed else r < self.upper
        return above and below

    def __str__(self) -> str:
        left = "[" if self.lower_closed else "("
        right = "]" if self.upper_closed else ")"
        return f"{left}{self.lower}, {self.upper}{right}"


@dataclass(frozen=True)
class SlopeFnPoint:
    rep: RepParams
    A: mpf
    B: mpf
    g_value: mpf
    sigma: mpf

    @property
    def s(self) -> mpf:
        return self.rep.s


def sigma_of(p: RepParams) -> mpf:
    """s (sqrt t - 1/sqrt t)^2 / ((sqrt t - 1/sqrt t)^2 - s); the squares equal T - 2."""
    if not p.excess > 0:
        raise RegimeError(f"(sqrt t - 1/sqrt t)^2 - s = {mpmath.nstr(p.excess, 6)} is not positive")
    return p.s * (p.s + p.excess) / p.excess


def B_closed(m: int, p: RepParams) -> mpf:
    """(-f_m + t f_{m-1}) / (-f_{m-1} + t f_m).

    Raises PrecisionEscalation when either difference loses more than half
    the working mantissa to cancellation.
    """
    if m == 0:
        raise ValueError("m must be nonzero")
    fm, fm1, _ = fg(m, p.s)
    t = p.t
    num = t * fm1 - fm
    den = t * fm - fm1
    half = current_bits() // 2
    for diff, big in ((num, max(abs(fm), abs(t * fm1))), (den, max(abs(fm1), abs(t * fm)))):
        if diff == 0 or mpmath.log(big / abs(diff), 2) > half:
            raise PrecisionEscalation(
                f"B_s cancellation at s={mpmath.nstr(p.s, 6)}: more than {half} bits lost")
    return num / den


def B_product(m: int, n: int, p: RepParams) -> tuple[mpf, mpf]:
    """(1,1) entry of rho_s(longitude) by word product, and max|offdiag| / max|entry|."""
    x, y = rho_s_matrices(p)
    L = eval_word(word_longitude(m, n), x, y)
    return L.a, max(abs(L.b), abs(L.c)) / L.max_norm()


def F_diag(k: int, p: RepParams) -> mpf:
    """t^{k-1} (-f_k + t f_{k-1}); tends to 1 as s grows for 0 < k <= |m|."""
    if k <= 0:
        raise ValueError("k must be positive")
    fk = eval_poly(poly_f(k), p.s)
    fk1 = eval_poly(poly_f(k - 1), p.s)
    return p.t ** (k - 1) * (p.t * fk1 - fk)


def _point(m: int, n: int, s, tol) -> SlopeFnPoint:
    rep = solve_T(m, n, s, tol)
    B = B_closed(m, rep)
    if not B > 0:
        raise RegimeError(f"B_s = {mpmath.nstr(B, 6)} is not positive")
    log_a = mpmath.log(rep.t) / 2
    return SlopeFnPoint(rep, rep.sqrt_t, B, -mpmath.log(B) / log_a, sigma_of(rep))


def g_of(m: int, n: int, s, tol=DEFAULT_TOL, prec: int | None = None) -> SlopeFnPoint:
    """Solve Riley's equation at s and evaluate g(s) = -log B / log A.

    ``prec`` is the starting precision in bits; it is doubled (at most four
    times) while the solve or B_s is short of accuracy. With ``prec=None``
    the current context precision is used.
    """
    bits = prec if prec is not None else current_bits()
    return escalating(_point, m, n, mpf(s), tol, prec=bits)


def interval_I(m: int, n: int) -> SlopeInterval:
    """The certified slope interval I for K(m, n), with its closure flags."""
    if m == 0 or n == 0:
        raise ValueError("not a genus-one two-bridge knot in this family: m and n must be nonzero")
    if (m, n) in ((1, -1), (-1, 1)):
        raise ValueError(f"K({m},{n}) is the trefoil, not hyperbolic")
    F = Fraction
    if m > 0 and n > 0:
        return SlopeInterval(F(-4 * n), F(4 * m), False, False)
    if m < 0 and n < 0:
        return SlopeInterval(F(4 * m), F(-4 * n), False, False)
    if m > 0:
        return SlopeInterval(F(0), F(max(4 * m, -4 * n)), True, False)
    return SlopeInterval(F(min(4 * m, -4 * n)), F(0), False, True)


def direct_range(m: int) -> tuple[Fraction, Fraction]:
    """Open interval (0, 4m) or (4m, 0) covered by g for K(m, n)."""
    return (Fraction(0), Fraction(4 * m)) if m > 0 else (Fraction(4 * m), Fraction(0))


@dataclass(frozen=True)
class ScanSample:
    log_s: mpf
    g: mpf | None  # None where the point could not be computed


@lru_cache(maxsize=64)
def _scan(m: int, n: int, bits: int, tol_key: str, points: int) -> tuple[ScanSample, ...]:
    tol = mpf(tol_key)
    lo, hi = mpmath.log(SCAN_S_MIN), mpmath.log(SCAN_S_MAX)
    out = []
    with mpmath.workprec(bits):
        for i in range(points):
            u = lo + (hi - lo) * i / (points - 1)
            try:
                g = g_of(m, n, mpmath.exp(u), tol, prec=bits).g_value
            except (ArithmeticError, RegimeError):
                g = None
            out.append(ScanSample(u, g))
    return tuple(out)


def scan_g(m: int, n: int, points: int = SCAN_POINTS, tol=DEFAULT_TOL,
           prec: int | None = None) -> tuple[ScanSample, ...]:
    """g on a logarithmic grid over [1e-8, 1e8]; cached per (m, n, precision)."""
    bits = prec if prec is not None else current_bits()
    return _scan(m, n, bits, mpmath.nstr(mpf(tol), 20), points)


def solve_s(m: int, n: int, r_target, tol="1e-10", prec: int | None = None,
            riley_tol=DEFAULT_TOL) -> SlopeFnPoint:
    """A point with |g(s) - r_target| <= tol.

    The log grid is scanned for the first adjacent pair whose g values
    straddle the target, then bisected in log s.
    """
    r = Fraction(r_target) if not isinstance(r_target, mpf) else r_target
    lo_r, hi_r = direct_range(m)
    if isinstance(r, Fraction) and not lo_r < r < hi_r:
        raise ValueError(f"target {r} is not strictly inside ({lo_r}, {hi_r})")
    bits = prec if prec is not None else current_bits()
    with mpmath.workprec(bits):
        tol = mpf(tol)
        target = mpf(r.numerator) / r.denominator if isinstance(r, Fraction) else mpf(r)
        samples = scan_g(m, n, tol=riley_tol, prec=bits)
        bracket = None
        for a, b in zip(samples, samples[1:]):
            if a.g is None or b.g is None:
                continue
            if (a.g - target) * (b.g - target) <= 0:
                bracket = (a, b)
                break
        if bracket is None:
            seen = [x.g for x in samples if x.g is not None]
            span = (mpmath.nstr(min(seen), 8), mpmath.nstr(max(seen), 8)) if seen else ("-", "-")
            raise TargetNotBracketed(
                f"g(s) never crosses {r} on the scan grid for K({m},{n}); scanned g range {span}")
        u_lo, u_hi = bracket[0].log_s, bracket[1].log_s
        below_lo = bracket[0].g < target
        best = None
        for _ in range(MAX_SLOPE_BISECTIONS):
            u = (u_lo + u_hi) / 2
            pt = g_of(m, n, mpmath.exp(u), riley_tol, prec=bits)
            if best is None or abs(pt.g_value - target) < abs(best.g_value - target):
                best = pt
            if abs(pt.g_value - target) <= tol:
                return pt
            if u == u_lo or u == u_hi:
                break
            if (pt.g_value < target) == below_lo:
                u_lo = u
            else:
                u_hi = u
        raise PrecisionEscalation(
            f"|g(s) - {r}| stalled at {mpmath.nstr(abs(best.g_value - target), 3)} "
            f"for K({m},{n})")
