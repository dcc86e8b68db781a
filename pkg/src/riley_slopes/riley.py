"""Riley's equation for K(m, n) and a bracketing root solver for T(s).

Along the segment T = s + 2 + delta / (s g_{m-1}^2), delta in [0, 4], the
trace of W is exactly 2 - delta and the Riley polynomial becomes

    phi = (tau_{n+1} - tau_n) - delta f_{m-1} / (s g_{m-1}) tau_n.

The solver bisects in delta; working in T directly would cancel away all
digits of T - s - 2 at large s.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import mpmath
from mpmath import mpf

from .polyseq import eval_poly, fg, poly_g
from .precision import PrecisionEscalation
from .rep import Mat2, RepParams, Wn_closed, rho_matrices, tau_pair, tau_seq, trace_W
from .words import eval_word, word_relator, word_w

MAX_BISECTIONS = 200
DEFAULT_TOL = mpf("1e-12")


class BracketKind(str, Enum):
    CLOSED_FORM_N1 = "closed_form_n1"
    CLOSED_FORM_N_NEG1 = "closed_form_n_neg1"
    GENERIC_N_POS = "generic_n_pos"
    GENERIC_N_NEG = "generic_n_neg"
    SPECIAL_ABS_N_2_M_POS = "special_abs_n_2_m_pos"
    SPECIAL_ABS_N_2_M_NEG = "special_abs_n_2_m_neg"

    @property
    def closed_form(self) -> bool:
        return self in (BracketKind.CLOSED_FORM_N1, BracketKind.CLOSED_FORM_N_NEG1)


class RileyError(ValueError):
    pass


class UnsupportedBranch(RileyError):
    """(m, n) has no solution of Riley's equation with T > s + 2."""


class RootNotIsolated(ArithmeticError):
    pass


@dataclass(frozen=True)
class RileyBracket:
    T_lo: mpf
    T_hi: mpf
    kind: BracketKind
    # the same endpoints as delta = (T - s - 2) s g_{m-1}^2
    delta_lo: mpf
    delta_hi: mpf


def riley_eval(m: int, n: int, s, T, excess=None) -> mpf:
    """phi_K(s, T) = (tau_{n+1} - tau_n) + (s + 2 - T) f_{m-1} g_{m-1} tau_n.

    ``excess`` = T - s - 2, when supplied, replaces the cancelling difference.
    """
    s = mpf(s)
    ex = mpf(excess) if excess is not None else mpf(T) - s - 2
    _, fm1, gm1 = fg(m, s)
    tau = trace_W(m, s, T, excess=ex)
    tn = tau_seq(tau, n)
    return (tau_seq(tau, n + 1) - tn) - ex * fm1 * gm1 * tn


def _phi_delta(n: int, ratio: mpf, delta: mpf) -> mpf:
    # ratio = f_{m-1} / (s g_{m-1})
    tn, tn1 = tau_pair(2 - delta, n)
    return (tn1 - tn) - delta * ratio * tn


def riley_direct(m: int, n: int, p: RepParams, use_words: bool = False) -> mpf:
    """z_11 + (1 - t) z_12 with z = W^n, independent of the trace formula."""
    if use_words:
        x, y = rho_matrices(p)
        Z = eval_word(word_w(m) ** n, x, y)
    else:
        Z = Wn_closed(m, n, p)
    return Z.a + (1 - p.t) * Z.b


def _check_pair(m: int, n: int) -> None:
    if m == 0 or n == 0:
        raise RileyError("m and n must be nonzero")
    if n == 1 and m < 0:
        raise UnsupportedBranch(f"n = 1 needs m > 0 (got m = {m}): the root has T < s + 2")
    if n == -1 and m > 0:
        raise UnsupportedBranch(f"n = -1 needs m < 0 (got m = {m}): the root has T < s + 2")


def bracket_constants(n: int, m: int) -> tuple[mpf, mpf, BracketKind]:
    """(delta_lo, delta_hi, kind) for |n| >= 2; both in (0, 4)."""
    pi = mpmath.pi
    if n > 1:
        lo = 2 - 2 * mpmath.cos(pi / (2 * n + 1))
        hi = 2 - 2 * mpmath.cos(3 * pi / (2 * n + 1))
        return lo, hi, BracketKind.GENERIC_N_POS
    if n == -2:
        if m > 0:
            return mpf(1), mpf(2), BracketKind.SPECIAL_ABS_N_2_M_POS
        return mpf(2), mpf(3), BracketKind.SPECIAL_ABS_N_2_M_NEG
    if n < -2:
        l = -n
        lo = 2 - 2 * mpmath.cos(pi / (2 * l - 1))
        hi = 2 - 2 * mpmath.cos(3 * pi / (2 * l - 1))
        return lo, hi, BracketKind.GENERIC_N_NEG
    raise RileyError(f"no bracket constants for n = {n}")


def _closed_form_excess(m: int, n: int, s: mpf) -> mpf:
    fm, fm1, gm1 = fg(m, s)
    if n == 1:
        return 1 / (fm * gm1)
    return -1 / (fm1 * gm1)


def riley_bracket(m: int, n: int, s) -> RileyBracket:
    s = mpf(s)
    if not s > 0:
        raise RileyError(f"s must be positive, got {s}")
    _check_pair(m, n)
    gm1 = eval_poly(poly_g(m - 1), s)
    unit = s * gm1 ** 2
    if n in (1, -1):
        ex = _closed_form_excess(m, n, s)
        T = s + 2 + ex
        kind = BracketKind.CLOSED_FORM_N1 if n == 1 else BracketKind.CLOSED_FORM_N_NEG1
        return RileyBracket(T, T, kind, ex * unit, ex * unit)
    lo, hi, kind = bracket_constants(n, m)
    return RileyBracket(s + 2 + lo / unit, s + 2 + hi / unit, kind, lo, hi)


def residual_scale(m: int, s) -> mpf:
    """Magnitude of the terms of phi on the bracket segment: max(1, |f_{m-1} / (s g_{m-1})|)."""
    s = mpf(s)
    _, fm1, gm1 = fg(m, s)
    return max(mpf(1), abs(fm1 / (s * gm1)))


def solve_T(m: int, n: int, s, tol=DEFAULT_TOL) -> RepParams:
    """A root T of Riley's equation in the bracket, as RepParams.

    Bisection runs until |phi| <= tol or the bracket shrinks to adjacent
    floats. A collapsed bracket is accepted when |phi| <= tol * scale (see
    :func:`residual_scale`); otherwise PrecisionEscalation is raised.
    """
    s = mpf(s)
    tol = mpf(tol)
    br = riley_bracket(m, n, s)
    _, fm1, gm1 = fg(m, s)
    unit = s * gm1 ** 2
    if br.kind.closed_form:
        return RepParams.from_excess(s, br.delta_lo / unit)
    ratio = fm1 / (s * gm1)
    lo, hi = br.delta_lo, br.delta_hi
    f_lo, f_hi = _phi_delta(n, ratio, lo), _phi_delta(n, ratio, hi)
    if f_lo == 0:
        hi = lo
    elif f_hi == 0:
        lo = hi
    elif mpmath.sign(f_lo) == mpmath.sign(f_hi):
        lo, hi, f_lo = _rescan(n, ratio, lo, hi)
    mid, f_mid = lo, f_lo
    done = lo == hi
    for _ in range(max(MAX_BISECTIONS, mpmath.mp.prec + 16)):
        if done:
            break
        mid = (lo + hi) / 2
        f_mid = _phi_delta(n, ratio, mid)
        if abs(f_mid) <= tol or mid == lo or mid == hi:
            done = True
            break
        if (f_mid > 0) == (f_lo > 0):
            lo, f_lo = mid, f_mid
        else:
            hi = mid
    target = tol * residual_scale(m, s)
    if not done or abs(f_mid) > target:
        raise PrecisionEscalation(
            f"Riley residual {mpmath.nstr(abs(f_mid), 3)} above {mpmath.nstr(target, 3)} at bracket "
            f"width {mpmath.nstr(hi - lo, 3)} (m={m}, n={n}, s={mpmath.nstr(s, 8)})")
    return RepParams.from_excess(s, mid / unit)


def _rescan(n: int, ratio: mpf, lo: mpf, hi: mpf, points: int = 64):
    prev_d, prev_v = lo, _phi_delta(n, ratio, lo)
    for i in range(1, points + 1):
        d = lo + (hi - lo) * i / points
        v = _phi_delta(n, ratio, d)
        if mpmath.sign(v) != mpmath.sign(prev_v):
            return prev_d, d, prev_v
        prev_d, prev_v = d, v
    raise RootNotIsolated(f"no sign change of phi on delta in [{lo}, {hi}] for n = {n}")


def relator_residual(m: int, n: int, p: RepParams) -> mpf:
    """max|rho(relator) - I| / max|rho(w^n)|, from word products."""
    x, y = rho_matrices(p)
    R = eval_word(word_relator(m, n), x, y)
    Z = eval_word(word_w(m) ** n, x, y)
    return (R - Mat2.identity()).max_norm() / Z.max_norm()

