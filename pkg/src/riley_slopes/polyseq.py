"""Integer polynomial sequences f_m, g_m in the variable s.

Both satisfy  P_{m+2} = (s + 2) P_{m+1} - P_m  for every integer m, with
f_0 = 1, f_1 = s + 1 and g_0 = 1, g_1 = s + 2. Negative indices are
f_{-m} = f_{m-1} and g_{-1} = 0, g_{-m} = -g_{m-2}.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from math import comb
from typing import Iterable

import mpmath


def _trim(coeffs: Iterable[int]) -> tuple[int, ...]:
    out = list(coeffs)
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True)
class IntPoly:
    """Exact polynomial in s; ``coeffs[i]`` is the coefficient of s**i."""

    coeffs: tuple[int, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _trim(int(c) for c in self.coeffs))

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls((c,))

    @classmethod
    def s(cls) -> "IntPoly":
        return cls((0, 1))

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading(self) -> int:
        return self.coeffs[-1] if self.coeffs else 0

    def __add__(self, other: "IntPoly | int") -> "IntPoly":
        other = _lift(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return IntPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self) -> "IntPoly":
        return IntPoly(-c for c in self.coeffs)

    def __sub__(self, other: "IntPoly | int") -> "IntPoly":
        return self + (-_lift(other))

    def __rsub__(self, other: "IntPoly | int") -> "IntPoly":
        return _lift(other) - self

    def __mul__(self, other: "IntPoly | int") -> "IntPoly":
        other = _lift(other)
        if self.is_zero() or other.is_zero():
            return IntPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a:
                for j, b in enumerate(other.coeffs):
                    out[i + j] += a * b
        return IntPoly(out)

    __rmul__ = __mul__

    def __call__(self, s):
        return eval_poly(self, s)

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        terms = []
        for i in range(len(self.coeffs) - 1, -1, -1):
            c = self.coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("s" if i == 1 else f"s^{i}")
            if mono and abs(c) == 1:
                body = mono
            else:
                body = f"{abs(c)}{'*' if mono else ''}{mono}"
            sign = "-" if c < 0 else "+"
            terms.append((sign, body))
        head_sign, head = terms[0]
        text = ("-" if head_sign == "-" else "") + head
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text


def _lift(x: "IntPoly | int") -> IntPoly:
    return x if isinstance(x, IntPoly) else IntPoly.const(int(x))


_S_PLUS_2 = IntPoly((2, 1))


@lru_cache(maxsize=None)
def _forward(kind: str, m: int) -> IntPoly:
    # m >= 0 only; iterative to stay clear of recursion limits
    a = IntPoly.const(1)
    b = IntPoly((1, 1)) if kind == "f" else IntPoly((2, 1))
    if m == 0:
        return a
    for _ in range(m - 1):
        a, b = b, _S_PLUS_2 * b - a
    return b


def poly_f(m: int) -> IntPoly:
    """f_m for any integer m."""
    if m < 0:
        return _forward("f", -m - 1)
    return _forward("f", m)


def poly_g(m: int) -> IntPoly:
    """g_m for any integer m."""
    if m == -1:
        return IntPoly()
    if m < -1:
        return -_forward("g", -m - 2)
    return _forward("g", m)


def closed_form_f(m: int) -> IntPoly:
    """Binomial-sum form of f_m, m >= 0."""
    if m < 0:
        raise ValueError(f"closed form is defined for m >= 0 only, got {m}")
    return IntPoly(comb(m + i, m - i) for i in range(m + 1))


def closed_form_g(m: int) -> IntPoly:
    """Binomial-sum form of g_m, m >= 0."""
    if m < 0:
        raise ValueError(f"closed form is defined for m >= 0 only, got {m}")
    return IntPoly(comb(m + 1 + i, m - i) for i in range(m + 1))


def eval_poly(p: IntPoly, s):
    """Horner evaluation at the ambient mpmath precision.

    Python ints and Fractions pass through exactly; anything else is
    coerced to ``mpf``.
    """
    if isinstance(s, int):
        acc = 0
        for c in reversed(p.coeffs):
            acc = acc * s + c
        return acc
    s = mpmath.mpf(s)
    acc = mpmath.mpf(0)
    for c in reversed(p.coeffs):
        acc = acc * s + c
    return acc


def fg(m: int, s) -> tuple:
    """Numeric (f_m(s), f_{m-1}(s), g_{m-1}(s)), the triple the solvers need."""
    return eval_poly(poly_f(m), s), eval_poly(poly_f(m - 1), s), eval_poly(poly_g(m - 1), s)


@dataclass
class IdentityReport:
    m_lo: int
    m_hi: int
    # identity name -> list of m at which it failed
    failures: dict[str, list[int]]
    checked: int

    @property
    def passed(self) -> bool:
        return not any(self.failures.values())

    def counts(self) -> dict[str, tuple[int, int]]:
        """identity -> (passes, total)"""
        return {k: (self.checked - len(v), self.checked) for k, v in self.failures.items()}


IDENTITIES = ("f_m + g_{m-1} = g_m", "f_m + s g_m = f_{m+1}", "f_m^2 = s g_m g_{m-1} + 1")


def check_identities(m_lo: int, m_hi: int) -> IdentityReport:
    """Check the three exact f/g identities for every m in [m_lo, m_hi]."""
    if m_lo > m_hi:
        raise ValueError(f"empty range [{m_lo}, {m_hi}]")
    s = IntPoly.s()
    failures: dict[str, list[int]] = {name: [] for name in IDENTITIES}
    for m in range(m_lo, m_hi + 1):
        f0, f1 = poly_f(m), poly_f(m + 1)
        g0, gm1 = poly_g(m), poly_g(m - 1)
        checks = (
            f0 + gm1 == g0,
            f0 + s * g0 == f1,
            f0 * f0 == s * g0 * gm1 + 1,
        )
        for name, ok in zip(IDENTITIES, checks):
            if not ok:
                failures[name].append(m)
    return IdentityReport(m_lo, m_hi, failures, m_hi - m_lo + 1)
