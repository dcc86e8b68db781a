"""The meridian representations and closed forms for W = rho(w) and W^n.

Two conjugate pairs of meridian images are used. ``rho`` is upper/lower
triangular and is the frame where the Riley polynomial is read off;
``rho_s`` diagonalizes x, so the longitude image is diagonal there.
"""
from __future__ import annotations

from dataclasses import dataclass

import mpmath
from mpmath import mpf

from .polyseq import fg, eval_poly, poly_g

# below this |tau| - 2 the sine form is used for tau_k
TAU_CROSSOVER = mpf("1e-8")


@dataclass(frozen=True)
class Mat2:
    a: mpf
    b: mpf
    c: mpf
    d: mpf

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(mpf(1), mpf(0), mpf(0), mpf(1))

    @classmethod
    def of(cls, a, b, c, d) -> "Mat2":
        return cls(mpf(a), mpf(b), mpf(c), mpf(d))

    def __matmul__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                    self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __sub__(self, o: "Mat2") -> "Mat2":
        return Mat2(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)

    def det(self) -> mpf:
        return self.a * self.d - self.b * self.c

    def trace(self) -> mpf:
        return self.a + self.d

    def max_norm(self) -> mpf:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d))

    def inverse(self) -> "Mat2":
        """Adjugate over determinant."""
        det = self.det()
        scale = self.max_norm() ** 2
        if scale == 0 or abs(det) < mpf("1e-300") * scale:
            raise ZeroDivisionError("singular 2x2 matrix")
        if det == 1:
            return Mat2(self.d, -self.b, -self.c, self.a)
        return Mat2(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def entries(self) -> tuple[mpf, mpf, mpf, mpf]:
        return self.a, self.b, self.c, self.d

    def max_rel_diff(self, o: "Mat2") -> mpf:
        """Entrywise max |difference| over the larger max-norm."""
        scale = max(self.max_norm(), o.max_norm())
        if scale == 0:
            return mpf(0)
        return (self - o).max_norm() / scale

    def __str__(self) -> str:
        e = [mpmath.nstr(v, 12) for v in self.entries()]
        return f"[[{e[0]}, {e[1]}], [{e[2]}, {e[3]}]]"


@dataclass(frozen=True)
class RepParams:
    """A point (s, t) with T = t + 1/t.

    ``excess`` is T - s - 2 carried separately: at large s the difference of
    the stored T and s loses most of its digits, while the solvers know it to
    full relative precision.
    """

    s: mpf
    t: mpf
    T: mpf
    sqrt_t: mpf
    excess: mpf

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError(f"s must be positive, got {self.s}")
        if not self.t > 1:
            raise ValueError(f"t must exceed 1, got {self.t}")
        if abs(self.T - (self.t + 1 / self.t)) > mpf("1e-12") * self.T:
            raise ValueError("T is inconsistent with t + 1/t")

    @classmethod
    def from_t(cls, s, t) -> "RepParams":
        s, t = mpf(s), mpf(t)
        T = t + 1 / t
        return cls(s, t, T, mpmath.sqrt(t), T - s - 2)

    @classmethod
    def from_excess(cls, s, excess) -> "RepParams":
        """Build from T - s - 2; t is the root of t + 1/t = T above 1."""
        s, excess = mpf(s), mpf(excess)
        T = s + 2 + excess
        if not T > 2:
            raise ValueError(f"T = {T} admits no real t > 1")
        # T^2 - 4 = (T - 2)(T + 2) with T - 2 = s + excess
        t = (T + mpmath.sqrt((s + excess) * (T + 2))) / 2
        return cls(s, t, T, mpmath.sqrt(t), excess)

    @property
    def in_regime(self) -> bool:
        """T > s + 2, the side of the Riley curve the construction uses."""
        return self.excess > 0


def rho_matrices(p: RepParams) -> tuple[Mat2, Mat2]:
    r = p.sqrt_t
    return (Mat2(r, 1 / r, mpf(0), 1 / r),
            Mat2(r, mpf(0), -p.s * r, 1 / r))


def rho_s_matrices(p: RepParams) -> tuple[Mat2, Mat2]:
    r, s, t = p.sqrt_t, p.s, p.t
    k = r - 1 / r
    # k^2 = T - 2, so the (1,2) entry s/k^2 - 1 is -excess/(T - 2) exactly
    b = -p.excess / (s + p.excess)
    return (Mat2(r, mpf(0), mpf(0), 1 / r),
            Mat2((t - s - 1) / k, b, -s, (s + 1 - 1 / t) / k))


def conjugator_q(p: RepParams) -> Mat2:
    """Q with Q^-1 rho_s(.) Q = rho(.)."""
    r = p.sqrt_t
    return Mat2(p.t - 1, mpf(1), mpf(0), r - 1 / r)


def W_closed(m: int, p: RepParams) -> Mat2:
    s, t = p.s, p.t
    fm, fm1, gm1 = fg(m, s)
    return Mat2(fm ** 2 - s * t * gm1 ** 2,
                fm1 * gm1 - fm * gm1 / t,
                s * fm * gm1 - s * t * fm1 * gm1,
                fm1 ** 2 - (s / t) * gm1 ** 2)


def trace_W(m: int, s, T, excess=None) -> mpf:
    """s (s + 2 - T) g_{m-1}^2 + 2; pass ``excess`` = T - s - 2 when known."""
    s = mpf(s)
    gm1 = eval_poly(poly_g(m - 1), s)
    ex = mpf(excess) if excess is not None else mpf(T) - s - 2
    return 2 - s * ex * gm1 ** 2


def tau_seq(tau, k: int) -> mpf:
    """tau_k with tau_0 = 0, tau_1 = 1, tau_{k+1} = tau tau_k - tau_{k-1}."""
    tau = mpf(tau)
    if k < 0:
        return -tau_seq(tau, -k)
    if k == 0:
        return mpf(0)
    if abs(tau) < 2 - TAU_CROSSOVER:
        theta = mpmath.acos(tau / 2)
        return mpmath.sin(k * theta) / mpmath.sin(theta)
    return tau_recursive(tau, k)


def tau_recursive(tau, k: int) -> mpf:
    tau = mpf(tau)
    if k < 0:
        return -tau_recursive(tau, -k)
    prev, cur = mpf(0), mpf(1)
    if k == 0:
        return prev
    for _ in range(k - 1):
        prev, cur = cur, tau * cur - prev
    return cur


def tau_pair(tau, k: int) -> tuple[mpf, mpf]:
    """(tau_k, tau_{k+1}) sharing one angle evaluation."""
    tau = mpf(tau)
    if abs(tau) < 2 - TAU_CROSSOVER:
        theta = mpmath.acos(tau / 2)
        st = mpmath.sin(theta)
        return mpmath.sin(k * theta) / st, mpmath.sin((k + 1) * theta) / st
    return tau_recursive(tau, k), tau_recursive(tau, k + 1)


def Wn_closed(m: int, n: int, p: RepParams) -> Mat2:
    W = W_closed(m, p)
    tau = W.trace()
    tn, tn1, tnp = tau_seq(tau, n), tau_seq(tau, n - 1), tau_seq(tau, n + 1)
    return Mat2(W.a * tn - tn1, W.b * tn, W.c * tn, tnp - W.a * tn)
