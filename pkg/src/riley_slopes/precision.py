"""Working-precision control on top of mpmath.

All numerics in the package run on ``mpmath.mpf`` at the ambient context
precision. Solvers that detect lost accuracy raise :class:`PrecisionEscalation`;
:func:`escalating` re-runs the computation at doubled mantissa width.
"""
from __future__ import annotations

import os
from typing import Callable, TypeVar

import mpmath

DEFAULT_PRECISION_BITS = 53
MIN_PRECISION_BITS = 53
MAX_ESCALATIONS = 4
ENV_VAR = "RILEY_PRECISION_BITS"

R = TypeVar("R")


class PrecisionEscalation(ArithmeticError):
    """The requested accuracy is not reachable at the current precision."""


class PrecisionExhausted(ArithmeticError):
    """Raised after the last allowed escalation still could not reach the target."""


def default_precision() -> int:
    raw = os.environ.get(ENV_VAR)
    if raw is None or raw == "":
        return DEFAULT_PRECISION_BITS
    bits = int(raw)
    if bits < MIN_PRECISION_BITS:
        raise ValueError(f"{ENV_VAR} must be at least {MIN_PRECISION_BITS}, got {bits}")
    return bits


def current_bits() -> int:
    return mpmath.mp.prec


def escalating(fn: Callable[..., R], *args, prec: int | None = None,
               max_escalations: int = MAX_ESCALATIONS, **kwargs) -> R:
    """Call ``fn`` at ``prec`` bits, doubling on PrecisionEscalation.

    ``fn`` sees the precision through the mpmath context.
    """
    bits = prec if prec is not None else default_precision()
    last: PrecisionEscalation | None = None
    for _ in range(max_escalations + 1):
        with mpmath.workprec(bits):
            try:
                return fn(*args, **kwargs)
            except PrecisionEscalation as exc:
                last = exc
        bits *= 2
    raise PrecisionExhausted(
        f"target accuracy not reached after {max_escalations} escalations "
        f"(last attempt at {bits // 2} bits): {last}")


def to_mpf(x) -> mpmath.mpf:
    if isinstance(x, mpmath.mpf):
        return +x
    if isinstance(x, str):
        return mpmath.mpf(x)
    return mpmath.mpf(x)


def to_decimal_string(x, bits: int | None = None) -> str:
    """Decimal text carrying every bit of ``x`` at ``bits`` of precision."""
    bits = bits if bits is not None else current_bits()
    digits = mpmath.libmp.prec_to_dps(bits) + 3
    return mpmath.nstr(to_mpf(x), digits, min_fixed=-4, max_fixed=digits)
