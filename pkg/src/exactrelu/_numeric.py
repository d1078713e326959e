"""Low-level numeric helpers shared by the exact solvers.

Public objects carry :class:`fractions.Fraction`; the hot loops work on
``gmpy2.mpq`` which is an order of magnitude faster. Conversion happens only
at module boundaries.
"""

from __future__ import annotations

import math
from decimal import Decimal, localcontext
from fractions import Fraction

import gmpy2
from gmpy2 import mpq

MPQ_ZERO = mpq(0)
MPQ_ONE = mpq(1)

# comparison tolerance for approximate (irrational) loss values
EPS_CMP = 1e-9
DEFAULT_PRECISION_BITS = 128


def to_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def to_fraction(q) -> Fraction:
    if isinstance(q, Fraction):
        return q
    if isinstance(q, int):
        return Fraction(q)
    q = mpq(q)
    return Fraction(int(q.numerator), int(q.denominator))


def digits_for_bits(bits: int) -> int:
    return max(17, math.ceil(bits * math.log10(2)) + 2)


def decimal_of(x, digits: int) -> Decimal:
    x = to_fraction(x)
    with localcontext() as ctx:
        ctx.prec = digits
        return Decimal(x.numerator) / Decimal(x.denominator)


def decimal_pow(base, p: Fraction, digits: int) -> Decimal:
    """``base ** p`` for rational ``base >= 0`` and ``p > 0`` in decimal."""
    base = to_fraction(base)
    if base == 0:
        return Decimal(0)
    with localcontext() as ctx:
        ctx.prec = digits + 10
        b = Decimal(base.numerator) / Decimal(base.denominator)
        e = Decimal(p.numerator) / Decimal(p.denominator)
        r = b ** e
    with localcontext() as ctx:
        ctx.prec = digits
        return +r


def float_pow(num: int, den: int, p: float) -> float:
    """``(num/den) ** p`` for non-negative integers, guarded against overflow."""
    if num == 0:
        return 0.0
    try:
        return (num / den) ** p
    except OverflowError:
        return math.exp(p * (math.log(num) - math.log(den)))


def is_integer_power(p: Fraction) -> bool:
    return p.denominator == 1


def int_root_ceil(x: Fraction, b: int) -> int:
    """Smallest integer t >= 0 with t**b >= x (x >= 0)."""
    if x <= 0:
        return 0
    guess = int(gmpy2.iroot(gmpy2.mpz(math.ceil(x)), b)[0])
    t = max(guess - 1, 0)
    while Fraction(t) ** b < x:
        t += 1
    while t > 0 and Fraction(t - 1) ** b >= x:
        t -= 1
    return t
