"""Working-precision control and scalar plumbing on top of gmpy2.

A "scalar" anywhere in this package is one of

  * mpz / int      -- exact integer
  * mpq / Fraction -- exact rational
  * mpfr           -- binary float at the working precision

Exact values stay exact through +, -, *, / and comparisons; they are
demoted to mpfr only when an operation genuinely leaves the rationals
(sqrt, log, ...).  Decimal string literals parse to exact rationals, so
"0.1" means 1/10 and not the nearest double.

The working precision is a process-global number of significant decimal
digits (default 50), mapped to an mpfr context with a generous guard so
that 1e-40-scale acceptance tolerances sit far above representation
noise.  Worker threads must call apply_context() once because gmpy2
contexts are thread local.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Union

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import LatboxError

Scalar = Union[int, mpz, mpq, mpfr]

_GUARD_BITS = 40
_working_digits = 50


def _bits_for(digits: int) -> int:
    return int(math.ceil(digits * math.log2(10))) + _GUARD_BITS


def set_working_digits(digits: int) -> None:
    """Set the process-wide precision in significant decimal digits."""
    global _working_digits
    if digits < 30:
        raise LatboxError("working precision must be at least 30 digits, got %d" % digits)
    _working_digits = int(digits)
    apply_context()


def get_working_digits() -> int:
    return _working_digits


def apply_context() -> None:
    """Install the working precision into the current thread's gmpy2 context."""
    ctx = gmpy2.get_context()
    ctx.precision = _bits_for(_working_digits)


def is_exact(x) -> bool:
    """True when x is held exactly (integer or rational), False for mpfr."""
    return isinstance(x, (int, mpz, mpq, Fraction))


def to_scalar(x) -> Scalar:
    """Coerce user input to a scalar, keeping exactness whenever possible.

    Strings go through Fraction so decimal literals ("0.25", "1e-3",
    "3/7") become exact rationals.  Floats are accepted and converted
    exactly (the caller owns whatever binary noise the float carried).
    """
    if isinstance(x, (mpz, mpq, mpfr)):
        return x
    if isinstance(x, bool):
        raise LatboxError("bool is not a scalar")
    if isinstance(x, int):
        return mpz(x)
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        num, den = x.as_integer_ratio()
        return mpq(num, den)
    if isinstance(x, str):
        try:
            frac = Fraction(x.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise LatboxError("cannot parse scalar from %r" % x) from exc
        return mpq(frac.numerator, frac.denominator)
    raise LatboxError("cannot coerce %r to a scalar" % type(x).__name__)


def as_mpfr(x) -> mpfr:
    """Round any scalar to mpfr at the working precision."""
    if isinstance(x, mpfr):
        return x
    return mpfr(to_scalar(x))


def simplify(x: Scalar) -> Scalar:
    """Collapse integer-valued rationals to mpz; leave everything else."""
    if isinstance(x, mpq) and x.denominator == 1:
        return mpz(x)
    return x


def scalar_str(x) -> str:
    """Canonical full-precision decimal rendering, stable across runs.

    Integers print as integers.  Everything else prints in normalized
    scientific notation with all digits the working precision supports,
    so equal precision plus equal inputs gives byte-equal output.
    """
    x = to_scalar(x)
    if isinstance(x, (int, mpz)):
        return str(int(x))
    if isinstance(x, mpq) and x.denominator == 1:
        return str(int(x))
    v = as_mpfr(x)
    if gmpy2.is_nan(v):
        return "nan"
    if gmpy2.is_infinite(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0"
    ndig = _working_digits + 2
    digs, exp, _ = gmpy2.digits(v, 10, ndig)
    sign = ""
    if digs.startswith("-"):
        sign = "-"
        digs = digs[1:]
    digs = digs.rstrip("0") or "0"
    mant = digs[0] + ("." + digs[1:] if len(digs) > 1 else "")
    return "%s%se%+d" % (sign, mant, exp - 1)


apply_context()
