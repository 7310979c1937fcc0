"""Arbitrary-precision arithmetic primitives shared by all other modules.

Two kinds of numbers are used throughout the package:

* exact rationals, carried by ``gmpy2.mpq`` (always stored fully reduced,
  denominator > 0) -- these hold the perturbation coefficients and the
  half-integer binomials exactly;
* high-precision reals, carried by ``mpmath.mpf`` values managed under an
  explicit :class:`PrecisionContext` -- every operation on reals runs at the
  context's working precision, which bounds the precision of all operands.

The working precision is stated in decimal digits and mapped to binary
mantissa bits by mpmath (ceil(digits * log2(10)) bits or better), so results
are at least as accurate as a decimal implementation with the same digit
count.

All values are immutable and all operations are pure, so results can be
shared freely across threads; the mpmath precision context itself is
process-global, however, so concurrent computation should be parallelised
across processes rather than threads.
"""

from __future__ import annotations

import numbers
from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpq, mpz
from mpmath import mp, mpf

__all__ = [
    "PrecisionContext",
    "DEFAULT_CONTEXT",
    "CompensatedSum",
    "rational",
    "rational_from_decimal",
    "is_rational",
    "to_real",
    "as_real",
    "binomial_half",
    "falling_factorial",
    "factorial",
    "pow_rational_exponent",
    "render",
    "parse",
]

#: Extra decimal digits used internally so that single operations stay
#: within one unit in the last working digit after the final rounding.
GUARD_DIGITS = 10


@dataclass(frozen=True)
class PrecisionContext:
    """Working/output decimal precision for all real-valued computations.

    ``working_digits`` must exceed ``output_digits`` by at least 20 guard
    digits; the large default margin absorbs the heavy cancellation in the
    strong-coupling sums over 251 perturbation orders.
    """

    working_digits: int = 300
    output_digits: int = 25

    def __post_init__(self):
        if self.output_digits <= 0:
            raise ValueError("output_digits must be positive")
        if self.working_digits < self.output_digits + 20:
            raise ValueError(
                f"working_digits ({self.working_digits}) must be at least "
                f"output_digits + 20 ({self.output_digits + 20})"
            )

    def guard(self):
        """Context manager running the enclosed block at working precision."""
        return mp.workdps(self.working_digits)

    def doubled(self) -> "PrecisionContext":
        return PrecisionContext(2 * self.working_digits, self.output_digits)


DEFAULT_CONTEXT = PrecisionContext()


def rational(numerator, denominator=1) -> mpq:
    """Exact rational from integers (reduced, positive denominator)."""
    return mpq(numerator, denominator)


def rational_from_decimal(text: str) -> mpq:
    """Exact rational value of a decimal literal such as '0.25' or '6.85'."""
    return mpq(Fraction(text.strip()))


def is_rational(x) -> bool:
    """True for values carrying an exact rational (int, mpz, mpq, Fraction)."""
    return isinstance(x, (int, type(mpz(0)), type(mpq(0)), Fraction)) and not isinstance(
        x, bool
    )


def to_real(q, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpf:
    """Convert an exact rational to mpf, correct to <= 1 ulp at working digits."""
    with mp.workdps(ctx.working_digits + GUARD_DIGITS):
        v = mpf(int(q.numerator)) / mpf(int(q.denominator))
    with ctx.guard():
        return +v


def as_real(x, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpf:
    """Coerce int/rational/str/float/mpf input to mpf at working precision."""
    if isinstance(x, mpf):
        return x
    if is_rational(x):
        if isinstance(x, (int,)):
            with ctx.guard():
                return mpf(x)
        return to_real(mpq(x), ctx)
    with ctx.guard():
        return mpf(x)


class CompensatedSum:
    """Neumaier-compensated accumulator for mpf terms.

    At 300 working digits the compensation is insurance rather than a
    necessity, but it makes the summation order-robust at no real cost.
    """

    def __init__(self):
        self._sum = mpf(0)
        self._comp = mpf(0)

    def add(self, term: mpf) -> None:
        s = self._sum + term
        if abs(self._sum) >= abs(term):
            self._comp += (self._sum - s) + term
        else:
            self._comp += (term - s) + self._sum
        self._sum = s

    @property
    def total(self) -> mpf:
        return self._sum + self._comp


def binomial_half(j: int, k: int) -> mpq:
    """Generalized binomial C((1-3j)/2, k) as an exact rational.

    Computed as prod_{m=0}^{k-1} ((1-3j)/2 - m) / k!.  For even j the upper
    argument is a half-odd integer; for odd j it is a (negative) integer, in
    which case the usual integer binomial values emerge, e.g.
    C(-1, k) = (-1)^k.
    """
    if j < 0 or k < 0:
        raise ValueError("binomial_half requires non-negative j, k")
    a_twice = 1 - 3 * j  # upper argument times 2
    num = mpz(1)
    for m in range(k):
        num *= a_twice - 2 * m
    return mpq(num, mpz(2) ** k * gmpy2.fac(k))


def falling_factorial(k: int, n: int):
    """k(k-1)...(k-n+1); equals 1 for n = 0 and 0 whenever n > k >= 0."""
    if k < 0 or n < 0:
        raise ValueError("falling_factorial requires non-negative arguments")
    p = mpz(1)
    for m in range(n):
        p *= k - m
    return p


def factorial(n: int):
    return gmpy2.fac(n)


def pow_rational_exponent(x, p: int, q: int, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpf:
    """x**(p/q) for x > 0, accurate to <= 1 ulp at the working precision.

    Evaluated as exp(ln(x) * p / q) with guard digits; p may be negative,
    q must be positive.
    """
    if q <= 0:
        raise ValueError("q must be a positive integer")
    with mp.workdps(ctx.working_digits + GUARD_DIGITS):
        if is_rational(x):
            r = mpq(x)
            xv = mpf(int(r.numerator)) / mpf(int(r.denominator))
        else:
            xv = mpf(x) if not isinstance(x, mpf) else x
        if xv <= 0:
            raise ValueError("pow_rational_exponent requires x > 0")
        if p == 0 or xv == 1:
            v = mpf(1)
        else:
            v = mp.exp(mp.log(xv) * mpf(p) / q)
    with ctx.guard():
        return +v


def render(x, digits: int) -> str:
    """Decimal string of x with the given number of significant digits."""
    if digits <= 0:
        raise ValueError("digits must be positive")
    if is_rational(x):
        with mp.workdps(digits + GUARD_DIGITS):
            r = mpq(x)
            x = mpf(int(r.numerator)) / mpf(int(r.denominator))
    elif not isinstance(x, mpf):
        x = mpf(x)
    return mp.nstr(x, digits, strip_zeros=False)


def parse(text: str, ctx: PrecisionContext = DEFAULT_CONTEXT) -> mpf:
    """Parse a decimal string at working precision (round-trips render)."""
    with ctx.guard():
        return +mpf(text.strip())
