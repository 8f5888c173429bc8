"""Exact natural-number arithmetic and certified base-B digit extraction.

Arbitrary-precision nonnegative integers are plain Python ``int``s (exact by
construction); the alias :data:`BigNat` marks the places where a value must be
such an integer.  On top of that substrate this module provides the mantissa
decomposition ``x = s * B**k`` with ``s`` in ``[1, B)``, leading-digit and
fractional-log extraction in an arbitrary base ``B > 1``, and the two exact
primitives the dynamical-system experiments iterate millions of times:
:func:`mul_add_small` and :func:`shift_out_factor`.

Digit extraction for huge integers never trusts a bare floating-point
logarithm.  The fast path brackets ``log_B(x)`` from the bit length plus the
top 50 bits, carrying a rigorous rounding-error margin; whenever the bracket
comes within that margin of a digit boundary (or of an integer exponent) the
answer is recomputed with exact integer comparisons against powers of B.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from numbers import Integral
from typing import Union

import mpmath
import numpy as np

__all__ = [
    "BigNat",
    "DomainError",
    "Mantissa",
    "mantissa",
    "leading_digit",
    "log_mantissa",
    "mul_add_small",
    "shift_out_factor",
    "random_bignat",
    "digits_to_int",
]

BigNat = int

Real = Union[int, float]

_LN2 = math.log(2.0)
_TOP_BITS = 50


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


@dataclass(frozen=True)
class Mantissa:
    """Decomposition ``value = significand * base**exponent``.

    ``significand`` lies in ``[1, base)``, or is exactly ``0.0`` when the
    input was zero (in which case ``exponent`` is 0).
    """

    significand: float
    exponent: int
    base: float

    def value(self) -> float:
        return self.significand * self.base ** self.exponent


def _check_base(base) -> float:
    b = float(base)
    if not math.isfinite(b) or b <= 1.0:
        raise DomainError(f"base must be a finite real > 1, got {base!r}")
    return b


def _check_digit_base(base) -> int:
    if not isinstance(base, Integral) or int(base) < 2:
        raise DomainError(f"digit base must be an integer >= 2, got {base!r}")
    return int(base)


def _log_parts(x: int, base: float) -> tuple[float, float]:
    """log_base(x) for a positive int, with a rigorous absolute error margin.

    Uses only the bit length and the top ``_TOP_BITS`` bits, so the cost is
    O(1) beyond the shift.  The margin accounts for the dropped low bits and
    for every rounding step (a few ulps each).
    """
    n = x.bit_length()
    w = min(n, _TOP_BITS)
    top = x >> (n - w)
    lb = math.log(base)
    v = (n - w) * (_LN2 / lb) + math.log(top) / lb
    margin = (abs(v) + (n - w) + 16.0) * 2.5e-16 + 2.0 ** (1 - w) / lb
    return v, margin


def _exact_floor_log(x: int, base: int, estimate: int) -> tuple[int, int]:
    """Exact ``e = floor(log_base x)`` and ``base**e`` by integer comparison."""
    e = max(estimate - 1, 0)
    p = base ** e
    while p > x:
        e -= 1
        p //= base
    while p * base <= x:
        e += 1
        p *= base
    return e, p


@lru_cache(maxsize=64)
def _digit_bounds(base: int) -> tuple[float, ...]:
    # log_base(d) for d = 1 .. base; bounds[d] begins the digit-(d+1) cell
    lb = math.log(base)
    return tuple(math.log(d) / lb for d in range(1, base + 1))


def leading_digit(x: Real, base: int = 10) -> int:
    """First digit of ``|x|`` written in ``base``: ``floor(M_base(|x|))``.

    Exact for integer inputs of any size (certified bracket with an exact
    integer fallback); for floats the digit inherits ordinary double rounding.
    """
    b = _check_digit_base(base)
    if isinstance(x, Integral):
        xi = abs(int(x))
        if xi == 0:
            raise DomainError("leading digit of 0 is undefined")
        return _leading_digit_int(xi, b)
    xf = float(x)
    if not math.isfinite(xf):
        raise DomainError(f"x must be finite, got {x!r}")
    if xf == 0.0:
        raise DomainError("leading digit of 0 is undefined")
    m = mantissa(xf, b)
    d = int(m.significand)
    return min(max(d, 1), b - 1)


def _leading_digit_int(x: int, base: int) -> int:
    if x < base:
        return x
    v, margin = _log_parts(x, base)
    f = v - math.floor(v)
    bounds = _digit_bounds(base)
    # bisect for d with bounds[d-1] <= f < bounds[d]
    lo, hi = 1, base
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if f >= bounds[mid - 1]:
            lo = mid
        else:
            hi = mid
    d = lo
    pad = margin + 5e-16
    if f - bounds[d - 1] > pad and bounds[d] - f > pad:
        return d
    # bracket straddles a boundary: decide by exact integer arithmetic
    _, p = _exact_floor_log(x, base, int(v))
    return x // p


def log_mantissa(x: Real, base) -> float:
    """``log_base|x| mod 1``, accurate to better than 1e-12 absolute.

    Accuracy is in the mod-1 (circle) metric: an input one ulp below a power
    of the base rounds to 0.0, the nearest representative of its fractional
    part.  Huge integers go through mpmath with ~30 guard digits so the
    fractional part survives the large integer exponent.
    """
    b = _check_base(base)
    if isinstance(x, Integral):
        xi = abs(int(x))
        if xi == 0:
            raise DomainError("log_mantissa of 0 is undefined")
        n = xi.bit_length()
        if n <= 2048:
            v, _ = _log_parts(xi, b)
            return v - math.floor(v)
        return _log_mantissa_big(xi, b)
    xf = float(x)
    if not math.isfinite(xf):
        raise DomainError(f"x must be finite, got {x!r}")
    if xf == 0.0:
        raise DomainError("log_mantissa of 0 is undefined")
    v = math.log(abs(xf)) / math.log(b)
    return v - math.floor(v)


def _log_mantissa_big(x: int, base: float) -> float:
    n = x.bit_length()
    w = min(n, 4 * _TOP_BITS)
    top = x >> (n - w)
    # 30 guard digits beyond the size of the integer exponent
    dps = 30 + len(str(n))
    with mpmath.workdps(dps):
        lb = mpmath.log(base)
        v = (n - w) * mpmath.log(2) / lb + mpmath.log(top) / lb
        # the cast of a frac just below 1 can round up to 1.0
        return float(mpmath.frac(v)) % 1.0


def mantissa(x: Real, base) -> Mantissa:
    """Canonical ``(significand, exponent)`` of ``x`` in ``base``.

    Negative inputs are folded to ``|x|``; zero maps to significand 0.
    """
    b = _check_base(base)
    if isinstance(x, Integral):
        xi = abs(int(x))
        if xi == 0:
            return Mantissa(0.0, 0, b)
        return _mantissa_int(xi, b, base)
    xf = float(x)
    if not math.isfinite(xf):
        raise DomainError(f"x must be finite, got {x!r}")
    if xf == 0.0:
        return Mantissa(0.0, 0, b)
    ax = abs(xf)
    v = math.log(ax) / math.log(b)
    k = math.floor(v)
    s = b ** (v - k)
    # one multiplicative nudge in case rounding pushed s out of [1, B)
    if s < 1.0:
        s *= b
        k -= 1
    elif s >= b:
        s /= b
        k += 1
    return Mantissa(s, k, b)


def _mantissa_int(x: int, b: float, base) -> Mantissa:
    v, margin = _log_parts(x, b)
    f = v - math.floor(v)
    k = math.floor(v)
    if min(f, 1.0 - f) <= margin + 5e-16:
        if isinstance(base, Integral):
            # exact exponent, then a correctly rounded big-int ratio: this
            # stays right even when x sits one ulp from a power of the base
            k, p = _exact_floor_log(x, int(base), int(v))
            s = x / p
        else:
            f = _log_mantissa_big(x, b)
            # exponent from the certified total log; ambiguity here means x
            # sits within 1e-25 of an exact power of a non-integer base
            k = math.floor(v - min(f, 1.0) + 0.5)
            s = b ** f
        # k is exact here, so out-of-range s can only be rounding noise
        if s < 1.0:
            s = 1.0
        elif s >= b:
            s = math.nextafter(b, 1.0)
        return Mantissa(s, int(k), b)
    s = b ** f
    if s >= b:
        s = 1.0
        k += 1
    return Mantissa(s, int(k), b)


def mul_add_small(x: BigNat, g: int, h: int) -> BigNat:
    """Exact ``g*x + h`` for nonnegative ``x`` and small ``g >= 2``."""
    if x < 0:
        raise DomainError("x must be nonnegative")
    if g < 2:
        raise DomainError("g must be >= 2")
    y = g * x + h
    if y < 0:
        raise DomainError(f"g*x + h = {y} is negative")
    return y


def shift_out_factor(x: BigNat, d: int = 2) -> tuple[BigNat, int]:
    """Split ``x = y * d**k`` with ``d`` not dividing ``y``; returns (y, k)."""
    if d < 2:
        raise DomainError("d must be >= 2")
    if x < 1:
        raise DomainError("x must be >= 1")
    x = int(x)
    if d == 2:
        k = (x & -x).bit_length() - 1
        return x >> k, k
    k = 0
    q, r = divmod(x, d)
    while r == 0:
        x = q
        k += 1
        q, r = divmod(x, d)
    return x, k


def digits_to_int(digits, base: int) -> BigNat:
    """Assemble an integer from most-significant-first digits in ``base``.

    Chunked Horner evaluation; avoids CPython's int<->str digit limit and is
    comfortably fast at 10**5 digits.
    """
    b = _check_digit_base(base)
    arr = np.asarray(digits, dtype=np.int64)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("digits must be a nonempty 1-D sequence")
    if arr.min() < 0 or arr.max() >= b:
        raise DomainError(f"digits must lie in [0, {b})")
    k = max(1, int(62 // math.log2(b)))
    pad = (-arr.size) % k
    if pad:
        arr = np.concatenate([np.zeros(pad, dtype=np.int64), arr])
    chunks = arr.reshape(-1, k)
    vals = np.zeros(len(chunks), dtype=np.int64)
    for j in range(k):
        vals = vals * b + chunks[:, j]
    big = 0
    p = b ** k
    for v in vals.tolist():
        big = big * p + v
    return big


def random_bignat(num_digits: int, base: int, rng: np.random.Generator) -> BigNat:
    """Random integer with exactly ``num_digits`` digits in ``base``.

    The leading digit is uniform on [1, base); the rest uniform on [0, base).
    Deterministic given the generator state.
    """
    if num_digits < 1:
        raise DomainError("num_digits must be >= 1")
    b = _check_digit_base(base)
    first = int(rng.integers(1, b))
    if num_digits == 1:
        return first
    rest = rng.integers(0, b, size=num_digits - 1)
    return digits_to_int(np.concatenate([[first], rest]), b)
