"""Certified arithmetic for fractional parts of large powers.

The central problem: given a dyadic rational alpha > 1 and a degree d that may
reach 10^6, produce frac(alpha^d) with a proven absolute error bound.  The
integer part of alpha^d carries ~ d*log2(alpha) bits, so any route to the
fractional part must work at that precision.  Everything here is built on
exact integer mantissas (gmpy2 when available) with outward-rounded error
radii, so results are certified and bit-reproducible: no floating-point state,
no rounding modes, no library-version drift.

Layers:

  ExactReal      -- canonical dyadic rational (odd mantissa * 2^exp)
  Ball           -- midpoint/radius enclosure at a given working precision
  UnitPoint      -- a point of [0,1) with a certified circle-metric error
  pow_frac       -- frac(alpha^d) via binary exponentiation in ball arithmetic

Precision policy: required_precision() sizes the working mantissa from the
degree, an upper bound on alpha, the target tolerance and the planned number
of ball multiplications.  If the final enclosure is still wider than the
tolerance, the engine retries exactly once at doubled precision and then
raises IndeterminateFrac.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

try:
    from gmpy2 import mpz as _mpz
except ImportError:  # pragma: no cover - gmpy2 is a declared dependency
    def _mpz(x):
        return x


class PrecisionOverflow(Exception):
    """The requested computation exceeds the precision budget (bit count > 2^62)."""


class IndeterminateFrac(Exception):
    """A fractional part could not be certified to the requested tolerance.

    Raised after the single automatic precision doubling has been spent.
    `index` identifies the orbit position when raised from an orbit walk.
    """

    def __init__(self, message: str, index: int | None = None):
        super().__init__(message)
        self.index = index


# ---------------------------------------------------------------------------
# radius arithmetic: tiny outward-rounded dyadics (man * 2^exp, man < 2^32)
# ---------------------------------------------------------------------------

_RAD_BITS = 32
_R_ZERO = (0, 0)


def _r_norm(man: int, exp: int) -> tuple[int, int]:
    # round up to at most _RAD_BITS mantissa bits; stays an upper bound
    if man == 0:
        return _R_ZERO
    extra = man.bit_length() - _RAD_BITS
    if extra > 0:
        man = (man + (1 << extra) - 1) >> extra
        exp += extra
        if man.bit_length() > _RAD_BITS:
            man >>= 1
            exp += 1
    return (int(man), exp)


def _r_add(r1: tuple[int, int], r2: tuple[int, int]) -> tuple[int, int]:
    m1, e1 = r1
    m2, e2 = r2
    if m1 == 0:
        return r2
    if m2 == 0:
        return r1
    if e1 < e2:
        m1, e1, m2, e2 = m2, e2, m1, e1
    gap = e1 - e2
    if gap > 64:
        # addend is below one ulp of the larger term; absorb it outward
        return _r_norm(m1 + 1, e1)
    return _r_norm((m1 << gap) + m2, e2)


def _r_mul(r1: tuple[int, int], r2: tuple[int, int]) -> tuple[int, int]:
    m1, e1 = r1
    m2, e2 = r2
    if m1 == 0 or m2 == 0:
        return _R_ZERO
    return _r_norm(m1 * m2, e1 + e2)


def _r_leq(r: tuple[int, int], bound: Fraction) -> bool:
    # exact comparison man*2^exp <= bound, bound a positive rational < 1
    man, exp = r
    if man == 0:
        return True
    if exp >= 0:
        return False  # radius >= 1 > bound
    return man * bound.denominator <= bound.numerator << (-exp)


def _r_float(r: tuple[int, int]) -> float:
    # float upper bound of the radius
    man, exp = r
    if man == 0:
        return 0.0
    try:
        f = math.ldexp(man, exp)
    except OverflowError:
        return math.inf
    if f == 0.0:
        return 5e-324
    if math.isinf(f):
        return f
    return math.nextafter(f, math.inf)


def _ceil_log2_inv(x: Fraction) -> int:
    """Smallest k >= 0 with 2^-k <= x, i.e. ceil(log2(1/x)) for 0 < x <= 1."""
    num, den = x.numerator, x.denominator
    k = max(0, den.bit_length() - num.bit_length())
    while (num << k) < den:
        k += 1
    while k > 0 and (num << (k - 1)) >= den:
        k -= 1
    return k


# ---------------------------------------------------------------------------
# exact dyadic rationals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExactReal:
    """Canonical dyadic rational num * 2^exp with num odd (or zero)."""

    num: int
    exp: int

    def __post_init__(self):
        if self.num == 0:
            if self.exp != 0:
                raise ValueError("zero must be canonical (exp == 0)")
        elif not self.num % 2:
            raise ValueError("mantissa must be odd in canonical form")

    @classmethod
    def from_fraction(cls, value: Fraction) -> "ExactReal":
        num, den = value.numerator, value.denominator
        if den & (den - 1):
            raise ValueError("not a dyadic rational: denominator %d" % den)
        exp = -(den.bit_length() - 1)
        return cls._canon(num, exp)

    @classmethod
    def from_float(cls, value: float) -> "ExactReal":
        if not math.isfinite(value):
            raise ValueError("not finite: %r" % value)
        num, den = value.as_integer_ratio()
        return cls._canon(num, -(den.bit_length() - 1))

    @classmethod
    def _canon(cls, num: int, exp: int) -> "ExactReal":
        if num == 0:
            return cls(0, 0)
        tz = (num & -num).bit_length() - 1
        return cls(num >> tz, exp + tz)

    def as_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(self.num << self.exp)
        return Fraction(self.num, 1 << -self.exp)

    def __float__(self) -> float:
        try:
            return math.ldexp(self.num, self.exp)
        except OverflowError:
            return math.inf if self.num > 0 else -math.inf

    def upper_float(self) -> float:
        """A float strictly above the exact value (used only inside logarithms)."""
        f = float(self)
        return math.nextafter(f, math.inf)

    @property
    def mantissa_bits(self) -> int:
        return self.num.bit_length()


def parse_alpha(text: str, bits: int) -> ExactReal:
    """Parse a decimal literal to the nearest dyadic on a 2^-bits grid.

    Ties round to even.  The parsed value is the object of study from then on:
    every downstream quantity is exact or certified relative to it.  Rejects
    values that are <= 1 before or after rounding, and bits < 8.
    """
    if bits < 8:
        raise ValueError("bits must be >= 8, got %d" % bits)
    try:
        x = Fraction(text)
    except (ValueError, ZeroDivisionError) as e:
        raise ValueError("not a decimal literal: %r" % text) from e
    if x <= 1:
        raise ValueError("alpha must exceed 1, got %s" % text)
    scaled = round(x * (1 << bits))
    value = Fraction(scaled, 1 << bits)
    if value <= 1:
        raise ValueError("alpha rounds to a value <= 1 at %d bits" % bits)
    return ExactReal.from_fraction(value)


def required_precision(d: int, alpha_upper, delta, mults: int) -> int:
    """Working mantissa bits for frac(alpha^d) to absolute tolerance delta.

    ceil(d*log2(alpha_upper)) covers the integer part, ceil(log2(1/delta)) the
    target resolution, ceil(log2(mults+1)) the accumulated per-multiplication
    rounding, plus 16 guard bits.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    if mults < 0:
        raise ValueError("mults must be >= 0")
    au = float(alpha_upper)
    if not au > 1.0:
        raise ValueError("alpha_upper must exceed 1")
    delta_f = Fraction(delta)
    if not 0 < delta_f < 1:
        raise ValueError("delta must lie in (0, 1)")
    magnitude = d * math.log2(au)
    if magnitude > 2.0**62:
        raise PrecisionOverflow(
            "degree %d at alpha_upper %g needs %g mantissa bits" % (d, au, magnitude)
        )
    return (
        math.ceil(magnitude)
        + _ceil_log2_inv(delta_f)
        + mults.bit_length()
        + 16
    )


# ---------------------------------------------------------------------------
# ball arithmetic
# ---------------------------------------------------------------------------


class Ball:
    """Enclosure: true value lies in [man*2^exp - rad, man*2^exp + rad]."""

    __slots__ = ("man", "exp", "rad")

    def __init__(self, man, exp: int, rad: tuple[int, int] = _R_ZERO):
        self.man = _mpz(man)
        self.exp = exp
        self.rad = rad

    @classmethod
    def from_exact(cls, x: ExactReal) -> "Ball":
        return cls(x.num, x.exp)

    def magnitude_upper(self) -> tuple[int, int]:
        return _r_norm(int(abs(self.man)), self.exp)

    def midpoint_fraction(self) -> Fraction:
        if self.exp >= 0:
            return Fraction(int(self.man) << self.exp)
        return Fraction(int(self.man), 1 << -self.exp)

    def __repr__(self):  # pragma: no cover - debugging aid
        return "Ball(%s bits, exp=%d, rad=%s)" % (
            self.man.bit_length(), self.exp, self.rad,
        )


def _round_mantissa(man, exp: int, prec: int):
    """Round-half-even to <= prec bits; returns (man, exp, error_exponent|None)."""
    neg = man < 0
    a = -man if neg else man
    bl = a.bit_length()
    if bl <= prec:
        return man, exp, None
    sh = bl - prec
    rem = a & ((1 << sh) - 1)
    a >>= sh
    if rem == 0:
        err_exp = None  # dropped bits were zero: the shift is exact
    else:
        half = 1 << (sh - 1)
        if rem > half or (rem == half and (a & 1)):
            a += 1
        err_exp = exp + sh - 1
    exp += sh
    if a and not (a & 1):
        tz = (a & -a).bit_length() - 1
        a >>= tz
        exp += tz
    return (-a if neg else a), exp, err_exp


def ball_mul(x: Ball, y: Ball, prec: int) -> Ball:
    man = x.man * y.man
    exp = x.exp + y.exp
    rad = _R_ZERO
    if x.rad[0] or y.rad[0]:
        rad = _r_add(_r_mul(x.magnitude_upper(), y.rad),
                     _r_mul(y.magnitude_upper(), x.rad))
        rad = _r_add(rad, _r_mul(x.rad, y.rad))
    man, exp, err = _round_mantissa(man, exp, prec)
    if err is not None:
        rad = _r_add(rad, (1, err))
    return Ball(man, exp, rad)


def ball_pow(base: Ball, d: int, prec: int) -> Ball:
    """base^d by square-and-multiply, most significant bit first (pinned order)."""
    if d < 0:
        raise ValueError("exponent must be >= 0")
    if d == 0:
        return Ball(1, 0)
    result = base
    for i in range(d.bit_length() - 2, -1, -1):
        result = ball_mul(result, result, prec)
        if (d >> i) & 1:
            result = ball_mul(result, base, prec)
    return result


def ball_sub_int(x: Ball, k: int, prec: int) -> Ball:
    if x.exp <= 0:
        man = x.man - (_mpz(k) << -x.exp)
        exp = x.exp
    else:
        man = (x.man << x.exp) - k
        exp = 0
    rad = x.rad
    man, exp, err = _round_mantissa(man, exp, prec)
    if err is not None:
        rad = _r_add(rad, (1, err))
    return Ball(man, exp, rad)


def ball_div_exact(x: Ball, y: ExactReal, prec: int) -> Ball:
    """Divide an enclosure by an exact positive dyadic."""
    if y.num <= 0:
        raise ValueError("divisor must be positive")
    ynum = _mpz(y.num)
    if x.man == 0:
        q, qexp = _mpz(0), 0
        trunc = _R_ZERO
    else:
        sh = max(0, prec + 2 - x.man.bit_length() + ynum.bit_length())
        q, rem = divmod(x.man << sh, ynum)
        qexp = x.exp - y.exp - sh
        trunc = _R_ZERO if rem == 0 else (1, qexp)
    rad = trunc
    if x.rad[0]:
        # upper bound of 1/y
        t = ynum.bit_length() + _RAD_BITS + 2
        inv = ((1 << t) // ynum) + 1
        rad = _r_add(rad, _r_mul(x.rad, _r_norm(int(inv), -t - y.exp)))
    man, exp, err = _round_mantissa(q, qexp, prec)
    if err is not None:
        rad = _r_add(rad, (1, err))
    return Ball(man, exp, rad)


# ---------------------------------------------------------------------------
# points of the unit interval
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnitPoint:
    """A point of [0,1) with a certified absolute error bound (circle metric)."""

    value: Fraction
    error: float = 0.0

    def __post_init__(self):
        if not 0 <= self.value < 1:
            raise ValueError("value must lie in [0,1), got %s" % self.value)
        if not self.error >= 0:
            raise ValueError("error must be >= 0")

    def __float__(self) -> float:
        return float(self.value)


def circle_dist(x, y) -> Fraction:
    """Distance to the nearest integer of x - y, exact."""
    d = abs(Fraction(x) - Fraction(y)) % 1
    return min(d, 1 - d)


def _keep_bits(delta: Fraction) -> int:
    return max(64, _ceil_log2_inv(delta) + 32)


def frac_point(ball: Ball, delta) -> UnitPoint:
    """Extract frac(value) from an enclosure, certified to delta.

    Raises IndeterminateFrac when the enclosure is too wide to pin the
    fractional part to the tolerance.  The stored value keeps only enough
    fractional bits for the tolerance plus slack; the truncation is folded
    into the reported error.
    """
    delta_f = Fraction(delta)
    if ball.man < 0:
        raise ValueError("fractional-part extraction expects a nonnegative value")
    rad = ball.rad
    if ball.exp >= 0:
        value = Fraction(0)
    else:
        fbits = -ball.exp
        fman = ball.man & ((1 << fbits) - 1)
        keep = _keep_bits(delta_f)
        if fbits > keep:
            fman >>= fbits - keep
            fbits = keep
            rad = _r_add(rad, (1, -keep))
        value = Fraction(int(fman), 1 << fbits)
    if not _r_leq(rad, delta_f):
        raise IndeterminateFrac(
            "enclosure radius %s exceeds tolerance %s" % (_r_float(rad), float(delta_f))
        )
    err = _r_float(rad)
    if Fraction(err) > delta_f:
        # the outward float nudge overshot the (already verified) bound
        err = float(delta_f)
    return UnitPoint(value, err)


def pow_frac(alpha: ExactReal, d: int, delta) -> UnitPoint:
    """frac(alpha^d) with certified error <= delta.

    Binary exponentiation in ball arithmetic at required_precision bits; one
    automatic retry at doubled precision before IndeterminateFrac.
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    delta_f = Fraction(delta)
    if not 0 < delta_f < Fraction(1, 4):
        raise ValueError("delta must lie in (0, 1/4)")
    if alpha.as_fraction() <= 1:
        raise ValueError("alpha must exceed 1")
    mults = 2 * d.bit_length()
    prec = required_precision(d, alpha.upper_float(), delta_f, mults)
    base = Ball.from_exact(alpha)
    try:
        return frac_point(ball_pow(base, d, prec), delta)
    except IndeterminateFrac:
        return frac_point(ball_pow(base, d, 2 * prec), delta)
