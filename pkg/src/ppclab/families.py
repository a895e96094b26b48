"""Sequence families f_n and their certified fractional-part orbits.

Supported families (spec strings in parentheses):

  Monomial k     (monomial:k=<int>)   f_n(x) = x^(n^k)
  GeometricSum k (geomsum:k=<int>)    f_n(x) = 1 + x + ... + x^(n^k)
  Factorial      (factorial)          f_n(x) = x^(n!)         n <= 20
  LinearPower    (linpow)             f_n(x) = x^n            slow-growth control
  Kronecker      (kronecker)          f_n(x) = n*x            classical control

The orbit walk is incremental: the running power alpha^(d_n) advances by one
multiplication with alpha^(d_n - d_{n-1}), the gap power coming from binary
exponentiation on the small gap exponent.  All of it runs in ball arithmetic
at a precision sized for the largest degree and the planned multiplication
count, so every emitted point carries a certified error bound.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction

from ppclab.hpreal import (
    Ball,
    ExactReal,
    IndeterminateFrac,
    PrecisionOverflow,
    UnitPoint,
    _ceil_log2_inv,
    ball_div_exact,
    ball_mul,
    ball_pow,
    ball_sub_int,
    frac_point,
    pow_frac,
    required_precision,
)

_FACTORIAL_CAP = 20

_POWER_KINDS = ("monomial", "factorial", "linpow")
_KINDS_WITH_K = ("monomial", "geomsum")
_ALL_KINDS = ("monomial", "geomsum", "factorial", "linpow", "kronecker")


class FamilyError(ValueError):
    """The requested operation is undefined for this family."""


@dataclass(frozen=True)
class SequenceFamily:
    kind: str
    k: int | None = None

    def __post_init__(self):
        if self.kind not in _ALL_KINDS:
            raise FamilyError("unknown family kind %r" % self.kind)
        if self.kind in _KINDS_WITH_K:
            if not isinstance(self.k, int) or self.k < 1:
                raise FamilyError("%s requires integer k >= 1" % self.kind)
        elif self.k is not None:
            raise FamilyError("%s takes no exponent parameter" % self.kind)

    def spec(self) -> str:
        if self.kind in _KINDS_WITH_K:
            return "%s:k=%d" % (self.kind, self.k)
        return self.kind


_SPEC_RE = re.compile(r"(monomial|geomsum):k=([0-9]+)\Z")


def parse_family(spec: str) -> SequenceFamily:
    """Parse a family spec string.  Grammar is exact and case-sensitive."""
    if spec in ("factorial", "linpow", "kronecker"):
        return SequenceFamily(spec)
    m = _SPEC_RE.match(spec)
    if m:
        k = int(m.group(2))
        if k < 1:
            raise FamilyError("k must be >= 1 in %r" % spec)
        return SequenceFamily(m.group(1), k)
    raise FamilyError("unrecognized family spec %r" % spec)


def degree(family: SequenceFamily, n: int) -> int:
    """d_n for the family; n! is capped at n <= 20 (precision budget)."""
    if n < 1:
        raise ValueError("index must be >= 1, got %d" % n)
    if family.kind in ("monomial", "geomsum"):
        return n**family.k
    if family.kind == "factorial":
        if n > _FACTORIAL_CAP:
            raise PrecisionOverflow(
                "factorial degree rejected for n = %d (cap n <= %d)" % (n, _FACTORIAL_CAP)
            )
        return math.factorial(n)
    return n  # linpow, kronecker


@dataclass(frozen=True)
class Orbit:
    family: SequenceFamily
    alpha: ExactReal
    delta: Fraction
    points: tuple[UnitPoint, ...]

    def __len__(self) -> int:
        return len(self.points)


def _validate_delta(delta) -> Fraction:
    d = Fraction(delta)
    if not 0 < d < Fraction(1, 4):
        raise ValueError("delta must lie in (0, 1/4)")
    return d


def _geomsum_extra_bits(alpha: ExactReal) -> int:
    # dividing by alpha - 1 magnifies absolute error by 1/(alpha-1)
    am1 = alpha.as_fraction() - 1
    if am1 >= 1:
        return 4
    return _ceil_log2_inv(am1) + 4


def _kronecker_frac(alpha_frac: Fraction, n: int) -> Fraction:
    return (n * alpha_frac) % 1


def eval_frac(family: SequenceFamily, alpha: ExactReal, n: int, delta) -> UnitPoint:
    """frac(f_n(alpha)) with certified error <= delta (exact for Kronecker)."""
    delta_f = _validate_delta(delta)
    if n < 1:
        raise ValueError("index must be >= 1")
    if family.kind == "kronecker":
        return UnitPoint(_kronecker_frac(alpha.as_fraction(), n), 0.0)
    d = degree(family, n)
    if family.kind in _POWER_KINDS:
        return pow_frac(alpha, d, delta_f)
    # geometric sum: frac((alpha^(d+1) - 1)/(alpha - 1)), no mod-1 shortcut
    # exists before the division, so the full power is carried
    big = d + 1
    mults = 2 * big.bit_length() + 4
    prec = required_precision(big, alpha.upper_float(), delta_f, mults)
    prec += _geomsum_extra_bits(alpha)
    am1 = ExactReal.from_fraction(alpha.as_fraction() - 1)
    base = Ball.from_exact(alpha)
    last: IndeterminateFrac | None = None
    for p in (prec, 2 * prec):
        power = ball_pow(base, big, p)
        q = ball_div_exact(ball_sub_int(power, 1, p), am1, p)
        try:
            return frac_point(q, delta_f)
        except IndeterminateFrac as e:
            last = e
    raise last


def _orbit_exponents(family: SequenceFamily, N: int) -> list[int]:
    ds = [degree(family, n) for n in range(1, N + 1)]
    if family.kind == "geomsum":
        return [d + 1 for d in ds]
    return ds


def _walk(family: SequenceFamily, alpha: ExactReal, exps: list[int],
          prec: int, delta_f: Fraction) -> tuple[UnitPoint, ...]:
    am1 = None
    if family.kind == "geomsum":
        am1 = ExactReal.from_fraction(alpha.as_fraction() - 1)
    base = Ball.from_exact(alpha)
    running = Ball(1, 0)
    prev = 0
    out: list[UnitPoint] = []
    for i, e in enumerate(exps):
        gap = e - prev
        running = ball_mul(running, ball_pow(base, gap, prec), prec)
        prev = e
        if am1 is None:
            target = running
        else:
            target = ball_div_exact(ball_sub_int(running, 1, prec), am1, prec)
        try:
            out.append(frac_point(target, delta_f))
        except IndeterminateFrac as err:
            raise IndeterminateFrac(str(err), index=i + 1) from None
    return tuple(out)


def orbit(family: SequenceFamily, alpha: ExactReal, N: int, delta) -> Orbit:
    """First N fractional parts of the family at alpha, certified to delta.

    Single incremental pass: the running power is advanced by multiplying
    alpha^(d_n - d_{n-1}); precision is fixed upfront from the final degree
    and the total multiplication count, with one automatic doubling retry.
    """
    delta_f = _validate_delta(delta)
    if N < 1:
        raise ValueError("N must be >= 1")
    if family.kind == "kronecker":
        af = alpha.as_fraction()
        step = af % 1
        r = Fraction(0)
        pts = []
        for _ in range(N):
            r = (r + step) % 1
            pts.append(UnitPoint(r, 0.0))
        return Orbit(family, alpha, delta_f, tuple(pts))

    exps = _orbit_exponents(family, N)
    mults = 2  # the trailing subtraction/division rounding slack
    prev = 0
    for e in exps:
        mults += 2 * (e - prev).bit_length() + 1
        prev = e
    if family.kind == "geomsum":
        mults += 2 * N
    prec = required_precision(exps[-1], alpha.upper_float(), delta_f, mults)
    if family.kind == "geomsum":
        prec += _geomsum_extra_bits(alpha)

    try:
        return Orbit(family, alpha, delta_f, _walk(family, alpha, exps, prec, delta_f))
    except IndeterminateFrac:
        pass
    return Orbit(family, alpha, delta_f, _walk(family, alpha, exps, 2 * prec, delta_f))


# ---------------------------------------------------------------------------
# family differences f_{n2} - f_{n1}: raw values and stable scaled forms
# ---------------------------------------------------------------------------


def _check_pair(family: SequenceFamily, n1: int, n2: int) -> tuple[int, int]:
    if family.kind == "kronecker":
        raise FamilyError(
            "kronecker differences are degree-1 and degenerate for growth analysis"
        )
    if not 1 <= n1 < n2:
        raise ValueError("need 1 <= n1 < n2, got (%d, %d)" % (n1, n2))
    return degree(family, n1), degree(family, n2)


def diff_value(family: SequenceFamily, x, n1: int, n2: int):
    """(f_{n2} - f_{n1})(x).  Exact when x is a Fraction."""
    d1, d2 = _check_pair(family, n1, n2)
    if family.kind == "geomsum":
        return (x ** (d2 + 1) - x ** (d1 + 1)) / (x - 1)
    return x**d2 - x**d1


def diff_derivative(family: SequenceFamily, x, n1: int, n2: int):
    """(f_{n2} - f_{n1})'(x).  Exact when x is a Fraction."""
    d1, d2 = _check_pair(family, n1, n2)
    if family.kind == "geomsum":
        b1, b2 = d1 + 1, d2 + 1
        num = (b2 * x ** (b2 - 1) - b1 * x ** (b1 - 1)) * (x - 1) - (x**b2 - x**b1)
        return num / (x - 1) ** 2
    return d2 * x ** (d2 - 1) - d1 * x ** (d1 - 1)


def diff_over_lead(family: SequenceFamily, x: float, n1: int, n2: int) -> float:
    """(f_{n2} - f_{n1})(x) / x^(d_{n2}), stable at any degree."""
    d1, d2 = _check_pair(family, n1, n2)
    if family.kind == "geomsum":
        return (x - x ** (d1 + 1 - d2)) / (x - 1)
    return 1.0 - x ** (d1 - d2)


def derivative_over_lead(family: SequenceFamily, x: float, n1: int, n2: int) -> float:
    """(f_{n2} - f_{n1})'(x) / (d_{n2} * x^(d_{n2})), stable at any degree."""
    d1, d2 = _check_pair(family, n1, n2)
    if family.kind == "geomsum":
        b1, b2 = d1 + 1, d2 + 1
        num = (b2 - b1 * x ** (d1 - d2)) * (x - 1) - (x - x ** (d1 - d2 + 1))
        return num / (d2 * (x - 1) ** 2)
    return (1.0 - (d1 / d2) * x ** (d1 - d2)) / x
