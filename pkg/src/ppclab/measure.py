"""Level-set measure of {alpha in [a,b]: {g(alpha)} in I} for monotone convex g.

The measure is assembled per integer level M: the target interval shifted by
M is intersected with [g(a), g(b)] and pulled back through g by bisection.
All function values and comparisons are exact rationals, so the only error is
the final bisection bracket width, which is budgeted as tol/(levels+1) per
endpoint.  The same machinery produces the per-level preimage intervals whose
left endpoints drive the second-moment analysis.

Degrees are capped through the level count (about g(b) levels), so the exact
route is a desk-scale instrument; large-degree behavior is reached through
the residual-decay trend instead of ever-larger direct computations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ppclab.families import SequenceFamily, diff_derivative, diff_value
from ppclab.hypothesis import IntervalSpec

_LEVEL_CAP = 10**6
_MAX_TOL = Fraction(1, 10**6)


class LevelCapExceeded(ValueError):
    """The level count exceeds the exact-measure budget."""


class NonMonotone(ValueError):
    """g failed an increasing-values bracket check on [a, b]."""


@dataclass(frozen=True)
class CircleInterval:
    """arc [c,d] in [0,1], or wrap [c,1) u [0,d] when crossing zero."""

    c: Fraction
    d: Fraction
    wraps: bool

    def __post_init__(self):
        object.__setattr__(self, "c", Fraction(self.c))
        object.__setattr__(self, "d", Fraction(self.d))
        if self.wraps:
            if not 0 <= self.d < self.c < 1:
                raise ValueError("wrap needs 0 <= d < c < 1")
        else:
            if not 0 <= self.c < self.d <= 1:
                raise ValueError("arc needs 0 <= c < d <= 1")

    @classmethod
    def arc(cls, c, d) -> "CircleInterval":
        return cls(Fraction(c), Fraction(d), False)

    @classmethod
    def wrap(cls, c, d) -> "CircleInterval":
        return cls(Fraction(c), Fraction(d), True)

    @property
    def length(self) -> Fraction:
        if self.wraps:
            return 1 - self.c + self.d
        return self.d - self.c

    def contains(self, x) -> bool:
        x = Fraction(x)
        if self.wraps:
            return x >= self.c or x <= self.d
        return self.c <= x <= self.d

    def pieces(self) -> list[tuple[Fraction, Fraction]]:
        """Plain subintervals of [0,1] covering the set."""
        if self.wraps:
            return [(self.c, Fraction(1)), (Fraction(0), self.d)]
        return [(self.c, self.d)]


@dataclass(frozen=True)
class PreimageInterval:
    M: int
    left: float
    right: float
    tolerance: float


@dataclass(frozen=True)
class MeasureResult:
    measure: float
    intervals: tuple[PreimageInterval, ...]
    main_term: float
    residual: float
    derivative_at_a: float
    tolerance: float


@dataclass(frozen=True)
class LemmaBounds:
    lower_main: float
    upper_main: float
    residual_scaled: float


@dataclass(frozen=True)
class PowerMap:
    """g(alpha) = alpha^d."""

    d: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError("exponent must be >= 1")

    def value(self, x: Fraction) -> Fraction:
        return Fraction(x) ** self.d

    def derivative(self, x: float) -> float:
        return self.d * x ** (self.d - 1)


@dataclass(frozen=True)
class DifferenceMap:
    """g = f_{n2} - f_{n1} for a sequence family."""

    family: SequenceFamily
    n1: int
    n2: int

    def value(self, x: Fraction) -> Fraction:
        return diff_value(self.family, Fraction(x), self.n1, self.n2)

    def derivative(self, x: float) -> float:
        return diff_derivative(self.family, x, self.n1, self.n2)


def _validate_tol(tol) -> Fraction:
    tol_frac = Fraction(tol)
    if not 0 < tol_frac <= _MAX_TOL:
        raise ValueError("tol must lie in (0, 1e-6]")
    return tol_frac


def _range_checks(g, interval: IntervalSpec) -> tuple[Fraction, Fraction]:
    ga = g.value(interval.a)
    gb = g.value(interval.b)
    mid = g.value((interval.a + interval.b) / 2)
    if not ga < mid < gb:
        raise NonMonotone("g is not increasing across [a, b]")
    return ga, gb


def _invert(g, lo: Fraction, hi: Fraction, y: Fraction, iters: int) -> Fraction:
    """Point x in [lo, hi] with |x - g^/-1(y)| <= (hi-lo) * 2^-(iters+1)."""
    for _ in range(iters):
        mid = (lo + hi) / 2
        if g.value(mid) < y:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def _iterations(interval: IntervalSpec, levels: int, tol: Fraction) -> int:
    width = interval.b - interval.a
    need = width * (levels + 1) / tol
    return max(60, math.ceil(math.log2(need)))


def _band_preimage(g, interval: IntervalSpec, ga: Fraction, gb: Fraction,
                   ylo: Fraction, yhi: Fraction,
                   iters: int) -> tuple[Fraction, Fraction] | None:
    lo = max(ylo, ga)
    hi = min(yhi, gb)
    if lo > hi:
        return None
    x_lo = interval.a if lo <= ga else _invert(g, interval.a, interval.b, lo, iters)
    x_hi = interval.b if hi >= gb else _invert(g, interval.a, interval.b, hi, iters)
    if x_hi < x_lo:
        # bisection jitter on a near-degenerate band
        x_hi = x_lo
    return x_lo, x_hi


def level_set_measure(g, interval: IntervalSpec, target: CircleInterval,
                      tol) -> MeasureResult:
    """Lebesgue measure of {alpha: fractional part of g(alpha) in target}."""
    tol_frac = _validate_tol(tol)
    ga, gb = _range_checks(g, interval)
    m_lo = math.floor(ga)
    m_hi = math.ceil(gb)
    levels = m_hi - m_lo
    if levels > _LEVEL_CAP:
        raise LevelCapExceeded(
            "level count %d exceeds cap %d; use the statistic route for "
            "large degrees" % (levels, _LEVEL_CAP)
        )
    iters = _iterations(interval, levels, tol_frac)
    atol = float(tol_frac / (levels + 1))
    intervals: list[PreimageInterval] = []
    total = Fraction(0)
    for M in range(m_lo, m_hi + 1):
        for c, d in target.pieces():
            got = _band_preimage(g, interval, ga, gb, M + c, M + d, iters)
            if got is None:
                continue
            x_lo, x_hi = got
            total += x_hi - x_lo
            intervals.append(PreimageInterval(M, float(x_lo), float(x_hi), atol))
    width = interval.b - interval.a
    if total > width:
        total = width
    main_term = float(target.length * width)
    measure = float(total)
    return MeasureResult(
        measure=measure,
        intervals=tuple(intervals),
        main_term=main_term,
        residual=measure - main_term,
        derivative_at_a=g.derivative(float(interval.a)),
        tolerance=float(tol_frac),
    )


def lemma_bounds_check(result: MeasureResult, target: CircleInterval) -> LemmaBounds:
    """Two-sided main-term bounds and the scaled residual they control."""
    L = float(target.length)
    width = result.main_term / L
    lower = L * width / (1.0 + L)
    upper = math.inf if L >= 1 else L * width / (1.0 - L)
    scaled = abs(result.residual) * result.derivative_at_a / L
    return LemmaBounds(lower, upper, scaled)


def preimage_intervals(g, interval: IntervalSpec, level_halfwidth,
                       tol=Fraction(1, 10**9)) -> list[PreimageInterval]:
    """One interval per integer level M with |g(alpha) - M| <= halfwidth."""
    half = Fraction(level_halfwidth)
    if not 0 <= half <= Fraction(1, 2):
        raise ValueError("level_halfwidth must lie in [0, 1/2]")
    tol_frac = _validate_tol(tol)
    ga, gb = _range_checks(g, interval)
    if math.ceil(gb) - math.floor(ga) > _LEVEL_CAP:
        raise LevelCapExceeded(
            "level count exceeds cap %d" % _LEVEL_CAP
        )
    m_first = math.ceil(ga - half)
    m_last = math.floor(gb + half)
    levels = max(m_last - m_first, 0)
    iters = _iterations(interval, levels, tol_frac)
    atol = float(tol_frac / (levels + 1))
    out: list[PreimageInterval] = []
    for M in range(m_first, m_last + 1):
        got = _band_preimage(g, interval, ga, gb, M - half, M + half, iters)
        if got is None:
            continue
        x_lo, x_hi = got
        out.append(PreimageInterval(M, float(x_lo), float(x_hi), atol))
    return out


def measure_to_json(result: MeasureResult) -> dict:
    """JSON form of a MeasureResult, schema `measure-result v1`."""
    return {
        "schema": "measure-result v1",
        "measure": result.measure,
        "main_term": result.main_term,
        "residual": result.residual,
        "derivative_at_a": result.derivative_at_a,
        "intervals": [
            {"M": iv.M, "left": iv.left, "right": iv.right}
            for iv in result.intervals
        ],
        "tol": result.tolerance,
    }


__all__ = [
    "CircleInterval",
    "DifferenceMap",
    "LemmaBounds",
    "LevelCapExceeded",
    "MeasureResult",
    "NonMonotone",
    "PowerMap",
    "PreimageInterval",
    "lemma_bounds_check",
    "level_set_measure",
    "measure_to_json",
    "preimage_intervals",
]
