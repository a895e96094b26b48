"""Pair correlations, discrepancy and gap statistics on circle point sets.

Counting is exact: point values are rationals, so every comparison against the
threshold s/N is decided by integer arithmetic on a common denominator
lattice.  The production counter is an O(N log N) sorted two-pointer sweep;
`naive_pair_count` keeps the O(N^2) enumeration available as an independent
audit route, and the two must agree exactly on every input.

A point set may also be serialized to the plain-text `ppc-points v1` format:

    # ppc-points v1 N=<int>
    <one decimal per line, 30 significant digits>

Extra `#` comment lines directly after the header are permitted (the CLI puts
the emitting config there) and are skipped by the reader.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from ppclab.families import Orbit, SequenceFamily, orbit
from ppclab.hpreal import ExactReal, UnitPoint


class TooBlurry(ValueError):
    """Point error bounds are too large for the requested pair threshold."""

    def __init__(self, max_error: float, bound: float):
        super().__init__(
            "max point error %.3g exceeds s/(100*N) = %.3g" % (max_error, bound)
        )
        self.max_error = max_error
        self.bound = bound


@dataclass(frozen=True)
class PairCorrelationResult:
    N: int
    s: float
    ordered_count: int
    statistic: float


@dataclass(frozen=True)
class DiscrepancyResult:
    N: int
    d_star: float


def _as_fraction_s(s) -> Fraction:
    s_frac = Fraction(s)
    if s_frac <= 0:
        raise ValueError("s must be positive")
    return s_frac


def _blur_guard(points: Sequence[UnitPoint], s_frac: Fraction, N: int) -> None:
    bound = s_frac / (100 * N)
    worst = 0.0
    for p in points:
        if p.error > worst:
            worst = p.error
    if Fraction(worst) > bound:
        raise TooBlurry(worst, float(bound))


def _lattice(points: Sequence[UnitPoint]) -> tuple[list[int], int]:
    # embed all values into Z/L for a common denominator L
    L = 1
    for p in points:
        L = math.lcm(L, p.value.denominator)
    return [p.value.numerator * (L // p.value.denominator) for p in points], L


def pair_count(points: Sequence[UnitPoint], s) -> PairCorrelationResult:
    """Ordered pairs (m != n) with circle distance <= s/N, ties included.

    Requires every point error <= s/(100*N) so point blur cannot move a pair
    across the threshold undetected at the reported resolution.
    """
    N = len(points)
    if N < 1:
        raise ValueError("points must be nonempty")
    s_frac = _as_fraction_s(s)
    _blur_guard(points, s_frac, N)
    if 2 * s_frac >= N:
        # threshold >= 1/2: the window covers the whole circle
        count = N * (N - 1)
    else:
        us, L = _lattice(points)
        us.sort()
        # d/L <= s/N  <=>  d <= floor(s*L/N) for integer d
        T = (s_frac.numerator * L) // (s_frac.denominator * N)
        count = _two_pointer_count(us, L, T)
    return PairCorrelationResult(N, float(s_frac), count, count / N)


def _two_pointer_count(us: list[int], L: int, T: int) -> int:
    N = len(us)
    z = [u - L for u in us] + us + [u + L for u in us]
    lo = 0
    hi = 0
    top = 3 * N
    total = 0
    for i in range(N, 2 * N):
        c = z[i]
        left = c - T
        right = c + T
        while z[lo] < left:
            lo += 1
        if hi < i:
            hi = i
        while hi + 1 < top and z[hi + 1] <= right:
            hi += 1
        total += hi - lo  # window size minus the center itself
    return total


def naive_pair_count(points: Sequence[UnitPoint], s) -> int:
    """O(N^2) reference count of the same ordered pairs, kept for audit."""
    N = len(points)
    if N < 1:
        raise ValueError("points must be nonempty")
    s_frac = _as_fraction_s(s)
    _blur_guard(points, s_frac, N)
    us, L = _lattice(points)
    T = (s_frac.numerator * L) // (s_frac.denominator * N)
    count = 0
    for i in range(N):
        ui = us[i]
        for j in range(i + 1, N):
            d = ui - us[j]
            if d < 0:
                d = -d
            if d > L - d:
                d = L - d
            if d <= T:
                count += 2
    return count


def ppc_curve(family: SequenceFamily, alpha: ExactReal, s, N_list: Sequence[int],
              delta) -> list[tuple[int, float]]:
    """Pair-correlation statistic along N_list from one orbit at max(N_list)."""
    if not N_list:
        raise ValueError("N_list must be nonempty")
    if any(n < 1 for n in N_list):
        raise ValueError("every N must be >= 1")
    s_frac = _as_fraction_s(s)
    n_max = max(N_list)
    if Fraction(delta) > s_frac / (100 * n_max):
        raise ValueError(
            "delta %s too coarse for the blur guard at N=%d (need <= s/(100*N))"
            % (delta, n_max)
        )
    orb = orbit(family, alpha, n_max, delta)
    return [(N, pair_count(orb.points[:N], s_frac).statistic) for N in N_list]


def star_discrepancy(points: Sequence[UnitPoint]) -> DiscrepancyResult:
    """D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N), computed exactly."""
    N = len(points)
    if N < 1:
        raise ValueError("points must be nonempty")
    xs = sorted(p.value for p in points)
    best = Fraction(0)
    for i, x in enumerate(xs, start=1):
        hi = Fraction(i, N) - x
        lo = x - Fraction(i - 1, N)
        if hi > best:
            best = hi
        if lo > best:
            best = lo
    return DiscrepancyResult(N, float(best))


def gap_spectrum(points: Sequence[UnitPoint]) -> list[Fraction]:
    """Sorted circular gaps between consecutive points; sums to 1 exactly."""
    N = len(points)
    if N < 1:
        raise ValueError("points must be nonempty")
    xs = sorted(p.value for p in points)
    gaps = [b - a for a, b in zip(xs, xs[1:])]
    gaps.append(1 - xs[-1] + xs[0])
    gaps.sort()
    return gaps


# ---------------------------------------------------------------------------
# point-set files
# ---------------------------------------------------------------------------

_HEADER_RE = re.compile(r"# ppc-points v1 N=([0-9]+)\Z")


def format_point(value: Fraction) -> str:
    """Decimal form with 30 significant digits (exact when it fits)."""
    with localcontext() as ctx:
        ctx.prec = 30
        d = Decimal(value.numerator) / Decimal(value.denominator)
        # strip trailing zeros so parse/re-serialize is byte-stable
        return str(d.normalize())


def points_text(points: Sequence[UnitPoint], comments: Iterable[str] = ()) -> str:
    lines = ["# ppc-points v1 N=%d" % len(points)]
    for c in comments:
        lines.append("# %s" % c)
    lines.extend(format_point(p.value) for p in points)
    return "\n".join(lines) + "\n"


def write_points(path, points: Sequence[UnitPoint], comments: Iterable[str] = ()) -> None:
    Path(path).write_text(points_text(points, comments), encoding="ascii")


def read_points(path) -> list[UnitPoint]:
    """Parse a ppc-points v1 file; values are exact decimals with error 0."""
    lines = Path(path).read_text(encoding="ascii").splitlines()
    if not lines:
        raise ValueError("empty point file")
    m = _HEADER_RE.match(lines[0])
    if not m:
        raise ValueError("missing 'ppc-points v1' header: %r" % lines[0][:60])
    n_declared = int(m.group(1))
    points: list[UnitPoint] = []
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("#"):
            continue
        value = Fraction(line.strip())
        if not 0 <= value < 1:
            raise ValueError("point outside [0,1): %s" % line.strip())
        points.append(UnitPoint(value, 0.0))
    if len(points) != n_declared:
        raise ValueError(
            "header declares N=%d but file holds %d points" % (n_declared, len(points))
        )
    return points


__all__ = [
    "DiscrepancyResult",
    "PairCorrelationResult",
    "TooBlurry",
    "format_point",
    "gap_spectrum",
    "naive_pair_count",
    "pair_count",
    "points_text",
    "ppc_curve",
    "read_points",
    "star_discrepancy",
    "write_points",
]
