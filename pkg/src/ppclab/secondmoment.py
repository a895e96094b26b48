"""Quadrature estimates of V(N) = integral over [a,b] of (R2(s,N,alpha) - 2s)^2.

Each quadrature node is an exact rational alpha; the per-node statistic comes
from one certified orbit at the largest requested N, with smaller N read off
the orbit prefix.  Nodes are independent, so they form the unit of
parallelism; the reduction always runs in ascending node order, which makes
the result identical for any thread count.

The random mode draws nodes with SplitMix64 so runs are reproducible across
machines and languages from the 64-bit seed alone.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from ppclab.families import SequenceFamily, orbit
from ppclab.hpreal import ExactReal, IndeterminateFrac, PrecisionOverflow, parse_alpha
from ppclab.hypothesis import IntervalSpec
from ppclab.paircorr import pair_count

_MASK64 = (1 << 64) - 1
_ALPHA_BITS = 128


def splitmix64_stream(seed: int, count: int) -> list[int]:
    """First `count` outputs of SplitMix64 seeded with `seed`."""
    if not 0 <= seed <= _MASK64:
        raise ValueError("seed must be a 64-bit unsigned integer")
    out = []
    state = seed
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1DE43E21) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        out.append(z ^ (z >> 31))
    return out


@dataclass(frozen=True)
class QuadratureSpec:
    mode: str
    K: int
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("midpoint", "random"):
            raise ValueError("mode must be 'midpoint' or 'random'")
        if self.K < 2:
            raise ValueError("need at least 2 nodes")
        if not 0 <= self.seed <= _MASK64:
            raise ValueError("seed must be a 64-bit unsigned integer")


@dataclass(frozen=True)
class SecondMomentSeries:
    family: SequenceFamily
    interval: IntervalSpec
    s: Fraction
    quad: QuadratureSpec
    delta: Fraction
    entries: tuple[tuple[int, float, tuple[float, ...]], ...]
    fitted_exponent: float | None
    fitted_log_constant: float | None


def quadrature_nodes(interval: IntervalSpec, quad: QuadratureSpec) -> list[Fraction]:
    """Exact rational node positions in [a, b], in evaluation order."""
    width = interval.b - interval.a
    if quad.mode == "midpoint":
        return [interval.a + width * Fraction(2 * i + 1, 2 * quad.K)
                for i in range(quad.K)]
    draws = splitmix64_stream(quad.seed, quad.K)
    return [interval.a + width * Fraction(z >> 11, 1 << 53) for z in draws]


def default_delta(s, n_max: int) -> Fraction:
    """Point tolerance: fine enough for the blur guard with headroom."""
    return min(Fraction(1, 2**40), Fraction(s) / (200 * n_max))


def _node_stats(args) -> list[float]:
    family, alpha, n_list, s, delta = args
    orb = orbit(family, alpha, n_list[-1], delta)
    return [pair_count(orb.points[:n], s).statistic for n in n_list]


def _run_nodes(family: SequenceFamily, alphas: Sequence[ExactReal],
               n_list: Sequence[int], s: Fraction, delta: Fraction,
               threads: int) -> list[list[float]]:
    jobs = [(family, alpha, list(n_list), s, delta) for alpha in alphas]
    columns: list[list[float]] = []
    if threads <= 1:
        for i, job in enumerate(jobs):
            try:
                columns.append(_node_stats(job))
            except (IndeterminateFrac, PrecisionOverflow) as exc:
                raise type(exc)("node %d: %s" % (i, exc)) from exc
        return columns
    with ProcessPoolExecutor(max_workers=threads) as pool:
        futures = [pool.submit(_node_stats, job) for job in jobs]
        for i, fut in enumerate(futures):
            try:
                columns.append(fut.result())
            except (IndeterminateFrac, PrecisionOverflow) as exc:
                raise type(exc)("node %d: %s" % (i, exc)) from exc
    return columns


def _alphas_for(interval: IntervalSpec, quad: QuadratureSpec) -> list[ExactReal]:
    return [parse_alpha(str(node), _ALPHA_BITS)
            for node in quadrature_nodes(interval, quad)]


def second_moment_series(family: SequenceFamily, interval: IntervalSpec, s,
                         N_list: Sequence[int], quad: QuadratureSpec,
                         delta=None, threads: int = 1) -> SecondMomentSeries:
    """V(N) along N_list; one orbit per node at max(N), prefixes for smaller N."""
    if not N_list:
        raise ValueError("N_list must be nonempty")
    if any(n < 1 for n in N_list):
        raise ValueError("every N must be >= 1")
    s_frac = Fraction(s)
    if s_frac <= 0:
        raise ValueError("s must be positive")
    n_sorted = sorted(set(int(n) for n in N_list))
    n_max = n_sorted[-1]
    if delta is None:
        delta = default_delta(s_frac, n_max)
    delta_frac = Fraction(delta)
    if delta_frac > s_frac / (100 * n_max):
        raise ValueError("delta too coarse for the blur guard at N=%d" % n_max)
    alphas = _alphas_for(interval, quad)
    columns = _run_nodes(family, alphas, n_sorted, s_frac, delta_frac, threads)
    width = float(interval.b - interval.a)
    two_s = 2.0 * float(s_frac)
    entries = []
    for j, n in enumerate(n_sorted):
        node_values = tuple(columns[i][j] for i in range(quad.K))
        v = width / quad.K * sum((stat - two_s) ** 2 for stat in node_values)
        entries.append((n, v, node_values))
    exponent = None
    log_constant = None
    if len(entries) >= 3 and all(v > 0 for _, v, _ in entries):
        exponent, log_constant = decay_fit([(n, v) for n, v, _ in entries])
    return SecondMomentSeries(family, interval, s_frac, quad, delta_frac,
                              tuple(entries), exponent, log_constant)


def variance_at(family: SequenceFamily, interval: IntervalSpec, s, N: int,
                quad: QuadratureSpec, delta=None,
                threads: int = 1) -> tuple[float, tuple[float, ...]]:
    """Single-N variance estimate plus the per-node statistics for audit."""
    series = second_moment_series(family, interval, s, [N], quad,
                                  delta=delta, threads=threads)
    _, v, node_values = series.entries[0]
    return v, node_values


def decay_fit(entries: Sequence[tuple[int, float]]) -> tuple[float, float]:
    """OLS slope and intercept of log V against log N."""
    if len(entries) < 3:
        raise ValueError("need at least 3 entries to fit")
    xs = []
    ys = []
    for i, (n, v) in enumerate(entries):
        if v <= 0:
            raise ValueError("nonpositive V at index %d" % i)
        xs.append(math.log(n))
        ys.append(math.log(v))
    x_bar = sum(xs) / len(xs)
    y_bar = sum(ys) / len(ys)
    sxx = sum((x - x_bar) ** 2 for x in xs)
    if sxx == 0:
        raise ValueError("need at least two distinct N values")
    sxy = sum((x - x_bar) * (y - y_bar) for x, y in zip(xs, ys))
    slope = sxy / sxx
    return slope, y_bar - slope * x_bar


def series_to_csv(series: SecondMomentSeries) -> str:
    """CSV with exact header `N,V,K,mode,seed,s,a,b,family`."""
    lines = ["N,V,K,mode,seed,s,a,b,family"]
    for n, v, _ in series.entries:
        lines.append("%d,%r,%d,%s,%d,%r,%r,%r,%s" % (
            n, v, series.quad.K, series.quad.mode, series.quad.seed,
            float(series.s), float(series.interval.a),
            float(series.interval.b), series.family.spec()))
    return "\n".join(lines) + "\n"


def series_to_json(series: SecondMomentSeries) -> dict:
    """JSON form of the series, schema `second-moment v1`."""
    return {
        "schema": "second-moment v1",
        "family": series.family.spec(),
        "a": float(series.interval.a),
        "b": float(series.interval.b),
        "s": float(series.s),
        "delta": float(series.delta),
        "K": series.quad.K,
        "mode": series.quad.mode,
        "seed": series.quad.seed,
        "entries": [
            {"N": n, "V": v, "node_values": list(vals)}
            for n, v, vals in series.entries
        ],
        "fitted_exponent": series.fitted_exponent,
        "fitted_log_constant": series.fitted_log_constant,
    }


__all__ = [
    "QuadratureSpec",
    "SecondMomentSeries",
    "decay_fit",
    "default_delta",
    "quadrature_nodes",
    "second_moment_series",
    "series_to_csv",
    "series_to_json",
    "splitmix64_stream",
    "variance_at",
]
