"""Machine checks of the five growth conditions for a family on [a, b].

The conditions live on the degree sequence d_n and the differences
f_{n2} - f_{n1}: (1) strictly increasing degrees, (2) increasing convex
differences, (3) a derivative lower bound with constant c_ab > 0, (4) a
two-sided value bound with constant C_ab > 1, and (5) a growth inequality
that must hold for all n2 > n1 once n1 >= N1.

Verdicts are honest about their evidence.  `holds` requires a closed-form
certificate, `sampled-holds` records the grid or search bound that was
actually exercised, `fails` always carries a replayable witness, and
`skipped` marks conditions that do not apply (constant-degree families).
All logarithms are natural; the condition-(5) comparison is base-invariant
because every term on both sides is a logarithm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from ppclab.families import (
    FamilyError,
    SequenceFamily,
    degree,
    derivative_over_lead,
    diff_derivative,
    diff_over_lead,
    diff_value,
)

HOLDS = "holds"
FAILS = "fails"
SAMPLED = "sampled-holds"
SKIPPED = "skipped"

# families whose differences are plain two-term monomial differences,
# increasing and convex on (1, inf) by inspection of the derivatives
_CLOSED_FORM_CONVEX = ("monomial", "factorial", "linpow")


@dataclass(frozen=True)
class IntervalSpec:
    a: Fraction
    b: Fraction

    def __post_init__(self):
        object.__setattr__(self, "a", Fraction(self.a))
        object.__setattr__(self, "b", Fraction(self.b))
        if not 1 < self.a < self.b:
            raise ValueError("need 1 < a < b, got [%s, %s]" % (self.a, self.b))


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: dict | None = None


class ConditionFailed(ValueError):
    """A sampled condition produced a concrete counterexample."""

    def __init__(self, message: str, witness: dict):
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class N1Result:
    N1: int | None
    tail_certified: bool
    note: str
    witness: dict | None
    n1_search_max: int
    n2_verify_max: int


@dataclass(frozen=True)
class HypothesisReport:
    family: SequenceFamily
    interval: IntervalSpec
    conditions: tuple[Verdict, Verdict, Verdict, Verdict, Verdict]
    c_ab: float | None
    C_ab: float | None
    N1: int | None
    n_max: int
    grid_size: int
    n1_search_max: int
    n2_verify_max: int


def _grid(interval: IntervalSpec, grid_size: int) -> list[Fraction]:
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    step = (interval.b - interval.a) / (grid_size - 1)
    return [interval.a + i * step for i in range(grid_size)]


def check_condition1(family: SequenceFamily, n_max: int) -> Verdict:
    """Degrees strictly increase up to n_max."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    if family.kind == "kronecker":
        return Verdict(FAILS, {"reason": "deg(f_n) = 1 for all n"})
    prev = degree(family, 1)
    for n in range(2, n_max + 1):
        cur = degree(family, n)
        if not prev < cur:
            return Verdict(FAILS, {"n": n - 1, "d_n": prev, "d_next": cur})
        prev = cur
    return Verdict(HOLDS)


def check_condition2(family: SequenceFamily, interval: IntervalSpec,
                     n_max: int, grid_size: int) -> Verdict:
    """Differences strictly increasing and convex on [a, b]."""
    if grid_size < 3:
        raise ValueError("grid_size must be >= 3")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    if family.kind == "kronecker":
        return Verdict(SKIPPED, {"reason": "constant degrees, nothing to check"})
    if family.kind in _CLOSED_FORM_CONVEX:
        return Verdict(HOLDS, {
            "certificate": "x^d2 - x^d1 with d2 > d1 >= 1 has positive first and "
                           "nonnegative second derivative on (1, inf)"
        })
    # geomsum: sample exactly on the grid in rational arithmetic
    xs = _grid(interval, grid_size)
    tol = Fraction(1, 10**30)
    for n1 in range(1, n_max):
        for n2 in range(n1 + 1, n_max + 1):
            vals = [diff_value(family, x, n1, n2) for x in xs]
            scale = max(abs(v) for v in vals)
            if scale == 0:
                scale = Fraction(1)
            for x in xs:
                der = diff_derivative(family, x, n1, n2)
                if der <= 0:
                    return Verdict(FAILS, {
                        "n1": n1, "n2": n2, "x": float(x),
                        "derivative": float(der),
                    })
            for i in range(1, len(vals) - 1):
                second = vals[i - 1] - 2 * vals[i] + vals[i + 1]
                if second < -tol * scale:
                    return Verdict(FAILS, {
                        "n1": n1, "n2": n2, "x": float(xs[i]),
                        "second_difference": float(second),
                    })
    return Verdict(SAMPLED, {"grid_size": grid_size, "n_max": n_max})


def estimate_constants(family: SequenceFamily, interval: IntervalSpec,
                       n_max: int, grid_size: int) -> tuple[float, float]:
    """(c_ab, C_ab): derivative lower bound and two-sided value bound.

    Monomial gets certified closed forms; other families are minimized and
    maximized over the grid with a 1% margin applied in the safe direction.
    """
    if family.kind == "kronecker":
        raise FamilyError("constants are undefined for constant-degree families")
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    a = float(interval.a)
    b = float(interval.b)
    if family.kind == "monomial":
        # ratio = 1 - alpha^(d1-d2) lies in [1 - 1/a, 1), so
        # C_ab = a/(a-1) and c_ab = (1 - 1/a)/b hold for every pair
        return (1.0 - 1.0 / a) / b, a / (a - 1.0)
    xs = [float(x) for x in _grid(interval, grid_size)]
    c_min = math.inf
    r_max = 1.0
    for n1 in range(1, n_max):
        for n2 in range(n1 + 1, n_max + 1):
            for x in xs:
                ratio = diff_over_lead(family, x, n1, n2)
                if ratio <= 0:
                    raise ConditionFailed("value ratio nonpositive", {
                        "bound": "value", "n1": n1, "n2": n2,
                        "x": x, "ratio": ratio,
                    })
                if ratio > r_max:
                    r_max = ratio
                if 1.0 / ratio > r_max:
                    r_max = 1.0 / ratio
                der = derivative_over_lead(family, x, n1, n2)
                if der <= 0:
                    raise ConditionFailed("derivative ratio nonpositive", {
                        "bound": "derivative", "n1": n1, "n2": n2,
                        "x": x, "ratio": der,
                    })
                if der < c_min:
                    c_min = der
    return c_min * 0.99, r_max * 1.01


def condition5_lhs(d1: int, d2: int, C: float, a: float) -> float:
    """(2*d2/d1 - 1)*ln C + (d1 - d2)*ln a - ln(d2*(d2/d1 - 1)).

    Compared against -3*ln(n2); the decision is the same in any log base.
    """
    if d1 < 1 or d2 <= d1:
        raise ValueError("need d2 > d1 >= 1, got (%s, %s)" % (d1, d2))
    if C <= 1:
        raise ValueError("C must exceed 1")
    if a <= 1:
        raise ValueError("a must exceed 1")
    growth = d2 / d1
    return ((2.0 * growth - 1.0) * math.log(C)
            + (d1 - d2) * math.log(a)
            - math.log(d2 * (growth - 1.0)))


def _scan_violations(family: SequenceFamily, C: float, a: float,
                     n2_verify_max: int) -> tuple[int, dict | None]:
    """Largest violating n1 (0 if none) and the worst-violation witness."""
    worst_gap = -math.inf
    witness = None
    last_bad = 0
    for n1 in range(1, n2_verify_max):
        d1 = degree(family, n1)
        for n2 in range(n1 + 1, n2_verify_max + 1):
            d2 = degree(family, n2)
            lhs = condition5_lhs(d1, d2, C, a)
            rhs = -3.0 * math.log(n2)
            if lhs > rhs:
                last_bad = n1
                if lhs - rhs > worst_gap:
                    worst_gap = lhs - rhs
                    witness = {"n1": n1, "n2": n2, "d1": d1, "d2": d2,
                               "lhs": lhs, "rhs": rhs, "C": C, "a": a}
    return last_bad, witness


def find_N1(family: SequenceFamily, interval: IntervalSpec, C: float,
            n1_search_max: int, n2_verify_max: int) -> N1Result:
    """Smallest N1 with no violation for N1 <= n1 < n2 <= n2_verify_max.

    For monomial (k >= 2) and factorial degrees, N1 is additionally pushed
    to the first index with d_{N1}*ln(a) >= 2*ln(C); past that point the
    negative linear-in-d2 term dominates every other term, which certifies
    all n2 beyond the verify bound.  Other families are only verified up to
    n2_verify_max and flagged as such.
    """
    if n1_search_max < 2 or n2_verify_max < 2:
        raise ValueError("search bounds must be >= 2")
    if family.kind == "kronecker":
        raise FamilyError("condition (5) is undefined for constant-degree families")
    a = float(interval.a)
    n2_max = n2_verify_max
    if family.kind == "factorial":
        # degree cap: factorial indices stop at 20
        n2_max = min(n2_max, 20)
    last_bad, witness = _scan_violations(family, C, a, n2_max)
    base = last_bad + 1
    if base > n1_search_max:
        return N1Result(None, False,
                        "violations persist past n1_search_max", witness,
                        n1_search_max, n2_max)
    certifiable = family.kind == "factorial" or (
        family.kind == "monomial" and family.k >= 2)
    if certifiable:
        need = 2.0 * math.log(C) / math.log(a)
        n1 = base
        while degree(family, n1) < need:
            n1 += 1
            if n1 > n1_search_max:
                return N1Result(None, False,
                                "no index with a certified tail within "
                                "n1_search_max", witness, n1_search_max, n2_max)
        return N1Result(n1, True,
                        "tail certified: d_N1*ln(a) >= 2*ln(C)", None,
                        n1_search_max, n2_max)
    return N1Result(base, False,
                    "verified up to n2 = %d only" % n2_max, None,
                    n1_search_max, n2_max)


def check_hypotheses(family: SequenceFamily, interval: IntervalSpec,
                     n_max: int = 8, grid_size: int = 64,
                     n1_search_max: int = 200,
                     n2_verify_max: int = 500) -> HypothesisReport:
    """Run all five condition checks and assemble the report."""
    v1 = check_condition1(family, max(2, n_max))
    if family.kind == "kronecker":
        skip = Verdict(SKIPPED, {"reason": "degree-growth conditions do not "
                                           "apply: deg(f_n) = 1 for all n"})
        return HypothesisReport(family, interval, (v1, skip, skip, skip, skip),
                                None, None, None, n_max, grid_size,
                                n1_search_max, n2_verify_max)
    v2 = check_condition2(family, interval, n_max, grid_size)
    try:
        c_ab, C_ab = estimate_constants(family, interval, n_max, grid_size)
    except ConditionFailed as exc:
        fails = Verdict(FAILS, exc.witness)
        skip = Verdict(SKIPPED, {"reason": "constants unavailable"})
        if exc.witness.get("bound") == "derivative":
            v3, v4 = fails, skip
        else:
            v3, v4 = skip, fails
        return HypothesisReport(family, interval, (v1, v2, v3, v4, skip),
                                None, None, None, n_max, grid_size,
                                n1_search_max, n2_verify_max)
    if family.kind == "monomial":
        cert = Verdict(HOLDS, {"certificate": "closed-form envelope "
                                              "1 - alpha^(d1-d2) in [1 - 1/a, 1)"})
        v3 = v4 = cert
    else:
        sampled = Verdict(SAMPLED, {"grid_size": grid_size, "n_max": n_max})
        v3 = v4 = sampled
    n1 = find_N1(family, interval, C_ab, n1_search_max, n2_verify_max)
    if n1.N1 is None:
        v5 = Verdict(FAILS, n1.witness)
    elif n1.tail_certified:
        v5 = Verdict(HOLDS, {"N1": n1.N1, "note": n1.note})
    else:
        v5 = Verdict(SAMPLED, {"N1": n1.N1, "note": n1.note})
    return HypothesisReport(family, interval, (v1, v2, v3, v4, v5),
                            c_ab, C_ab, n1.N1, n_max, grid_size,
                            n1_search_max, n2_verify_max)


def report_to_json(report: HypothesisReport) -> dict:
    """JSON form of the report, schema `hypothesis-report v1`."""
    conditions = []
    for v in report.conditions:
        entry: dict = {"status": v.status}
        if v.witness is not None:
            entry["witness"] = v.witness
        conditions.append(entry)
    return {
        "schema": "hypothesis-report v1",
        "family": report.family.spec(),
        "a": float(report.interval.a),
        "b": float(report.interval.b),
        "conditions": conditions,
        "c_ab": report.c_ab,
        "C_ab": report.C_ab,
        "N1": report.N1,
        "bounds": {
            "n_max": report.n_max,
            "grid_size": report.grid_size,
            "n1_search_max": report.n1_search_max,
            "n2_verify_max": report.n2_verify_max,
        },
    }


__all__ = [
    "FAILS",
    "HOLDS",
    "SAMPLED",
    "SKIPPED",
    "ConditionFailed",
    "HypothesisReport",
    "IntervalSpec",
    "N1Result",
    "Verdict",
    "check_condition1",
    "check_condition2",
    "check_hypotheses",
    "condition5_lhs",
    "estimate_constants",
    "find_N1",
    "report_to_json",
]
