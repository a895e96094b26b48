"""Acceptance gate: one test per shipped guarantee, one printed line each.

Run with `pytest tests/test_acceptance.py -s` to see the per-criterion lines.
Statistical bands were calibrated by pilot runs with the seeds frozen here;
every test recomputes its quantity from scratch and asserts the band plus the
stated runtime budget.
"""

import math
import random
import statistics
import time
from fractions import Fraction

from ppclab.cli import main
from ppclab.families import orbit, parse_family
from ppclab.hpreal import UnitPoint, parse_alpha, pow_frac
from ppclab.hypothesis import (
    IntervalSpec,
    check_hypotheses,
    condition5_lhs,
)
from ppclab.measure import (
    CircleInterval,
    PowerMap,
    lemma_bounds_check,
    level_set_measure,
)
from ppclab.paircorr import (
    gap_spectrum,
    naive_pair_count,
    pair_count,
    ppc_curve,
    star_discrepancy,
)
from ppclab.secondmoment import (
    QuadratureSpec,
    decay_fit,
    second_moment_series,
    splitmix64_stream,
)

_SEED = 20260819
_DELTA40 = Fraction(1, 2**40)
_GOLDEN = "1.6180339887498948482045868343656381177"


def _report(num: int, ok: bool, detail: str) -> None:
    line = "[criterion %d] %s: %s" % (num, "PASS" if ok else "FAIL", detail)
    print(line)
    assert ok, line


def _seeded_alphas(count: int):
    """count alphas uniform on [1.5, 2] from the frozen SplitMix64 stream."""
    out = []
    for z in splitmix64_stream(_SEED, count):
        u = Fraction(z >> 11, 1 << 53)
        out.append(parse_alpha(str(Fraction(3, 2) + u * Fraction(1, 2)), 128))
    return out


def _ols_slope(points) -> float:
    xs = [float(x) for x, _ in points]
    ys = [float(y) for _, y in points]
    x_bar = sum(xs) / len(xs)
    y_bar = sum(ys) / len(ys)
    sxx = sum((x - x_bar) ** 2 for x in xs)
    sxy = sum((x - x_bar) * (y - y_bar) for x, y in zip(xs, ys))
    return sxy / sxx


def test_criterion_1_power_fractional_parts_match_rational_oracle():
    start = time.time()
    alpha = parse_alpha("1.5", 128)
    worst = Fraction(0)
    for d in range(1, 1001):
        got = pow_frac(alpha, d, _DELTA40).value
        want = Fraction(3**d % 2**d, 2**d)
        worst = max(worst, abs(got - want))
    elapsed = time.time() - start
    ok = worst <= _DELTA40 and elapsed < 5
    _report(1, ok, "max |pow_frac - exact| = %.3e over d <= 1000 "
                   "(budget 2^-40 = %.3e), %.1fs < 5s"
            % (float(worst), float(_DELTA40), elapsed))


def test_criterion_2_pair_count_routes_agree_on_seeded_instances():
    start = time.time()
    rng = random.Random(_SEED)
    mismatches = 0
    for _ in range(1000):
        n = rng.randint(2, 200)
        s = Fraction(rng.randint(1, 5000), 1000)  # s in (0, 5]
        pts = [UnitPoint(Fraction(rng.randint(0, 10**6 - 1), 10**6), 0.0)
               for _ in range(n)]
        if pair_count(pts, s).ordered_count != naive_pair_count(pts, s):
            mismatches += 1
    elapsed = time.time() - start
    ok = mismatches == 0 and elapsed < 10
    _report(2, ok, "two-pointer vs naive mismatches = %d on 1000 instances "
                   "(N <= 200, s in (0,5]), %.1fs < 10s"
            % (mismatches, elapsed))


def test_criterion_3_squared_degree_statistic_approaches_poissonian():
    start = time.time()
    fam = parse_family("monomial:k=2")
    errors_125 = []
    errors_1000 = []
    for alpha in _seeded_alphas(20):
        curve = dict(ppc_curve(fam, alpha, 1, [125, 1000], _DELTA40))
        errors_125.append(abs(curve[125] - 2.0))
        errors_1000.append(abs(curve[1000] - 2.0))
    med_125 = statistics.median(errors_125)
    med_1000 = statistics.median(errors_1000)
    elapsed = time.time() - start
    ok = med_1000 <= 0.3 and med_1000 < med_125 and elapsed < 600
    _report(3, ok, "median |R2 - 2|: %.4f at N=1000 (<= 0.3), %.4f at N=125 "
                   "(must exceed it), %.1fs < 600s"
            % (med_1000, med_125, elapsed))


def test_criterion_4_kronecker_control_has_empty_statistic():
    start = time.time()
    fam = parse_family("kronecker")
    alpha = parse_alpha(_GOLDEN, 128)
    points = orbit(fam, alpha, 5000, _DELTA40).points
    stat = pair_count(points, Fraction(1, 10)).statistic
    gaps = gap_spectrum(points)
    min_gap = gaps[0]
    distinct = len(set(gaps))
    elapsed = time.time() - start
    ok = (stat == 0.0 and min_gap > Fraction(1, 10) / 5000
          and distinct <= 3 and elapsed < 5)
    _report(4, ok, "statistic = %r at s=0.1, N=5000; min gap %.3e > s/N = "
                   "2e-05; %d distinct gaps (<= 3); %.1fs < 5s"
            % (stat, float(min_gap), distinct, elapsed))


def test_criterion_5_linear_power_orbits_equidistribute():
    start = time.time()
    fam = parse_family("linpow")
    values = []
    for alpha in _seeded_alphas(20):
        points = orbit(fam, alpha, 4000, _DELTA40).points
        values.append(star_discrepancy(points).d_star)
    hits = sum(d <= 0.05 for d in values)
    elapsed = time.time() - start
    ok = hits >= 18 and elapsed < 120
    _report(5, ok, "star discrepancy <= 0.05 for %d/20 alphas at N=4000 "
                   "(need >= 18), worst %.4f, %.1fs < 120s"
            % (hits, max(values), elapsed))


def test_criterion_6_growth_condition_verdicts():
    start = time.time()
    interval = IntervalSpec(Fraction(3, 2), Fraction(2))
    finite = {}
    for spec in ("monomial:k=2", "monomial:k=3", "factorial"):
        report = check_hypotheses(parse_family(spec), interval)
        v5 = report.conditions[4]
        finite[spec] = (v5.status == "holds"
                        and isinstance(report.N1, int) and report.N1 >= 1)
    lin = check_hypotheses(parse_family("linpow"), interval)
    v5 = lin.conditions[4]
    witness_ok = False
    if v5.status == "fails" and v5.witness is not None:
        w = v5.witness
        lhs = condition5_lhs(w["d1"], w["d2"], w["C"], w["a"])
        witness_ok = (math.isclose(lhs, w["lhs"], rel_tol=1e-12)
                      and w["rhs"] == -3.0 * math.log(w["n2"])
                      and w["lhs"] > w["rhs"])
    elapsed = time.time() - start
    ok = all(finite.values()) and witness_ok and elapsed < 60
    _report(6, ok, "growth bound holds with finite start index for %s; "
                   "linear-degree family fails with replayable witness "
                   "(n1=%s, n2=%s); %.1fs < 60s"
            % (sorted(k for k, v in finite.items() if v),
               v5.witness and v5.witness.get("n1"),
               v5.witness and v5.witness.get("n2"), elapsed))


def test_criterion_7_level_set_measures_sit_in_lemma_sandwich():
    start = time.time()
    interval = IntervalSpec(Fraction("1.1"), Fraction("1.3"))
    tol = Fraction(1, 10**9)
    k_needed = 0.0
    scaled_by_d = []
    for m in (2, 4, 8):
        target = CircleInterval.arc(Fraction(0), Fraction(1, m))
        length = 1.0 / m
        for d in range(2, 13):
            result = level_set_measure(PowerMap(d), interval, target, tol)
            bounds = lemma_bounds_check(result, target)
            slack = length / result.derivative_at_a
            k_needed = max(k_needed,
                           (bounds.lower_main - result.measure) / slack,
                           (result.measure - bounds.upper_main) / slack)
            scaled_by_d.append((d, bounds.residual_scaled))
    worst_scaled = max(v for _, v in scaled_by_d)
    trend = _ols_slope(scaled_by_d)
    elapsed = time.time() - start
    ok = (k_needed <= 10 and worst_scaled <= 1.0 and trend <= 0.01
          and elapsed < 60)
    _report(7, ok, "fitted K = %.3f (<= 10) over d in 2..12, m in {2,4,8}; "
                   "scaled residual max %.3f (<= 1.0), trend slope %+.4f per "
                   "degree (<= 0.01); %.1fs < 60s"
            % (k_needed, worst_scaled, trend, elapsed))


def test_criterion_8_variance_decays_like_one_over_n(capsys):
    start = time.time()
    fam = parse_family("monomial:k=2")
    interval = IntervalSpec(Fraction("1.5"), Fraction("1.6"))
    series = second_moment_series(fam, interval, 1, [125, 250, 500, 1000],
                                  QuadratureSpec("midpoint", 32), threads=8)
    exponent = series.fitted_exponent
    code = main(["second-moment", "--selftest"])
    selftest_out = capsys.readouterr().out
    elapsed = time.time() - start
    ok = (exponent is not None and -1.5 <= exponent <= -0.5
          and code == 0 and selftest_out == "exponent -1.000\n"
          and elapsed < 1800)
    with capsys.disabled():
        _report(8, ok, "fitted exponent %.4f in [-1.5, -0.5] from K=32 "
                       "midpoint nodes; self-test on V=1/N prints "
                       "'exponent -1.000'; %.1fs < 1800s"
                % (exponent if exponent is not None else float("nan"),
                   elapsed))


def test_criterion_9_outputs_are_byte_identical_across_reruns_and_threads(
        tmp_path, capsys):
    battery = [
        ["orbit", "--family", "monomial:k=2", "--alpha", "1.5",
         "--N", "400", "--delta", "1e-9"],
        ["paircorr", "--family", "monomial:k=2", "--alpha", "1.5",
         "--N-list", "125,250", "--s", "1"],
        ["paircorr", "--family", "kronecker", "--alpha", _GOLDEN,
         "--s", "0.1", "--N", "2000"],
        ["discrepancy", "--family", "linpow",
         "--alpha", "1.7320508075688772935", "--N", "1000"],
        ["hypothesis", "--family", "monomial:k=2", "--a", "1.5", "--b", "2",
         "--n1-max", "60", "--n2-max", "120"],
        ["measure", "--a", "1.1", "--b", "1.3", "--degree", "7",
         "--target-c", "0", "--target-d", "0.125"],
        ["second-moment", "--family", "monomial:k=2", "--a", "1.5",
         "--b", "1.6", "--s", "1", "--N-list", "125,250", "--K", "8"],
        ["second-moment", "--family", "kronecker", "--a", "1.55",
         "--b", "1.70", "--s", "0.1", "--N-list", "100,200", "--K", "4",
         "--mode", "random", "--seed", str(_SEED), "--format", "csv"],
    ]
    unstable = []
    for idx, argv in enumerate(battery):
        outputs = set()
        for threads in (1, 8):
            for rerun in (0, 1):
                path = tmp_path / ("cmd%d_t%d_r%d.out" % (idx, threads, rerun))
                code = main(argv + ["--threads", str(threads),
                                    "--out", str(path)])
                assert code == 0, (argv, threads)
                outputs.add(path.read_bytes())
        if len(outputs) != 1:
            unstable.append(argv[0])
    capsys.readouterr()
    ok = not unstable
    with capsys.disabled():
        _report(9, ok, "%d commands x {rerun} x {--threads 1,8} all "
                       "byte-identical%s"
                % (len(battery),
                   "" if ok else "; unstable: " + ", ".join(unstable)))
