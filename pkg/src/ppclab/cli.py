"""Command-line front door for orbits, statistics, and verification runs.

Six subcommands: `orbit` writes certified point files, `paircorr` and
`discrepancy` evaluate statistics on orbits or saved point sets, `hypothesis`
runs the growth/convexity condition checks, `measure` verifies level-set
measures, and `second-moment` sweeps the variance of the pair-correlation
statistic over an alpha interval.

Exit codes: 0 success, 1 usage error (single machine-readable line on stderr
before any computation), 2 numeric or precision failure.  Every emitted
artifact embeds the run configuration so it can be replayed byte for byte;
the output path and thread count are deliberately left out of that block so
replays to a different location, or with different parallelism, compare equal.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass
from fractions import Fraction

from ppclab import __version__
from ppclab.families import FamilyError, orbit, parse_family
from ppclab.hpreal import IndeterminateFrac, PrecisionOverflow, parse_alpha
from ppclab.hypothesis import IntervalSpec, check_hypotheses, report_to_json
from ppclab.measure import (
    CircleInterval,
    DifferenceMap,
    LevelCapExceeded,
    NonMonotone,
    PowerMap,
    lemma_bounds_check,
    level_set_measure,
    measure_to_json,
)
from ppclab.paircorr import (
    TooBlurry,
    pair_count,
    points_text,
    ppc_curve,
    read_points,
    star_discrepancy,
)
from ppclab.secondmoment import (
    QuadratureSpec,
    decay_fit,
    default_delta,
    second_moment_series,
    series_to_csv,
    series_to_json,
)

_ALPHA_BITS = 128
_DEFAULT_DELTA = "1/1099511627776"  # 2^-40
_SELFTEST_N = (125, 250, 500, 1000)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # single-line machine-readable errors instead of argparse's usage dump
    def error(self, message):
        raise _UsageError(message)


class _Formatter(argparse.HelpFormatter):
    # fixed width so --help output does not depend on the terminal
    def __init__(self, prog):
        super().__init__(prog, width=78)


@dataclass(frozen=True)
class RunConfig:
    """Validated flag values for one run; `block()` is the replay record."""

    subcommand: str
    family: str | None = None
    alpha: str | None = None
    a: str | None = None
    b: str | None = None
    N: int | None = None
    N_list: tuple[int, ...] | None = None
    s: str | None = None
    delta: str | None = None
    seed: int | None = None
    K: int | None = None
    out: str | None = None
    format: str | None = None
    extras: tuple[tuple[str, object], ...] = ()

    def block(self) -> dict:
        doc: dict = {"subcommand": self.subcommand}
        for key in ("family", "alpha", "a", "b", "N"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = value
        if self.N_list is not None:
            doc["N_list"] = ",".join(str(n) for n in self.N_list)
        for key in ("s", "delta", "seed", "K", "format"):
            value = getattr(self, key)
            if value is not None:
                doc[key] = value
        for key, value in self.extras:
            doc[key] = value
        return doc


def _frac(text: str, flag: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise _UsageError("%s: not a number: %r" % (flag, text)) from None


def _interval(a_text: str, b_text: str) -> IntervalSpec:
    a = _frac(a_text, "--a")
    b = _frac(b_text, "--b")
    if not 1 < a < b:
        raise _UsageError("need 1 < a < b, got a=%s b=%s" % (a_text, b_text))
    return IntervalSpec(a, b)


def _alpha(text: str):
    value = _frac(text, "--alpha")
    if value <= 1:
        raise _UsageError("--alpha must be > 1, got %s" % text)
    return parse_alpha(text, _ALPHA_BITS)


def _family(spec: str):
    try:
        return parse_family(spec)
    except FamilyError as exc:
        raise _UsageError("--family: %s" % exc) from None


def _positive_s(text: str) -> Fraction:
    s = _frac(text, "--s")
    if s <= 0:
        raise _UsageError("--s must be positive, got %s" % text)
    return s


def _delta(text: str) -> Fraction:
    d = _frac(text, "--delta")
    if not 0 < d < Fraction(1, 4):
        raise _UsageError("--delta must lie in (0, 1/4), got %s" % text)
    return d


def _check_n(n: int, flag: str = "--N") -> int:
    if n < 2:
        raise _UsageError("%s must be >= 2, got %d" % (flag, n))
    return n


def _n_list(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise _UsageError("--N-list: expected comma-separated integers, "
                          "got %r" % text) from None
    if not values:
        raise _UsageError("--N-list must be nonempty")
    for n in values:
        _check_n(n, "--N-list")
    return values


def _blur_check(delta: Fraction, s: Fraction, n_max: int) -> None:
    if delta > s / (100 * n_max):
        raise _UsageError("--delta %s too coarse for --s %s at N=%d "
                          "(need delta <= s/(100*N))" % (delta, s, n_max))


def _load_points(path: str):
    try:
        return read_points(path)
    except OSError as exc:
        raise _UsageError("--in: %s" % exc) from None
    except ValueError as exc:
        raise _UsageError("--in: %s" % exc) from None


def _json_payload(doc: dict) -> str:
    return json.dumps(doc, indent=2) + "\n"


# ---------------------------------------------------------------- subcommands


def _cmd_orbit(ns) -> str:
    family = _family(ns.family)
    alpha = _alpha(ns.alpha)
    _check_n(ns.N)
    delta_text = ns.delta if ns.delta is not None else _DEFAULT_DELTA
    delta = _delta(delta_text)
    cfg = RunConfig("orbit", family=ns.family, alpha=ns.alpha, N=ns.N,
                    delta=delta_text)
    orb = orbit(family, alpha, ns.N, delta)
    return points_text(orb.points, ["config " + json.dumps(cfg.block())])


def _cmd_paircorr(ns) -> str:
    s = _positive_s(ns.s)
    if ns.infile is not None:
        if ns.family or ns.alpha or ns.N or ns.N_list or ns.delta:
            raise _UsageError("--in replaces the family flags; drop "
                              "--family/--alpha/--N/--N-list/--delta")
        points = _load_points(ns.infile)
        cfg = RunConfig("paircorr", s=ns.s, format=ns.format,
                        extras=(("in", ns.infile),))
        res = pair_count(points, s)
        if ns.format == "csv":
            return "N,statistic\n%d,%r\n" % (res.N, res.statistic)
        return _json_payload({
            "schema": "paircorr-result v1",
            "N": res.N,
            "s": float(res.s),
            "ordered_count": res.ordered_count,
            "statistic": res.statistic,
            "config": cfg.block(),
        })
    if ns.family is None or ns.alpha is None:
        raise _UsageError("need --family and --alpha (or --in FILE)")
    if (ns.N is None) == (ns.N_list is None):
        raise _UsageError("need exactly one of --N or --N-list")
    family = _family(ns.family)
    alpha = _alpha(ns.alpha)
    n_list = (ns.N_list if ns.N_list is not None
              else (_check_n(ns.N),))
    n_max = max(n_list)
    delta_text = (ns.delta if ns.delta is not None
                  else str(default_delta(s, n_max)))
    delta = _delta(delta_text)
    _blur_check(delta, s, n_max)
    cfg = RunConfig("paircorr", family=ns.family, alpha=ns.alpha,
                    N=ns.N, N_list=ns.N_list, s=ns.s, delta=delta_text,
                    format=ns.format)
    if ns.N is not None:
        orb = orbit(family, alpha, ns.N, delta)
        res = pair_count(orb.points, s)
        if ns.format == "csv":
            return "N,statistic\n%d,%r\n" % (res.N, res.statistic)
        return _json_payload({
            "schema": "paircorr-result v1",
            "N": res.N,
            "s": float(res.s),
            "ordered_count": res.ordered_count,
            "statistic": res.statistic,
            "config": cfg.block(),
        })
    curve = ppc_curve(family, alpha, s, list(n_list), delta)
    if ns.format == "csv":
        lines = ["N,statistic"]
        lines.extend("%d,%r" % (n, stat) for n, stat in curve)
        return "\n".join(lines) + "\n"
    return _json_payload({
        "schema": "paircorr-curve v1",
        "s": float(s),
        "entries": [{"N": n, "statistic": stat} for n, stat in curve],
        "config": cfg.block(),
    })


def _cmd_discrepancy(ns) -> str:
    if ns.format == "csv":
        raise _UsageError("--format csv is not available for discrepancy")
    if ns.infile is not None:
        if ns.family or ns.alpha or ns.N or ns.delta:
            raise _UsageError("--in replaces the family flags; drop "
                              "--family/--alpha/--N/--delta")
        points = _load_points(ns.infile)
        cfg = RunConfig("discrepancy", extras=(("in", ns.infile),))
    else:
        if ns.family is None or ns.alpha is None or ns.N is None:
            raise _UsageError("need --family, --alpha and --N (or --in FILE)")
        family = _family(ns.family)
        alpha = _alpha(ns.alpha)
        _check_n(ns.N)
        delta_text = ns.delta if ns.delta is not None else _DEFAULT_DELTA
        delta = _delta(delta_text)
        cfg = RunConfig("discrepancy", family=ns.family, alpha=ns.alpha,
                        N=ns.N, delta=delta_text)
        points = orbit(family, alpha, ns.N, delta).points
    res = star_discrepancy(points)
    return _json_payload({
        "schema": "discrepancy-result v1",
        "N": res.N,
        "d_star": res.d_star,
        "config": cfg.block(),
    })


def _cmd_hypothesis(ns) -> str:
    family = _family(ns.family)
    interval = _interval(ns.a, ns.b)
    if ns.n_max < 2:
        raise _UsageError("--n-max must be >= 2")
    if ns.grid_size < 3:
        raise _UsageError("--grid-size must be >= 3")
    if ns.n1_max < 1:
        raise _UsageError("--n1-max must be >= 1")
    if ns.n2_max <= ns.n1_max:
        raise _UsageError("--n2-max must exceed --n1-max")
    cfg = RunConfig("hypothesis", family=ns.family, a=ns.a, b=ns.b,
                    extras=(("n_max", ns.n_max), ("grid_size", ns.grid_size),
                            ("n1_max", ns.n1_max), ("n2_max", ns.n2_max)))
    report = check_hypotheses(family, interval, n_max=ns.n_max,
                              grid_size=ns.grid_size,
                              n1_search_max=ns.n1_max,
                              n2_verify_max=ns.n2_max)
    doc = report_to_json(report)
    doc["config"] = cfg.block()
    return _json_payload(doc)


def _cmd_measure(ns) -> str:
    interval = _interval(ns.a, ns.b)
    if (ns.degree is None) == (ns.family is None):
        raise _UsageError("need exactly one of --degree or "
                          "--family with --n1/--n2")
    extras: list[tuple[str, object]] = []
    if ns.degree is not None:
        if ns.n1 is not None or ns.n2 is not None:
            raise _UsageError("--n1/--n2 only apply with --family")
        try:
            g = PowerMap(ns.degree)
        except ValueError as exc:
            raise _UsageError("--degree: %s" % exc) from None
        extras.append(("degree", ns.degree))
    else:
        if ns.n1 is None or ns.n2 is None:
            raise _UsageError("difference maps need --n1 and --n2")
        try:
            g = DifferenceMap(_family(ns.family), ns.n1, ns.n2)
        except (FamilyError, ValueError) as exc:
            raise _UsageError(str(exc)) from None
        extras.extend((("n1", ns.n1), ("n2", ns.n2)))
    c = _frac(ns.target_c, "--target-c")
    d = _frac(ns.target_d, "--target-d")
    try:
        target = (CircleInterval.wrap(c, d) if ns.wrap
                  else CircleInterval.arc(c, d))
    except ValueError as exc:
        raise _UsageError("target interval: %s" % exc) from None
    tol = _frac(ns.tol, "--tol")
    if not 0 < tol <= Fraction(1, 10**6):
        raise _UsageError("--tol must lie in (0, 1e-6], got %s" % ns.tol)
    extras.extend((("target_c", ns.target_c), ("target_d", ns.target_d)))
    if ns.wrap:
        extras.append(("wrap", True))
    extras.append(("tol", ns.tol))
    cfg = RunConfig("measure", family=ns.family, a=ns.a, b=ns.b,
                    extras=tuple(extras))
    result = level_set_measure(g, interval, target, tol)
    bounds = lemma_bounds_check(result, target)
    doc = measure_to_json(result)
    doc["lemma_bounds"] = {
        "lower_main": bounds.lower_main,
        "upper_main": (None if math.isinf(bounds.upper_main)
                       else bounds.upper_main),
        "residual_scaled": bounds.residual_scaled,
    }
    doc["config"] = cfg.block()
    return _json_payload(doc)


def _cmd_second_moment(ns) -> str:
    if ns.selftest:
        n_list = ns.N_list if ns.N_list is not None else _SELFTEST_N
        slope, _ = decay_fit([(n, 1.0 / n) for n in n_list])
        return "exponent %.3f\n" % slope
    if ns.family is None or ns.a is None or ns.b is None or ns.s is None:
        raise _UsageError("need --family, --a, --b and --s")
    if ns.N_list is None and ns.N is None:
        raise _UsageError("need --N-list (or --N)")
    family = _family(ns.family)
    interval = _interval(ns.a, ns.b)
    s = _positive_s(ns.s)
    n_list = ns.N_list if ns.N_list is not None else (_check_n(ns.N),)
    n_max = max(n_list)
    delta_text = (ns.delta if ns.delta is not None
                  else str(default_delta(s, n_max)))
    delta = _delta(delta_text)
    _blur_check(delta, s, n_max)
    try:
        quad = QuadratureSpec(ns.mode, ns.K, ns.seed)
    except ValueError as exc:
        raise _UsageError(str(exc)) from None
    cfg = RunConfig("second-moment", family=ns.family, a=ns.a, b=ns.b,
                    N=ns.N, N_list=ns.N_list, s=ns.s, delta=delta_text,
                    seed=ns.seed, K=ns.K, format=ns.format,
                    extras=(("mode", ns.mode),))
    series = second_moment_series(family, interval, s, list(n_list), quad,
                                  delta=delta, threads=ns.threads)
    if ns.format == "csv":
        return series_to_csv(series)
    doc = series_to_json(series)
    doc["config"] = cfg.block()
    return _json_payload(doc)


# -------------------------------------------------------------------- parser


def _add_family_alpha(sub, alpha_required=True, family_required=True):
    sub.add_argument("--family", required=family_required,
                     help="sequence family spec, e.g. monomial:k=2, "
                          "geomsum:k=3, factorial, linpow, kronecker")
    sub.add_argument("--alpha", required=alpha_required,
                     help="alpha as decimal or fraction text; parsed to "
                          "128 fractional bits")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ppclab", formatter_class=_Formatter,
                     description="pair-correlation laboratory for "
                                 "fast-growing polynomial sequences")
    parser.add_argument("--version", action="version",
                        version="ppclab %s" % __version__)
    subs = parser.add_subparsers(dest="cmd", required=True,
                                 metavar="subcommand")

    shared = argparse.ArgumentParser(add_help=False)
    shared.add_argument("--out", help="output file (default: stdout)")
    shared.add_argument("--threads", type=int,
                        default=max(1, os.cpu_count() or 1),
                        help="worker processes (default: available "
                             "parallelism); never changes the output bytes")

    p = subs.add_parser("orbit", parents=[shared], formatter_class=_Formatter,
                        help="write the first N certified orbit points")
    _add_family_alpha(p)
    p.add_argument("--N", type=int, required=True, help="orbit length")
    p.add_argument("--delta", help="per-point error budget "
                                   "(default 2^-40)")

    p = subs.add_parser("paircorr", parents=[shared],
                        formatter_class=_Formatter,
                        help="pair-correlation statistic of an orbit or file")
    _add_family_alpha(p, alpha_required=False, family_required=False)
    p.add_argument("--in", dest="infile", help="ppc-points v1 file")
    p.add_argument("--N", type=int, help="orbit length")
    p.add_argument("--N-list", type=_n_list, dest="N_list",
                   help="comma-separated prefix lengths for a curve")
    p.add_argument("--s", required=True, help="pair-correlation scale")
    p.add_argument("--delta", help="per-point error budget "
                                   "(default min(2^-40, s/(200 N)))")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = subs.add_parser("discrepancy", parents=[shared],
                        formatter_class=_Formatter,
                        help="star discrepancy of an orbit or file")
    _add_family_alpha(p, alpha_required=False, family_required=False)
    p.add_argument("--in", dest="infile", help="ppc-points v1 file")
    p.add_argument("--N", type=int, help="orbit length")
    p.add_argument("--delta", help="per-point error budget (default 2^-40)")
    p.add_argument("--format", choices=("json", "csv"), default="json")

    p = subs.add_parser("hypothesis", parents=[shared],
                        formatter_class=_Formatter,
                        help="check the five growth/convexity conditions")
    _add_family_alpha(p, alpha_required=False)
    p.add_argument("--a", required=True, help="interval left endpoint (> 1)")
    p.add_argument("--b", required=True, help="interval right endpoint")
    p.add_argument("--n-max", type=int, default=8, dest="n_max",
                   help="indices checked for degree growth (default 8)")
    p.add_argument("--grid-size", type=int, default=64, dest="grid_size",
                   help="grid for sampled constants (default 64)")
    p.add_argument("--n1-max", type=int, default=200, dest="n1_max",
                   help="search bound for N1 (default 200)")
    p.add_argument("--n2-max", type=int, default=500, dest="n2_max",
                   help="verification bound for n2 (default 500)")

    p = subs.add_parser("measure", parents=[shared],
                        formatter_class=_Formatter,
                        help="level-set measure of frac(g) in a target arc")
    p.add_argument("--a", required=True, help="interval left endpoint (> 1)")
    p.add_argument("--b", required=True, help="interval right endpoint")
    p.add_argument("--degree", type=int,
                   help="use g(alpha) = alpha^degree")
    _add_family_alpha(p, alpha_required=False, family_required=False)
    p.add_argument("--n1", type=int, help="difference map lower index")
    p.add_argument("--n2", type=int, help="difference map upper index")
    p.add_argument("--target-c", required=True, dest="target_c",
                   help="target arc start in [0,1]")
    p.add_argument("--target-d", required=True, dest="target_d",
                   help="target arc end in [0,1]")
    p.add_argument("--wrap", action="store_true",
                   help="target arc crosses zero")
    p.add_argument("--tol", default="1e-9",
                   help="endpoint resolution (default 1e-9, max 1e-6)")

    p = subs.add_parser("second-moment", parents=[shared],
                        formatter_class=_Formatter,
                        help="variance of the statistic over alpha nodes")
    _add_family_alpha(p, alpha_required=False, family_required=False)
    p.add_argument("--a", help="interval left endpoint (> 1)")
    p.add_argument("--b", help="interval right endpoint")
    p.add_argument("--s", help="pair-correlation scale")
    p.add_argument("--N", type=int, help="single N")
    p.add_argument("--N-list", type=_n_list, dest="N_list",
                   help="comma-separated N values")
    p.add_argument("--K", type=int, default=16, help="quadrature nodes "
                                                     "(default 16)")
    p.add_argument("--mode", choices=("midpoint", "random"),
                   default="midpoint", help="node placement")
    p.add_argument("--seed", type=int, default=0,
                   help="SplitMix64 seed for random nodes (default 0)")
    p.add_argument("--delta", help="per-point error budget "
                                   "(default min(2^-40, s/(200 N)))")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--selftest", action="store_true",
                   help="fit the synthetic series V = 1/N and print "
                        "the exponent")
    return parser


_HANDLERS = {
    "orbit": _cmd_orbit,
    "paircorr": _cmd_paircorr,
    "discrepancy": _cmd_discrepancy,
    "hypothesis": _cmd_hypothesis,
    "measure": _cmd_measure,
    "second-moment": _cmd_second_moment,
}


def _emit(out: str | None, payload: str) -> None:
    if out is None:
        sys.stdout.write(payload)
    else:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except _UsageError as exc:
        print(json.dumps({"error": "usage", "detail": str(exc)}),
              file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help / --version
        return 0 if exc.code in (None, 0) else int(exc.code)
    if getattr(ns, "threads", 1) < 1:
        print(json.dumps({"error": "usage",
                          "detail": "--threads must be >= 1"}),
              file=sys.stderr)
        return 1
    try:
        payload = _HANDLERS[ns.cmd](ns)
    except _UsageError as exc:
        print(json.dumps({"error": "usage", "detail": str(exc)}),
              file=sys.stderr)
        return 1
    except (PrecisionOverflow, IndeterminateFrac) as exc:
        print(json.dumps({"error": "precision", "detail": str(exc),
                          "index": getattr(exc, "index", None)}),
              file=sys.stderr)
        return 2
    except (LevelCapExceeded, NonMonotone, TooBlurry) as exc:
        print(json.dumps({"error": "numeric", "detail": str(exc)}),
              file=sys.stderr)
        return 2
    _emit(ns.out, payload)
    return 0


if __name__ == "__main__":
    sys.exit(main())
