"""Command-line front end.

Every numeric argument is parsed as an exact rational (``0.05`` is 1/20) and
validated before any computation starts.  Exit codes: 0 success, 2 usage or
domain error, 3 capability error, 4 target not attained.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .analysis import (
    PAIRS,
    competence_threshold_C,
    min_committee_size,
    paradox_probability,
    threshold_curve,
    weight_order_intervals,
    weight_threshold_D,
)
from .errors import CapabilityError, DomainError, NotAttainedError
from .exact import format_decimal, format_exact, format_fixed, parse_grid, to_fraction
from .model import Homogeneous, StateOfNature, model_to_json, parse_model, parse_state
from .rates import Metrics, acceptance_probability, metrics, negative_acceptance, true_positive_rate
from .rules import enumerate_admissible, is_admissible, parse_rule
from .simulation import DEFAULT_CHUNK, estimate_rates, simulate_votes
from .svg import RocPoint, render_roc
from .tables import check_committee_size

EXIT_USAGE = 2
EXIT_CAPABILITY = 3
EXIT_NOT_ATTAINED = 4

FULL_FIELDS = ("tpr_full", "fpr_full", "fnr_full", "tnr_full", "aot_full", "waot_full")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buf.getvalue()


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        Path(out).write_text(text, encoding="utf-8")


def _sizes(text: str) -> list[int]:
    out = []
    for part in text.split(","):
        try:
            n = int(part)
        except ValueError:
            raise DomainError(f"committee size must be an integer, got {part!r}") from None
        out.append(check_committee_size(n))
    return out


def _single_size(text: str) -> int:
    sizes = _sizes(text)
    if len(sizes) != 1:
        raise DomainError("this command takes a single committee size")
    return sizes[0]


def _require(value, flag):
    if value is None:
        raise DomainError(f"{flag} is required here")
    return value


def _read_spec(text: str) -> str:
    """Inline spec, or the contents of a file when given as ``@path``."""
    if text.startswith("@"):
        return Path(text[1:]).read_text(encoding="utf-8")
    return text


def _rules(text: str, n: int) -> list:
    rules = []
    for item in text.split(","):
        item = item.strip()
        if item.startswith("@"):
            data = json.loads(_read_spec(item))
            specs = data if isinstance(data, list) else [data]
            rules.extend(parse_rule(s, n) for s in specs)
        else:
            rules.append(parse_rule(item, n))
    return rules


def _models(args) -> list[tuple[str, object]]:
    """``(theta display, model)`` pairs from ``--theta`` or ``--model``."""
    if args.model is not None:
        return [("", parse_model(_read_spec(args.model)))]
    return [(format_decimal(th), Homogeneous(th)) for th in parse_grid(args.theta)]


def _weights(text: str | None) -> list[Fraction]:
    if not text:
        return []
    weights = parse_grid(text)
    for w in weights:
        if not 0 < w < 1:
            raise DomainError(f"weights must lie strictly between 0 and 1, got {w}")
    return weights


def _pairs(text: str) -> list[str]:
    out = []
    for part in text.split(","):
        key = part.strip().upper()
        if key not in PAIRS:
            raise DomainError(f"unknown rule pair {part!r}; expected one of {', '.join(PAIRS)}")
        out.append(key)
    return out


# -- commands ---------------------------------------------------------------

def cmd_rates(args) -> int:
    sizes = _sizes(args.n)
    models = _models(args)
    weights = _weights(args.w)
    rules = {n: _rules(args.rules, n) for n in sizes}
    results: list[Metrics] = []
    for n in sizes:
        for _, model in models:
            for rule in rules[n]:
                results.append(metrics(n, model, rule, weights))
    if args.format == "json":
        _emit(_json({"command": "rates", "rows": [m.to_json() for m in results]}), args.out)
    else:
        header = Metrics.CSV_FIELDS + FULL_FIELDS
        rows = [[row[k] for k in header] for m in results for row in m.rows()]
        _emit(_csv(header, rows), args.out)
    return 0


def cmd_thresholds(args) -> int:
    sizes = _sizes(args.n)
    if args.intervals:
        if args.pair is not None:
            raise DomainError("--pair does not apply to --intervals")
        thetas = parse_grid(_require(args.theta, "--theta"))
        records = []
        for n in sizes:
            for th in thetas:
                for iv in weight_order_intervals(n, th):
                    records.append({"n": n, "theta": format_decimal(th), "order": iv.label,
                                    "w_lo": iv.lo, "w_hi": iv.hi})
        fields = ("w_lo", "w_hi")
        header = ("n", "theta", "order", "w_lo", "w_hi")
    else:
        pairs = _pairs(args.pair or "R1R2")
        if args.D:
            thetas = parse_grid(_require(args.theta, "--theta"))
            for th in thetas:
                if not Fraction(1, 2) <= th <= 1:
                    raise DomainError(f"competence must lie in [1/2, 1] for D(theta), got {th}")
        else:
            weights = parse_grid(_require(args.w, "--w"))
            for w in weights:
                if not Fraction(1, 2) < w < 1:
                    raise DomainError(f"w must lie in (1/2, 1) for C(w), got {w}")
        curves = [threshold_curve(n, p) for n in sizes for p in pairs]
        records = []
        if args.D:
            for curve in curves:
                for th in thetas:
                    records.append({"n": curve.n, "pair": curve.label, "theta": format_decimal(th),
                                    "D": weight_threshold_D(curve, th)})
            fields = ("D",)
            header = ("n", "pair", "theta", "D")
        else:
            for curve in curves:
                for w in weights:
                    records.append({"n": curve.n, "pair": curve.label, "w": format_decimal(w),
                                    "C": competence_threshold_C(curve, w)})
            fields = ("C",)
            header = ("n", "pair", "w", "C")
    if args.format == "json":
        for r in records:
            for f in fields:
                r[f] = {"exact": format_exact(r[f]), "float": float(r[f])}
        _emit(_json({"command": "thresholds", "rows": records}), args.out)
    else:
        full = tuple(f"{f}_full" for f in fields)
        rows = [[r[h] if h not in fields else format_fixed(r[h]) for h in header]
                + [repr(float(r[f])) for f in fields] for r in records]
        _emit(_csv(header + full, rows), args.out)
    return 0


def _targets(text: str) -> list[tuple[str, Fraction]]:
    out = []
    for part in text.split(","):
        metric, sep, k = part.partition("=")
        if not sep:
            raise DomainError(f"target {part!r} must look like METRIC=k")
        metric = metric.strip().upper()
        if metric not in ("TPR", "TNR", "AOT"):
            raise DomainError(f"unknown metric {metric!r}; expected TPR, TNR or AOT")
        out.append((metric, to_fraction(k)))
    return out


def cmd_minsize(args) -> int:
    thetas = parse_grid(args.theta)
    targets = _targets(args.targets)
    for th in thetas:
        if not Fraction(1, 2) < th < 1:
            raise DomainError(f"competence must lie in (1/2, 1), got {th}")
    for metric, k in targets:
        if k >= (Fraction(1, 2) if metric == "AOT" else 1):
            raise DomainError(f"{metric} threshold {k} cannot be reached")
    if args.cap < 3:
        raise DomainError(f"--cap must be at least 3, got {args.cap}")
    parse_rule(args.rule, 3)
    table = []
    missed = False
    for metric, k in targets:
        cells = []
        for th in thetas:
            try:
                cells.append(min_committee_size(args.rule, th, metric, k, args.cap))
            except NotAttainedError:
                cells.append(None)
                missed = True
        table.append((metric, k, cells))
    if args.format == "json":
        rows = [{"metric": metric, "k": format_decimal(k),
                 "sizes": [{"theta": format_decimal(th), "n": n, "attained": n is not None}
                           for th, n in zip(thetas, cells)]}
                for metric, k, cells in table]
        _emit(_json({"command": "minsize", "rule": args.rule, "cap": args.cap, "rows": rows}),
              args.out)
    else:
        header = ["metric", "k"] + [format_decimal(th) for th in thetas]
        rows = [[metric, format_decimal(k)] + [str(n) if n is not None else f">{args.cap}"
                                               for n in cells]
                for metric, k, cells in table]
        _emit(_csv(header, rows), args.out)
    if missed:
        print(f"doctrinal: some targets were not reached for n <= {args.cap}", file=sys.stderr)
        return EXIT_NOT_ATTAINED
    return 0


def cmd_roc_plot(args) -> int:
    sizes = _sizes(args.n)
    thetas = parse_grid(args.theta)
    rules = {n: _rules(args.rules, n) for n in sizes}
    for th in thetas:
        if not 0 < th < 1:
            raise DomainError(f"competence must lie strictly between 0 and 1, got {th}")
    points = []
    for n in sizes:
        for th in thetas:
            model = Homogeneous(th)
            for rule in rules[n]:
                m = metrics(n, model, rule)
                points.append(RocPoint(f"{rule.name} n={n} theta={format_decimal(th)}",
                                       rule.name, float(m.fpr), float(m.tpr)))
    _emit(render_roc(points, "ROC points and AOT triangles"), args.out)
    if args.points is not None:
        rows = [[p.label, p.series, repr(p.fpr), repr(p.tpr)] for p in points]
        _emit(_csv(("label", "rule", "fpr", "tpr"), rows), args.points)
    return 0


def cmd_paradox(args) -> int:
    sizes = _sizes(args.n)
    models = _models(args)
    states = [parse_state(s) for s in args.states.split(",")]
    pair_specs = []
    for part in args.pairs.split(","):
        a, sep, b = part.partition(":")
        if not sep:
            raise DomainError(f"rule pair {part!r} must look like RULE:RULE")
        pair_specs.append((a.strip(), b.strip()))
    records = []
    for n in sizes:
        pairs = [(parse_rule(a, n), parse_rule(b, n)) for a, b in pair_specs]
        for theta, model in models:
            for state in states:
                for ra, rb in pairs:
                    p = paradox_probability(n, model, state, ra, rb)
                    records.append((n, theta, state.value, ra.name, rb.name, p))
    if args.format == "json":
        rows = [{"n": n, "theta": th, "state": s, "rule_a": a, "rule_b": b,
                 "probability": {"exact": format_exact(p), "float": float(p)}}
                for n, th, s, a, b, p in records]
        _emit(_json({"command": "paradox", "rows": rows}), args.out)
    else:
        header = ("n", "theta", "state", "rule_a", "rule_b", "probability", "exact", "float")
        rows = [[n, th, s, a, b, format_fixed(p), format_exact(p), repr(float(p))]
                for n, th, s, a, b, p in records]
        _emit(_csv(header, rows), args.out)
    return 0


def cmd_simulate(args) -> int:
    n = _single_size(args.n)
    models = _models(args)
    if len(models) != 1:
        raise DomainError("simulate takes a single competence value or model")
    _, model = models[0]
    if args.trials < 1:
        raise DomainError(f"--trials must be positive, got {args.trials}")
    if not 0 <= args.seed < 2**64:
        raise DomainError(f"--seed must lie in [0, 2**64), got {args.seed}")
    if args.chunk_size < 1:
        raise DomainError(f"--chunk-size must be positive, got {args.chunk_size}")
    (rule,) = _rules(args.rule, n)
    if args.state is not None:
        state = parse_state(args.state)
        report = simulate_votes(n, model, state, args.trials, args.seed, rule, args.chunk_size)
        exact = {("TPR" if state is StateOfNature.PQ else state.value):
                 acceptance_probability(n, model, rule, state)}
    else:
        report = estimate_rates(n, model, rule, args.trials, args.seed, args.chunk_size)
        negatives = negative_acceptance(n, model, rule)
        exact = {"TPR": true_positive_rate(n, model, rule)}
        exact.update({s.value: p for s, p in negatives.items()})
        exact["FPR"] = max(negatives.values())
    rates = report.empirical_rates
    if args.format == "json":
        data = report.to_json()
        data["model"] = model_to_json(model)
        data["exact"] = {k: {"exact": format_exact(v), "float": float(v)} for k, v in exact.items()}
        _emit(_json(data), args.out)
    else:
        rows = []
        for key, (est, se) in rates.items():
            ref = float(exact[key])
            z = "" if se == 0 else f"{(est - ref) / se:.3f}"
            rows.append([key, repr(est), repr(se), repr(ref), z])
        _emit(_csv(("metric", "estimate", "se", "exact", "z"), rows), args.out)
    return 0


def cmd_rules(args) -> int:
    n = _single_size(args.n)
    if args.action == "check":
        results = [(rule, is_admissible(rule)) for rule in _rules(args.rule, n)]
        if args.format == "json":
            rows = [{"n": n, "rule": r.name, "admissible": res.admissible,
                     "condition": res.condition,
                     "witness": None if res.witness is None else [a.to_json() for a in res.witness]}
                    for r, res in results]
            _emit(_json({"command": "rules check", "rows": rows}), args.out)
        else:
            rows = [[n, r.name, str(res.admissible).lower(), res.condition or "",
                     "" if res.witness is None else json.dumps(res.witness[0].to_json()),
                     "" if res.witness is None else json.dumps(res.witness[1].to_json())]
                    for r, res in results]
            _emit(_csv(("n", "rule", "admissible", "condition", "witness_low", "witness_high"),
                       rows), args.out)
        return 0
    family = enumerate_admissible(n)
    if args.format == "json":
        data = {"command": "rules enumerate", "n": n, "count": family.count}
        if args.list:
            data["rules"] = [r.to_json() for r in family]
        _emit(_json(data), args.out)
    elif args.list:
        rows = [[k, json.dumps([a.to_json() for a in r.accepts()])] for k, r in enumerate(family)]
        _emit(_csv(("index", "accept"), rows), args.out)
    else:
        _emit(_csv(("n", "count"), [[n, family.count]]), args.out)
    return 0


# -- parser -----------------------------------------------------------------

def _common(p, default_format="csv", formats=("csv", "json")):
    p.add_argument("--format", choices=formats, default=default_format,
                   help=f"output format (default {default_format})")
    p.add_argument("--out", metavar="PATH", help="write output to PATH instead of stdout")


def _competence(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--theta", metavar="GRID",
                   help="competence values: start:stop:step (inclusive) or a comma list")
    g.add_argument("--model", metavar="JSON",
                   help='competence model as JSON or @file, e.g. {"per_voter": [0.6, 0.7, 0.8]}')


RULES_HELP = "comma list of rule names (IbyI, PbyP, CbyC, R0, R1-R3, constant0/1) or @file.json"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doctrinal", allow_abbrev=False,
        description="Exact ROC analysis of premise- and conclusion-based committee rules.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help):
        p = sub.add_parser(name, help=help, description=help, allow_abbrev=False)
        p.set_defaults(func=func)
        return p

    p = add("rates", cmd_rates, "TPR, FPR, FNR, TNR, AOT and WAOT per committee size, competence and rule")
    p.add_argument("--n", required=True, metavar="N[,N...]", help="odd committee size(s)")
    _competence(p)
    p.add_argument("--rules", default="IbyI,PbyP,CbyC", metavar="RULES", help=RULES_HELP)
    p.add_argument("--w", metavar="GRID", help="WAOT weights in (0, 1), grid or comma list")
    _common(p)

    p = add("thresholds", cmd_thresholds,
            "crossing weights D(theta), competence thresholds C(w), or WAOT order intervals")
    p.add_argument("--n", required=True, metavar="N[,N...]", help="odd committee size(s)")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument("--intervals", action="store_true",
                      help="weight intervals with a constant WAOT order of R1, R2, R3")
    mode.add_argument("--D", action="store_true", help="crossing weight D(theta) for each pair")
    mode.add_argument("--C", action="store_true", help="largest competence C(w) with D = w")
    p.add_argument("--pair", metavar="PAIRS", help=f"comma list of {', '.join(PAIRS)} (default R1R2)")
    p.add_argument("--theta", metavar="GRID", help="competence grid for --D and --intervals")
    p.add_argument("--w", metavar="GRID", help="weights in (1/2, 1) for --C")
    _common(p)

    p = add("minsize", cmd_minsize, "smallest odd committee reaching TPR, TNR or AOT targets")
    p.add_argument("--rule", default="IbyI", metavar="RULE", help="built-in rule name (default IbyI)")
    p.add_argument("--theta", required=True, metavar="GRID", help="competence grid in (1/2, 1)")
    p.add_argument("--targets", default="TPR=0.95,TNR=0.95,AOT=0.45", metavar="M=k[,M=k...]",
                   help="metric thresholds (default TPR=0.95,TNR=0.95,AOT=0.45)")
    p.add_argument("--cap", type=int, default=501, metavar="N",
                   help="largest committee size scanned (default 501)")
    _common(p)

    p = add("roc-plot", cmd_roc_plot, "SVG of ROC points with their AOT triangles")
    p.add_argument("--n", required=True, metavar="N[,N...]", help="odd committee size(s)")
    p.add_argument("--theta", required=True, metavar="GRID", help="competence grid in (0, 1)")
    p.add_argument("--rules", default="IbyI,PbyP,CbyC", metavar="RULES", help=RULES_HELP)
    p.add_argument("--out", required=True, metavar="PATH", help="SVG output path ('-' for stdout)")
    p.add_argument("--points", metavar="PATH", help="also write the plotted points as CSV")

    p = add("paradox", cmd_paradox, "probability that two rules disagree, per state of nature")
    p.add_argument("--n", required=True, metavar="N[,N...]", help="odd committee size(s)")
    _competence(p)
    p.add_argument("--pairs", default="IbyI:CbyC", metavar="A:B[,A:B...]",
                   help="rule pairs to compare (default IbyI:CbyC)")
    p.add_argument("--states", default="PQ,PnotQ,notPQ,notPnotQ", metavar="STATES",
                   help="comma list of states (default all four)")
    _common(p)

    p = add("simulate", cmd_simulate, "Monte Carlo estimate of a rule's rates, with exact values")
    p.add_argument("--n", required=True, metavar="N", help="odd committee size")
    _competence(p)
    p.add_argument("--rule", default="IbyI", metavar="RULE", help="rule name or @file.json")
    p.add_argument("--trials", type=int, default=100_000, metavar="T", help="trials per state")
    p.add_argument("--seed", type=int, default=0, metavar="S", help="random seed in [0, 2**64)")
    p.add_argument("--state", metavar="STATE", help="simulate one state only (default all four)")
    p.add_argument("--chunk-size", type=int, default=DEFAULT_CHUNK, metavar="T",
                   help="trials per vectorized batch; does not change results")
    _common(p, default_format="json")

    p = add("rules", cmd_rules, "check admissibility of rules or enumerate all admissible rules")
    p.add_argument("action", choices=("check", "enumerate"), help="what to do")
    p.add_argument("--n", required=True, metavar="N", help="odd committee size")
    p.add_argument("--rule", default="IbyI,PbyP,CbyC", metavar="RULES",
                   help=f"rules to check: {RULES_HELP}")
    p.add_argument("--list", action="store_true", help="with enumerate, list every rule")
    _common(p)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except DomainError as exc:
        print(f"doctrinal {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapabilityError as exc:
        print(f"doctrinal {args.command}: unsupported: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except NotAttainedError as exc:
        print(f"doctrinal {args.command}: {exc}", file=sys.stderr)
        return EXIT_NOT_ATTAINED
    except json.JSONDecodeError as exc:
        print(f"doctrinal {args.command}: error: JSON parse error at line {exc.lineno} "
              f"column {exc.colno}: {exc.msg}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"doctrinal {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
