"""Comparisons between nested rules: weight thresholds, competence thresholds,
WAOT orderings, committee sizes, and paradox probabilities.

For rules ``high >= low`` (``high`` accepts every table ``low`` accepts) let

    A(θ) = TPR(high) - TPR(low),    B(θ) = FPR(high) - FPR(low).

``high`` has the larger weighted area exactly when ``(1 - w) A > w B``,
i.e. when ``w < D(θ) = A / (A + B)``.  Both ``A`` and ``B`` are sums over the
tables where the rules disagree, so they are :class:`RatePolynomial` objects
and ``D`` is evaluated exactly.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import CapabilityError, DomainError, NotAttainedError
from .exact import to_fraction
from .model import Homogeneous, StateOfNature, as_model, parse_state, table_distribution
from .rates import (
    RatePolynomial,
    acceptance_fast,
    difference_polynomial,
    false_positive_rate,
    polynomial_over,
    true_positive_rate,
    weighted_area,
)
from .rules import RULE_NUMBERS, DecisionRule, builtin_rule, disagreement_set, is_admissible
from .tables import check_committee_size

log = logging.getLogger(__name__)

DEFAULT_SCAN_CAP = 501
GRID_STEP = Fraction(1, 1000)
ROOT_TOLERANCE = Fraction(1, 10**10)

PAIRS = {
    "R1R2": ("IbyI", "PbyP"),
    "R2R3": ("PbyP", "CbyC"),
    "R1R3": ("IbyI", "CbyC"),
}


@dataclass(frozen=True)
class ThresholdCurve:
    """Crossing weight ``D(θ) = A(θ) / (A(θ) + B(θ))`` for a nested rule pair."""

    n: int
    high: DecisionRule
    low: DecisionRule
    a_poly: RatePolynomial
    b_poly: RatePolynomial

    @property
    def label(self) -> str:
        return f"{_rule_label(self.high)}{_rule_label(self.low)}"

    def __call__(self, theta):
        return weight_threshold_D(self, theta)


def _rule_label(rule: DecisionRule) -> str:
    return RULE_NUMBERS.get(rule.kind, rule.name)


def threshold_curve(n: int, pair) -> ThresholdCurve:
    """Build the curve for ``pair``: a key of :data:`PAIRS` or ``(high, low)`` rules/names.

    Both rules must be admissible, with ``low``'s accept set inside ``high``'s
    and not equal to it.  Admissibility makes the worst negative state PnotQ
    for both rules, so ``B`` is a single polynomial.
    """
    check_committee_size(n)
    if isinstance(pair, str):
        key = pair.upper().replace(",", "").replace("-", "").replace(" ", "")
        if key not in PAIRS:
            raise DomainError(f"unknown rule pair {pair!r}; expected one of {', '.join(PAIRS)}")
        pair = PAIRS[key]
    high, low = (r if isinstance(r, DecisionRule) else builtin_rule(r, n) for r in pair)
    if high.n != n or low.n != n:
        raise DomainError(f"rules must be for n={n}")
    if low.mask & ~high.mask:
        raise CapabilityError(f"{low.name} is not below {high.name} on every table")
    if low.mask == high.mask:
        raise CapabilityError(
            f"{high.name} and {low.name} coincide for n={n}; there is no crossing weight")
    for rule in (high, low):
        if not is_admissible(rule):
            raise CapabilityError(f"threshold curves need admissible rules; {rule.name} is not")
    a_poly = difference_polynomial(high, low, StateOfNature.PQ)
    b_poly = difference_polynomial(high, low, StateOfNature.PnotQ)
    return ThresholdCurve(n, high, low, a_poly, b_poly)


def weight_threshold_D(curve: ThresholdCurve, theta) -> Fraction:
    """Weight at which the pair's WAOT values cross, for competence ``theta``.

    Defined on ``1/2 <= θ <= 1``; the endpoints take the limiting values
    1/2 (where A = B) and 1 (where A = B = 0).
    """
    theta = to_fraction(theta)
    if not Fraction(1, 2) <= theta <= 1:
        raise DomainError(f"competence must lie in [1/2, 1], got {theta}")
    if theta == 1:
        return Fraction(1)
    a = curve.a_poly.evaluate(theta)
    b = curve.b_poly.evaluate(theta)
    return a / (a + b)


def _crossing(curve: ThresholdCurve, theta, w) -> Fraction:
    """``(1 - w) A - w B``: positive iff ``D(θ) > w``."""
    return (1 - w) * curve.a_poly.evaluate(theta) - w * curve.b_poly.evaluate(theta)


def monotonicity_violations(curve: ThresholdCurve, step=GRID_STEP) -> list[tuple[Fraction, Fraction]]:
    """Consecutive grid points ``(θ1, θ2)`` in (1/2, 1) with ``D(θ2) < D(θ1)``."""
    step = to_fraction(step)
    half = Fraction(1, 2)
    count = int(half / step)
    grid = [half + k * step for k in range(1, count)]
    values = [weight_threshold_D(curve, th) for th in grid]
    return [(grid[k], grid[k + 1]) for k in range(len(grid) - 1) if values[k + 1] < values[k]]


def competence_threshold_C(curve: ThresholdCurve, w, step=GRID_STEP, tol=ROOT_TOLERANCE) -> Fraction:
    """Largest competence in (1/2, 1) at which ``D(θ) = w``.

    A grid of spacing ``step`` is scanned over the whole interval (``D`` is not
    assumed monotone); the last sign change is then refined by exact
    bisection to width ``tol``.  Tangential roots strictly inside a grid cell
    are invisible to the scan.  Decreases of ``D`` seen on the grid are logged.
    """
    w = to_fraction(w)
    if not Fraction(1, 2) < w < 1:
        raise DomainError(
            f"w must lie in (1/2, 1), got {w}; for w <= 1/2 the higher rule always wins")
    step, tol = to_fraction(step), to_fraction(tol)
    half = Fraction(1, 2)
    count = int(half / step)
    grid = [half + k * step for k in range(1, count)]
    signs = [_crossing(curve, th, w) for th in grid]

    previous = None
    for th in grid:
        d = weight_threshold_D(curve, th)
        if previous is not None and d < previous:
            log.warning("D decreases near theta=%s for %s, n=%d", th, curve.label, curve.n)
        previous = d

    # Above the last grid point D tends to 1 > w, so the crossing is positive there.
    last_nonpositive = max((k for k, s in enumerate(signs) if s <= 0), default=None)
    if last_nonpositive is None:
        lo, hi = half, grid[0]
    else:
        lo = grid[last_nonpositive]
        if signs[last_nonpositive] == 0:
            return lo
        hi = grid[last_nonpositive + 1] if last_nonpositive + 1 < len(grid) else Fraction(1)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        s = _crossing(curve, mid, w)
        if s == 0:
            return mid
        if s < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@dataclass(frozen=True)
class WeightInterval:
    """Open interval of weights with a fixed WAOT ranking, worst group first."""

    lo: Fraction
    hi: Fraction
    ranking: tuple[tuple[str, ...], ...]

    @property
    def label(self) -> str:
        return "<".join("=".join(group) for group in self.ranking)


def _ranking(scores: dict[str, Fraction]) -> tuple[tuple[str, ...], ...]:
    groups: dict[Fraction, list[str]] = {}
    for name, value in scores.items():
        groups.setdefault(value, []).append(name)
    return tuple(tuple(sorted(groups[v])) for v in sorted(groups))


def weight_order_intervals(n: int, theta) -> list[WeightInterval]:
    """Split (0, 1) into weight intervals on which the WAOT order of R1, R2, R3 is constant.

    Breakpoints are the pairwise crossing weights; equal ones merge.  Each
    interval is ranked by exact WAOT at its midpoint.
    """
    check_committee_size(n)
    theta = to_fraction(theta)
    if not Fraction(1, 2) < theta < 1:
        raise DomainError(f"competence must lie in (1/2, 1), got {theta}")
    rules = {RULE_NUMBERS[k]: builtin_rule(k, n) for k in ("IbyI", "PbyP", "CbyC")}
    breakpoints = set()
    for high, low in PAIRS.values():
        if builtin_rule(high, n) == builtin_rule(low, n):
            continue
        breakpoints.add(weight_threshold_D(threshold_curve(n, (high, low)), theta))
    cuts = [Fraction(0)] + sorted(b for b in breakpoints if 0 < b < 1) + [Fraction(1)]
    model = Homogeneous(theta)
    rates = {name: (true_positive_rate(n, model, r), false_positive_rate(n, model, r))
             for name, r in rules.items()}
    out = []
    for lo, hi in zip(cuts, cuts[1:]):
        mid = (lo + hi) / 2
        scores = {name: weighted_area(tpr, fpr, mid) for name, (tpr, fpr) in rates.items()}
        out.append(WeightInterval(lo, hi, _ranking(scores)))
    return out


METRICS = ("TPR", "TNR", "AOT")


# Float values farther than this from the target decide the comparison
# without exact arithmetic.
_FAST_MARGIN = 1e-9


def _metric_value(n, rule, theta, metric, exact):
    if exact:
        model = Homogeneous(theta)
        tpr = lambda: true_positive_rate(n, model, rule)
        fpr = lambda: false_positive_rate(n, model, rule)
    else:
        tpr = lambda: acceptance_fast(n, rule, StateOfNature.PQ, theta)
        fpr = lambda: max(acceptance_fast(n, rule, s, theta) for s in StateOfNature.negatives())
    if metric == "TPR":
        return tpr()
    if metric == "TNR":
        return 1 - fpr()
    return (tpr() - fpr()) / 2


def min_committee_size(rule, theta, metric: str, k, cap: int = DEFAULT_SCAN_CAP) -> int:
    """Smallest odd ``n >= 3`` at which ``metric`` of ``rule`` reaches ``k``.

    ``rule`` is a rule name (``"IbyI"``, ...) or a callable ``n -> DecisionRule``.
    TNR is ``1 - FPR``.  Each size is screened in floating point and settled
    exactly only when the float value is within ``1e-9`` of ``k``.  Raises
    :class:`NotAttainedError` past ``cap``.
    """
    metric = metric.upper()
    if metric not in METRICS:
        raise DomainError(f"metric must be one of {', '.join(METRICS)}, got {metric!r}")
    theta, k = to_fraction(theta), to_fraction(k)
    if not Fraction(1, 2) < theta < 1:
        raise DomainError(f"competence must lie in (1/2, 1), got {theta}")
    limit = Fraction(1, 2) if metric == "AOT" else Fraction(1)
    if k >= limit:
        raise DomainError(f"threshold for {metric} must be below {limit}, got {k}")
    make = rule if callable(rule) else (lambda n: builtin_rule(rule, n))
    for n in range(3, cap + 1, 2):
        r = make(n)
        approx = _metric_value(n, r, theta, metric, exact=False)
        if abs(approx - float(k)) > _FAST_MARGIN:
            reached = approx > k
        else:
            reached = _metric_value(n, r, theta, metric, exact=True) >= k
        if reached:
            return n
    raise NotAttainedError(f"{metric} >= {k} not reached for odd n <= {cap}", cap)


def paradox_probability(n: int, model, state, rule_a: DecisionRule, rule_b: DecisionRule,
                        exact: bool = True):
    """Probability that ``rule_a`` and ``rule_b`` decide differently under ``state``."""
    check_committee_size(n)
    state = parse_state(state)
    model = as_model(model)
    if rule_a.n != n or rule_b.n != n:
        raise DomainError(f"rules must be for n={n}")
    if isinstance(model, Homogeneous):
        poly = polynomial_over(n, rule_a.mask ^ rule_b.mask, state)
        return poly.evaluate(model.theta) if exact else poly.evaluate_float(model.theta)
    dist = table_distribution(n, model, state, exact=exact)
    return sum((dist[a] for a in disagreement_set(rule_a, rule_b)), Fraction(0) if exact else 0.0)


def area_series(n: int, thetas: Sequence, rules: Sequence[str] = ("IbyI", "PbyP", "CbyC"),
                weight=None) -> list[dict]:
    """AOT (or WAOT at ``weight``) of each rule along a competence grid."""
    rows = []
    for theta in thetas:
        model = Homogeneous(theta)
        for name in rules:
            r = builtin_rule(name, n)
            tpr = true_positive_rate(n, model, r)
            fpr = false_positive_rate(n, model, r)
            value = (tpr - fpr) / 2 if weight is None else weighted_area(tpr, fpr, weight)
            rows.append({"n": n, "theta": to_fraction(theta), "rule": r.name, "value": value})
    return rows
