"""True/false positive rates, triangle areas, and exact rate polynomials.

For a homogeneous committee every table probability has the form
``c * θ**e * (1-θ)**(2n-e)`` with an integer multinomial coefficient ``c`` and
an exponent ``e`` that is linear in the counts:

=========  ===================
state      exponent of θ
=========  ===================
PQ         2x + y + z
PnotQ      x + 2y + t
notPQ      x + 2z + t
notPnotQ   y + z + 2t
=========  ===================

so the acceptance probability of any rule is a :class:`RatePolynomial` with
integer coefficients, evaluated exactly at rational θ.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import CapabilityError, DomainError
from .exact import format_decimal, format_exact, format_fixed, to_fraction
from .model import Homogeneous, StateOfNature, as_model, parse_state, table_distribution
from .rules import DecisionRule
from .tables import check_committee_size, enumerate_tables, table_arrays

_EXPONENTS = {
    StateOfNature.PQ: lambda x, y, z, t: 2 * x + y + z,
    StateOfNature.PnotQ: lambda x, y, z, t: x + 2 * y + t,
    StateOfNature.notPQ: lambda x, y, z, t: x + 2 * z + t,
    StateOfNature.notPnotQ: lambda x, y, z, t: y + z + 2 * t,
}


@dataclass(frozen=True)
class RatePolynomial:
    """``sum(c * θ**e * (1-θ)**(2n-e))`` over ``terms = ((e, c), ...)``.

    ``terms`` is kept in the mixed basis, sorted by exponent, with zero
    coefficients dropped.  :attr:`expanded` gives the ordinary coefficients
    of ``1, θ, ..., θ**(2n)``.
    """

    n: int
    terms: tuple[tuple[int, int], ...]

    @classmethod
    def from_coefficients(cls, n: int, coefficients: Mapping[int, int] | Sequence[int]):
        items = coefficients.items() if isinstance(coefficients, Mapping) else enumerate(coefficients)
        terms = tuple(sorted((e, c) for e, c in items if c))
        if any(e < 0 or e > 2 * n for e, _ in terms):
            raise DomainError(f"exponents must lie in 0..{2 * n}")
        return cls(n, terms)

    @property
    def degree_bound(self) -> int:
        return 2 * self.n

    @property
    def max_exponent(self) -> int | None:
        """Largest mixed-basis exponent of θ carrying a non-zero coefficient."""
        return self.terms[-1][0] if self.terms else None

    @property
    def min_exponent(self) -> int | None:
        return self.terms[0][0] if self.terms else None

    @property
    def expanded(self) -> tuple[int, ...]:
        two_n = 2 * self.n
        out = [0] * (two_n + 1)
        for e, c in self.terms:
            rest = two_n - e
            for j in range(rest + 1):
                out[e + j] += c * comb(rest, j) * (-1) ** j
        return tuple(out)

    def __call__(self, theta):
        return self.evaluate(theta)

    def evaluate(self, theta) -> Fraction:
        """Exact value at a rational θ."""
        theta = to_fraction(theta)
        p, q = theta.numerator, theta.denominator
        r = q - p
        two_n = 2 * self.n
        total = sum(c * p**e * r ** (two_n - e) for e, c in self.terms)
        return Fraction(total, q**two_n)

    def evaluate_float(self, theta: float) -> float:
        """Floating-point fast path; every mixed-basis term is non-negative when the coefficients are."""
        theta = float(theta)
        two_n = 2 * self.n
        return math.fsum(float(c) * theta**e * (1.0 - theta) ** (two_n - e) for e, c in self.terms)

    def evaluate_expanded(self, theta) -> Fraction:
        """Exact value through the ordinary basis (Horner), as a cross-check."""
        theta = to_fraction(theta)
        acc = Fraction(0)
        for c in reversed(self.expanded):
            acc = acc * theta + c
        return acc

    def __add__(self, other: "RatePolynomial") -> "RatePolynomial":
        return self._combine(other, 1)

    def __sub__(self, other: "RatePolynomial") -> "RatePolynomial":
        return self._combine(other, -1)

    def _combine(self, other, sign):
        if self.n != other.n:
            raise DomainError("polynomials for different committee sizes")
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + sign * c
        return RatePolynomial.from_coefficients(self.n, acc)


@lru_cache(maxsize=32)
def _table_terms(n: int, state: StateOfNature) -> tuple[tuple[int, ...], tuple[int, ...]]:
    fact = [math.factorial(k) for k in range(n + 1)]
    exponent = _EXPONENTS[state]
    coefs, exps = [], []
    for x, y, z, t in enumerate_tables(n):
        coefs.append(fact[n] // (fact[x] * fact[y] * fact[z] * fact[t]))
        exps.append(exponent(x, y, z, t))
    return tuple(coefs), tuple(exps)


def _set_bits(mask: int):
    return (i for i, ch in enumerate(reversed(bin(mask)[2:])) if ch == "1")


def polynomial_over(n: int, mask: int, state) -> RatePolynomial:
    """Rate polynomial of the table set encoded by ``mask`` under ``state``."""
    state = parse_state(state)
    coefs, exps = _table_terms(check_committee_size(n), state)
    acc = [0] * (2 * n + 1)
    for i in _set_bits(mask):
        acc[exps[i]] += coefs[i]
    return RatePolynomial.from_coefficients(n, acc)


@lru_cache(maxsize=1024)
def _rule_polynomial(n: int, rule: DecisionRule, state: StateOfNature) -> RatePolynomial:
    return polynomial_over(n, rule.mask, state)


def rate_polynomial(n: int, rule: DecisionRule, state, model=None) -> RatePolynomial:
    """Acceptance probability of ``rule`` under ``state`` as a polynomial in θ.

    Only meaningful for the homogeneous model; passing any other model raises
    :class:`~doctrinal.errors.CapabilityError`.
    """
    if model is not None and not isinstance(as_model(model), Homogeneous):
        raise CapabilityError("rate polynomials exist only for a single shared competence")
    if rule.n != n:
        raise DomainError(f"rule is for n={rule.n}, expected n={n}")
    return _rule_polynomial(n, rule, parse_state(state))


def difference_polynomial(high: DecisionRule, low: DecisionRule, state) -> RatePolynomial:
    """Polynomial summed over the tables accepted by ``high`` and rejected by ``low``."""
    if high.n != low.n:
        raise DomainError("rules for different committee sizes")
    return polynomial_over(high.n, high.mask & ~low.mask, state)


def acceptance_probability(n: int, model, rule: DecisionRule, state, exact: bool = True):
    """Probability that ``rule`` accepts P∧Q when ``state`` is the truth.

    Summation runs over the rule's accept set.  Homogeneous models route
    through the cached rate polynomial; other models through the exact
    convolution law of the table.
    """
    check_committee_size(n)
    if rule.n != n:
        raise DomainError(f"rule is for n={rule.n}, expected n={n}")
    model = as_model(model)
    state = parse_state(state)
    if isinstance(model, Homogeneous):
        poly = _rule_polynomial(n, rule, state)
        return poly.evaluate(model.theta) if exact else poly.evaluate_float(model.theta)
    dist = table_distribution(n, model, state, exact=exact)
    return sum((dist[a] for a in rule.accepts()), Fraction(0) if exact else 0.0)


@lru_cache(maxsize=64)
def _log_coefficients(n: int) -> np.ndarray:
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n + 1)))])
    return log_fact[n] - log_fact[table_arrays(n)].sum(axis=1)


def acceptance_fast(n: int, rule: DecisionRule, state, theta) -> float:
    """Float acceptance probability for a shared competence ``0 < θ < 1``.

    Vectorized over the accept set, each term formed in log space; relative
    error stays near machine precision for committees in the hundreds.
    """
    check_committee_size(n)
    theta = float(theta)
    if not 0.0 < theta < 1.0:
        raise DomainError(f"fast path needs 0 < theta < 1, got {theta}")
    bits = rule.bits()
    x, y, z, t = table_arrays(n)[bits].T
    e = _EXPONENTS[parse_state(state)](x, y, z, t)
    logs = _log_coefficients(n)[bits] + e * math.log(theta) + (2 * n - e) * math.log1p(-theta)
    return float(np.exp(logs).sum())


def true_positive_rate(n: int, model, rule: DecisionRule, exact: bool = True):
    return acceptance_probability(n, model, rule, StateOfNature.PQ, exact)


def negative_acceptance(n: int, model, rule: DecisionRule, exact: bool = True) -> dict:
    """Acceptance probability under each of the three states where P∧Q is false."""
    return {s: acceptance_probability(n, model, rule, s, exact) for s in StateOfNature.negatives()}


def false_positive_rate(n: int, model, rule: DecisionRule, exact: bool = True):
    """Largest acceptance probability over the three negative states."""
    return max(negative_acceptance(n, model, rule, exact).values())


def _check_weight(w) -> Fraction:
    w = to_fraction(w)
    if not 0 < w < 1:
        raise DomainError(f"weights must lie strictly between 0 and 1, got {w}")
    return w


def weighted_area(tpr, fpr, w):
    """``1/2 - (w * FPR + (1 - w) * FNR)``."""
    w = _check_weight(w)
    if isinstance(tpr, float) or isinstance(fpr, float):
        w = float(w)
    return Fraction(1, 2) - (w * fpr + (1 - w) * (1 - tpr))


@dataclass(frozen=True)
class Metrics:
    """Rates and triangle areas for one (n, model, rule)."""

    n: int
    rule: str
    tpr: object
    fpr: object
    fpr_state: StateOfNature
    waot: Mapping = field(default_factory=dict)
    theta: object = None

    @property
    def fnr(self):
        return 1 - self.tpr

    @property
    def tnr(self):
        return 1 - self.fpr

    @property
    def aot(self):
        return (self.tpr - self.fpr) / 2

    CSV_FIELDS = ("n", "theta", "rule", "tpr", "fpr", "fnr", "tnr", "aot", "w", "waot")

    def rows(self, places: int = 4) -> list[dict]:
        """One CSV row per weight (a single row with empty ``w`` if there are none).

        Metric columns carry the half-to-even display value; ``*_full`` columns
        carry the shortest float repr.
        """
        base = {"n": self.n, "theta": "" if self.theta is None else format_decimal(self.theta),
                "rule": self.rule}
        values = {"tpr": self.tpr, "fpr": self.fpr, "fnr": self.fnr, "tnr": self.tnr,
                  "aot": self.aot}
        weights = list(self.waot.items()) or [(None, None)]
        out = []
        for w, waot in weights:
            row = dict(base)
            row.update({k: format_fixed(v, places) for k, v in values.items()})
            row["w"] = "" if w is None else format_decimal(w)
            row["waot"] = "" if waot is None else format_fixed(waot, places)
            row.update({f"{k}_full": repr(float(v)) for k, v in values.items()})
            row["waot_full"] = "" if waot is None else repr(float(waot))
            out.append(row)
        return out

    def to_json(self) -> dict:
        def enc(v):
            return {"exact": format_exact(v), "float": float(v)} if isinstance(v, Fraction) else v

        return {
            "n": self.n,
            "theta": None if self.theta is None else format_exact(self.theta),
            "rule": self.rule,
            "tpr": enc(self.tpr),
            "fpr": enc(self.fpr),
            "fpr_state": self.fpr_state.value,
            "fnr": enc(self.fnr),
            "tnr": enc(self.tnr),
            "aot": enc(self.aot),
            "waot": [{"w": format_exact(w), "value": enc(v)} for w, v in self.waot.items()],
        }


def metrics(n: int, model, rule: DecisionRule, weights: Iterable = (), exact: bool = True) -> Metrics:
    """Assemble TPR, FPR (worst negative state), FNR, TNR, AOT and WAOT per weight."""
    weights = [_check_weight(w) for w in weights]
    model = as_model(model)
    tpr = true_positive_rate(n, model, rule, exact)
    negatives = negative_acceptance(n, model, rule, exact)
    fpr_state = max(negatives, key=lambda s: negatives[s])
    fpr = negatives[fpr_state]
    waot = {w: weighted_area(tpr, fpr, w) for w in weights}
    theta = model.theta if isinstance(model, Homogeneous) else None
    return Metrics(n, rule.name, tpr, fpr, fpr_state, waot, theta)

