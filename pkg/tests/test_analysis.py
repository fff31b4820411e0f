import logging
import random
from fractions import Fraction as F

import pytest

from doctrinal.analysis import (
    PAIRS,
    area_series,
    competence_threshold_C,
    min_committee_size,
    monotonicity_violations,
    paradox_probability,
    threshold_curve,
    weight_order_intervals,
    weight_threshold_D,
)
from doctrinal.errors import CapabilityError, DomainError, NotAttainedError
from doctrinal.exact import format_fixed
from doctrinal.model import ConditionalCompetence, Homogeneous, PerVoter, StateOfNature
from doctrinal.rates import metrics
from doctrinal.rules import builtin_rule, custom_rule

ODD = range(3, 17, 2)
GRID = [F(k, 100) for k in range(51, 100)]


def valid_pairs(n):
    return [p for p in PAIRS if not (p == "R2R3" and n < 7)]


def test_d_examples():
    assert weight_threshold_D(threshold_curve(3, "R1R2"), F("0.7")) == F(7, 10)
    assert format_fixed(threshold_curve(11, "R1R2")(F("0.60"))) == "0.6930"
    assert format_fixed(threshold_curve(11, "R2R3")(F("0.60"))) == "0.8215"


def test_d_endpoints():
    curve = threshold_curve(7, "R1R2")
    assert curve(F(1, 2)) == F(1, 2)
    assert curve(1) == 1
    for bad in (F(49, 100), F(101, 100)):
        with pytest.raises(DomainError):
            curve(bad)


@pytest.mark.parametrize("n", [3, 5])
def test_r2r3_coincide_small(n):
    with pytest.raises(CapabilityError, match="coincide"):
        threshold_curve(n, "R2R3")


def test_curve_preconditions():
    with pytest.raises(CapabilityError):
        threshold_curve(7, ("CbyC", "IbyI"))
    with pytest.raises(CapabilityError):
        threshold_curve(5, ("IbyI", "R0"))
    with pytest.raises(DomainError):
        threshold_curve(7, "R1R4")
    assert threshold_curve(7, "r1-r2").label == "R1R2"


def test_c_examples():
    c = competence_threshold_C(threshold_curve(11, "R1R2"), F("0.75"))
    assert abs(c - F("0.6374")) <= F(5, 10**5)
    assert format_fixed(c) == "0.6374"
    assert competence_threshold_C(threshold_curve(3, "R1R2"), F("0.8")) == F(4, 5)
    inverse = competence_threshold_C(threshold_curve(11, "R1R2"), F("0.6930"))
    assert abs(inverse - F("0.6")) <= F(1, 1000)


def test_c_domain():
    curve = threshold_curve(5, "R1R2")
    for w in (F(1, 2), F(1, 3), 1):
        with pytest.raises(DomainError):
            competence_threshold_C(curve, w)


@pytest.mark.parametrize("n", [5, 7, 11])
def test_c_below_w_and_beyond(n):
    curve = threshold_curve(n, "R1R2")
    w = F(7, 10)
    c = competence_threshold_C(curve, w)
    assert c < w
    on, off = metrics(n, c + F(1, 100), curve.high, [w]), metrics(n, c + F(1, 100), curve.low, [w])
    assert on.waot[w] > off.waot[w]


BREAKPOINTS = {
    F("0.60"): ("0.6930", "0.7184", "0.8215"),
    F("0.75"): ("0.8722", "0.9154", "0.9820"),
    F("0.90"): ("0.9576", "0.9847", "0.9995"),
}
ORDERS = ["R3<R2<R1", "R3<R1<R2", "R1<R3<R2", "R1<R2<R3"]


@pytest.mark.parametrize("theta", list(BREAKPOINTS))
def test_weight_intervals_n11(theta):
    intervals = weight_order_intervals(11, theta)
    assert [format_fixed(iv.hi) for iv in intervals[:-1]] == list(BREAKPOINTS[theta])
    assert [iv.label for iv in intervals] == ORDERS
    assert intervals[0].lo == 0 and intervals[-1].hi == 1


def test_weight_intervals_n3():
    intervals = weight_order_intervals(3, F("0.7"))
    assert len(intervals) == 2
    assert intervals[0].hi == F(7, 10)
    assert [iv.label for iv in intervals] == ["R2=R3<R1", "R1<R2=R3"]


MINSIZE = {
    "TPR": [95, 41, 23, 13, 9, 7, 5, 3],
    "TNR": [65, 29, 15, 9, 7, 5, 3, 3],
    "AOT": [81, 35, 19, 13, 7, 5, 3, 3],
}
TARGETS = {"TPR": F("0.95"), "TNR": F("0.95"), "AOT": F("0.45")}


def test_minsize_examples():
    assert min_committee_size("IbyI", F("0.60"), "TPR", F("0.95")) == 95
    assert min_committee_size("IbyI", F("0.60"), "TNR", F("0.95")) == 65
    assert min_committee_size("IbyI", F("0.80"), "AOT", F("0.45")) == 7
    assert min_committee_size("IbyI", F("0.95"), "TPR", F("0.95")) == 3
    assert min_committee_size("CbyC", F("0.6"), "TPR", 0) == 3


@pytest.mark.slow
@pytest.mark.parametrize("metric", list(MINSIZE))
def test_minsize_table(metric):
    thetas = [F(k, 100) for k in range(60, 100, 5)]
    got = [min_committee_size("IbyI", th, metric, TARGETS[metric]) for th in thetas]
    assert got == MINSIZE[metric]


def test_minsize_matches_exact_scan():
    # Brute exact scan for a small case, checking the float screen.
    theta, k = F("0.7"), F("0.9")
    n = 3
    while metrics(n, theta, builtin_rule("IbyI", n)).tpr < k:
        n += 2
    assert min_committee_size("IbyI", theta, "TPR", k) == n


def test_minsize_errors():
    with pytest.raises(NotAttainedError) as err:
        min_committee_size("IbyI", F("0.51"), "TPR", F("0.99"), cap=21)
    assert err.value.cap == 21
    with pytest.raises(DomainError):
        min_committee_size("IbyI", F("0.6"), "AOT", F(1, 2))
    with pytest.raises(DomainError):
        min_committee_size("IbyI", F("0.6"), "TPR", 1)
    with pytest.raises(DomainError):
        min_committee_size("IbyI", F("0.5"), "TPR", F("0.9"))
    with pytest.raises(DomainError):
        min_committee_size("IbyI", F("0.6"), "FPR", F("0.9"))


def test_paradox_examples():
    r1, r3 = builtin_rule("IbyI", 3), builtin_rule("CbyC", 3)
    p = paradox_probability(3, F("0.9"), "PQ", r1, r3)
    assert p == 6 * F("0.9") ** 4 * F("0.1") ** 2 == F("0.039366")
    assert paradox_probability(3, F(1, 2), "PQ", r1, r3) == F(3, 32)
    for n in (3, 5):
        for state in StateOfNature:
            assert paradox_probability(n, F(2, 3), state, builtin_rule("PbyP", n),
                                       builtin_rule("CbyC", n)) == 0


def test_paradox_general_model():
    r1, r3 = builtin_rule("IbyI", 5), builtin_rule("CbyC", 5)
    a = paradox_probability(5, PerVoter((F(3, 4),) * 5), "PnotQ", r1, r3)
    b = paradox_probability(5, Homogeneous(F(3, 4)), "PnotQ", r1, r3)
    assert a == b
    c = paradox_probability(5, ConditionalCompetence(F("0.8"), F("0.9"), F("0.5")), "PQ", r1, r3)
    assert 0 < c < 1
    with pytest.raises(DomainError):
        paradox_probability(5, F("0.7"), "PQ", builtin_rule("IbyI", 3), r3)


@pytest.mark.parametrize("n", ODD)
def test_aot_ordering(n):
    rules = [builtin_rule(k, n) for k in ("IbyI", "PbyP", "CbyC")]
    for th in GRID:
        a1, a2, a3 = (metrics(n, th, r).aot for r in rules)
        assert a2 < a1
        assert (a3 < a2) if n >= 7 else (a3 == a2)


@pytest.mark.parametrize("n", [3, 7, 11])
def test_low_weight_matches_aot_order(n):
    rules = [builtin_rule(k, n) for k in ("IbyI", "PbyP", "CbyC")]
    for th in GRID[::6]:
        for w in (F(1, 10), F(3, 10), F(49, 100)):
            v1, v2, v3 = (metrics(n, th, r, [w]).waot[w] for r in rules)
            assert v2 < v1 and v3 <= v2


@pytest.mark.parametrize("n", ODD)
def test_d_bounds(n):
    for pair in valid_pairs(n):
        curve = threshold_curve(n, pair)
        for th in GRID:
            d = curve(th)
            assert F(1, 2) < d < 1
            assert d >= th
            if n == 3:
                assert d == th
            else:
                assert d > th


def test_d_positive_parts():
    for n in (7, 9):
        for pair in ("R1R2", "R2R3"):
            curve = threshold_curve(n, pair)
            for th in GRID[::7]:
                assert curve.a_poly.evaluate(th) > 0 and curve.b_poly.evaluate(th) > 0


def test_dichotomy_random():
    rng = random.Random(2024)
    for _ in range(200):
        n = rng.choice(list(ODD))
        th = F(rng.randint(501, 999), 1000)
        w = F(rng.randint(1, 999), 1000)
        curve = threshold_curve(n, "R1R2")
        d = curve(th)
        hi, lo = (metrics(n, th, r, [w]).waot[w] for r in (curve.high, curve.low))
        sign = (hi > lo) - (hi < lo)
        assert sign == (d > w) - (d < w)


@pytest.mark.parametrize("n", [5, 7, 11])
def test_d_limits(n):
    curve = threshold_curve(n, "R1R2")
    assert curve(F("0.500001")) < F("0.51")
    assert curve(F("0.999999")) > F("0.99")


@pytest.mark.parametrize("n,pair", [(5, "R1R2"), (7, "R2R3"), (11, "R1R2"), (11, "R2R3")])
def test_no_monotonicity_violations(n, pair):
    assert monotonicity_violations(threshold_curve(n, pair), F(1, 100)) == []


def test_clean_scan_logs_nothing(caplog):
    # D is increasing here, so the scan must not warn.
    curve = threshold_curve(3, ("IbyI", "CbyC"))
    with caplog.at_level(logging.WARNING, logger="doctrinal.analysis"):
        competence_threshold_C(curve, F("0.7"), step=F(1, 50))
    assert not caplog.records


def test_custom_pair_curve():
    hi = builtin_rule("IbyI", 5)
    lo = custom_rule(5, builtin_rule("CbyC", 5).accepts())
    assert threshold_curve(5, (hi, lo))(F("0.7")) == threshold_curve(5, "R1R3")(F("0.7"))


def test_area_series():
    rows = area_series(11, [F("0.6")], weight=F("0.75"))
    assert [r["rule"] for r in rows] == ["IbyI", "PbyP", "CbyC"]
    assert format_fixed(rows[0]["value"]) == "0.2526"
    rows = area_series(11, [F("0.6")])
    assert format_fixed(rows[0]["value"]) == "0.1910"
