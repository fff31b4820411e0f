import json
import math
from fractions import Fraction as F

import pytest

from doctrinal.errors import DomainError
from doctrinal.model import ConditionalCompetence, General, PerVoter, StateOfNature, table_distribution
from doctrinal.rates import acceptance_probability, true_positive_rate
from doctrinal.rules import builtin_rule
from doctrinal.simulation import SimulationReport, estimate_rates, simulate_votes
from doctrinal.tables import ContingencyTable, enumerate_tables


def test_reproducible():
    a = simulate_votes(5, F("0.7"), "PQ", 5000, seed=3, rule=builtin_rule("IbyI", 5))
    b = simulate_votes(5, F("0.7"), "PQ", 5000, seed=3, rule=builtin_rule("IbyI", 5))
    assert a == b
    c = simulate_votes(5, F("0.7"), "PQ", 5000, seed=4, rule=builtin_rule("IbyI", 5))
    assert a != c


def test_chunking_and_merging_do_not_change_votes():
    rule = builtin_rule("PbyP", 7)
    whole = simulate_votes(7, F("0.65"), "notPQ", 3001, seed=9, rule=rule)
    chunked = simulate_votes(7, F("0.65"), "notPQ", 3001, seed=9, rule=rule, chunk_size=77)
    assert whole == chunked
    left = simulate_votes(7, F("0.65"), "notPQ", 1234, seed=9, rule=rule)
    right = simulate_votes(7, F("0.65"), "notPQ", 3001 - 1234, seed=9, rule=rule, start=1234)
    assert left.merge(right) == whole
    assert right.merge(left) == whole


def test_frequencies_sum_to_trials():
    rep = simulate_votes(3, F("0.6"), "PnotQ", 999, seed=1)
    counts = rep.empirical_table_freqs[next(iter(rep.table_counts))]
    assert sum(counts.values()) == 999
    assert all(sum(a) == 3 for a in counts)


def test_perfect_competence():
    rep = simulate_votes(5, 1, "PQ", 1000, seed=0)
    counts = next(iter(rep.table_counts.values()))
    assert counts == {ContingencyTable(5, 0, 0, 0): 1000}


def test_mixed_thetas_within_three_se():
    model = PerVoter((F("0.6"), F("0.7"), F("0.8")))
    trials = 200_000
    rep = simulate_votes(3, model, "PQ", trials, seed=5)
    counts = next(iter(rep.table_counts.values()))
    exact = table_distribution(3, model, "PQ")
    for a in enumerate_tables(3):
        p = float(exact[a])
        se = math.sqrt(p * (1 - p) / trials)
        assert abs(counts.get(a, 0) / trials - p) <= 3 * se + 1e-12, a


def test_conditional_model_cells():
    model = ConditionalCompetence(F("0.8"), F("0.9"), F("0.5"))
    trials = 100_000
    for state in ("PQ", "notPnotQ"):
        rep = simulate_votes(3, model, state, trials, seed=2)
        counts = next(iter(rep.table_counts.values()))
        exact = table_distribution(3, model, state)
        for a in enumerate_tables(3):
            p = float(exact[a])
            assert abs(counts.get(a, 0) / trials - p) <= 4 * math.sqrt(p * (1 - p) / trials) + 1e-12


def test_explicit_cells_model():
    rows = [(F("0.5"), F("0.2"), F("0.2"), F("0.1")), (F("0.4"), F("0.1"), F("0.3"), F("0.2")),
            (F("0.7"), F("0.1"), F("0.1"), F("0.1"))]
    model = General(cells={s: rows for s in StateOfNature})
    rep = simulate_votes(3, model, "PQ", 100_000, seed=8)
    counts = next(iter(rep.table_counts.values()))
    exact = table_distribution(3, model, "PQ")
    for a in enumerate_tables(3):
        p = float(exact[a])
        assert abs(counts.get(a, 0) / 100_000 - p) <= 4 * math.sqrt(p * (1 - p) / 100_000) + 1e-12


@pytest.mark.parametrize("seed", [0, 17, 2**40])
def test_constant_one_accepts(seed):
    rep = estimate_rates(5, F("0.6"), builtin_rule("constant1", 5), 500, seed)
    assert rep.empirical_rates["TPR"] == (1.0, 0.0)
    assert rep.empirical_rates["FPR"][0] == 1.0


def test_large_tpr_r1():
    rep = simulate_votes(11, F("0.60"), "PQ", 1_000_000, seed=20240, rule=builtin_rule("IbyI", 11))
    est, se = rep.empirical_rates["TPR"]
    exact = float(true_positive_rate(11, F("0.60"), builtin_rule("IbyI", 11)))
    assert abs(est - exact) <= 3 * se


def test_large_fpr_cbyc():
    rule = builtin_rule("CbyC", 11)
    rep = estimate_rates(11, F("0.75"), rule, 1_000_000, seed=7)
    est, se = rep.empirical_rates["FPR"]
    exact = float(acceptance_probability(11, F("0.75"), rule, "PnotQ"))
    assert round(exact, 4) == 0.0084
    assert abs(est - exact) <= 3 * se


def test_negative_states_agree():
    rep = estimate_rates(7, F("0.7"), builtin_rule("IbyI", 7), 200_000, seed=11)
    (a, sa), (b, sb) = rep.empirical_rates["PnotQ"], rep.empirical_rates["notPQ"]
    assert abs(a - b) < 4 * math.hypot(sa, sb)


def test_coverage_over_seeds():
    rule = builtin_rule("IbyI", 5)
    exact = float(true_positive_rate(5, F("0.7"), rule))
    inside = 0
    for seed in range(100):
        est, se = simulate_votes(5, F("0.7"), "PQ", 2000, seed, rule).empirical_rates["TPR"]
        inside += abs(est - exact) <= 3 * se
    assert inside >= 99


def test_json_roundtrip():
    rep = estimate_rates(3, F("0.8"), builtin_rule("IbyI", 3), 1000, seed=4)
    data = json.loads(json.dumps(rep.to_json()))
    assert SimulationReport.from_json(data) == rep
    assert data["empirical_rates"]["TPR"]["estimate"] == rep.empirical_rates["TPR"][0]


def test_errors():
    with pytest.raises(DomainError):
        simulate_votes(3, F("0.7"), "PQ", 0, seed=1)
    with pytest.raises(DomainError):
        simulate_votes(3, F("0.7"), "PQ", 10, seed=-1)
    with pytest.raises(DomainError):
        simulate_votes(3, PerVoter((F("0.7"),) * 5), "PQ", 10, seed=1)
    with pytest.raises(DomainError):
        simulate_votes(3, F("0.7"), "PQ", 10, seed=1, rule=builtin_rule("IbyI", 5))
    a = simulate_votes(3, F("0.7"), "PQ", 10, seed=1)
    with pytest.raises(DomainError):
        a.merge(simulate_votes(3, F("0.7"), "PQ", 10, seed=2))
