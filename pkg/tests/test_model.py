import json
from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from doctrinal.errors import CapabilityError, DomainError
from doctrinal.model import (
    CellProbabilities,
    ConditionalCompetence,
    General,
    Homogeneous,
    PerVoter,
    StateOfNature,
    model_to_json,
    parse_model,
    parse_state,
    state_probs,
    table_distribution,
    table_pmf,
)
from doctrinal.tables import enumerate_tables, transpose

from oracles import profile_distribution, theta_cells

STATES = list(StateOfNature)


def test_state_rows():
    assert state_probs("PQ", F("0.9")) == (F("0.81"), F("0.09"), F("0.09"), F("0.01"))
    for s in STATES:
        assert state_probs(s, F(1, 2)) == (F(1, 4),) * 4


@pytest.mark.parametrize("theta", [F(3, 5), F(7, 10), F(1, 3)])
def test_rows_against_first_principles(theta):
    for s in STATES:
        assert tuple(state_probs(s, theta)) == theta_cells(s.value, theta)


def test_pnotq_is_pq_with_swaps():
    th = F(2, 3)
    px, py, pz, pt = state_probs("PQ", th)
    assert tuple(state_probs("PnotQ", th)) == (py, px, pt, pz)


@pytest.mark.parametrize("bad", [0, 1, F(-1, 2), F(3, 2)])
def test_state_probs_domain(bad):
    with pytest.raises(DomainError):
        state_probs("PQ", bad)


def test_parse_state():
    assert parse_state("pnotq") is StateOfNature.PnotQ
    with pytest.raises(DomainError):
        parse_state("PandQ")


def test_pmf_examples():
    th = F("0.9")
    p = state_probs("PQ", th)
    assert table_pmf((3, 0, 0, 0), p) == th**6 == F("0.531441")
    assert table_pmf((1, 1, 1, 0), p) == 6 * th**4 * (1 - th) ** 2


@pytest.mark.parametrize("n", [3, 5, 7])
def test_normalization(n):
    for s in STATES:
        assert table_distribution(n, Homogeneous(F(3, 4)), s).total() == 1
    cells = CellProbabilities(F(1, 10), F(2, 10), F(3, 10), F(4, 10))
    assert sum(table_pmf(a, cells) for a in enumerate_tables(7)) == 1


@pytest.mark.parametrize("n", [3, 5, 7, 9, 11])
def test_convolution_matches_multinomial(n):
    model = Homogeneous(F(7, 10))
    for s in (StateOfNature.PQ, StateOfNature.notPQ):
        a = table_distribution(n, model, s, method="multinomial")
        b = table_distribution(n, model, s, method="convolution")
        assert a.probs == b.probs


def test_per_voter_equal_reduces():
    a = table_distribution(5, PerVoter((F(3, 4),) * 5), "PQ")
    b = table_distribution(5, Homogeneous(F(3, 4)), "PQ")
    assert a.probs == b.probs


def test_mixed_thetas_against_profiles():
    thetas = (F("0.6"), F("0.7"), F("0.8"))
    for s in STATES:
        dist = table_distribution(3, PerVoter(thetas), s)
        assert dist.total() == 1
        oracle = profile_distribution([theta_cells(s.value, th) for th in thetas])
        for a in enumerate_tables(3):
            assert dist[a] == oracle.get(tuple(a), 0)


def test_conditional_row():
    c = ConditionalCompetence(F("0.8"), F("0.9"), F("0.5"))
    assert tuple(c.cells("PQ")) == (F("0.72"), F("0.08"), F("0.10"), F("0.10"))
    # Other states relabel the same joint correctness law.
    assert tuple(c.cells("PnotQ")) == (F("0.08"), F("0.72"), F("0.10"), F("0.10"))
    assert tuple(c.cells("notPQ")) == (F("0.10"), F("0.10"), F("0.72"), F("0.08"))
    assert tuple(c.cells("notPnotQ")) == (F("0.10"), F("0.10"), F("0.08"), F("0.72"))
    for s in STATES:
        assert sum(c.cells(s)) == 1


def test_conditional_equal_competences_is_homogeneous():
    th = F(2, 3)
    c = ConditionalCompetence(th, th, th)
    for s in STATES:
        assert c.cells(s) == state_probs(s, th)


def test_general_model_distribution():
    model = parse_model('{"conditional": {"theta_p": 0.8, "theta_q_given_p": 0.9, '
                        '"theta_q_given_notp": 0.5}}')
    dist = table_distribution(3, model, "PQ")
    assert dist.total() == 1
    assert dist[(3, 0, 0, 0)] == F("0.72") ** 3
    model = General(cells={s: [state_probs(s, F(3, 5))] * 3 for s in STATES})
    assert table_distribution(3, model, "notPQ").probs == \
        table_distribution(3, Homogeneous(F(3, 5)), "notPQ").probs


@pytest.mark.parametrize("n", [3, 5, 7])
def test_state_symmetry(n):
    model = PerVoter(tuple(F(k + 5, 12) for k in range(n)))
    a = table_distribution(n, model, "PnotQ")
    b = table_distribution(n, model, "notPQ").transposed()
    assert all(a[t] == b[t] for t in enumerate_tables(n))


def test_voter_mismatch():
    with pytest.raises(DomainError):
        table_distribution(5, PerVoter((F(3, 5),) * 3), "PQ")


def test_parse_model_forms():
    assert parse_model('{"homogeneous": 0.75}') == Homogeneous(F(3, 4))
    assert parse_model({"per_voter": [0.6, 0.7, 0.8]}).thetas == (F("0.6"), F("0.7"), F("0.8"))
    with pytest.raises(CapabilityError):
        parse_model({"correlated": {}})
    with pytest.raises(DomainError, match="line 1 column"):
        parse_model('{"homogeneous": ')
    with pytest.raises(DomainError):
        parse_model({"homogeneous": 0.5, "per_voter": [0.5]})
    with pytest.raises(DomainError):
        parse_model({"homogeneous": 1.5})


@pytest.mark.parametrize("spec", [
    {"homogeneous": "3/4"},
    {"per_voter": ["3/5", "7/10", "4/5"]},
    {"conditional": {"theta_p": "4/5", "theta_q_given_p": "9/10", "theta_q_given_notp": "1/2"}},
])
def test_model_json_roundtrip(spec):
    model = parse_model(spec)
    assert parse_model(json.loads(json.dumps(model_to_json(model)))) == model


def test_float_path_close_to_exact():
    exact = table_distribution(7, Homogeneous(F(13, 20)), "PQ")
    approx = table_distribution(7, Homogeneous(F(13, 20)), "PQ", exact=False)
    assert all(abs(float(exact[a]) - approx[a]) < 1e-15 for a in enumerate_tables(7))


@settings(max_examples=30, deadline=None)
@given(st.lists(st.fractions(min_value=0, max_value=1, max_denominator=20), min_size=3,
                max_size=3))
def test_random_per_voter_normalized(thetas):
    for s in STATES:
        assert table_distribution(3, PerVoter(tuple(thetas)), s).total() == 1
