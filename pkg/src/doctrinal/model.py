"""Probability model of committee voting.

Each voter judges each premise and is *correct* on it with some probability.
The state of nature fixes which beliefs are correct, so a voter's correctness
pattern maps to one of the four table cells.  With one competence ``theta``
shared by every voter and both premises judged independently, the counts are
multinomial with cell probabilities

    ========  ==========  ==========  ==========  ==========
    state     p_x         p_y         p_z         p_t
    ========  ==========  ==========  ==========  ==========
    PQ        θ²          θ(1-θ)      θ(1-θ)      (1-θ)²
    PnotQ     θ(1-θ)      θ²          (1-θ)²      θ(1-θ)
    notPQ     θ(1-θ)      (1-θ)²      θ²          θ(1-θ)
    notPnotQ  (1-θ)²      θ(1-θ)      θ(1-θ)      θ²
    ========  ==========  ==========  ==========  ==========

Heterogeneous committees are handled by exact convolution of the voters'
individual cell distributions.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import CapabilityError, DomainError
from .exact import format_exact, to_fraction
from .tables import ContingencyTable, check_committee_size, check_table, enumerate_tables, transpose


class StateOfNature(enum.Enum):
    PQ = "PQ"
    PnotQ = "PnotQ"
    notPQ = "notPQ"
    notPnotQ = "notPnotQ"

    @property
    def p_true(self) -> bool:
        return self in (StateOfNature.PQ, StateOfNature.PnotQ)

    @property
    def q_true(self) -> bool:
        return self in (StateOfNature.PQ, StateOfNature.notPQ)

    @classmethod
    def negatives(cls) -> tuple["StateOfNature", ...]:
        return (cls.PnotQ, cls.notPQ, cls.notPnotQ)


def parse_state(value) -> StateOfNature:
    if isinstance(value, StateOfNature):
        return value
    for state in StateOfNature:
        if str(value).lower() == state.value.lower():
            return state
    raise DomainError(f"unknown state of nature {value!r}; expected PQ, PnotQ, notPQ or notPnotQ")


class CellProbabilities(NamedTuple):
    """Probabilities of a single vote landing in cells x, y, z, t."""

    p_x: object
    p_y: object
    p_z: object
    p_t: object

    def check(self) -> "CellProbabilities":
        if any(p < 0 or p > 1 for p in self):
            raise DomainError(f"cell probabilities must lie in [0, 1], got {tuple(self)}")
        total = sum(self)
        if isinstance(total, float):
            ok = abs(total - 1) <= 1e-12
        else:
            ok = total == 1
        if not ok:
            raise DomainError(f"cell probabilities must sum to 1, got {total}")
        return self


def _check_probability(theta, name="theta", open_interval=False) -> Fraction:
    theta = to_fraction(theta)
    if open_interval and not 0 < theta < 1:
        raise DomainError(f"{name} must lie strictly between 0 and 1, got {theta}")
    if not 0 <= theta <= 1:
        raise DomainError(f"{name} must lie in [0, 1], got {theta}")
    return theta


def _cells_from_correctness(joint, state: StateOfNature) -> CellProbabilities:
    """Map ``joint[(correct_P, correct_Q)]`` to cell probabilities under ``state``.

    A voter believes P iff their P judgement is correct and P is true, or it is
    wrong and P is false; likewise for Q.
    """
    cells = {}
    for (cp, cq), prob in joint.items():
        believes_p = cp == state.p_true
        believes_q = cq == state.q_true
        cells[(believes_p, believes_q)] = prob
    return CellProbabilities(
        cells[(True, True)], cells[(True, False)], cells[(False, True)], cells[(False, False)]
    )


def state_probs(state, theta) -> CellProbabilities:
    """Cell probabilities for one voter of competence ``theta`` (0 < theta < 1)."""
    state = parse_state(state)
    theta = _check_probability(theta, open_interval=True)
    return _homogeneous_cells(state, theta)


def _homogeneous_cells(state: StateOfNature, theta) -> CellProbabilities:
    q = 1 - theta
    joint = {(True, True): theta * theta, (True, False): theta * q,
             (False, True): q * theta, (False, False): q * q}
    return _cells_from_correctness(joint, state)


@dataclass(frozen=True)
class Homogeneous:
    """Every voter has competence ``theta`` on both premises, judged independently."""

    theta: Fraction

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_probability(self.theta))

    n_voters = None

    def voter_cells(self, n: int, state: StateOfNature) -> list[CellProbabilities]:
        return [_homogeneous_cells(state, self.theta)] * n


@dataclass(frozen=True)
class PerVoter:
    """Voter ``k`` has competence ``thetas[k]`` on both premises."""

    thetas: tuple

    def __post_init__(self):
        thetas = tuple(_check_probability(v, f"thetas[{k}]") for k, v in enumerate(self.thetas))
        if not thetas:
            raise DomainError("per-voter model needs at least one competence")
        object.__setattr__(self, "thetas", thetas)

    @property
    def n_voters(self) -> int:
        return len(self.thetas)

    def voter_cells(self, n: int, state: StateOfNature) -> list[CellProbabilities]:
        return [_homogeneous_cells(state, th) for th in self.thetas]


@dataclass(frozen=True)
class ConditionalCompetence:
    """Competence on Q that depends on whether the voter got P right.

    ``theta_p`` is the probability of judging P correctly; ``theta_q_given_p``
    and ``theta_q_given_notp`` are the probabilities of judging Q correctly
    after a correct, respectively incorrect, judgement on P.
    """

    theta_p: Fraction
    theta_q_given_p: Fraction
    theta_q_given_notp: Fraction

    def __post_init__(self):
        for name in ("theta_p", "theta_q_given_p", "theta_q_given_notp"):
            object.__setattr__(self, name, _check_probability(getattr(self, name), name))

    def cells(self, state) -> CellProbabilities:
        # Joint law of (correct on P, correct on Q); the state only decides
        # which beliefs those correct judgements are.  Under PQ this gives
        # (θP θQ|P, θP(1-θQ|P), (1-θP)θQ|¬P, (1-θP)(1-θQ|¬P)); the other three
        # rows relabel the same four numbers.
        tp, tqp, tqn = self.theta_p, self.theta_q_given_p, self.theta_q_given_notp
        joint = {(True, True): tp * tqp, (True, False): tp * (1 - tqp),
                 (False, True): (1 - tp) * tqn, (False, False): (1 - tp) * (1 - tqn)}
        return _cells_from_correctness(joint, parse_state(state))


@dataclass(frozen=True)
class General:
    """Heterogeneous voters given by conditional competences or explicit cells.

    Exactly one of ``voters`` (a sequence of :class:`ConditionalCompetence`)
    and ``cells`` (a mapping from every state to ``n`` cell vectors) is used.
    A single :class:`ConditionalCompetence` in ``voters`` with ``broadcast=True``
    applies to a committee of any size.
    """

    voters: tuple = ()
    cells: Mapping | None = None
    broadcast: bool = False

    def __post_init__(self):
        if bool(self.voters) == (self.cells is not None):
            raise DomainError("give either conditional voters or explicit cells, not both")
        if self.voters:
            object.__setattr__(self, "voters", tuple(self.voters))
            if self.broadcast and len(self.voters) != 1:
                raise DomainError("broadcast needs exactly one conditional voter")
        else:
            table = {}
            for state in StateOfNature:
                rows = self.cells.get(state, self.cells.get(state.value))
                if rows is None:
                    raise DomainError(f"explicit cells missing state {state.value}")
                table[state] = tuple(
                    CellProbabilities(*(to_fraction(p) for p in row)).check() for row in rows)
            sizes = {len(rows) for rows in table.values()}
            if len(sizes) != 1:
                raise DomainError("every state needs the same number of voters")
            object.__setattr__(self, "cells", table)

    @property
    def n_voters(self):
        if self.voters:
            return None if self.broadcast else len(self.voters)
        return len(self.cells[StateOfNature.PQ])

    def voter_cells(self, n: int, state: StateOfNature) -> list[CellProbabilities]:
        if self.voters:
            if self.broadcast:
                return [self.voters[0].cells(state)] * n
            return [v.cells(state) for v in self.voters]
        return list(self.cells[state])


CompetenceModel = Homogeneous | PerVoter | General


def as_model(model) -> CompetenceModel:
    """Accept a model object, a bare competence, or a JSON-style dict."""
    if isinstance(model, (Homogeneous, PerVoter, General)):
        return model
    if isinstance(model, Mapping):
        return parse_model(model)
    if isinstance(model, ConditionalCompetence):
        return General(voters=(model,), broadcast=True)
    return Homogeneous(model)


def parse_model(spec) -> CompetenceModel:
    """Decode a competence model from JSON text or a decoded object.

    ``{"homogeneous": 0.75}``, ``{"per_voter": [0.6, 0.7, 0.8]}``,
    ``{"conditional": {"theta_p": 0.8, "theta_q_given_p": 0.9,
    "theta_q_given_notp": 0.5}}`` (or a list of such objects, one per voter),
    and ``{"cells": {"PQ": [[px, py, pz, pt], ...], ...}}``.
    """
    if isinstance(spec, str):
        try:
            spec = json.loads(spec, parse_float=Fraction)
        except json.JSONDecodeError as exc:
            raise DomainError(
                f"model spec parse error at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from None
    if not isinstance(spec, Mapping) or len(spec) != 1:
        raise DomainError("model spec must be an object with exactly one key")
    (key, value), = spec.items()
    if key == "homogeneous":
        return Homogeneous(value)
    if key == "per_voter":
        return PerVoter(tuple(value))
    if key == "conditional":
        if isinstance(value, Mapping):
            return General(voters=(ConditionalCompetence(**value),), broadcast=True)
        return General(voters=tuple(ConditionalCompetence(**v) for v in value))
    if key == "cells":
        return General(cells=value)
    if key == "correlated":
        raise CapabilityError("correlated voters need a user-supplied joint law and are not supported")
    raise DomainError(f"unknown model kind {key!r}")


def model_to_json(model: CompetenceModel) -> dict:
    if isinstance(model, Homogeneous):
        return {"homogeneous": format_exact(model.theta)}
    if isinstance(model, PerVoter):
        return {"per_voter": [format_exact(v) for v in model.thetas]}
    if model.voters:
        rows = [{k: format_exact(getattr(v, k))
                 for k in ("theta_p", "theta_q_given_p", "theta_q_given_notp")}
                for v in model.voters]
        return {"conditional": rows[0] if model.broadcast else rows}
    return {"cells": {s.value: [[format_exact(p) for p in row] for row in rows]
                      for s, rows in model.cells.items()}}


def multinomial(counts: Sequence[int]) -> int:
    out = factorial(sum(counts))
    for c in counts:
        out //= factorial(c)
    return out


def table_pmf(a, p: CellProbabilities):
    """Multinomial probability of table ``a`` when each vote has cell law ``p``."""
    a = check_table(a)
    px, py, pz, pt = p
    return multinomial(a) * px**a.x * py**a.y * pz**a.z * pt**a.t


@dataclass(frozen=True)
class TableDistribution:
    """Exact law of the table for ``n`` voters, keyed by table."""

    n: int
    probs: Mapping[ContingencyTable, object]

    def __getitem__(self, a):
        return self.probs.get(tuple(a), 0)

    def total(self):
        return sum(self.probs.values())

    def probability(self, tables: Iterable) -> object:
        return sum((self[a] for a in tables), 0)

    def transposed(self) -> "TableDistribution":
        """Law of the transposed table."""
        return TableDistribution(self.n, {transpose(a): p for a, p in self.probs.items()})

    def items(self):
        return self.probs.items()


def _model_voters(n: int, model: CompetenceModel, state: StateOfNature):
    expected = model.n_voters
    if expected is not None and expected != n:
        raise DomainError(f"model describes {expected} voters, but n={n}")
    return model.voter_cells(n, state)


def convolve_voters(cells: Sequence[CellProbabilities]) -> TableDistribution:
    """Law of the sum of independent one-hot votes, by exact dynamic programming."""
    partial = {(0, 0, 0, 0): 1}
    for px, py, pz, pt in cells:
        nxt = {}
        for (x, y, z, t), prob in partial.items():
            for key, step in (((x + 1, y, z, t), px), ((x, y + 1, z, t), py),
                              ((x, y, z + 1, t), pz), ((x, y, z, t + 1), pt)):
                if step:
                    nxt[key] = nxt.get(key, 0) + prob * step
        partial = nxt
    n = len(cells)
    return TableDistribution(n, {ContingencyTable(*k): v for k, v in partial.items()})


def table_distribution(n: int, model, state, exact: bool = True,
                       method: str = "auto") -> TableDistribution:
    """Law of the contingency table for ``n`` voters under ``state``.

    Homogeneous models use the multinomial formula; everything else (or
    ``method="convolution"``) is an n-fold convolution of per-voter laws.
    With ``exact=False`` the computation runs in floating point.
    """
    check_committee_size(n)
    state = parse_state(state)
    model = as_model(model)
    cells = [CellProbabilities(*c).check() for c in _model_voters(n, model, state)]
    if not exact:
        cells = [CellProbabilities(*(float(p) for p in c)) for c in cells]
    if method not in ("auto", "multinomial", "convolution"):
        raise DomainError(f"unknown method {method!r}")
    if method == "convolution" or (method == "auto" and not isinstance(model, Homogeneous)):
        dist = convolve_voters(cells)
        probs = {a: dist[a] for a in enumerate_tables(n)}
        return TableDistribution(n, probs)
    if not isinstance(model, Homogeneous):
        raise CapabilityError("the multinomial route needs a homogeneous model")
    p = cells[0]
    return TableDistribution(n, {a: table_pmf(a, p) for a in enumerate_tables(n)})
