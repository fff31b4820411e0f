"""Monte Carlo simulation of committee votes, independent of the exact engine.

Randomness is counter based: the uniform deciding premise ``j`` for voter
``v`` in trial ``i`` is raw draw number ``(i * n + v) * 2 + j`` of a Philox
stream keyed by ``(seed, state index)``.  Any split of the trials into chunks
or separate runs therefore reproduces the same votes bit for bit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import DomainError
from .model import Homogeneous, PerVoter, General, StateOfNature, as_model, parse_state
from .rules import DecisionRule
from .tables import ContingencyTable, check_committee_size

DEFAULT_CHUNK = 50_000

_STATES = tuple(StateOfNature)


@dataclass(frozen=True)
class SimulationReport:
    """Tallies of simulated trials, with one rule's acceptance counts optional.

    ``table_counts[state][table]`` counts trials ending in ``table``;
    ``accept_counts[state]`` counts trials in which ``rule`` accepted.
    """

    n: int
    trials: int
    seed: int
    table_counts: Mapping = field(default_factory=dict)
    accept_counts: Mapping = field(default_factory=dict)
    rule: str | None = None

    @property
    def empirical_table_freqs(self) -> Mapping:
        return self.table_counts

    @property
    def empirical_rates(self) -> dict[str, tuple[float, float]]:
        """``{metric: (estimate, standard error)}``.

        ``TPR`` is acceptance under PQ, each negative state appears under its
        own name, and ``FPR`` is the largest of the three when all are present.
        """
        out = {}
        for state, count in self.accept_counts.items():
            out["TPR" if state is StateOfNature.PQ else state.value] = _estimate(count, self.trials)
        negatives = [s.value for s in StateOfNature.negatives()]
        if all(s in out for s in negatives):
            out["FPR"] = max((out[s] for s in negatives), key=lambda pair: pair[0])
        return out

    def merge(self, other: "SimulationReport") -> "SimulationReport":
        """Combine reports over disjoint trial ranges of the same experiment."""
        if (self.n, self.seed, self.rule) != (other.n, other.seed, other.rule):
            raise DomainError("can only merge reports with the same n, seed and rule")
        if set(self.table_counts) != set(other.table_counts):
            raise DomainError("can only merge reports over the same states")
        tables = {}
        for state in self.table_counts:
            counts = dict(self.table_counts[state])
            for a, c in other.table_counts[state].items():
                counts[a] = counts.get(a, 0) + c
            tables[state] = dict(sorted(counts.items()))
        accepts = {s: self.accept_counts.get(s, 0) + other.accept_counts.get(s, 0)
                   for s in self.accept_counts}
        return SimulationReport(self.n, self.trials + other.trials, self.seed, tables,
                                accepts, self.rule)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "rule": self.rule,
            "empirical_rates": {k: {"estimate": p, "se": se}
                                for k, (p, se) in self.empirical_rates.items()},
            "accept_counts": {s.value: c for s, c in self.accept_counts.items()},
            "table_counts": {s.value: [[*a, c] for a, c in counts.items()]
                             for s, counts in self.table_counts.items()},
        }

    @classmethod
    def from_json(cls, data) -> "SimulationReport":
        if isinstance(data, str):
            data = json.loads(data)
        tables = {parse_state(s): {ContingencyTable(*row[:4]): row[4] for row in rows}
                  for s, rows in data["table_counts"].items()}
        accepts = {parse_state(s): c for s, c in data["accept_counts"].items()}
        return cls(data["n"], data["trials"], data["seed"], tables, accepts, data["rule"])


def _estimate(count: int, trials: int) -> tuple[float, float]:
    p = count / trials
    return p, math.sqrt(p * (1 - p) / trials)


def _uniforms(seed: int, stream: int, start: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for raw draws ``start .. start + count - 1``."""
    bitgen = np.random.Philox(key=np.array([seed, stream], dtype=np.uint64))
    # Each Philox counter step yields four 64-bit draws.
    bitgen.advance(start // 4)
    skip = start % 4
    raw = bitgen.random_raw(skip + count)[skip:]
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def _voter_parameters(n: int, model, state: StateOfNature):
    """Per-voter thresholds ``(first, second_if_yes, second_if_no)`` and a mode.

    ``"correct"`` mode: the first uniform decides whether P is judged correctly,
    the second whether Q is, given the P outcome.  ``"belief"`` mode (explicit
    cells): the first decides belief in P, the second belief in Q given it.
    """
    model = as_model(model)
    if isinstance(model, Homogeneous):
        th = float(model.theta)
        return "correct", np.full(n, th), np.full(n, th), np.full(n, th)
    if model.n_voters is not None and model.n_voters != n:
        raise DomainError(f"model has {model.n_voters} voters, committee has {n}")
    if isinstance(model, PerVoter):
        th = np.array([float(v) for v in model.thetas])
        return "correct", th, th, th
    if isinstance(model, General) and model.voters:
        voters = model.voters * n if model.broadcast else model.voters
        tp = np.array([float(v.theta_p) for v in voters])
        tqp = np.array([float(v.theta_q_given_p) for v in voters])
        tqn = np.array([float(v.theta_q_given_notp) for v in voters])
        return "correct", tp, tqp, tqn
    rows = model.voter_cells(n, state)
    px, py, pz, pt = (np.array([float(r[k]) for r in rows]) for k in range(4))
    p_yes = px + py
    with np.errstate(invalid="ignore", divide="ignore"):
        q_if_yes = np.where(p_yes > 0, px / p_yes, 0.0)
        q_if_no = np.where(p_yes < 1, pz / (1 - p_yes), 0.0)
    return "belief", p_yes, q_if_yes, q_if_no


def _simulate_chunk(n, params, state, seed, stream, first_trial, trials):
    mode, first, if_yes, if_no = params
    u = _uniforms(seed, stream, first_trial * n * 2, trials * n * 2).reshape(trials, n, 2)
    a = u[:, :, 0] < first
    b = u[:, :, 1] < np.where(a, if_yes, if_no)
    if mode == "correct":
        believes_p = a == state.p_true
        believes_q = b == state.q_true
    else:
        believes_p, believes_q = a, b
    x = (believes_p & believes_q).sum(axis=1)
    y = (believes_p & ~believes_q).sum(axis=1)
    z = (~believes_p & believes_q).sum(axis=1)
    return x, y, z


def simulate_votes(n: int, model, state, trials: int, seed: int, rule: DecisionRule | None = None,
                   chunk_size: int = DEFAULT_CHUNK, start: int = 0) -> SimulationReport:
    """Simulate trials ``start .. start + trials - 1`` and tally the tables.

    Competences of exactly 0 or 1 are allowed.  If ``rule`` is given its
    acceptances are counted as well.
    """
    check_committee_size(n)
    state = parse_state(state)
    if isinstance(trials, bool) or not isinstance(trials, int) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise DomainError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    if rule is not None and rule.n != n:
        raise DomainError(f"rule is for n={rule.n}, expected n={n}")
    params = _voter_parameters(n, model, state)
    stream = _STATES.index(state)
    side = n + 1
    codes = np.zeros(side**3, dtype=np.int64)
    accept_table = None
    if rule is not None:
        accept_table = np.zeros(side**3, dtype=bool)
        for a in rule.accepts():
            accept_table[(a.x * side + a.y) * side + a.z] = True
    accepted = 0
    done = 0
    while done < trials:
        size = min(chunk_size, trials - done)
        x, y, z = _simulate_chunk(n, params, state, seed, stream, start + done, size)
        code = (x * side + y) * side + z
        codes += np.bincount(code, minlength=side**3)
        if accept_table is not None:
            accepted += int(accept_table[code].sum())
        done += size
    counts = {}
    for code in np.flatnonzero(codes):
        x, rest = divmod(int(code), side * side)
        y, z = divmod(rest, side)
        counts[ContingencyTable(x, y, z, n - x - y - z)] = int(codes[code])
    accepts = {state: accepted} if rule is not None else {}
    return SimulationReport(n, trials, seed, {state: counts}, accepts,
                            None if rule is None else rule.name)


def estimate_rates(n: int, model, rule: DecisionRule, trials: int, seed: int,
                   chunk_size: int = DEFAULT_CHUNK) -> SimulationReport:
    """Empirical TPR and acceptance under each negative state, plus their maximum as FPR."""
    reports = [simulate_votes(n, model, s, trials, seed, rule, chunk_size) for s in _STATES]
    tables, accepts = {}, {}
    for r in reports:
        tables.update(r.table_counts)
        accepts.update(r.accept_counts)
    return SimulationReport(n, trials, seed, tables, accepts, rule.name)
