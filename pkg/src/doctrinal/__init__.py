"""Exact ROC analysis of majority rules for two-premise committee decisions.

Committees of odd size ``n`` vote on premises P and Q; the votes form a
contingency table ``(x, y, z, t)``.  Rules such as issue-by-issue (IbyI),
path-by-path (PbyP) and case-by-case (CbyC) map tables to accept/reject, and
their true and false positive rates are computed exactly as rationals.
"""

__version__ = "0.1.0"

from .analysis import (
    ThresholdCurve,
    WeightInterval,
    area_series,
    competence_threshold_C,
    min_committee_size,
    monotonicity_violations,
    paradox_probability,
    threshold_curve,
    weight_order_intervals,
    weight_threshold_D,
)
from .errors import CapabilityError, DoctrinalError, DomainError, NotAttainedError
from .model import (
    CellProbabilities,
    ConditionalCompetence,
    General,
    Homogeneous,
    PerVoter,
    StateOfNature,
    TableDistribution,
    parse_model,
    state_probs,
    table_distribution,
    table_pmf,
)
from .rates import (
    Metrics,
    RatePolynomial,
    acceptance_probability,
    false_positive_rate,
    metrics,
    rate_polynomial,
    true_positive_rate,
    weighted_area,
)
from .rules import (
    DecisionRule,
    ScoreKind,
    apply_rule,
    builtin_rule,
    custom_rule,
    disagreement_set,
    enumerate_admissible,
    is_admissible,
    parse_rule,
    score,
)
from .simulation import SimulationReport, estimate_rates, simulate_votes
from .tables import ContingencyTable, TableSpace, enumerate_tables, table_leq, transpose
