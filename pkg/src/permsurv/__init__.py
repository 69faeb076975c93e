"""Weighted log-rank tests viewed both as observed-minus-expected sums and as
permutation-of-scores tests, with a piecewise-exponential trial simulator."""

from .data import (
    EventTable,
    EventTableRow,
    Observation,
    TwoArmDataset,
    build_event_table,
    parse_dataset,
    read_dataset,
)
from .design import DesignInputs, minimal_detectable_hr, relative_efficiency, required_events
from .errors import (
    DataError,
    DegenerateError,
    EnumerationCapError,
    NoEventsError,
    NotEstimableError,
    PermSurvError,
)
from .estimators import MilestoneResult, StepFunction, kaplan_meier, milestone_test, nelson_aalen_survival
from .methods import MilestoneSpec, RankScores, parse_method
from .permutation import (
    PermutationResult,
    exact_permutation_test,
    monte_carlo_permutation_test,
    permutation_test,
)
from .scores import (
    ScoreVector,
    arm1_score_sum,
    gehan_scores,
    logrank_scores,
    score_statistic,
    scores_from_weights,
    weighted_scores,
    wilcoxon_scores,
)
from .simulation import (
    SCENARIOS,
    PiecewiseExponential,
    PowerResult,
    Scenario,
    TrialDesign,
    power_study,
    sample_event_time,
    simulate_trial,
)
from .wlrt import (
    Custom,
    FlemingHarrington,
    HazardRatioSummary,
    LogRank,
    Modest,
    TestResult,
    compute_weights,
    hypergeometric_moments,
    interval_decomposition,
    peto_hazard_ratio,
    wlrt,
)

__version__ = "0.1.0"
