"""Agenda control in two-round elections with cyclic preference lists."""

from .election import (
    DegeneratePartitionError,
    Partition,
    SeedVector,
    Status,
    TwoRoundOutcome,
    VoteTally,
    batch_two_round,
    batch_universal,
    build_partition,
    exact_p1_bruteforce,
    exact_p2_bruteforce,
    head_to_head,
    recruitment_ballot_map,
    run_two_round,
    sample_seeds,
    shift_seeds,
    tally,
    unique_winner,
    universal_victory,
)
from .streams import RngSpec
from .estimator import (
    BinomialEstimate,
    PlateauResult,
    estimate_p1_discrete,
    estimate_p2_discrete,
    wilson_centroid_optimize,
    wilson_interval,
)
from .continuum import (
    ContinuousParams,
    NoFeasibleVictory,
    PrecisionConfig,
    UniformSample,
    decay_table,
    estimate_p2_continuous,
    optimize_eta_universal,
    optimize_eta_win,
    p_win_continuous,
    sample_uniform_points,
    universal_event_continuous,
)
from .bounds import StepDistribution, chernoff_rate, failure_upper_bound, fit_decay_slope

__version__ = "0.1.0"
