from estimators.state import EstimatorState, InvalidSample, IterationTrace, Sample
from estimators.ranking import has_ties, ranks_of
from estimators.weights import (
    CustomScores,
    GeneralLk,
    InvalidScheme,
    Poisson,
    RankWeightedL2,
    TrimmedL1,
    WeightScheme,
    scheme_from_dict,
    weights_for,
)
from estimators.l_estimator import (
    DegenerateScatter,
    d_efficiency,
    estimate_location,
    iterate,
    l_step,
    mahalanobis_distances,
    mean_state,
    nearest_state,
    reduced_invariant,
    state_at,
)
