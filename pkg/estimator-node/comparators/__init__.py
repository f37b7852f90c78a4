from comparators.location import (
    InvalidK,
    NoConvergence,
    coordinate_median,
    rank_weighted_mean_1d,
    sample_mean,
    spatial_median,
)
