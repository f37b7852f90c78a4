from sampling.distributions import (
    NORMAL,
    STUDENT_T,
    DistributionSpec,
    bundled_spec,
    equicorrelation,
    replication_seed,
    rng_for,
    sample,
)
