from linalg.spd import (
    DimensionMismatch,
    NotPositiveDefinite,
    SpdFactorization,
    quad_form,
    quad_form_rows,
    solve,
    spd_factorize,
)
