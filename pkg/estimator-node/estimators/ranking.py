import numpy as np


def ranks_of(d) -> np.ndarray:
    """Ranks 1..n of the values in d.

    R_i = #{j : d_j <= d_i}, with ties resolved by observation index so the
    result is always a permutation; the earlier index gets the smaller rank.
    """
    values = np.asarray(d, dtype=float).ravel()
    if values.size < 1:
        raise ValueError("ranks_of needs at least one value")
    order = np.argsort(values, kind="stable")
    ranks = np.empty(values.size, dtype=np.int64)
    ranks[order] = np.arange(1, values.size + 1)
    return ranks


def has_ties(d) -> bool:
    """True when two distances are exactly equal."""
    values = np.sort(np.asarray(d, dtype=float).ravel())
    return bool(np.any(values[1:] == values[:-1]))
