"""
Tests for distances, ranks, the L-step and the r-step iteration.
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

import estimators.l_estimator as l_estimator
from estimators import (
    DegenerateScatter,
    GeneralLk,
    InvalidSample,
    Poisson,
    RankWeightedL2,
    Sample,
    TrimmedL1,
    d_efficiency,
    estimate_location,
    has_ties,
    iterate,
    l_step,
    mean_state,
    nearest_state,
    ranks_of,
    reduced_invariant,
    weights_for,
)

EQUIVARIANCE_TRIALS = 200
DISTANCE_TRIALS = 1000
ORACLE_CASES = 500


def random_spd_transform(rng, p, max_condition=100.0):
    """B = Q diag(lam) Q^T with eigenvalues in [1, max_condition]."""
    q, _ = np.linalg.qr(rng.standard_normal((p, p)))
    lam = np.exp(rng.uniform(0.0, np.log(max_condition), size=p))
    return (q * lam) @ q.T


def min_relative_gap(d):
    s = np.sort(d)
    return float(np.min(np.diff(s)) / max(s[-1], 1e-300))


# --- mean_state ---

def test_mean_state_symmetric_1d():
    st0 = mean_state(Sample([[0.0], [0.0], [2.0], [2.0]]))
    assert st0.step == 0
    assert st0.center == pytest.approx([1.0])
    assert st0.scatter[0, 0] == pytest.approx(4.0)
    assert np.allclose(st0.distances, 0.25)
    assert st0.distances.sum() == pytest.approx(1.0, abs=1e-12)


def test_mean_state_triangle():
    st0 = mean_state(Sample([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert np.allclose(st0.center, [1 / 3, 1 / 3])
    assert st0.distances.sum() == pytest.approx(2.0, abs=1e-12)
    # with n = p + 1 every point is equally outlying
    assert np.allclose(st0.distances, 2 / 3)


def test_mean_state_distances_sum_to_p():
    rng = np.random.default_rng(1)
    for p in (1, 2, 4):
        st0 = mean_state(Sample(rng.standard_normal((30, p))))
        assert st0.distances.sum() == pytest.approx(p, abs=1e-8)


def test_distances_match_explicit_inverse():
    rng = np.random.default_rng(2)
    x = rng.standard_normal((20, 3))
    st0 = mean_state(Sample(x))
    c = x - x.mean(axis=0)
    inv = np.linalg.inv(c.T @ c)
    assert np.allclose(st0.distances, np.einsum("ij,jk,ik->i", c, inv, c), rtol=1e-10)


def test_sample_validation():
    with pytest.raises(InvalidSample):
        Sample([[1.0, 2.0], [3.0, 4.0]])
    with pytest.raises(InvalidSample):
        Sample([[1.0], [np.nan], [2.0]])


def test_collinear_sample_is_degenerate():
    x = np.array([[0.0, 0.0], [1.0, 2.0], [2.0, 4.0], [3.0, 6.0]])
    with pytest.raises(DegenerateScatter):
        mean_state(Sample(x))
    with pytest.raises(DegenerateScatter):
        iterate(Sample(x), TrimmedL1(kn=2), 3)


# --- ranks ---

def test_ranks_examples():
    assert ranks_of([0.3, 0.1, 0.2]).tolist() == [3, 1, 2]
    assert ranks_of([0.5, 0.5]).tolist() == [1, 2]
    assert ranks_of(np.arange(6.0)).tolist() == [1, 2, 3, 4, 5, 6]


@given(st.lists(st.integers(min_value=-1000, max_value=1000), min_size=1, max_size=40, unique=True))
def test_ranks_invariant_under_increasing_maps(ints):
    d = np.array(ints, dtype=float) / 20.0
    base = ranks_of(d)
    assert sorted(base.tolist()) == list(range(1, len(ints) + 1))
    assert np.array_equal(ranks_of(np.exp(d)), base)
    assert np.array_equal(ranks_of(2 * d + 1), base)


@given(st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=30))
def test_ranks_with_ties_are_a_permutation(ints):
    r = ranks_of(ints)
    assert sorted(r.tolist()) == list(range(1, len(ints) + 1))
    for i in range(len(ints)):
        for j in range(i + 1, len(ints)):
            if ints[i] == ints[j]:
                assert r[i] < r[j]


# --- l_step ---

def test_full_trimming_gives_the_mean():
    rng = np.random.default_rng(4)
    s = Sample(rng.standard_normal((12, 2)))
    prev = nearest_state(s)
    st1 = l_step(s, prev, TrimmedL1(kn=12))
    assert np.allclose(st1.center, s.data.mean(axis=0), atol=1e-14)
    assert st1.step == 1


def test_outlier_ranked_last():
    s = Sample([[0.0], [1.0], [10.0]])
    st0 = mean_state(s)
    assert st0.ranks.tolist() == [2, 1, 3]
    st1 = l_step(s, st0, TrimmedL1(kn=2))
    assert st1.center == pytest.approx([0.5])


def oracle_center(s, prev, scheme):
    """Sort (d_i, i) pairs explicitly and sum the weighted rows."""
    w = weights_for(scheme, s.n)
    pairs = sorted((float(d), i) for i, d in enumerate(prev.distances))
    per_obs = np.zeros(s.n)
    for position, (_, i) in enumerate(pairs):
        per_obs[i] = w[position]
    return per_obs @ s.data


def test_l_step_matches_sorted_pairs_oracle():
    rng = np.random.default_rng(2024)
    for _ in range(ORACLE_CASES):
        p = int(rng.integers(1, 3))
        n = int(rng.integers(p + 1, 9))
        s = Sample(rng.standard_normal((n, p)) * rng.uniform(0.1, 10.0) + rng.normal(size=p))
        kn = int(rng.integers(2, n + 1))
        scheme = [TrimmedL1(kn=kn), RankWeightedL2(kn=kn), GeneralLk(kn=kn, k=int(rng.integers(1, kn + 1))),
                  Poisson(lam=float(rng.uniform(0.05, 0.95)))][int(rng.integers(0, 4))]
        prev = mean_state(s)
        for _ in range(3):
            nxt = l_step(s, prev, scheme)
            assert np.array_equal(nxt.center, oracle_center(s, prev, scheme))
            prev = nxt


# --- equivariance and invariance ---

def _run_pair(rng, scheme, n=50, p=3, steps=10):
    while True:
        s = Sample(rng.standard_normal((n, p)))
        b_matrix = random_spd_transform(rng, p)
        shift = rng.normal(scale=5.0, size=p)
        tx = iterate(s, scheme, steps)
        ty = iterate(s.transformed(b_matrix, shift), scheme, steps)
        tied = any(has_ties(st_.distances) or min_relative_gap(st_.distances) < 1e-9
                   for st_ in tx.states + ty.states)
        if not tied:
            return tx, ty, b_matrix, shift


@pytest.mark.parametrize("scheme", [TrimmedL1(kn=8), RankWeightedL2(kn=8)], ids=lambda s: s.label)
def test_affine_equivariance_every_step(scheme):
    rng = np.random.default_rng(8514)
    for _ in range(EQUIVARIANCE_TRIALS):
        tx, ty, b_matrix, shift = _run_pair(rng, scheme)
        for sx, sy in zip(tx.states, ty.states):
            expected = b_matrix @ sx.center + shift
            assert np.linalg.norm(sy.center - expected) <= 1e-6 * max(1.0, np.linalg.norm(expected))
            assert np.array_equal(sx.ranks, sy.ranks)
            assert np.allclose(sx.distances, sy.distances, rtol=0, atol=1e-8)
        assert np.allclose(tx.d_efficiency, ty.d_efficiency, rtol=1e-8)


def test_distance_constraints_every_step():
    rng = np.random.default_rng(1000)
    dims = (1, 2, 3, 5)
    for trial in range(DISTANCE_TRIALS):
        p = dims[trial % len(dims)]
        n = int(rng.integers(p + 2, 40))
        s = Sample(rng.standard_normal((n, p)) * rng.uniform(0.1, 10.0))
        trace = iterate(s, TrimmedL1(kn=int(rng.integers(1, n + 1))), 3)
        for state in trace.states:
            d = state.distances
            assert np.all(d >= -1e-10) and np.all(d <= 1.0 + 1e-10)
            assert abs(d.sum() - p) <= 1e-8


# --- iterate and D-efficiency ---

def test_full_trimming_converges_at_first_step():
    rng = np.random.default_rng(9)
    s = Sample(rng.standard_normal((25, 3)))
    trace = iterate(s, TrimmedL1(kn=25), max_steps=10, tol=1e-12)
    assert trace.converged_at == 1
    assert len(trace.states) == 2
    assert np.allclose(trace.final.center, s.data.mean(axis=0))
    assert trace.d_efficiency == pytest.approx([1.0], abs=1e-12)
    assert np.array_equal(trace.states[0].center, s.data.mean(axis=0))


def test_zero_tol_runs_every_step():
    rng = np.random.default_rng(10)
    trace = iterate(Sample(rng.standard_normal((25, 2))), TrimmedL1(kn=25), max_steps=6)
    assert trace.converged_at is None
    assert len(trace.states) == 7
    assert len(trace.d_efficiency) == 6


def test_d_efficiency_examples():
    rng = np.random.default_rng(12)
    for p in (1, 3):
        g = rng.standard_normal((p, p))
        a = g @ g.T + p * np.eye(p)
        assert d_efficiency(a, a, p) == pytest.approx(1.0, abs=1e-12)
        assert d_efficiency(4 * a, a, p) == pytest.approx(4.0, rel=1e-12)


def test_d_efficiency_is_a_determinant_lemma():
    rng = np.random.default_rng(13)
    s = Sample(rng.standard_normal((40, 3)))
    trace = iterate(s, RankWeightedL2(kn=10), 5)
    a0 = trace.states[0].scatter
    for state, d in zip(trace.states[1:], trace.d_efficiency):
        u = state.center - s.data.mean(axis=0)
        expected = (1.0 + s.n * u @ np.linalg.solve(a0, u)) ** (1 / 3)
        assert d == pytest.approx(expected, rel=1e-9)
        assert d >= 1.0 - 1e-12
        assert d == pytest.approx(d_efficiency(state.scatter, a0, 3), rel=1e-12)


def test_nearest_initializer_starts_at_an_observation():
    rng = np.random.default_rng(14)
    s = Sample(rng.standard_normal((30, 2)))
    start = nearest_state(s)
    base = mean_state(s)
    assert np.array_equal(start.center, s.data[int(np.argmin(base.ranks))])
    trace = iterate(s, TrimmedL1(kn=10), 4, initial="nearest")
    assert np.array_equal(trace.states[0].center, start.center)
    assert len(trace.d_efficiency) == 4


def test_degenerate_step_keeps_partial_trace(monkeypatch):
    real_step = l_estimator.l_step

    def failing_step(s, prev, scheme):
        if prev.step == 2:
            raise DegenerateScatter("forced", step=prev.step + 1)
        return real_step(s, prev, scheme)

    monkeypatch.setattr(l_estimator, "l_step", failing_step)
    rng = np.random.default_rng(15)
    with pytest.raises(DegenerateScatter) as err:
        l_estimator.iterate(Sample(rng.standard_normal((20, 2))), TrimmedL1(kn=5), 10)
    assert err.value.step == 3
    assert len(err.value.trace.states) == 3
    assert len(err.value.trace.d_efficiency) == 2


def test_iterate_argument_checks():
    s = Sample(np.random.default_rng(16).standard_normal((10, 2)))
    with pytest.raises(ValueError):
        iterate(s, TrimmedL1(kn=3), 0)
    with pytest.raises(ValueError):
        iterate(s, TrimmedL1(kn=3), 2, tol=-1.0)
    with pytest.raises(ValueError):
        iterate(s, TrimmedL1(kn=3), 2, initial="median")


def test_estimate_location_matches_trace():
    rng = np.random.default_rng(17)
    x = rng.standard_normal((40, 3))
    assert np.array_equal(estimate_location(x, TrimmedL1(kn=10), 5),
                          iterate(Sample(x), TrimmedL1(kn=10), 5).final.center)


# --- reduced invariant ---

def test_reduced_invariant_example():
    assert np.allclose(reduced_invariant(Sample([[0.0], [1.0], [2.0]])), [0.8, 0.2])


def test_reduced_invariant_sums_to_p_and_is_invariant():
    rng = np.random.default_rng(18)
    for p in (1, 2, 3):
        s = Sample(rng.standard_normal((15, p)))
        d = reduced_invariant(s)
        assert d.shape == (14,)
        assert d.sum() == pytest.approx(p, abs=1e-8)
        moved = s.transformed(random_spd_transform(rng, p), rng.normal(size=p))
        assert np.allclose(reduced_invariant(moved), d, atol=1e-8)
