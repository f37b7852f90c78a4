"""
Tests for the rank weight schemes.
"""

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from estimators.weights import (
    CustomScores,
    GeneralLk,
    InvalidScheme,
    Poisson,
    RankWeightedL2,
    TrimmedL1,
    binomial,
    scheme_from_dict,
    weights_for,
)


def assert_valid_weights(w, n):
    assert w.shape == (n,)
    assert np.all(w >= 0)
    assert np.all(np.diff(w) <= 1e-15)
    assert abs(w.sum() - 1.0) <= 1e-12


def test_rank_weighted_l2_example():
    w = weights_for(RankWeightedL2(kn=3), 5)
    assert np.allclose(w, [2 / 3, 1 / 3, 0, 0, 0], atol=1e-15)
    assert w[0] == pytest.approx(2 / 3)


def test_trimmed_full_is_uniform():
    assert np.allclose(weights_for(TrimmedL1(kn=7), 7), np.full(7, 1 / 7))


def test_general_lk_k1_example():
    w = weights_for(GeneralLk(kn=4, k=1), 6)
    assert np.allclose(w, [0.25, 0.25, 0.25, 0.25, 0, 0], atol=1e-15)


def test_poisson_ratio():
    w = weights_for(Poisson(lam=0.5), 50)
    assert w[0] / w[1] == pytest.approx(4.0, rel=1e-12)
    assert_valid_weights(w, 50)


def test_general_lk_identities_up_to_30():
    for kn in range(1, 31):
        n = kn + 5
        assert np.max(np.abs(weights_for(GeneralLk(kn=kn, k=1), n) - weights_for(TrimmedL1(kn=kn), n))) <= 1e-12
        if kn >= 2:
            diff = weights_for(GeneralLk(kn=kn, k=2), n) - weights_for(RankWeightedL2(kn=kn), n)
            assert np.max(np.abs(diff)) <= 1e-12


def test_hockey_stick_sum():
    for kn in (5, 12, 40, 75):
        for k in (1, 2, 3, 5):
            total = sum(binomial(kn - i, k - 1) for i in range(1, kn + 1))
            assert total == pytest.approx(binomial(kn, k), rel=1e-10)


def test_log_space_binomial_matches_exact():
    assert binomial(70, 3) == pytest.approx(math.comb(70, 3), rel=1e-10)
    assert binomial(100, 50) == pytest.approx(float(math.comb(100, 50)), rel=1e-9)
    assert binomial(5, 7) == 0.0


@given(st.integers(min_value=1, max_value=80), st.data())
def test_every_scheme_is_valid(n, data):
    kn = data.draw(st.integers(min_value=1, max_value=n))
    assert_valid_weights(weights_for(TrimmedL1(kn=kn), n), n)
    k = data.draw(st.integers(min_value=1, max_value=kn))
    assert_valid_weights(weights_for(GeneralLk(kn=kn, k=k), n), n)
    if kn >= 2:
        assert_valid_weights(weights_for(RankWeightedL2(kn=kn), n), n)
    lam = data.draw(st.floats(min_value=0.01, max_value=0.99))
    assert_valid_weights(weights_for(Poisson(lam=lam), n), n)


@given(st.lists(st.floats(min_value=0, max_value=100), min_size=2, max_size=30))
def test_custom_scores_renormalized(raw):
    scores = sorted(raw, reverse=True)
    if sum(scores) <= 0:
        with pytest.raises(InvalidScheme):
            weights_for(CustomScores(scores=tuple(scores)), len(scores))
        return
    assert_valid_weights(weights_for(CustomScores(scores=tuple(scores)), len(scores)), len(scores))


def test_invalid_parameters():
    with pytest.raises(InvalidScheme):
        weights_for(TrimmedL1(kn=0), 5)
    with pytest.raises(InvalidScheme):
        weights_for(TrimmedL1(kn=6), 5)
    with pytest.raises(InvalidScheme):
        weights_for(GeneralLk(kn=4, k=5), 10)
    with pytest.raises(InvalidScheme):
        weights_for(Poisson(lam=1.0), 10)
    with pytest.raises(InvalidScheme):
        weights_for(Poisson(lam=0.0), 10)
    with pytest.raises(InvalidScheme):
        weights_for(CustomScores(scores=(1.0, 2.0, 0.0)), 3)
    with pytest.raises(InvalidScheme):
        weights_for(CustomScores(scores=(0.0, 0.0)), 2)
    with pytest.raises(InvalidScheme):
        weights_for(CustomScores(scores=(1.0, 0.5)), 3)


def test_scheme_from_dict():
    assert scheme_from_dict({"type": "l1", "kn": 15}) == TrimmedL1(kn=15)
    assert scheme_from_dict({"type": "L2", "kn": 15}) == RankWeightedL2(kn=15)
    assert scheme_from_dict({"type": "lk", "kn": 10, "k": 3}) == GeneralLk(kn=10, k=3)
    assert scheme_from_dict({"type": "poisson", "lambda": 0.4}) == Poisson(lam=0.4)
    assert scheme_from_dict({"type": "scores", "a": [2, 1]}) == CustomScores(scores=(2.0, 1.0))
    for scheme in (TrimmedL1(kn=3), GeneralLk(kn=5, k=2), Poisson(lam=0.3)):
        assert scheme_from_dict(scheme.to_dict()) == scheme
    with pytest.raises(InvalidScheme):
        scheme_from_dict({"type": "l1"})
    with pytest.raises(InvalidScheme):
        scheme_from_dict({"type": "median"})
