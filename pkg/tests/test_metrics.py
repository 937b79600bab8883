from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import auc_pairs
from smoothrank.exceptions import DataError
from smoothrank.metrics import aggregate, auc, auc_fraction, mann_whitney_counts


def test_auc_perfect_separation():
    assert auc([0.9, 0.8, 0.1, 0.2], [1, 1, 2, 2]) == 1.0


def test_auc_all_tied():
    assert auc([0.3] * 6, [1, 2, 1, 2, 2, 1]) == 0.5


def test_auc_worked_example():
    # pairs: 0.7>0.4, 0.7>0.2, 0.3<0.4, 0.3>0.2
    assert auc_fraction([0.7, 0.4, 0.3, 0.2], [1, 2, 1, 2]) == Fraction(3, 4)


def test_auc_positive_class_switch():
    s, y = [0.7, 0.4, 0.3, 0.2], [1, 2, 1, 2]
    assert auc(s, y, positive_class=2) == 0.25


def test_auc_single_class_raises():
    with pytest.raises(DataError):
        auc([1.0, 2.0], [1, 1])


def test_auc_rejects_missing_scores():
    with pytest.raises(DataError):
        auc([np.nan, 1.0], [1, 2])


scores_and_labels = st.integers(2, 60).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 8).map(float), min_size=n, max_size=n),
    st.lists(st.sampled_from([1, 2]), min_size=n, max_size=n),
)).filter(lambda sl: len(set(sl[1])) == 2)


@settings(max_examples=200, deadline=None)
@given(scores_and_labels)
def test_rank_sum_matches_pair_enumeration(sl):
    s, y = sl
    assert auc_fraction(s, y) == auc_pairs(s, y)


@settings(max_examples=100, deadline=None)
@given(scores_and_labels)
def test_auc_negation_is_complement(sl):
    s, y = sl
    assert auc_fraction([-v for v in s], y) == 1 - auc_fraction(s, y)


@settings(max_examples=100, deadline=None)
@given(scores_and_labels)
def test_auc_invariant_under_monotone_transform(sl):
    s, y = sl
    t = np.exp(np.asarray(s) / 3.0) * 5 - 2
    assert auc_fraction(t, y) == auc_fraction(s, y)


def test_counts_are_integers():
    twice_u, pairs = mann_whitney_counts([1, 1, 2], [1, 2, 1])
    assert (twice_u, pairs) == (3, 2)


class TestAggregate:
    def test_single_value(self):
        r = aggregate([0.7], [3])
        assert (r.mean, r.sd, r.mean_features) == (0.7, 0.0, 3.0)

    def test_mean(self):
        assert aggregate([0.8, 0.9], [1, 2]).mean == pytest.approx(0.85, abs=1e-15)

    def test_identical_values_have_zero_sd(self):
        r = aggregate([0.1] * 100, [4] * 100)
        assert r.sd == 0.0
        assert r.mean == 0.1

    def test_recomputed_from_per_split(self, rng):
        v = rng.uniform(0.5, 1, 37)
        r = aggregate(v, rng.integers(1, 9, 37))
        again = np.array([s.value for s in r.per_split])
        assert abs(again.mean() - r.mean) < 1e-12
        assert abs(again.std(ddof=1) - r.sd) < 1e-12

    def test_empty_raises(self):
        with pytest.raises(DataError):
            aggregate([], [])

    def test_renderings(self):
        r = aggregate([0.8, 0.9], [5, 6], "auc", dataset="toy", dimensions="10 X 3")
        assert r.summary_csv().splitlines()[1].startswith("toy,10 X 3,2,")
        assert r.per_split_csv().splitlines() == ["split,auc,n_features", "0,0.8,5", "1,0.9,6"]
        assert "0.85 (5.5)" in r.table()
