import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from permsurv import (
    DataError,
    FlemingHarrington,
    LogRank,
    Modest,
    PermSurvError,
    TwoArmDataset,
    arm1_score_sum,
    build_event_table,
    compute_weights,
    exact_permutation_test,
    gehan_scores,
    kaplan_meier,
    logrank_scores,
    score_statistic,
    scores_from_weights,
    weighted_scores,
    wilcoxon_scores,
    wlrt,
)
from permsurv.scores import arm1_centered_mean, gehan_counts
from conftest import random_dataset

GEHAN_BETTER = [11, 0, 9, 8, 0, 6, 5, 4, 3, 2, 0, 0]
GEHAN_WORSE = [0, 1, 1, 2, 3, 3, 4, 5, 6, 7, 8, 8]
GEHAN_A = [11, -1, 8, 6, -3, 3, 1, -1, -3, -5, -8, -8]
WILCOXON_A = [12, 11, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1]
Z1_STAR = [0, 0, 0, 1, 1, 1, 0, 1, 0, 0, 1, 1]


def uncensored(data):
    return TwoArmDataset(data.time, np.ones(data.n, bool), data.arm)


def gehan_oracle(data):
    """Pairwise definition, O(n^2)."""
    x, e = data.time, data.event
    a = np.zeros(data.n)
    for i, j in itertools.permutations(range(data.n), 2):
        if e[j] and x[j] < x[i]:  # j definitely shorter than i
            a[j] += 1
            a[i] -= 1
    return a


def test_wilcoxon_toy(toy):
    sv = wilcoxon_scores(uncensored(toy))
    assert sv.scores.tolist() == WILCOXON_A
    assert arm1_centered_mean(sv, toy.arm) == pytest.approx(-1.16, abs=0.01)


def test_wilcoxon_small_and_ties():
    assert wilcoxon_scores(TwoArmDataset([1.0, 2.0], [1, 1], [0, 1])).scores.tolist() == [2, 1]
    ties = TwoArmDataset([5.0, 5.0], [1, 1], [0, 1])
    assert wilcoxon_scores(ties).scores.tolist() == [1.5, 1.5]
    # midranks keep the permutation distribution symmetric: both assignments tie
    assert exact_permutation_test(wilcoxon_scores(ties), ties.arm).p == 1.0


def test_wilcoxon_rejects_censoring(toy):
    with pytest.raises(PermSurvError, match="gehan") as info:
        wilcoxon_scores(toy)
    # a precondition failure, not a malformed file
    assert not isinstance(info.value, DataError)


def test_gehan_toy_counts(toy):
    better, worse = gehan_counts(toy)
    assert better.tolist() == GEHAN_BETTER
    assert worse.tolist() == GEHAN_WORSE
    sv = gehan_scores(toy)
    assert sv.scores.tolist() == GEHAN_A
    assert sv.scores.mean() == 0
    assert np.mean(sv.scores[toy.arm == 1]) == pytest.approx(-1.67, abs=0.01)
    assert score_statistic(sv, toy.arm) == pytest.approx(-10 / 3)
    assert np.mean(sv.scores[np.array(Z1_STAR) == 1]) == pytest.approx(-1.83, abs=0.01)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans())
def test_gehan_matches_pairwise_oracle(seed, ties):
    data = random_dataset(np.random.default_rng(seed), n=40, ties=ties)
    a = gehan_scores(data).scores
    assert np.array_equal(a, gehan_oracle(data))
    assert a.sum() == 0


def test_logrank_scores_toy(toy):
    a = logrank_scores(toy).scores
    assert a[0] == pytest.approx(1 - 1 / 12, abs=1e-15)
    assert a[0] == pytest.approx(0.9167, abs=5e-5)


def test_logrank_censored_before_first_event():
    data = TwoArmDataset([1.0, 2.0, 3.0], [0, 1, 1], [0, 1, 0])
    assert logrank_scores(data).scores[0] == 0.0
    table = build_event_table(data)
    assert scores_from_weights(np.ones(len(table)), table).scores[0] == 0.0


def test_unit_weights_give_logrank_scores(toy):
    table = build_event_table(toy)
    np.testing.assert_allclose(scores_from_weights(np.ones(9), table).scores, logrank_scores(toy).scores, atol=1e-14)


def test_fh01_scores_non_monotone(toy):
    a = weighted_scores(toy, FlemingHarrington(0, 1)).scores
    t2, t17 = a[toy.time == 2][0], a[toy.time == 17][0]
    assert t2 < t17


def test_mwlrt12_scores_toy(toy):
    sv = weighted_scores(toy, Modest(12))
    ev = toy.event
    t, a = toy.time[ev], sv.scores[ev]
    early, late = a[t <= 12], a[t > 12]
    assert np.all((early > 0.8) & (early <= 1.0))
    assert np.all(np.diff(late) < 0)
    assert np.all(np.diff(a) <= 0)


def test_scores_length_mismatch(toy):
    with pytest.raises(PermSurvError):
        scores_from_weights([1.0, 2.0], build_event_table(toy))


def test_statistic_helpers(toy):
    assert score_statistic(np.ones(12), toy.arm) == 0.0
    with pytest.raises(PermSurvError):
        score_statistic(np.ones(12), np.zeros(12))
    a = gehan_scores(toy)
    n, n1, n0 = 12, 6, 6
    u, ut = arm1_score_sum(a, toy.arm), score_statistic(a, toy.arm)
    assert ut == pytest.approx(n / (n1 * n0) * u - a.scores.sum() * n1 / (n1 * n0))


def test_score_csv(toy):
    lines = gehan_scores(toy).to_csv(toy).splitlines()
    assert lines[0] == "index,time,event,arm,score"
    assert lines[2] == "1,6,0,0,-1"


SPECS = [LogRank(), FlemingHarrington(0, 1), FlemingHarrington(1, 0), Modest(5), Modest(12), Modest(float("inf"))]


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.booleans(), st.sampled_from(SPECS))
def test_weight_score_identity(seed, ties, spec):
    data = random_dataset(np.random.default_rng(seed), ties=ties)
    table = build_event_table(data)
    w = compute_weights(spec, table, kaplan_meier(data))
    u_scores = arm1_score_sum(scores_from_weights(w, table), data.arm)
    o1 = table.d1
    e1 = table.d * table.n1 / table.n
    direct = float(np.sum(w * (o1 - e1)))
    assert abs(u_scores - direct) / (1 + abs(direct)) < 1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_mwlrt_scores_monotone_without_ties(seed):
    data = random_dataset(np.random.default_rng(seed))
    t_star = float(np.median(data.time))
    a = weighted_scores(data, Modest(t_star)).scores
    order = np.argsort(data.time[data.event])
    assert np.all(np.diff(a[data.event][order]) <= 1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_rank_invariance(seed):
    data = random_dataset(np.random.default_rng(seed), n=60)
    moved = TwoArmDataset(np.exp(data.time / 7) + 3, data.event, data.arm)
    for f in (gehan_scores, logrank_scores, lambda d: weighted_scores(d, FlemingHarrington(0, 1))):
        np.testing.assert_allclose(f(data).scores, f(moved).scores, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_event_exceeds_tied_censoring_by_one(seed):
    data = random_dataset(np.random.default_rng(seed), n=80, ties=True)
    a = logrank_scores(data).scores
    for t in np.unique(data.time):
        at = data.time == t
        ev, ce = a[at & data.event], a[at & ~data.event]
        if ev.size and ce.size:
            np.testing.assert_allclose(ev[:, None] - ce[None, :], 1.0, atol=1e-12)


def test_affine_invariance_of_permutation_p(toy):
    a = logrank_scores(toy).scores
    p = exact_permutation_test(a, toy.arm).p
    assert exact_permutation_test(3.5 * a - 2.0, toy.arm).p == p
