import itertools
import math

import numpy as np
import pytest

from permsurv import (
    EnumerationCapError,
    PermSurvError,
    TwoArmDataset,
    exact_permutation_test,
    gehan_scores,
    logrank_scores,
    monte_carlo_permutation_test,
    permutation_test,
)
from permsurv.permutation import distribution_csv, exact_distribution
from conftest import random_dataset


def brute_force_p(a, z):
    """Independent oracle: mean differences over all size-preserving assignments."""
    n, n1 = len(a), int(sum(z))
    obs = np.mean(a[z == 1]) - np.mean(a[z == 0])
    hits = total = 0
    for idx in itertools.combinations(range(n), n1):
        mask = np.zeros(n, bool)
        mask[list(idx)] = True
        stat = a[mask].mean() - a[~mask].mean()
        hits += stat <= obs + 1e-9
        total += 1
    return hits / total


def test_gehan_exact_toy(toy):
    a = gehan_scores(toy).scores
    res = exact_permutation_test(a, toy.arm)
    assert res.n_perms == 924 and res.mode == "exact"
    assert res.p == brute_force_p(a, toy.arm)
    assert abs(res.p - 0.19) <= 0.005


def test_constant_scores():
    assert exact_permutation_test(np.ones(8), [0, 1] * 4).p == 1.0


def test_cap(toy):
    with pytest.raises(EnumerationCapError, match="Monte Carlo"):
        exact_permutation_test(gehan_scores(toy), toy.arm, cap=100)
    assert permutation_test(gehan_scores(toy), toy.arm, B=500, seed=1, cap=100).mode == "monte-carlo"
    assert permutation_test(gehan_scores(toy), toy.arm).mode == "exact"


def test_exact_distribution(toy):
    dist = exact_distribution(gehan_scores(toy), toy.arm)
    assert dist.size == 924
    assert dist[0] == pytest.approx(np.mean([11, -1, 8, 6, -3, 3]) - np.mean([1, -1, -3, -5, -8, -8]))
    assert distribution_csv(dist[:2]).splitlines()[0] == "statistic"


def test_arm_duality(toy):
    a = gehan_scores(toy).scores
    p = exact_permutation_test(a, toy.arm).p
    q = exact_permutation_test(-a, 1 - toy.arm).p
    assert p == q


def test_mc_add_one_single_draw():
    a = np.arange(8, dtype=float)
    z = np.array([1, 1, 1, 1, 0, 0, 0, 0])  # observed arm-1 sum is the unique minimum
    res = monte_carlo_permutation_test(a, z, B=1, seed=0)
    assert res.p == 0.5 and res.n_perms == 1 and res.seed == 0
    assert "PCG64" in res.rng


def test_mc_invalid_b(toy):
    with pytest.raises(PermSurvError):
        monte_carlo_permutation_test(gehan_scores(toy), toy.arm, B=0)


def test_mc_deterministic(toy):
    a = logrank_scores(toy)
    r1 = monte_carlo_permutation_test(a, toy.arm, B=30_000, seed=7)
    r2 = monte_carlo_permutation_test(a, toy.arm, B=30_000, seed=7, n_jobs=3)
    assert r1 == r2


def test_mc_logrank_toy(toy):
    a = logrank_scores(toy)
    exact = exact_permutation_test(a, toy.arm).p
    mc = monte_carlo_permutation_test(a, toy.arm, B=100_000, seed=2024).p
    assert abs(mc - exact) < 0.01
    assert abs(exact - 0.26) <= 0.005


def test_mc_converges_at_one_million(toy):
    for f in (gehan_scores, logrank_scores):
        a = f(toy)
        exact = exact_permutation_test(a, toy.arm).p
        assert abs(monte_carlo_permutation_test(a, toy.arm, B=1_000_000, seed=3).p - exact) < 0.005


def test_mc_agrees_with_exact_on_random_small_datasets():
    rng = np.random.default_rng(77)
    B = 20_000
    for k in range(50):
        data = random_dataset(rng, n=int(rng.integers(6, 15)), ties=bool(k % 2))
        a = logrank_scores(data)
        exact = exact_permutation_test(a, data.arm).p
        mc = monte_carlo_permutation_test(a, data.arm, B=B, seed=k).p
        bound = 3 * math.sqrt(exact * (1 - exact) / B) + 1 / (B + 1)
        assert abs(mc - exact) <= bound


def test_sampled_assignments_preserve_arm_sizes():
    from permsurv.permutation import _batch_count

    # scores are 1 on arm-1 slots only; with n1 draws the sum counts arm-1 picks
    a = np.array([0.0, 0, 0, 0, 0, 1, 1, 1])
    # threshold huge: every draw counts, so k == size
    assert _batch_count(a, 3, 100, 0, 0, 1e9) == 100
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(0, spawn_key=(0,))))
    keys = rng.random((100, 8))
    idx = np.argpartition(keys, 2, axis=1)[:, :3]
    assert all(len(set(row)) == 3 for row in idx.tolist())


def test_mc_count_is_binomial():
    # the sampled count k must be Binomial(B, p_exact): check its mean and spread over seeds
    rng = np.random.default_rng(5)
    data = random_dataset(rng, n=9)
    a = logrank_scores(data)
    exact = exact_permutation_test(a, data.arm).p
    B, seeds = 2000, 1500
    k = np.array([monte_carlo_permutation_test(a, data.arm, B=B, seed=s).p for s in range(seeds)]) * (B + 1) - 1
    sd = math.sqrt(B * exact * (1 - exact))
    assert abs(k.mean() - B * exact) < 4 * sd / math.sqrt(seeds)
    assert abs(k.std() / sd - 1) < 0.1
