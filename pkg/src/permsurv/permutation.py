"""Permutation inference for fixed scores with exchangeable arm labels.

Both engines work on the arm-1 score sum, which orders label assignments the
same way as the mean difference. The one-sided p-value counts assignments
whose statistic is lower than or equal to the observed one.
"""
from __future__ import annotations

import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from itertools import combinations, islice

import numpy as np

from .errors import EnumerationCapError, PermSurvError
from .scores import _check_labels, score_statistic

__all__ = [
    "PermutationResult",
    "exact_permutation_test",
    "monte_carlo_permutation_test",
    "permutation_test",
    "exact_distribution",
    "RNG_ALGORITHM",
    "DEFAULT_CAP",
]

DEFAULT_CAP = 10_000_000
RNG_ALGORITHM = "numpy.PCG64/SeedSequence(seed, spawn_key=(batch,))"
_BATCH = 8192
_CHUNK = 200_000


@dataclass(frozen=True)
class PermutationResult:
    observed: float
    p: float
    n_perms: int
    mode: str
    seed: int | None = None
    rng: str | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def _tolerance(a: np.ndarray) -> float:
    # sums of equal multisets can differ in the last bits depending on order
    return 1e-9 * (1.0 + float(np.abs(a).sum()))


def _combination_sums(a: np.ndarray, n1: int):
    """Yield arm-1 score sums over all n1-subsets, lexicographic order, in chunks."""
    it = combinations(range(a.size), n1)
    while True:
        block = np.array(list(islice(it, _CHUNK)), dtype=np.intp)
        if block.size == 0:
            return
        yield a[block.reshape(-1, n1)].sum(axis=1)


def exact_distribution(scores, labels, cap: int = DEFAULT_CAP) -> np.ndarray:
    """Mean-difference statistic for every assignment preserving the arm sizes."""
    a, z = _check_labels(scores, labels)
    n1 = int(z.sum())
    total = math.comb(a.size, n1)
    if total > cap:
        raise EnumerationCapError(
            f"C({a.size},{n1}) = {total} assignments exceeds cap {cap}; use Monte Carlo mode"
        )
    sums = np.concatenate(list(_combination_sums(a, n1)))
    return sums / n1 - (a.sum() - sums) / (a.size - n1)


def exact_permutation_test(scores, labels, cap: int = DEFAULT_CAP) -> PermutationResult:
    """Enumerate every label assignment with the observed arm sizes.

    Raises
    ------
    EnumerationCapError
        If ``C(n, n1)`` exceeds ``cap``.
    """
    a, z = _check_labels(scores, labels)
    n1 = int(z.sum())
    total = math.comb(a.size, n1)
    if total > cap:
        raise EnumerationCapError(
            f"C({a.size},{n1}) = {total} assignments exceeds cap {cap}; use Monte Carlo mode"
        )
    threshold = float(a[z].sum()) + _tolerance(a)
    count = sum(int(np.count_nonzero(s <= threshold)) for s in _combination_sums(a, n1))
    return PermutationResult(score_statistic(a, z), count / total, total, "exact")


def _batch_count(a, n1, size, seed, batch, threshold) -> int:
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(batch,))))
    keys = rng.random((size, a.size))
    idx = np.argpartition(keys, n1 - 1, axis=1)[:, :n1] if n1 < a.size else np.argsort(keys, axis=1)
    sums = a[idx].sum(axis=1)
    return int(np.count_nonzero(sums <= threshold))


def monte_carlo_permutation_test(
    scores, labels, B: int = 100_000, seed: int = 0, n_jobs: int = 1
) -> PermutationResult:
    """Sample ``B`` size-preserving label assignments uniformly at random.

    Returns the add-one estimate ``(1 + k) / (B + 1)``. Assignments are
    drawn in fixed-size batches, each from its own stream keyed by
    ``(seed, batch)``, so the result does not depend on ``n_jobs``.
    """
    if int(B) != B or B < 1:
        raise PermSurvError("B must be a positive integer")
    a, z = _check_labels(scores, labels)
    n1 = int(z.sum())
    threshold = float(a[z].sum()) + _tolerance(a)
    sizes = [min(_BATCH, B - start) for start in range(0, B, _BATCH)]
    jobs = [(a, n1, size, seed, i, threshold) for i, size in enumerate(sizes)]
    if n_jobs == 1:
        counts = [_batch_count(*job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            counts = list(pool.map(lambda job: _batch_count(*job), jobs))
    k = sum(counts)
    return PermutationResult(score_statistic(a, z), (1 + k) / (B + 1), int(B), "monte-carlo", int(seed), RNG_ALGORITHM)


def permutation_test(scores, labels, B: int = 100_000, seed: int = 0, cap: int = DEFAULT_CAP) -> PermutationResult:
    """Exact test when enumeration fits under ``cap``, Monte Carlo otherwise."""
    a, z = _check_labels(scores, labels)
    if math.comb(a.size, int(z.sum())) <= cap:
        return exact_permutation_test(a, z, cap)
    return monte_carlo_permutation_test(a, z, B, seed)


def distribution_csv(sums: np.ndarray) -> str:
    buf = io.StringIO()
    buf.write("statistic\n")
    for s in sums:
        buf.write(f"{s:.17g}\n")
    return buf.getvalue()
