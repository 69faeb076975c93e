"""Per-subject scores for permutation-of-scores tests.

Every weighted log-rank statistic equals the arm-1 sum of a fixed set of
subject scores. An event at ``t_j`` scores ``w_j - sum_{i<=j} w_i d_i / n_i``
and a censoring in ``[t_j, t_{j+1})`` scores ``-sum_{i<=j} w_i d_i / n_i``.
With unit weights these are the log-rank scores built from the pooled
Nelson-Aalen curve. Lower scores mean longer survival throughout.
"""
from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .data import EventTable, TwoArmDataset, build_event_table
from .errors import PermSurvError
from .estimators import kaplan_meier, nelson_aalen_survival
from .wlrt import WeightSpec, compute_weights

__all__ = [
    "ScoreVector",
    "wilcoxon_scores",
    "gehan_scores",
    "logrank_scores",
    "scores_from_weights",
    "weighted_scores",
    "score_statistic",
    "arm1_score_sum",
    "gehan_counts",
    "arm1_centered_mean",
]


@dataclass(frozen=True, eq=False)
class ScoreVector:
    scores: np.ndarray
    method: str

    def __len__(self) -> int:
        return int(self.scores.size)

    def to_csv(self, data: TwoArmDataset) -> str:
        """``index,time,event,arm,score`` rows in dataset order."""
        if len(data) != len(self):
            raise PermSurvError("score vector and dataset differ in length")
        buf = io.StringIO()
        buf.write("index,time,event,arm,score\n")
        for i, (t, e, z, a) in enumerate(zip(data.time, data.event, data.arm, self.scores)):
            buf.write(f"{i},{t:.17g},{int(e)},{int(z)},{a:.17g}\n")
        return buf.getvalue()


def wilcoxon_scores(data: TwoArmDataset) -> ScoreVector:
    """Reverse ranks: the longest time scores 1, the shortest scores n.

    Tied times share the mean of their ranks.
    """
    if not np.all(data.event):
        raise PermSurvError("wilcoxon scores need uncensored data; use gehan_scores for censored data")
    ranks = rankdata(-data.time, method="average")
    return ScoreVector(ranks, "wilcoxon")


def gehan_counts(data: TwoArmDataset) -> tuple[np.ndarray, np.ndarray]:
    """Per-subject counts of subjects definitely surviving longer and definitely shorter.

    Subject ``j`` is definitely shorter than ``i`` when ``j`` is an event and
    ``x_j < x_i``. A censored subject is never definitely shorter than anyone.
    """
    x, ev = data.time, data.event
    sorted_all = np.sort(x)
    sorted_ev = np.sort(x[ev])
    longer = np.where(ev, x.size - np.searchsorted(sorted_all, x, side="right"), 0)
    shorter = np.searchsorted(sorted_ev, x, side="left")
    return longer, shorter


def gehan_scores(data: TwoArmDataset) -> ScoreVector:
    """Gehan scores ``#definitely longer - #definitely shorter``; they sum to zero."""
    longer, shorter = gehan_counts(data)
    return ScoreVector((longer - shorter).astype(float), "gehan")


def logrank_scores(data: TwoArmDataset) -> ScoreVector:
    """Event ``1 + log S(x)``, censoring ``log S(x)``, with ``S`` pooled Nelson-Aalen."""
    na = nelson_aalen_survival(data)
    a = np.log(na(data.time)) + data.event
    return ScoreVector(a, "logrank")


def scores_from_weights(weights, table: EventTable) -> ScoreVector:
    """Scores whose arm-1 sum equals the weighted log-rank statistic for ``weights``.

    Censorings before the first event time score 0.
    """
    w = np.asarray(weights, dtype=float)
    if w.size != len(table):
        raise PermSurvError(f"weights have length {w.size}, expected {len(table)}")
    cum = np.cumsum(w * table.d / table.n)
    row = table.obs_row
    safe = np.maximum(row, 0)
    a = np.where(row >= 0, np.where(table.obs_event, w[safe], 0.0) - cum[safe], 0.0)
    return ScoreVector(a, "weights")


def weighted_scores(data: TwoArmDataset, spec: WeightSpec) -> ScoreVector:
    table = build_event_table(data)
    w = compute_weights(spec, table, kaplan_meier(data))
    sv = scores_from_weights(w, table)
    return ScoreVector(sv.scores, spec.describe())


def _check_labels(scores, labels):
    a = np.asarray(getattr(scores, "scores", scores), dtype=float)
    z = np.asarray(labels).astype(bool)
    if a.shape != z.shape:
        raise PermSurvError("scores and labels differ in length")
    if z.all() or not z.any():
        raise PermSurvError("both arms must be nonempty")
    return a, z


def score_statistic(scores, labels) -> float:
    """Mean score on arm 1 minus mean score on arm 0."""
    a, z = _check_labels(scores, labels)
    return float(a[z].mean() - a[~z].mean())


def arm1_score_sum(scores, labels) -> float:
    """Sum of scores on arm 1; an increasing affine function of :func:`score_statistic`."""
    a, z = _check_labels(scores, labels)
    return float(np.sum(a[z]))


def arm1_centered_mean(scores, labels) -> float:
    """Mean arm-1 score after centring scores at their overall mean.

    This equals half the mean difference under 1:1 allocation, which is the
    quantity tabulated for the worked toy example.
    """
    a, z = _check_labels(scores, labels)
    return float((a[z] - a.mean()).mean())
