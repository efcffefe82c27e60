"""Summary statistics for benchmark comparisons.

Paired accuracy differences are summarized by a mean with a Student-t 95%
confidence interval, a paired t-test, and a Wilcoxon signed-rank test
(zero differences dropped, per the standard convention).  Correlations use
Spearman rank correlation.  Statistics whose preconditions fail are left
unset and noted, rather than aborting the whole summary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy import stats as sps


@dataclass
class StatsSummary:
    n: int
    mean: float
    ci95_halfwidth: Optional[float] = None
    ttest_p: Optional[float] = None
    wilcoxon_p: Optional[float] = None
    notes: tuple = ()


def mean_ci95(diffs: Sequence[float]) -> tuple:
    """Mean and t-based 95% CI halfwidth; halfwidth is None for n < 2."""
    n = len(diffs)
    if n == 0:
        raise ValueError("cannot summarize an empty difference list")
    arr = np.asarray(diffs, dtype=float)
    mean = float(arr.mean())
    if n < 2:
        return mean, None
    sd = float(arr.std(ddof=1))
    t = float(sps.t.ppf(0.975, n - 1))
    return mean, t * sd / math.sqrt(n)


def summarize_diffs(diffs: Sequence[float]) -> StatsSummary:
    mean, halfwidth = mean_ci95(diffs)
    n = len(diffs)
    notes = []
    t_p = None
    w_p = None
    arr = np.asarray(diffs, dtype=float)
    if n < 2:
        notes.append("need at least 2 differences for t statistics")
    elif float(arr.std(ddof=1)) == 0.0:
        notes.append("zero variance; t-test undefined")
    else:
        t_p = float(sps.ttest_1samp(arr, 0.0).pvalue)
    nonzero = int(np.count_nonzero(arr))
    if nonzero < 5:
        notes.append(
            "only %d non-zero differences; Wilcoxon needs at least 5" % nonzero
        )
    else:
        w_p = float(
            sps.wilcoxon(arr, zero_method="wilcox", alternative="two-sided").pvalue
        )
    return StatsSummary(
        n=n,
        mean=mean,
        ci95_halfwidth=halfwidth,
        ttest_p=t_p,
        wilcoxon_p=w_p,
        notes=tuple(notes),
    )


def spearman_rho(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation; identical rankings give exactly 1.0."""
    if len(x) != len(y):
        raise ValueError("rank correlation needs equal-length sequences")
    if len(x) < 2:
        raise ValueError("rank correlation needs at least 2 pairs")
    rho = sps.spearmanr(x, y).statistic
    return float(rho)
