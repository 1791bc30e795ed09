"""Bootstrap rank intervals and influential-variable flags.

Rows are resampled jointly (response with its covariates).  For each
covariate the interval endpoints are type-1 empirical quantiles of its B
bootstrap ranks: the order statistics at positions ceil(alpha/2 * B) and
ceil((1 - alpha/2) * B), clamped to [1, B].
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .data import DataMatrix
from .elliptical import substream
from .errors import ConfigurationError, DomainError
from .rank_corr import ConstantColumnWarning
from .screening import ScreeningConfig, ScreeningScores, _order, score_all

MAX_RETRIES = 10


@dataclass(frozen=True)
class BootstrapRankSummary:
    covariate: int
    label: str
    point_rank: int
    lower: int
    upper: int
    influential: bool


@dataclass(frozen=True, eq=False)
class BootstrapResult:
    summaries: list[BootstrapRankSummary]
    ranks: np.ndarray  # (B, p); ranks[b, i-1] is covariate i's rank in replicate b
    B: int
    alpha: float
    top_k: int

    def influential(self) -> list[int]:
        return [s.covariate for s in self.summaries if s.influential]


def rank_covariates(scores) -> np.ndarray:
    """Rank 1 for the largest score; ties go to the smaller covariate index."""
    values = scores.scores if isinstance(scores, ScreeningScores) else np.asarray(scores, dtype=float)
    ranks = np.empty(values.shape[0], dtype=np.int64)
    ranks[_order(values)] = np.arange(1, values.shape[0] + 1)
    return ranks


def order_statistic_position(q: float, B: int) -> int:
    """1-based position ceil(q * B), clamped to [1, B]."""
    # round first so 0.975 * 200 lands on 195, not 195.00000000000003
    return min(max(math.ceil(round(q * B, 9)), 1), B)


def rank_interval(ranks: np.ndarray, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper interval endpoints per column of a (B, p) rank matrix."""
    B = ranks.shape[0]
    srt = np.sort(ranks, axis=0)
    lo = order_statistic_position(alpha / 2, B)
    hi = order_statistic_position(1 - alpha / 2, B)
    return srt[lo - 1], srt[hi - 1]


def _needs_redraw(values: np.ndarray, method: str) -> bool:
    return method in ("SIS", "CCK") and bool(np.any(np.ptp(values, axis=0) == 0))


def _replicate(data: DataMatrix, config: ScreeningConfig, seed: int, b: int) -> np.ndarray:
    rng = substream(seed, b)
    n = data.n
    for _ in range(MAX_RETRIES + 1):
        rows = rng.integers(0, n, size=n)
        values = data.values[rows]
        if not _needs_redraw(values, config.method) and np.ptp(values[:, 0]) > 0:
            break
    else:
        raise DomainError(
            f"bootstrap replicate {b} drew a constant column {MAX_RETRIES + 1} times in a row (seed {seed})"
        )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstantColumnWarning)
        scores = score_all(DataMatrix(values, data.labels), config)
    return rank_covariates(scores)


def _replicate_job(args):
    return _replicate(*args)


def bootstrap_rank_intervals(
    data: DataMatrix,
    config: ScreeningConfig,
    B: int = 200,
    alpha: float = 0.05,
    top_k: int = 20,
    seed: int = 0,
    workers: int = 1,
) -> BootstrapResult:
    """Rank intervals for every covariate from ``B`` row-resampled replicates.

    A covariate is influential when the upper end of its interval is at most
    ``top_k``.  Replicate ``b`` always uses ``substream(seed, b)``, so results
    do not depend on ``workers``.
    """
    if B < 2:
        raise ConfigurationError(f"B must be >= 2, got {B}")
    if not 0 < alpha < 1:
        raise ConfigurationError(f"alpha must lie in (0, 1), got {alpha}")
    if top_k < 1:
        raise ConfigurationError(f"top_k must be >= 1, got {top_k}")
    point = rank_covariates(score_all(data, config))

    jobs = [(data, config, seed, b) for b in range(B)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_replicate_job, jobs, chunksize=max(1, B // (4 * workers))))
    else:
        rows = [_replicate_job(j) for j in jobs]
    ranks = np.vstack(rows)

    lower, upper = rank_interval(ranks, alpha)
    labels = data.covariate_labels
    summaries = [
        BootstrapRankSummary(i + 1, labels[i], int(point[i]), int(lower[i]), int(upper[i]), bool(upper[i] <= top_k))
        for i in range(data.p)
    ]
    return BootstrapResult(summaries, ranks, B, alpha, top_k)
