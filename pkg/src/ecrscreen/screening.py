"""Screening scores (CCH, CCK, SIS, RRCS) and the three selection rules.

CCH is the rank-based canonical-correlation screen: Kendall's tau, sine
transform, then the neighbourhood max of canonical correlations.  CCK is the
same pipeline fed with Pearson correlations.  SIS and RRCS are the marginal
absolute Pearson and Kendall correlations.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .cancorr import NeighborhoodConfig, neighborhood_scores
from .data import DataMatrix
from .errors import ConfigurationError, DomainError
from .rank_corr import DEFAULT_RIDGE, ConstantColumnWarning, kendall_tau_matrix, pearson_matrix, sine_transform

METHODS = ("CCH", "CCK", "SIS", "RRCS")


@dataclass(frozen=True)
class ScreeningConfig:
    method: str = "CCH"
    neighborhood: NeighborhoodConfig | None = None
    ridge: float = DEFAULT_RIDGE

    def __post_init__(self):
        method = self.method.upper()
        if method not in METHODS:
            raise ConfigurationError(f"unknown screening method {self.method!r}; expected one of {METHODS}")
        object.__setattr__(self, "method", method)
        if method in ("CCH", "CCK") and self.neighborhood is None:
            object.__setattr__(self, "neighborhood", NeighborhoodConfig())
        if self.ridge < 0:
            raise ConfigurationError("ridge must be non-negative")

    @classmethod
    def make(cls, method: str, k: int = 2, k_n: int = 2, ridge: float = DEFAULT_RIDGE) -> "ScreeningConfig":
        method = method.upper()
        hood = NeighborhoodConfig(k, k_n) if method in ("CCH", "CCK") else None
        return cls(method, hood, ridge)


@dataclass(frozen=True, eq=False)
class ScreeningScores:
    """Per-covariate scores; ``scores[i-1]`` and ``argmax_subsets[i-1]`` belong to covariate ``i``."""

    scores: np.ndarray
    argmax_subsets: tuple[tuple[int, ...], ...]
    method: str = ""
    warnings: tuple[str, ...] = field(default=())

    @property
    def p(self) -> int:
        return self.scores.shape[0]


@dataclass(frozen=True)
class ActiveSet:
    members: frozenset
    rule: str
    parameter: float

    def __contains__(self, i) -> bool:
        return i in self.members

    def __len__(self) -> int:
        return len(self.members)

    def sorted(self) -> list[int]:
        return sorted(self.members)


def score_all(data: DataMatrix, config: ScreeningConfig) -> ScreeningScores:
    """Score every covariate of ``data`` with the configured method."""
    if data.n < 2:
        raise DomainError("need at least 2 observations")
    values = data.values
    if np.ptp(data.y) == 0:
        raise DomainError(f"response {data.labels[0]!r} is constant")
    method = config.method
    notes: tuple[str, ...] = ()

    if method in ("CCK", "SIS"):
        R = pearson_matrix(values, data.labels)
    else:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ConstantColumnWarning)
            R = kendall_tau_matrix(values)
        if method == "CCH":
            R = sine_transform(R)

    if method in ("SIS", "RRCS"):
        scores = np.abs(R.entries[0, 1:]).copy()
        subsets = tuple((i,) for i in range(1, data.p + 1))
    else:
        scores, subsets = neighborhood_scores(R, config.neighborhood, config.ridge)
        subsets = tuple(subsets)

    constant = np.flatnonzero(np.ptp(data.X, axis=0) == 0)
    if constant.size:
        scores[constant] = 0.0
        names = [data.covariate_labels[j] for j in constant]
        notes = (f"constant covariates scored 0: {names}",)
        warnings.warn(notes[0], ConstantColumnWarning, stacklevel=2)
    return ScreeningScores(scores, subsets, method, notes)


def _order(scores: np.ndarray) -> np.ndarray:
    # descending score, ties to the smaller index
    return np.lexsort((np.arange(scores.shape[0]), -scores))


def threshold_select(scores: ScreeningScores, t_n: float) -> ActiveSet:
    """Covariates whose score strictly exceeds ``t_n``."""
    if t_n < 0:
        raise ConfigurationError("threshold must be non-negative")
    members = frozenset(int(i) + 1 for i in np.flatnonzero(scores.scores > t_n))
    return ActiveSet(members, "threshold", float(t_n))


def top_m_select(scores: ScreeningScores, m: int) -> ActiveSet:
    """The ``min(m, p)`` highest-scoring covariates."""
    if m < 1:
        raise ConfigurationError(f"m must be >= 1, got {m}")
    top = _order(scores.scores)[:m]
    return ActiveSet(frozenset(int(i) + 1 for i in top), "top_m", int(m))


def default_top_m(n: int) -> int:
    """floor(n / ln n), the selection size used in the simulation tables."""
    if n < 2:
        raise ConfigurationError("default top-m needs n >= 2")
    return int(math.floor(n / math.log(n)))


def iterative_schedule(p: int, delta: float, stop_below: int) -> list[int]:
    """Survivor counts of the iterative screen, e.g. (100, 0.4, 20) -> [40, 16]."""
    if not 0 < delta < 1:
        raise ConfigurationError(f"delta must lie in (0, 1), got {delta}")
    if stop_below < 1:
        raise ConfigurationError("stop_below must be >= 1")
    counts, count = [], p
    while count >= stop_below:
        nxt = math.floor(delta * count)
        if nxt == 0:
            raise ConfigurationError(
                f"floor({delta} * {count}) = 0 before dropping below {stop_below}; use a larger delta"
            )
        counts.append(nxt)
        count = nxt
    return counts


def iterative_screen(data: DataMatrix, config: ScreeningConfig, delta: float, stop_below: int | None = None) -> ActiveSet:
    """Repeatedly keep the top floor(delta * count) covariates until fewer than ``stop_below`` remain.

    Each round rescreens the data restricted to the survivors, re-indexed
    contiguously in their original order, so neighbourhoods refer to the
    surviving covariates.  ``stop_below`` defaults to n.
    """
    if stop_below is None:
        stop_below = data.n
    if stop_below > data.p:
        raise ConfigurationError(f"stop_below={stop_below} exceeds p={data.p}")
    alive = np.arange(1, data.p + 1)
    for keep in iterative_schedule(data.p, delta, stop_below):
        sub = data.restrict(alive)
        chosen = top_m_select(score_all(sub, config), keep)
        alive = alive[np.array(sorted(chosen.members)) - 1]
    return ActiveSet(frozenset(int(i) for i in alive), "iterative", float(delta))
