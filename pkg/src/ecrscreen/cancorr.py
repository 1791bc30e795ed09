"""Canonical correlation between the response and small covariate subsets.

Indexing convention: the joint correlation matrix has the response at row 0
and covariate ``i`` (1-based, ``1 <= i <= p``) at row ``i``.  Subsets are
tuples of covariate indices in strictly increasing order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, NumericError
from .rank_corr import DEFAULT_RIDGE, CorrelationEstimate, psd_project_batch


@dataclass(frozen=True)
class NeighborhoodConfig:
    """Subset size ``k`` and neighbourhood radius ``k_n``."""

    k: int = 2
    k_n: int = 2

    def __post_init__(self):
        if self.k < 1 or self.k_n < 1:
            raise ConfigurationError(f"k and k_n must be >= 1, got k={self.k}, k_n={self.k_n}")


def _entries(S) -> np.ndarray:
    return S.entries if isinstance(S, CorrelationEstimate) else np.asarray(S, dtype=float)


def _cc_squared(S: np.ndarray, subsets: np.ndarray, ridge: float) -> np.ndarray:
    """Quadratic forms S_IJ S_JJ^{-1} S_IJ^T for a stack of subsets (shape (m, k))."""
    blocks = S[subsets[:, :, None], subsets[:, None, :]]
    cross = S[0, subsets]
    try:
        wmin = np.linalg.eigvalsh(blocks)[:, 0]
    except np.linalg.LinAlgError as exc:
        raise NumericError("eigendecomposition of a covariate block failed") from exc
    repair = wmin < ridge if ridge > 0 else wmin < 0
    if repair.any():
        blocks = blocks.copy()
        blocks[repair] = psd_project_batch(blocks[repair], ridge)
        wmin = np.where(repair, np.linalg.eigvalsh(blocks)[:, 0], wmin)
    if not np.all(wmin > 0):
        bad = subsets[np.argmin(wmin)].tolist()
        raise NumericError(f"covariate block for subset {bad} is singular; use ridge > 0")
    try:
        coef = np.linalg.solve(blocks, cross[:, :, None])[:, :, 0]
    except np.linalg.LinAlgError as exc:
        raise NumericError("solving against a covariate block failed") from exc
    q = np.einsum("mk,mk->m", cross, coef)
    if not np.all(np.isfinite(q)):
        raise NumericError("non-finite canonical correlation")
    return q


def canonical_correlation(S, J, ridge: float = DEFAULT_RIDGE) -> float:
    """Estimated canonical correlation between the response (index 0) and covariates ``J``.

    Blocks whose smallest eigenvalue is below ``ridge`` are repaired with
    :func:`~ecrscreen.rank_corr.psd_project`.  The squared value is clamped to
    [0, 1] before the square root.
    """
    S = _entries(S)
    members = tuple(sorted(int(j) for j in J))
    p = S.shape[0] - 1
    if not members or len(set(members)) != len(members) or members[0] < 1 or members[-1] > p:
        raise ConfigurationError(f"invalid covariate subset {J} for p={p}")
    q = _cc_squared(S, np.array([members]), ridge)[0]
    return float(np.sqrt(min(max(q, 0.0), 1.0)))


@lru_cache(maxsize=256)
def _neighborhoods(p: int, k: int, k_n: int) -> tuple[tuple[tuple[int, ...], ...], ...]:
    out = []
    for i in range(1, p + 1):
        window = [j for j in range(max(1, i - k_n), min(p, i + k_n) + 1) if j != i]
        if len(window) < k - 1:
            raise ConfigurationError(
                f"neighbourhood of covariate {i} has {len(window)} members, too few for subsets of size k={k} "
                f"(k_n={k_n}, p={p})"
            )
        subsets = sorted(tuple(sorted((i,) + c)) for c in itertools.combinations(window, k - 1))
        out.append(tuple(subsets))
    return tuple(out)


def enumerate_neighborhood_sets(i: int, p: int, config: NeighborhoodConfig) -> list[tuple[int, ...]]:
    """All size-k subsets containing ``i`` whose other members lie within ``k_n`` of ``i``.

    Windows are truncated at 1 and ``p``.  Subsets come back in lexicographic order.
    """
    if not 1 <= i <= p:
        raise ConfigurationError(f"covariate index {i} outside 1..{p}")
    if config.k > p:
        raise ConfigurationError(f"k={config.k} exceeds p={p}")
    window = [j for j in range(max(1, i - config.k_n), min(p, i + config.k_n) + 1) if j != i]
    if len(window) < config.k - 1:
        raise ConfigurationError(
            f"neighbourhood of covariate {i} has {len(window)} members, too few for k={config.k}"
        )
    return sorted(tuple(sorted((i,) + c)) for c in itertools.combinations(window, config.k - 1))


def max_cc_score(i: int, S, config: NeighborhoodConfig, ridge: float = DEFAULT_RIDGE):
    """Largest canonical correlation over the neighbourhood sets of covariate ``i``.

    Returns ``(score, subset)``; ties go to the lexicographically smallest subset.
    """
    S = _entries(S)
    subsets = enumerate_neighborhood_sets(i, S.shape[0] - 1, config)
    q = _cc_squared(S, np.array(subsets), ridge)
    r = np.sqrt(np.clip(q, 0.0, 1.0))
    best = int(np.argmax(r))
    return float(r[best]), subsets[best]


def neighborhood_scores(S, config: NeighborhoodConfig, ridge: float = DEFAULT_RIDGE):
    """:func:`max_cc_score` for every covariate, sharing work across overlapping subsets.

    Returns ``(scores, argmax_subsets)`` with ``scores[i-1]`` for covariate ``i``.
    """
    S = _entries(S)
    p = S.shape[0] - 1
    if config.k > p:
        raise ConfigurationError(f"k={config.k} exceeds p={p}")
    hoods = _neighborhoods(p, config.k, config.k_n)
    unique = sorted({s for h in hoods for s in h})
    position = {s: m for m, s in enumerate(unique)}
    r = np.sqrt(np.clip(_cc_squared(S, np.array(unique), ridge), 0.0, 1.0))
    scores = np.empty(p)
    argmax = []
    for i, h in enumerate(hoods):
        vals = r[[position[s] for s in h]]
        best = int(np.argmax(vals))
        scores[i] = vals[best]
        argmax.append(h[best])
    return scores, argmax
