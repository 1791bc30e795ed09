"""Kendall's tau, the sine-transformed rank correlation matrix, Pearson, and PSD repair."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import DomainError, NumericError

KINDS = ("kendall_tau", "kendall_sine", "pearson")
DEFAULT_RIDGE = 1e-8

# Above this many rows the tau matrix is assembled from per-pair O(n log n)
# counts instead of the pairwise sign scan; both give the same integer
# concordance totals.
_PAIRWISE_MAX_N = 1500


class ConstantColumnWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class CorrelationEstimate:
    """Symmetric d x d correlation estimate with diagonal exactly one.

    ``warnings`` carries diagnostics attached at construction time (for
    instance the indices of constant columns).
    """

    entries: np.ndarray
    kind: str
    warnings: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown correlation kind {self.kind!r}")
        self.entries.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


def _check_matrix(data) -> np.ndarray:
    a = np.asarray(data, dtype=float)
    if a.ndim != 2:
        raise DomainError(f"expected an n x d matrix, got shape {a.shape}")
    if a.shape[0] < 2:
        raise DomainError(f"need at least 2 observations, got {a.shape[0]}")
    if np.isnan(a).any():
        raise DomainError("data contains NaN")
    return a


def kendall_tau(x, y) -> float:
    """Kendall's tau-a: mean of sign((x_i - x_j)(y_i - y_j)) over all pairs i < j.

    Tied pairs contribute zero.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-d vectors of equal length")
    tau = kendall_tau_matrix(np.column_stack([x, y]), _warn=False).entries
    return float(tau[0, 1])


def _concordance_pairwise(a: np.ndarray) -> np.ndarray:
    n, d = a.shape
    total = np.zeros((d, d))
    for i in range(n - 1):
        s = np.sign(a[i + 1:] - a[i])
        total += s.T @ s
    return total


def _n_tied_pairs(v: np.ndarray) -> int:
    _, counts = np.unique(v, return_counts=True)
    counts = counts.astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())


def _concordance_fast(a: np.ndarray) -> np.ndarray:
    # Recover the integer numerator S = concordant - discordant from scipy's
    # tau-b; S is an integer so rounding makes the recovery exact.
    n, d = a.shape
    n0 = n * (n - 1) // 2
    ties = [_n_tied_pairs(a[:, j]) for j in range(d)]
    total = np.zeros((d, d))
    for j in range(d):
        total[j, j] = n0 - ties[j]
        for k in range(j + 1, d):
            denom = np.sqrt(float(n0 - ties[j]) * float(n0 - ties[k]))
            if denom == 0:
                s = 0.0
            else:
                tau_b = stats.kendalltau(a[:, j], a[:, k], variant="b").statistic
                s = float(np.rint(tau_b * denom))
            total[j, k] = total[k, j] = s
    return total


def kendall_tau_matrix(data, *, _warn: bool = True) -> CorrelationEstimate:
    """Pairwise Kendall's tau of the columns of an n x d matrix.

    Constant columns give zero against every other column; they are recorded
    in ``result.warnings`` and a :class:`ConstantColumnWarning` is emitted.
    The diagonal is set to one regardless.
    """
    a = _check_matrix(data)
    n = a.shape[0]
    n0 = n * (n - 1) // 2
    conc = _concordance_pairwise(a) if n <= _PAIRWISE_MAX_N else _concordance_fast(a)
    tau = conc / n0
    np.fill_diagonal(tau, 1.0)
    constant = np.flatnonzero(np.ptp(a, axis=0) == 0)
    notes = ()
    if constant.size:
        notes = (f"constant columns {constant.tolist()} have tau 0 against all other columns",)
        if _warn:
            warnings.warn(notes[0], ConstantColumnWarning, stacklevel=2)
    return CorrelationEstimate(tau, "kendall_tau", notes)


def sine_transform(tau) -> CorrelationEstimate:
    """Map Kendall's tau to the latent elliptical correlation, sin(pi/2 * tau)."""
    notes = ()
    if isinstance(tau, CorrelationEstimate):
        notes = tau.warnings
        tau = tau.entries
    t = np.asarray(tau, dtype=float)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise DomainError("tau must be a square matrix")
    if not np.array_equal(t, t.T):
        raise DomainError("tau must be symmetric")
    if np.abs(t).max() > 1:
        raise DomainError("tau entries must lie in [-1, 1]")
    s = np.sin(0.5 * np.pi * t)
    np.fill_diagonal(s, 1.0)
    return CorrelationEstimate(np.clip(s, -1.0, 1.0), "kendall_sine", notes)


def kendall_sine_matrix(data) -> CorrelationEstimate:
    return sine_transform(kendall_tau_matrix(data))


def pearson_matrix(data, labels=None) -> CorrelationEstimate:
    a = _check_matrix(data)
    constant = np.flatnonzero(np.ptp(a, axis=0) == 0)
    if constant.size:
        j = int(constant[0])
        name = labels[j] if labels is not None else f"column {j}"
        raise DomainError(f"Pearson correlation undefined: {name} is constant")
    r = np.corrcoef(a, rowvar=False)
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    return CorrelationEstimate(np.clip(r, -1.0, 1.0), "pearson")


def psd_project(S, ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    """Clamp negative eigenvalues of a symmetric matrix to zero, then floor at ``ridge``.

    If the smallest clamped eigenvalue is below ``ridge``, ``ridge * I`` is
    added, so the result is invertible whenever ``ridge > 0``.
    """
    out = psd_project_batch(np.asarray(S, dtype=float)[None], ridge)
    return out[0]


def psd_project_batch(blocks: np.ndarray, ridge: float = DEFAULT_RIDGE) -> np.ndarray:
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    try:
        w, v = np.linalg.eigh(blocks)
    except np.linalg.LinAlgError as exc:
        raise NumericError("eigendecomposition failed during PSD projection") from exc
    w = np.maximum(w, 0.0)
    short = w.min(axis=-1) < ridge
    w[short] += ridge
    out = (v * w[:, None, :]) @ np.swapaxes(v, -1, -2)
    return 0.5 * (out + np.swapaxes(out, -1, -2))
