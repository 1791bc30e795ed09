"""Elliptical sampling: multivariate normal and multivariate t with a given scatter.

Random streams follow one convention everywhere in the package: a base seed
plus a replicate index map to an independent generator through
``numpy.random.SeedSequence(base_seed, spawn_key=(index,))``.  Any single
replicate can therefore be regenerated in isolation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, NumericError

FAMILIES = ("normal", "student_t")


def substream(base_seed: int, index: int) -> np.random.Generator:
    """Independent generator for replicate ``index`` of a run seeded with ``base_seed``."""
    if base_seed < 0 or index < 0:
        raise ConfigurationError("seeds and replicate indices must be non-negative")
    return np.random.default_rng(np.random.SeedSequence(int(base_seed), spawn_key=(int(index),)))


def as_generator(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


@dataclass(frozen=True, eq=False)
class ScatterMatrix:
    """Symmetric, unit-diagonal, positive definite scatter (correlation) matrix."""

    entries: np.ndarray

    def __post_init__(self):
        a = np.array(self.entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise ConfigurationError(f"scatter matrix must be square, got shape {a.shape}")
        if not np.array_equal(a, a.T):
            raise ConfigurationError("scatter matrix must be exactly symmetric")
        if not np.all(np.diag(a) == 1.0):
            raise ConfigurationError("scatter matrix must have unit diagonal")
        a.setflags(write=False)
        object.__setattr__(self, "entries", a)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True)
class EllipticalSpec:
    family: str
    scatter: ScatterMatrix
    dof: float | None = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigurationError(f"unknown elliptical family {self.family!r}; expected one of {FAMILIES}")
        if self.family == "student_t":
            if self.dof is None or not self.dof > 0:
                raise ConfigurationError("student_t family requires dof > 0")
        elif self.dof is not None:
            raise ConfigurationError("dof is only meaningful for the student_t family")


def equicorrelation_matrix(p: int, rho: float) -> ScatterMatrix:
    """p x p matrix with ones on the diagonal and ``rho`` elsewhere.

    Positive definite exactly when -1/(p-1) < rho < 1 (eigenvalues are
    1 + (p-1) rho, once, and 1 - rho, p-1 times).
    """
    if p < 1:
        raise ConfigurationError(f"p must be a positive integer, got {p}")
    lower = -1.0 / (p - 1) if p > 1 else -np.inf
    if not (lower < rho < 1.0):
        raise ConfigurationError(
            f"rho={rho} gives a non-positive-definite equicorrelation matrix; "
            f"valid interval is ({lower}, 1) for p={p}"
        )
    a = np.full((p, p), float(rho))
    np.fill_diagonal(a, 1.0)
    return ScatterMatrix(a)


def sample_elliptical(spec: EllipticalSpec, n: int, rng) -> np.ndarray:
    """Draw ``n`` centred rows from the elliptical law described by ``spec``.

    Normal rows are ``L z`` with ``L`` the Cholesky factor of the scatter;
    t rows divide a normal row by ``sqrt(w / dof)``, ``w ~ chi2(dof)``, with
    one mixing variable per row.
    """
    if n < 1:
        raise ConfigurationError(f"n must be >= 1, got {n}")
    rng = as_generator(rng)
    try:
        chol = np.linalg.cholesky(spec.scatter.entries)
    except np.linalg.LinAlgError as exc:
        raise NumericError(
            f"Cholesky factorisation failed for the {spec.scatter.dim}x{spec.scatter.dim} scatter matrix "
            f"(min eigenvalue {np.linalg.eigvalsh(spec.scatter.entries).min():.3g})"
        ) from exc
    z = rng.standard_normal((n, spec.scatter.dim)) @ chol.T
    if spec.family == "student_t":
        w = rng.chisquare(spec.dof, size=n)
        z = z / np.sqrt(w / spec.dof)[:, None]
    return z
