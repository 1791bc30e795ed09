"""Generators for the five simulation models.

M1  Y = 0.9 + X1 - 0.5 X2 + e              (normal or t(1) design and noise)
M2  Y = 5 (X1 + X2 + X3) + e                (normal or t(1) design and noise)
M3  log Y = 3 X1 + 1.5 X2 + 2 X3 + e        (normal or t(3) design and noise)
M4  Y = 5 f1(X1) + 3 f2(X2) + 4 f3(X3) + 6 f4(X4) + e,  e ~ N(0, var 1.74)
M5  log Y = right-hand side of M4

M1-M3 use an equicorrelated scatter with off-diagonal ``rho``.  M4/M5 use
X_j = (W_j + t U) / (1 + t) with W_j, U iid Uniform[0, 1].
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .data import DataMatrix
from .elliptical import EllipticalSpec, as_generator, equicorrelation_matrix, sample_elliptical
from .errors import ConfigurationError

MODELS = ("M1", "M2", "M3", "M4", "M5")
TRUE_SUPPORT = {
    "M1": frozenset({1, 2}),
    "M2": frozenset({1, 2, 3}),
    "M3": frozenset({1, 2, 3}),
    "M4": frozenset({1, 2, 3, 4}),
    "M5": frozenset({1, 2, 3, 4}),
}
_DEFAULT_DOF = {"M1": 1.0, "M2": 1.0, "M3": 3.0}
ADDITIVE_NOISE_VAR = 1.74


@dataclass(frozen=True)
class SimModelSpec:
    model: str
    p: int
    n: int
    rho: float | None = None
    t_mix: float | None = None
    cov_family: str = "normal"
    cov_dof: float | None = None
    noise_family: str = "normal"
    noise_dof: float | None = None
    seed: int | None = None

    def __post_init__(self):
        model = str(self.model).upper()
        if model not in MODELS:
            raise ConfigurationError(f"unknown model {self.model!r}; expected one of {MODELS}")
        object.__setattr__(self, "model", model)
        if self.p < 1 or self.n < 2:
            raise ConfigurationError(f"need p >= 1 and n >= 2, got p={self.p}, n={self.n}")
        if model in ("M1", "M2", "M3"):
            if self.t_mix is not None:
                raise ConfigurationError(f"t_mix does not apply to {model}")
            object.__setattr__(self, "rho", 0.0 if self.rho is None else float(self.rho))
            for fam, dof_name in (("cov_family", "cov_dof"), ("noise_family", "noise_dof")):
                family = getattr(self, fam)
                if family not in ("normal", "student_t"):
                    raise ConfigurationError(f"{fam} must be 'normal' or 'student_t', got {family!r}")
                dof = getattr(self, dof_name)
                if family == "student_t":
                    dof = _DEFAULT_DOF[model] if dof is None else float(dof)
                    if dof <= 0:
                        raise ConfigurationError(f"{dof_name} must be positive")
                    object.__setattr__(self, dof_name, dof)
                elif dof is not None:
                    raise ConfigurationError(f"{dof_name} given for a normal {fam}")
            equicorrelation_matrix(self.p, self.rho)
        else:
            if self.rho is not None:
                raise ConfigurationError(f"rho does not apply to {model}")
            if self.cov_family != "normal" or self.noise_family != "normal" or self.cov_dof or self.noise_dof:
                raise ConfigurationError(f"{model} has a uniform design and N(0, 1.74) noise; families are fixed")
            t = 0.0 if self.t_mix is None else float(self.t_mix)
            if t < 0:
                raise ConfigurationError("t_mix must be non-negative")
            object.__setattr__(self, "t_mix", t)
        if self.p < len(TRUE_SUPPORT[model]):
            raise ConfigurationError(f"{model} needs p >= {len(TRUE_SUPPORT[model])}")

    def to_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}

    @classmethod
    def from_dict(cls, d: dict) -> "SimModelSpec":
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigurationError(f"unknown model spec keys: {sorted(unknown)}")
        return cls(**d)


@dataclass(frozen=True, eq=False)
class LabeledSample:
    data: DataMatrix
    true_support: frozenset


def f1(x):
    return x


def f2(x):
    return (2 * x - 1) ** 2


def f3(x):
    s = np.sin(2 * np.pi * x)
    return s / (2 - s)


def f4(x):
    s, c = np.sin(2 * np.pi * x), np.cos(2 * np.pi * x)
    return 0.1 * s + 0.2 * c + 0.3 * s**2 + 0.4 * c**3 + 0.5 * s**3


def additive_design(n: int, p: int, t_mix: float, rng) -> np.ndarray:
    w = rng.uniform(size=(n, p))
    u = rng.uniform(size=(n, 1))
    return (w + t_mix * u) / (1 + t_mix)


def _noise(spec: SimModelSpec, n: int, rng) -> np.ndarray:
    if spec.noise_family == "student_t":
        return rng.standard_t(spec.noise_dof, size=n)
    return rng.standard_normal(n)


def generate(spec: SimModelSpec, rng=None) -> LabeledSample:
    """Draw one data set; ``rng`` defaults to a generator seeded with ``spec.seed``."""
    rng = as_generator(spec.seed if rng is None else rng)
    n, p = spec.n, spec.p
    if spec.model in ("M1", "M2", "M3"):
        scatter = equicorrelation_matrix(p, spec.rho)
        cov = EllipticalSpec(spec.cov_family, scatter, spec.cov_dof)
        X = sample_elliptical(cov, n, rng)
        eps = _noise(spec, n, rng)
        if spec.model == "M1":
            y = 0.9 + X[:, 0] - 0.5 * X[:, 1] + eps
        elif spec.model == "M2":
            y = 5.0 * (X[:, 0] + X[:, 1] + X[:, 2]) + eps
        else:
            y = np.exp(3.0 * X[:, 0] + 1.5 * X[:, 1] + 2.0 * X[:, 2] + eps)
    else:
        X = additive_design(n, p, spec.t_mix, rng)
        eps = np.sqrt(ADDITIVE_NOISE_VAR) * rng.standard_normal(n)
        latent = 5 * f1(X[:, 0]) + 3 * f2(X[:, 1]) + 4 * f3(X[:, 2]) + 6 * f4(X[:, 3]) + eps
        y = latent if spec.model == "M4" else np.exp(latent)
    return LabeledSample(DataMatrix.from_arrays(y, X), TRUE_SUPPORT[spec.model])
