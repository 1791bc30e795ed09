"""Doubly robust sure screening for elliptical copula regression.

Rank-based (Kendall's tau) canonical-correlation screening (CCH) with the
CCK, SIS and RRCS baselines, bootstrap rank intervals, and a Monte Carlo
harness for containment proportions.
"""

__version__ = "0.1.0"

from .bootstrap import BootstrapRankSummary, BootstrapResult, bootstrap_rank_intervals, rank_covariates
from .cancorr import NeighborhoodConfig, canonical_correlation, enumerate_neighborhood_sets, max_cc_score
from .data import DataMatrix, read_csv
from .elliptical import EllipticalSpec, ScatterMatrix, equicorrelation_matrix, sample_elliptical, substream
from .errors import ConfigurationError, DomainError, NumericError, ScreeningError
from .harness import ExperimentCell, ProportionResult, containment, run_cell, run_grid, variance_filter
from .rank_corr import (
    CorrelationEstimate,
    kendall_tau,
    kendall_tau_matrix,
    pearson_matrix,
    psd_project,
    sine_transform,
)
from .screening import (
    ActiveSet,
    ScreeningConfig,
    ScreeningScores,
    default_top_m,
    iterative_screen,
    score_all,
    threshold_select,
    top_m_select,
)
from .simgen import LabeledSample, SimModelSpec, generate
