"""Monte Carlo runner for containment proportions, grid configs and CSV emission.

Replicate ``r`` of a cell draws its data from ``substream(base_seed, r)``;
screening itself is deterministic, so per-cell proportions are identical for
any worker count and any replicate can be rerun alone.

Run-config files are TOML::

    [run]
    replications = 500
    base_seed = 1
    # m = 6                 # optional; default floor(n / ln n)

    [[methods]]
    label = "CCH1"
    method = "cch"          # cch | cck | sis | rrcs
    k = 2
    kn = 2

    [[cells]]
    model = "M1"
    p = 100
    n = 20
    rho = [0.0, 0.9]        # list values expand into one cell each
    noise_family = "normal"
    # methods = ["CCH1"]    # optional subset of the declared labels
"""

from __future__ import annotations

import csv
import itertools
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import DataMatrix
from .elliptical import substream
from .errors import ConfigurationError, ScreeningError
from .screening import ActiveSet, ScreeningConfig, default_top_m, score_all, top_m_select
from .simgen import SimModelSpec, generate

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

log = logging.getLogger(__name__)

CSV_HEADER = (
    "model", "p", "n", "rho", "t_mix", "cov_family", "noise_family",
    "method", "k", "k_n", "m", "reps", "proportion", "se", "seconds",
)


class ReplicateError(ScreeningError):
    def __init__(self, label: str, replicate: int, seed: int, cause: Exception):
        self.replicate, self.seed = replicate, seed
        super().__init__(
            f"method {label} failed in replicate {replicate} (base_seed={seed}, "
            f"rerun with substream({seed}, {replicate})): {cause}"
        )


@dataclass(frozen=True)
class ExperimentCell:
    spec: SimModelSpec
    methods: tuple[tuple[ScreeningConfig, str], ...]
    replications: int = 500
    selection_m: int | None = None
    base_seed: int = 0

    def __post_init__(self):
        if self.replications < 1:
            raise ConfigurationError("replications must be >= 1")
        labels = [lab for _, lab in self.methods]
        if not labels:
            raise ConfigurationError("a cell needs at least one method")
        if len(set(labels)) != len(labels):
            raise ConfigurationError(f"method labels must be unique, got {labels}")
        object.__setattr__(self, "methods", tuple(self.methods))
        if self.selection_m is None:
            object.__setattr__(self, "selection_m", default_top_m(self.spec.n))
        elif self.selection_m < 1:
            raise ConfigurationError("selection_m must be >= 1")


@dataclass(frozen=True)
class ProportionResult:
    label: str
    proportion: float
    replications: int
    standard_error: float
    hits: int = 0


@dataclass(frozen=True)
class CellResult:
    cell: ExperimentCell
    results: list[ProportionResult]
    seconds: float
    contained: np.ndarray = field(repr=False, default=None)  # (reps, methods) booleans

    def __getitem__(self, label: str) -> ProportionResult:
        for r in self.results:
            if r.label == label:
                return r
        raise KeyError(label)


def containment(selected: ActiveSet, truth) -> bool:
    """True when every index in ``truth`` was selected."""
    members = selected.members if isinstance(selected, ActiveSet) else frozenset(selected)
    return frozenset(truth) <= members


def proportion_result(label: str, hits: int, reps: int) -> ProportionResult:
    prop = hits / reps
    return ProportionResult(label, prop, reps, math.sqrt(prop * (1 - prop) / reps), hits)


def run_replicate(cell: ExperimentCell, r: int, transform=None) -> list[bool]:
    """Containment flags, one per method, for replicate ``r`` of ``cell``.

    ``transform`` optionally maps the generated response before screening.
    """
    sample = generate(cell.spec, substream(cell.base_seed, r))
    data = sample.data
    if transform is not None:
        data = DataMatrix.from_arrays(transform(data.y), data.X, data.labels)
    flags = []
    for config, label in cell.methods:
        try:
            chosen = top_m_select(score_all(data, config), cell.selection_m)
        except ScreeningError as exc:
            raise ReplicateError(label, r, cell.base_seed, exc) from exc
        flags.append(containment(chosen, sample.true_support))
    return flags


def _replicate_job(args):
    cell, r, transform = args
    return run_replicate(cell, r, transform)


def run_cell(cell: ExperimentCell, workers: int = 1, transform=None) -> CellResult:
    """Containment proportions of every method over the cell's replicates."""
    start = time.perf_counter()
    jobs = [(cell, r, transform) for r in range(cell.replications)]
    if workers > 1 and cell.replications > 1:
        chunk = max(1, cell.replications // (4 * workers))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flags = list(pool.map(_replicate_job, jobs, chunksize=chunk))
    else:
        flags = [_replicate_job(j) for j in jobs]
    contained = np.array(flags, dtype=bool).reshape(cell.replications, len(cell.methods))
    hits = contained.sum(axis=0)
    results = [
        proportion_result(label, int(h), cell.replications) for (_, label), h in zip(cell.methods, hits)
    ]
    return CellResult(cell, results, time.perf_counter() - start, contained)


def _family_name(family: str, dof) -> str:
    return f"student_t({dof:g})" if family == "student_t" else family


def csv_rows(result: CellResult) -> list[list]:
    cell, spec = result.cell, result.cell.spec
    additive = spec.model in ("M4", "M5")
    cov = "uniform" if additive else _family_name(spec.cov_family, spec.cov_dof)
    noise = "normal(var=1.74)" if additive else _family_name(spec.noise_family, spec.noise_dof)
    rows = []
    for (config, _), res in zip(cell.methods, result.results):
        hood = config.neighborhood
        rows.append([
            spec.model, spec.p, spec.n,
            "" if spec.rho is None else f"{spec.rho:g}",
            "" if spec.t_mix is None else f"{spec.t_mix:g}",
            cov, noise, res.label,
            hood.k if hood else "", hood.k_n if hood else "",
            cell.selection_m, res.replications,
            f"{res.proportion:.4f}", f"{res.standard_error:.4f}", f"{result.seconds:.2f}",
        ])
    return rows


def run_grid(cells, out_path, workers: int = 1, progress=None) -> list[CellResult]:
    """Run every cell and write one CSV row per (cell, method) to ``out_path``."""
    cells = list(cells)
    if not cells:
        raise ConfigurationError("the grid contains no cells")
    out_path = Path(out_path)
    results = []
    try:
        fh = out_path.open("w", newline="", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write grid output {out_path}: {exc}") from exc
    with fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for idx, cell in enumerate(cells):
            res = run_cell(cell, workers=workers)
            results.append(res)
            writer.writerows(csv_rows(res))
            fh.flush()
            summary = " ".join(f"{r.label}={r.proportion:.3f}" for r in res.results)
            msg = f"[{idx + 1}/{len(cells)}] {cell.spec.model} p={cell.spec.p} n={cell.spec.n} {summary} ({res.seconds:.1f}s)"
            log.info(msg)
            if progress is not None:
                progress(msg)
    return results


def variance_filter(data: DataMatrix, keep: int) -> DataMatrix:
    """Keep the ``keep`` covariates with the largest sample variance.

    Columns come out in decreasing-variance order (ties to the smaller
    original index) with their labels.
    """
    if not 1 <= keep <= data.p:
        raise ConfigurationError(f"variance filter keep={keep} must lie in 1..{data.p}")
    var = data.X.var(axis=0, ddof=1)
    order = np.lexsort((np.arange(data.p), -var))[:keep]
    return data.restrict(order + 1)


# --- run-config parsing ---------------------------------------------------

_METHOD_KEYS = {"label", "method", "k", "kn", "k_n", "ridge"}
_RUN_KEYS = {"replications", "base_seed", "m", "workers", "out"}
_CELL_KEYS = set(SimModelSpec.__dataclass_fields__) - {"seed"} | {"replications", "base_seed", "m", "methods"}


def parse_method(d: dict) -> tuple[ScreeningConfig, str]:
    bad = set(d) - _METHOD_KEYS
    if bad:
        raise ConfigurationError(f"unknown method keys: {sorted(bad)}")
    if "method" not in d:
        raise ConfigurationError("method entry needs a 'method' key")
    config = ScreeningConfig.make(
        d["method"], int(d.get("k", 2)), int(d.get("kn", d.get("k_n", 2))), float(d.get("ridge", 1e-8))
    )
    label = d.get("label") or config.method
    return config, str(label)


def cells_from_config(cfg: dict) -> list[ExperimentCell]:
    """Expand a parsed run config into experiment cells."""
    bad = set(cfg) - {"run", "methods", "cells"}
    if bad:
        raise ConfigurationError(f"unknown top-level config keys: {sorted(bad)}")
    run = cfg.get("run", {})
    bad = set(run) - _RUN_KEYS
    if bad:
        raise ConfigurationError(f"unknown [run] keys: {sorted(bad)}")
    methods = [parse_method(m) for m in cfg.get("methods", [])]
    if not methods:
        methods = [parse_method({"method": name}) for name in ("cch", "cck", "sis", "rrcs")]
    by_label = dict((lab, (c, lab)) for c, lab in methods)
    if len(by_label) != len(methods):
        raise ConfigurationError("method labels must be unique")

    cells = []
    for raw in cfg.get("cells", []):
        bad = set(raw) - _CELL_KEYS
        if bad:
            raise ConfigurationError(f"unknown cell keys: {sorted(bad)}")
        chosen = raw.get("methods")
        if chosen is None:
            cell_methods = tuple(methods)
        else:
            missing = [lab for lab in chosen if lab not in by_label]
            if missing:
                raise ConfigurationError(f"cell refers to undeclared method labels {missing}")
            cell_methods = tuple(by_label[lab] for lab in chosen)
        spec_fields = {k: v for k, v in raw.items() if k in SimModelSpec.__dataclass_fields__}
        keys = list(spec_fields)
        axes = [v if isinstance(v, list) else [v] for v in spec_fields.values()]
        for combo in itertools.product(*axes):
            spec = SimModelSpec.from_dict(dict(zip(keys, combo)))
            cells.append(ExperimentCell(
                spec,
                cell_methods,
                replications=int(raw.get("replications", run.get("replications", 500))),
                selection_m=raw.get("m", run.get("m")),
                base_seed=int(raw.get("base_seed", run.get("base_seed", 0))),
            ))
    return cells


def load_run_config(path) -> tuple[list[ExperimentCell], dict]:
    """Parse a TOML run-config file; returns the cells and the ``[run]`` table."""
    path = Path(path)
    try:
        with path.open("rb") as fh:
            cfg = tomllib.load(fh)
        cells = cells_from_config(cfg)
    except (tomllib.TOMLDecodeError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"{path}: {exc}") from exc
    return cells, cfg.get("run", {})
