import csv
import math

import numpy as np
import pytest

from ecrscreen.data import DataMatrix
from ecrscreen.errors import ConfigurationError
from ecrscreen.harness import (
    CSV_HEADER,
    ExperimentCell,
    cells_from_config,
    containment,
    load_run_config,
    run_cell,
    run_grid,
    variance_filter,
)
from ecrscreen.screening import ActiveSet, ScreeningConfig
from ecrscreen.simgen import SimModelSpec

from oracles import variance_order

METHODS = ((ScreeningConfig.make("cch"), "CCH1"), (ScreeningConfig.make("sis"), "SIS"))


def active(*members):
    return ActiveSet(frozenset(members), "top_m", len(members))


def test_containment_examples():
    assert containment(active(1, 2, 3), {1, 2})
    assert not containment(active(1, 3), {1, 2})
    assert containment(active(1, 2), {1, 2})


def test_cell_validation():
    spec = SimModelSpec("M1", 20, 20)
    with pytest.raises(ConfigurationError):
        ExperimentCell(spec, METHODS, replications=0)
    with pytest.raises(ConfigurationError):
        ExperimentCell(spec, (METHODS[0], METHODS[0]))
    assert ExperimentCell(spec, METHODS).selection_m == 6


def test_single_replicate_cell():
    res = run_cell(ExperimentCell(SimModelSpec("M2", 30, 20), METHODS, replications=1, base_seed=3))
    for r in res.results:
        assert r.proportion in (0.0, 1.0) and r.standard_error == 0


def test_standard_error_formula_and_worker_invariance():
    cell = ExperimentCell(SimModelSpec("M1", 40, 20, rho=0.5), METHODS, replications=24, base_seed=8)
    one = run_cell(cell)
    two = run_cell(cell, workers=2)
    assert np.array_equal(one.contained, two.contained)
    for r in one.results:
        assert r.standard_error == math.sqrt(r.proportion * (1 - r.proportion) / r.replications)


def test_cch_proportion_invariant_to_response_transform():
    cell = ExperimentCell(SimModelSpec("M1", 40, 20), ((ScreeningConfig(), "CCH1"),), replications=30, base_seed=2)
    plain = run_cell(cell)
    moved = run_cell(cell, transform=np.arctan)
    assert np.array_equal(plain.contained, moved.contained)


def test_variance_filter_examples():
    rng = np.random.default_rng(0)
    base = rng.standard_normal((50, 3))
    base = (base - base.mean(0)) / base.std(0, ddof=1)
    X = base * np.sqrt([3.0, 1.0, 2.0])
    data = DataMatrix.from_arrays(rng.standard_normal(50), X, ("y", "a", "b", "c"))
    out = variance_filter(data, 2)
    assert out.labels == ("y", "a", "c")
    same = variance_filter(data, 3)
    assert set(same.labels) == set(data.labels)
    with pytest.raises(ConfigurationError):
        variance_filter(data, 4)


def test_variance_filter_matches_oracle():
    rng = np.random.default_rng(1)
    X = rng.standard_normal((30, 10)) * rng.uniform(0.1, 5, size=10)
    data = DataMatrix.from_arrays(rng.standard_normal(30), X)
    out = variance_filter(data, 4)
    expect = variance_order(X, 4)
    assert list(out.labels[1:]) == [f"X{j}" for j in expect]
    np.testing.assert_array_equal(out.X, X[:, np.array(expect) - 1])


CONFIG = """
[run]
replications = 6
base_seed = 4

[[methods]]
label = "CCH1"
method = "cch"
k = 2
kn = 2

[[methods]]
label = "RRCS"
method = "rrcs"

[[cells]]
model = "M1"
p = 30
n = 20
rho = [0.0, 0.5]

[[cells]]
model = "M4"
p = 30
n = 20
t_mix = 0.5
methods = ["CCH1"]
m = 8
"""


def test_config_expansion(tmp_path):
    path = tmp_path / "grid.toml"
    path.write_text(CONFIG)
    cells, run = load_run_config(path)
    assert run["replications"] == 6
    assert [c.spec.rho for c in cells] == [0.0, 0.5, None]
    assert cells[2].selection_m == 8 and [lab for _, lab in cells[2].methods] == ["CCH1"]
    assert all(c.replications == 6 and c.base_seed == 4 for c in cells)


@pytest.mark.parametrize("cfg,needle", [
    ({"cells": [{"model": "M1", "p": 10, "n": 10, "sigma": 1}]}, "sigma"),
    ({"run": {"reps": 5}}, "reps"),
    ({"methods": [{"method": "cch", "size": 3}]}, "size"),
    ({"cells": [{"model": "M1", "p": 10, "n": 10, "methods": ["NOPE"]}]}, "NOPE"),
])
def test_config_errors_name_the_offending_key(cfg, needle):
    with pytest.raises(ConfigurationError, match=needle):
        cells_from_config(cfg)


def test_run_grid_csv(tmp_path):
    path = tmp_path / "grid.toml"
    path.write_text(CONFIG)
    cells, _ = load_run_config(path)
    out = tmp_path / "out.csv"
    results = run_grid(cells, out)
    raw = out.read_bytes()
    assert b"\r\n" not in raw
    rows = list(csv.reader(raw.decode("utf-8").splitlines()))
    assert tuple(rows[0]) == CSV_HEADER
    assert len(rows) == 1 + 2 + 2 + 1
    first = dict(zip(rows[0], rows[1]))
    assert first["model"] == "M1" and first["method"] == "CCH1" and first["k"] == "2" and first["m"] == "6"
    assert float(first["proportion"]) == pytest.approx(results[0]["CCH1"].proportion)
    last = dict(zip(rows[0], rows[-1]))
    assert last["rho"] == "" and last["t_mix"] == "0.5" and last["m"] == "8"


def test_run_grid_rejects_empty(tmp_path):
    with pytest.raises(ConfigurationError):
        run_grid([], tmp_path / "x.csv")
