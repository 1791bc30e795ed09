import numpy as np
import pytest

from ecrscreen.elliptical import substream
from ecrscreen.errors import ConfigurationError
from ecrscreen.screening import ScreeningConfig, score_all, top_m_select
from ecrscreen.data import DataMatrix
from ecrscreen.simgen import ADDITIVE_NOISE_VAR, SimModelSpec, f2, f3, f4, generate


def offdiag_corr(X):
    r = np.corrcoef(X.T)
    return r[~np.eye(r.shape[0], dtype=bool)]


def test_true_supports():
    assert generate(SimModelSpec("M1", 10, 20, seed=0)).true_support == {1, 2}
    assert generate(SimModelSpec("M2", 10, 20, seed=0)).true_support == {1, 2, 3}
    assert generate(SimModelSpec("M3", 10, 20, seed=0)).true_support == {1, 2, 3}
    assert generate(SimModelSpec("M4", 10, 20, seed=0)).true_support == {1, 2, 3, 4}
    assert generate(SimModelSpec("M5", 10, 20, seed=0)).true_support == {1, 2, 3, 4}


def test_shapes_and_labels():
    s = generate(SimModelSpec("M2", 7, 13, rho=0.1, seed=1))
    assert s.data.values.shape == (13, 8)
    assert s.data.labels[:2] == ("Y", "X1")


@pytest.mark.parametrize("bad", [
    dict(model="M6", p=10, n=10),
    dict(model="M1", p=10, n=10, t_mix=0.5),
    dict(model="M4", p=10, n=10, rho=0.5),
    dict(model="M1", p=10, n=10, rho=1.0),
    dict(model="M4", p=10, n=10, noise_family="student_t"),
    dict(model="M1", p=10, n=10, noise_dof=3),
    dict(model="M4", p=3, n=10),
])
def test_invalid_specs(bad):
    with pytest.raises(ConfigurationError):
        SimModelSpec(**bad)


def test_default_dofs():
    assert SimModelSpec("M1", 5, 5, cov_family="student_t").cov_dof == 1
    assert SimModelSpec("M3", 5, 5, noise_family="student_t").noise_dof == 3


def test_spec_round_trip():
    spec = SimModelSpec("M3", 100, 50, rho=0.5, cov_family="student_t", seed=3)
    assert SimModelSpec.from_dict(spec.to_dict()) == spec
    with pytest.raises(ConfigurationError):
        SimModelSpec.from_dict({"model": "M1", "p": 5, "n": 5, "sigma": 2})


def test_m4_independent_design():
    X = generate(SimModelSpec("M4", 4, 100_000, t_mix=0.0), substream(1, 0)).data.X
    assert np.abs(offdiag_corr(X)).max() < 0.03


def test_m4_correlated_design():
    X = generate(SimModelSpec("M4", 4, 100_000, t_mix=1.0), substream(1, 1)).data.X
    assert np.all(np.abs(offdiag_corr(X) - 0.5) < 0.02)


def test_m1_least_squares_recovers_coefficients():
    data = generate(SimModelSpec("M1", 5, 100_000, rho=0.0), substream(1, 2)).data
    A = np.column_stack([np.ones(data.n), data.X[:, :2]])
    coef = np.linalg.lstsq(A, data.y, rcond=None)[0]
    np.testing.assert_allclose(coef, [0.9, 1.0, -0.5], atol=0.02)


def test_m4_noise_variance():
    spec = SimModelSpec("M4", 4, 100_000, t_mix=0.5)
    data = generate(spec, substream(1, 3)).data
    X = data.X
    eps = data.y - (5 * X[:, 0] + 3 * f2(X[:, 1]) + 4 * f3(X[:, 2]) + 6 * f4(X[:, 3]))
    assert eps.var() == pytest.approx(ADDITIVE_NOISE_VAR, abs=0.05)


@pytest.mark.parametrize("model", ["M3", "M5"])
def test_exponential_responses_positive(model):
    kw = dict(rho=0.0) if model == "M3" else dict(t_mix=0.5)
    assert np.all(generate(SimModelSpec(model, 10, 500, **kw), substream(2, 0)).data.y > 0)


def test_m5_is_exp_of_m4():
    a = generate(SimModelSpec("M4", 10, 50, t_mix=0.5), substream(3, 0)).data
    b = generate(SimModelSpec("M5", 10, 50, t_mix=0.5), substream(3, 0)).data
    np.testing.assert_allclose(np.log(b.y), a.y, rtol=1e-12, atol=1e-12)
    assert np.array_equal(a.X, b.X)


def test_log_response_gives_same_cch_selection():
    spec = SimModelSpec("M3", 60, 40, rho=0.1)
    for r in range(10):
        data = generate(spec, substream(4, r)).data
        logged = DataMatrix.from_arrays(np.log(data.y), data.X)
        cfg = ScreeningConfig()
        assert top_m_select(score_all(data, cfg), 10) == top_m_select(score_all(logged, cfg), 10)


def test_determinism_and_independent_substreams():
    spec = SimModelSpec("M1", 10, 20, cov_family="student_t", noise_family="student_t")
    a = generate(spec, substream(5, 0)).data.values
    b = generate(spec, substream(5, 0)).data.values
    c = generate(spec, substream(5, 1)).data.values
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    assert np.array_equal(generate(SimModelSpec("M2", 5, 8, seed=3)).data.values,
                          generate(SimModelSpec("M2", 5, 8, seed=3)).data.values)
