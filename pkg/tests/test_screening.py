import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecrscreen.data import DataMatrix
from ecrscreen.elliptical import substream
from ecrscreen.errors import ConfigurationError, DomainError
from ecrscreen.rank_corr import ConstantColumnWarning
from ecrscreen.screening import (
    ScreeningConfig,
    ScreeningScores,
    default_top_m,
    iterative_schedule,
    iterative_screen,
    score_all,
    threshold_select,
    top_m_select,
)
from ecrscreen.simgen import SimModelSpec, generate

ALL = ("CCH", "CCK", "SIS", "RRCS")


def fake_scores(values):
    values = np.asarray(values, dtype=float)
    return ScreeningScores(values, tuple((i,) for i in range(1, len(values) + 1)))


def random_data(seed, n=30, p=8):
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, p))
    y = X[:, 0] - X[:, 1] + rng.standard_normal(n)
    return DataMatrix.from_arrays(y, X)


def test_config_defaults_and_validation():
    c = ScreeningConfig("cch")
    assert c.method == "CCH" and c.neighborhood.k == 2 and c.neighborhood.k_n == 2
    assert ScreeningConfig.make("sis").neighborhood is None
    with pytest.raises(ConfigurationError):
        ScreeningConfig("lasso")


def test_k1_cch_ranks_like_rrcs():
    for seed in range(100):
        data = random_data(seed, n=25, p=10)
        cch = score_all(data, ScreeningConfig.make("cch", k=1, k_n=1))
        rrcs = score_all(data, ScreeningConfig.make("rrcs"))
        np.testing.assert_allclose(cch.scores, np.abs(np.sin(np.pi / 2 * rrcs.scores)), atol=1e-15)
        assert np.array_equal(np.lexsort((np.arange(10), -cch.scores)), np.lexsort((np.arange(10), -rrcs.scores)))


@pytest.mark.parametrize("method", ALL)
def test_perfect_dependence_wins(method):
    rng = np.random.default_rng(0)
    X = rng.standard_normal((40, 6))
    data = DataMatrix.from_arrays(X[:, 0], X)
    assert int(np.argmax(score_all(data, ScreeningConfig.make(method)).scores)) == 0


def test_scores_in_unit_interval_no_nan():
    for method in ALL:
        s = score_all(random_data(1), ScreeningConfig.make(method))
        assert s.scores.shape == (8,)
        assert np.all((s.scores >= 0) & (s.scores <= 1))
        assert len(s.argmax_subsets) == 8


def test_model1_signal_dominates_noise():
    spec = SimModelSpec("M1", p=20, n=200, rho=0.0)
    wins = 0
    for r in range(100):
        s = score_all(generate(spec, substream(21, r)).data, ScreeningConfig.make("cch"))
        wins += min(s.scores[0], s.scores[1]) > s.scores[2:].max()
    assert wins >= 95


def test_constant_covariate():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((20, 4))
    X[:, 2] = 3.0
    data = DataMatrix.from_arrays(X[:, 0] + rng.standard_normal(20), X)
    for method in ("CCH", "RRCS"):
        with pytest.warns(ConstantColumnWarning):
            s = score_all(data, ScreeningConfig.make(method))
        assert s.scores[2] == 0
    for method in ("SIS", "CCK"):
        with pytest.raises(DomainError, match="X3"):
            score_all(data, ScreeningConfig.make(method))


def test_constant_response_rejected():
    X = np.random.default_rng(3).standard_normal((10, 3))
    with pytest.raises(DomainError):
        score_all(DataMatrix.from_arrays(np.ones(10), X), ScreeningConfig())


def test_threshold_examples():
    s = fake_scores([0.9, 0.1, 0.5])
    assert threshold_select(s, 1).members == frozenset()
    assert threshold_select(s, 0).members == {1, 2, 3}
    assert threshold_select(s, 0.4).members == {1, 3}
    assert threshold_select(s, 0.5).members == {1}  # strict


def test_top_m_examples():
    s = fake_scores([0.9, 0.1, 0.5])
    assert top_m_select(s, 2).members == {1, 3}
    assert top_m_select(s, 5).members == {1, 2, 3}
    assert top_m_select(fake_scores([0.2, 0.5, 0.5, 0.5]), 2).members == {2, 3}
    assert default_top_m(20) == 6
    assert default_top_m(50) == 12


unit_scores = st.lists(st.floats(0, 1), min_size=1, max_size=30)


@given(unit_scores, st.floats(0, 1), st.floats(0, 1))
def test_threshold_monotone(values, t1, t2):
    s = fake_scores(values)
    lo, hi = sorted((t1, t2))
    assert threshold_select(s, hi).members <= threshold_select(s, lo).members


@given(unit_scores, st.integers(1, 40), st.integers(1, 40))
def test_top_m_nested(values, m1, m2):
    s = fake_scores(values)
    lo, hi = sorted((m1, m2))
    small, big = top_m_select(s, lo), top_m_select(s, hi)
    assert small.members <= big.members
    assert len(small) == min(lo, len(values))


def test_iterative_schedule():
    assert iterative_schedule(100, 0.4, 20) == [40, 16]
    assert iterative_schedule(100, 0.5, 50) == [50, 25]
    with pytest.raises(ConfigurationError, match="larger delta"):
        iterative_schedule(10, 0.05, 5)
    with pytest.raises(ConfigurationError):
        iterative_schedule(10, 1.0, 5)


def test_iterative_subset_of_first_round():
    data = generate(SimModelSpec("M2", p=60, n=40, rho=0.5), substream(5, 0)).data
    config = ScreeningConfig.make("cch")
    final = iterative_screen(data, config, 0.5, stop_below=10)
    first = top_m_select(score_all(data, config), 30)
    assert final.members <= first.members
    assert len(final) == 7  # 60 -> 30 -> 15 -> 7


def test_iterative_rejects_stop_below_above_p():
    with pytest.raises(ConfigurationError):
        iterative_screen(random_data(0, n=30, p=8), ScreeningConfig(), 0.5)


def test_iterative_model2_containment():
    spec = SimModelSpec("M2", p=100, n=50, rho=0.5)
    hits = 0
    for r in range(100):
        sample = generate(spec, substream(31, r))
        hits += sample.true_support <= iterative_screen(sample.data, ScreeningConfig(), 0.5).members
    assert hits >= 90


def test_rank_methods_are_doubly_robust():
    rng = np.random.default_rng(7)
    for _ in range(20):
        data = random_data(int(rng.integers(1 << 30)), n=30, p=12)
        v = data.values.copy()
        v[:, 0] = np.exp(v[:, 0])
        v[:, 3] = v[:, 3] ** 3 + v[:, 3]
        moved = DataMatrix(v, data.labels)
        for method in ("CCH", "RRCS"):
            cfg = ScreeningConfig.make(method)
            a, b = score_all(data, cfg), score_all(moved, cfg)
            assert np.array_equal(a.scores, b.scores)
            assert top_m_select(a, 5) == top_m_select(b, 5)


def test_determinism_across_calls():
    data = random_data(9)
    a = score_all(data, ScreeningConfig.make("cck", 3, 2))
    b = score_all(data, ScreeningConfig.make("cck", 3, 2))
    assert np.array_equal(a.scores, b.scores) and a.argmax_subsets == b.argmax_subsets
