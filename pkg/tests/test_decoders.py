import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isinglimits.bounds import sufficient_threshold
from isinglimits.decoders import (
    FeasibleSet,
    empirical_mean_params,
    log_likelihood,
    log_likelihood_naive,
    mean_decode,
    ml_decode,
    pairwise_error_bound,
    projection_distance,
)
from isinglimits.ensembles import class_models, ensemble_a
from isinglimits.errors import DimensionMismatch, EmptyCandidates, InfeasibleConstraints, TooLarge
from isinglimits.graphs import Graph, GraphClassSpec, n_pairs
from isinglimits.ising import (
    IsingParams,
    MeanParams,
    SampleSet,
    counts_mean_params,
    mean_params_exact,
    rng_for,
    sample_counts,
    sample_exact,
)
from isinglimits.verify import check_elementwise_deviation, check_large_deviation, check_pairwise_separation


def test_log_likelihood_examples():
    s = sample_exact(IsingParams.from_edges(4, {(0, 1): 1.0}), 50, seed=1)
    assert log_likelihood(IsingParams.zeros(4), s) == pytest.approx(-4 * math.log(2))
    lam = 0.9
    ones = SampleSet(np.ones((7, 2), dtype=np.int8))
    assert log_likelihood(IsingParams.from_edges(2, {(0, 1): lam}), ones) == pytest.approx(
        lam - math.log(4 * math.cosh(lam)))
    with pytest.raises(DimensionMismatch):
        log_likelihood(IsingParams.zeros(3), s)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 7), st.integers(1, 200), st.integers(0, 2**32))
def test_sufficient_statistics_match_naive(p, n, seed):
    rng = np.random.default_rng(seed)
    m = IsingParams(p, rng.normal(size=n_pairs(p)))
    s = sample_exact(IsingParams(p, rng.normal(size=n_pairs(p))), n, seed)
    assert abs(log_likelihood(m, s) - log_likelihood_naive(m, s)) <= 1e-10


def test_ml_ties_and_guards():
    m = IsingParams.from_edges(3, {(0, 1): 1.0})
    s = sample_exact(m, 30, seed=2)
    res = ml_decode([m, IsingParams.from_edges(3, {(0, 1): 1.0})], s)
    assert res.ties == 1 and res.ambiguous and res.index == 0
    with pytest.raises(EmptyCandidates):
        ml_decode([m], s)


def test_ml_ensemble_a_high_signal():
    models = ensemble_a(4, 1.0).models
    wins = 0
    for trial in range(200):
        truth = trial % len(models)
        res = ml_decode(models, sample_exact(models[truth], 500, seed=1000 + trial))
        wins += (not res.ambiguous) and res.chosen == models[truth].support
    assert wins / 200 >= 0.99


def test_ml_at_ten_times_sufficient():
    spec = GraphClassSpec.edge(3, 1, 1.0)
    models = class_models(spec)
    n = math.ceil(10 * sufficient_threshold(spec, 0.1).value)
    wins = 0
    for trial in range(200):
        truth = trial % len(models)
        res = ml_decode(models, sample_exact(models[truth], n, seed=trial))
        wins += (not res.ambiguous) and res.index == truth
    assert wins / 200 >= 0.9


@settings(max_examples=25, deadline=None)
@given(st.permutations(range(9)), st.integers(0, 1000))
def test_ml_invariant_to_candidate_order(perm, seed):
    models = class_models(GraphClassSpec.degree(4, 1, 0.6))
    s = sample_exact(models[seed % 9], 40, seed)
    a = ml_decode(models, s)
    b = ml_decode([models[i] for i in perm], s)
    assert a.chosen == b.chosen and a.ties == b.ties
    assert a.score == pytest.approx(b.score)
    if not a.ambiguous:
        assert a.runner_up_gap > 0


def test_pairwise_error_bound_examples():
    a = IsingParams.from_edges(2, {(0, 1): 1.0})
    b = IsingParams.zeros(2)
    assert pairwise_error_bound(a, a, 100) == 1.0
    vals = [pairwise_error_bound(a, b, n) for n in (1, 10, 50, 100)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_large_deviation_two_vertex_pair():
    checks = check_large_deviation(ns=(50,), trials=10_000, seed=4)
    assert checks and all(c.passed for c in checks)


def test_empirical_mean_from_counts_matches_rows():
    m = IsingParams.from_edges(5, {(0, 4): 0.6, (1, 2): -0.8})
    s = sample_exact(m, 300, seed=8)
    counts = np.bincount(((s.data > 0) * (1 << np.arange(5))).sum(axis=1), minlength=32)
    assert np.allclose(counts_mean_params(counts, 5).mu, empirical_mean_params(s).mu, atol=1e-14)
    big = sample_exact(IsingParams.from_edges(2, {(0, 1): 1.0}), 100_000, seed=9)
    assert abs(empirical_mean_params(big).mu[0] - math.tanh(1)) <= 0.02


def test_hoeffding_tail_p4():
    checks = check_elementwise_deviation(configs=((4, 100, 0.5),))
    assert all(c.passed for c in checks)


def test_pairwise_separation_small_classes():
    assert all(c.passed for c in check_pairwise_separation(ps=(3, 4)))


# ------------------------------------------------------------ projection

def test_projection_exact_point_on_grid():
    g = Graph.from_edges(4, [(0, 1), (1, 2)])
    fs = FeasibleSet(g, 0.5, 1.5)
    r = (1.5 - 0.5) / 8
    theta = IsingParams.from_graph(g, [0.5 + 3 * r, -(0.5 + r)])
    d, arg = projection_distance(g, fs, mean_params_exact(theta))
    assert d <= 1e-9
    assert fs.contains(arg)


def test_projection_zero_mean_single_edge():
    g = Graph.from_edges(2, [(0, 1)])
    d, arg = projection_distance(g, FeasibleSet(g, 1.0, 1.0), MeanParams(2, np.zeros(1)))
    assert d == pytest.approx(math.tanh(1.0), rel=1e-12)
    assert abs(arg.theta[0]) == 1.0


def test_projection_guards():
    g = Graph.from_edges(13, [(0, 1)])
    with pytest.raises(TooLarge):
        projection_distance(g, FeasibleSet(g, 1, 1), MeanParams(13, np.zeros(n_pairs(13))))
    g7 = Graph.from_edges(8, [(0, 1), (2, 3), (4, 5), (6, 7), (0, 2), (4, 6), (1, 3)])
    with pytest.raises(TooLarge):
        projection_distance(g7, FeasibleSet(g7, 0.1, 1), MeanParams(8, np.zeros(n_pairs(8))))
    star = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3)])
    with pytest.raises(InfeasibleConstraints):
        projection_distance(star, FeasibleSet(star, 1.0, 2.0), MeanParams(4, np.zeros(6)))


def test_projection_wrong_graph_is_separated():
    lam, omega = 1.0, 2.0
    truth = IsingParams.from_edges(4, {(0, 1): lam, (1, 2): lam})
    wrong = Graph.from_edges(4, [(0, 1), (2, 3)])
    d, _ = projection_distance(wrong, FeasibleSet(wrong, lam, omega), mean_params_exact(truth))
    sep = math.sinh(lam / 4) ** 2 / (2 * omega * (3 * math.exp(2 * omega) + 1))
    assert d >= sep


def _true_graph_wins(p, d, lam, policy, truths=None):
    spec = GraphClassSpec.degree(p, d, lam)
    models = class_models(spec, policy, 0)
    fs = [FeasibleSet(m.support, spec.lam, spec.omega) for m in models]
    for i in (range(len(models)) if truths is None else truths):
        res = mean_decode(fs, mean_params_exact(models[i]))
        assert res.index == i and not res.ambiguous


@pytest.mark.parametrize("p,d", [(3, 1), (3, 2), (4, 1), (4, 2), (5, 1)])
@pytest.mark.parametrize("policy", ["uniform", "random_sign"])
def test_exact_means_recover_truth(p, d, policy):
    _true_graph_wins(p, d, 1.0, policy)


def test_exact_means_recover_truth_p5_d2_sample():
    picks = rng_for(0, 5, 2).choice(252, 20, replace=False)
    _true_graph_wins(5, 2, 1.0, "uniform", picks)


def test_mean_decode_duplicates_tie():
    g = Graph.from_edges(3, [(0, 1)])
    fs = FeasibleSet(g, 1.0, 1.0)
    res = mean_decode([fs, fs, FeasibleSet(Graph.from_edges(3, [(1, 2)]), 1.0, 1.0)],
                      mean_params_exact(IsingParams.from_graph(g, 1.0)))
    assert res.ties == 1 and res.index == 0
    with pytest.raises(EmptyCandidates):
        mean_decode([fs], MeanParams(3, np.zeros(3)))


def test_mean_decode_above_unknown_threshold():
    spec = GraphClassSpec.edge(3, 1, lam=2.0)
    n = math.ceil(sufficient_threshold(spec, 0.1, "unknown").value)
    models = class_models(spec)
    fs = [FeasibleSet(m.support, spec.lam, spec.omega) for m in models]
    wins = 0
    for trial in range(200):
        truth = trial % len(models)
        counts = sample_counts(models[truth], n, rng_for(7, trial))
        res = mean_decode(fs, counts_mean_params(counts, 3))
        wins += (not res.ambiguous) and res.index == truth
    assert wins / 200 >= 0.9
