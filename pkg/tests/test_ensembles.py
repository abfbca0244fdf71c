import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from isinglimits.divergences import sym_kl
from isinglimits.ensembles import (
    Ensemble,
    clique_size_for_edges,
    degree_sym_kl_bound,
    edge_log_odds,
    edge_sym_kl_bound,
    ensemble_a,
    ensemble_b_degree,
    ensemble_b_edge,
    ensemble_c,
    exact_separation_ratio,
    fkg_ratio_check,
    key_separation_ratio,
    max_pairwise_sym_kl,
    mean_lower_bound,
    policy_weights,
    printed_ratio,
)
from isinglimits.errors import PreconditionViolated, TooLarge
from isinglimits.graphs import Graph, GraphClassSpec, cardinality_bounds
from isinglimits.ising import IsingParams, mean_params_exact


def test_ensemble_a():
    assert ensemble_a(3, 1.0).M == 3
    for p in range(3, 9):
        for lam in (0.1, 0.5, 1.0):
            s = ensemble_a(p, lam).pairwise_sym_kl(closed_form=False)
            off = s[~np.eye(len(s), dtype=bool)]
            assert np.allclose(off, 2 * lam * math.tanh(lam), rtol=0, atol=1e-10)


def test_ensemble_b_degree():
    ens = ensemble_b_degree(6, 2, 1.0)
    assert ens.M == 6
    assert all(m.support.n_edges == 5 for m in ens.models)
    assert all(m.omega_star == pytest.approx(2.0) for m in ens.models)
    # leftover vertex 6 stays isolated
    ens7 = ensemble_b_degree(7, 2, 1.0)
    assert all(m.support.degree(6) == 0 for m in ens7.models)
    with pytest.raises(PreconditionViolated):
        ensemble_b_degree(5, 2, 1.0)


def test_degree_sym_kl_bound_at_p8_d3():
    lam = 0.7
    ens = ensemble_b_degree(8, 3, lam)
    assert lam * 3 >= 2
    assert max_pairwise_sym_kl(ens) <= degree_sym_kl_bound(3, lam)


def test_ensemble_b_edge():
    assert clique_size_for_edges(2) == 3 and ensemble_b_edge(5, 2, 1.0).M == 3
    assert clique_size_for_edges(5) == 4 and ensemble_b_edge(5, 5, 1.0).M == 6
    with pytest.raises(PreconditionViolated):
        ensemble_b_edge(3, 5, 1.0)


@pytest.mark.parametrize("m", [3, 4, 5])
def test_edge_sym_kl_bound(m):
    for lam in (0.5, 2 / m):
        ens = ensemble_b_edge(m, math.comb(m, 2) - 1, lam)
        assert ens.params["m"] == m
        assert max_pairwise_sym_kl(ens) <= edge_sym_kl_bound(m, lam)


def test_membership_enforced():
    spec = dict(kind="edge", p=3, bound=1, lam=1.0, omega=1.0)
    two = IsingParams.from_edges(3, {(0, 1): 1.0, (1, 2): 1.0})
    with pytest.raises(PreconditionViolated):
        Ensemble([two, IsingParams.from_edges(3, {(0, 1): 1.0})], "X", spec)
    weak = IsingParams.from_edges(3, {(0, 1): 0.5})
    with pytest.raises(PreconditionViolated):
        Ensemble([weak, IsingParams.from_edges(3, {(1, 2): 1.0})], "X", spec)


def test_key_separation_example_m3():
    ratio, bound = key_separation_ratio(3, 1.0)
    assert bound == pytest.approx(0.25)
    assert ratio >= bound
    # the 3-vertex path 0-2-1 (triangle minus edge 0-1) by enumeration
    path = IsingParams.from_edges(3, {(0, 2): 1.0, (1, 2): 1.0})
    mu = mean_params_exact(path).mu[0]
    q = (1 + mu) / 2
    assert ratio == pytest.approx(q / (1 - q), rel=1e-12)


@pytest.mark.parametrize("m", range(2, 9))
@pytest.mark.parametrize("lam", [0.1, 0.5, 1.0, 2.0])
def test_ratio_formula_matches_enumeration(m, lam):
    assert key_separation_ratio(m, lam)[0] == pytest.approx(exact_separation_ratio(m, lam), rel=1e-9)


def test_printed_sum_differs_from_enumeration():
    assert printed_ratio(3, 1.0) == pytest.approx(2.1473286013231285, rel=1e-12)
    assert exact_separation_ratio(3, 1.0) == pytest.approx(3.762195691083631, rel=1e-12)


@pytest.mark.parametrize("m", range(3, 7))
def test_mean_lower_bound(m):
    for lam in (2 / m, 0.75, 1.0):
        model = IsingParams.from_graph(
            Graph(m, (1 << math.comb(m, 2)) - 2), lam)  # K_m minus edge (0, 1)
        assert mean_params_exact(model).mu[0] >= mean_lower_bound(m, lam)


def test_fkg_examples():
    assert fkg_ratio_check(3, 0.5)
    assert fkg_ratio_check(4, 1.0)
    assert fkg_ratio_check(4, 0.0)
    with pytest.raises(TooLarge):
        fkg_ratio_check(9, 1.0)


def test_edge_log_odds_zero_model():
    assert edge_log_odds(IsingParams.zeros(4), 0, 3) == pytest.approx(0.0, abs=1e-14)


def test_ensemble_c_against_cardinality():
    for p in range(3, 7):
        spec = GraphClassSpec.degree(p, 1, 0.5)
        ens = ensemble_c(spec)
        lo, hi = cardinality_bounds(spec)
        assert lo <= ens.M <= hi
        assert math.log(ens.M) >= math.log(lo)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**20), st.integers(0, 2**15))
def test_random_sign_policy_is_keyed(seed, mask):
    g = Graph(6, mask)
    w = policy_weights(g, 0.7, "random_sign", seed)
    assert np.array_equal(w, policy_weights(g, 0.7, "random_sign", seed))
    assert np.allclose(np.abs(w), 0.7)
    assert np.all(policy_weights(g, 0.7) == 0.7)


def test_pairwise_matrix_routes_agree():
    ens = ensemble_b_degree(6, 2, 0.8)
    assert np.allclose(ens.pairwise_sym_kl(True), ens.pairwise_sym_kl(False), atol=1e-10)
    assert ens.pairwise_sym_kl()[0, 1] == pytest.approx(sym_kl(ens.models[0], ens.models[1]))
