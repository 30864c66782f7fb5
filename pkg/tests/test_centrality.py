"""Centrality measures against dense solves and their process equivalents."""
import numpy as np
import pytest

from flowrank import (
    CONSERVATIVE,
    NONCONSERVATIVE,
    ConvergenceError,
    DanglingPolicy,
    NumericalError,
    ProcessConfig,
    alpha_centrality,
    build_graph,
    conservative_steady_state,
    degree_centrality,
    eigenvector_centrality,
    indegree_vector,
    nonconservative_accumulate,
    normalized_alpha_centrality,
    pagerank,
    power_iteration,
    rank,
    spectral_radius,
)
from flowrank.centrality import SPECTRAL_GUARD

from oracles import (
    dense_adjacency,
    dense_transfer,
    edges_chain,
    edges_ring,
    random_sc_edges,
)


# -------------------------------------------------------------- worked values

def test_alpha_centrality_chain_example():
    g = build_graph(edges_chain(3))
    got = alpha_centrality(g, alpha=0.5)
    assert got.measure == "alpha"
    assert np.max(np.abs(got.values - [0.0, 1.0, 1.5])) < 1e-9


def test_normalized_alpha_chain_example():
    g = build_graph(edges_chain(3))
    got = normalized_alpha_centrality(g, alpha=0.5)
    assert np.max(np.abs(got.values - [0.0, 0.4, 0.6])) < 1e-9


def test_pagerank_cycle_is_uniform():
    g = build_graph(edges_ring(3))
    got = pagerank(g, alpha=0.85, tol=1e-13)
    assert np.max(np.abs(got.values - 1.0 / 3.0)) < 1e-10
    assert abs(got.values.sum() - 1.0) < 1e-12


# ---------------------------------------------------------------- dense solves

@pytest.mark.parametrize("alpha", [0.5, 0.85, 0.95])
def test_pagerank_matches_dense_solve(alpha):
    n = 40
    edges = random_sc_edges(n, 120, seed=3)
    g = build_graph(edges)
    got = pagerank(g, alpha=alpha, tol=1e-13).values
    T = dense_transfer(dense_adjacency(edges, n), 0.0, DanglingPolicy.UNIFORM_TELEPORT)
    s = np.full(n, 1.0 / n)
    want = (1.0 - alpha) * np.linalg.solve(np.eye(n) - alpha * T.T, s)
    assert np.max(np.abs(got - want)) < 1e-9


@pytest.mark.parametrize("alpha_frac", [0.2, 0.6, 0.9])
def test_alpha_centrality_matches_dense_solve(alpha_frac):
    n = 35
    edges = random_sc_edges(n, 100, seed=5)
    g = build_graph(edges)
    a = dense_adjacency(edges, n)
    lam = np.max(np.abs(np.linalg.eigvals(a)))
    alpha = alpha_frac / lam
    got = alpha_centrality(g, alpha=alpha, tol=1e-13).values
    s = indegree_vector(g)
    want = np.linalg.solve(np.eye(n) - alpha * a.T, s)
    assert np.max(np.abs(got - want)) < 1e-9 * np.max(np.abs(want))


def test_alpha_centrality_custom_start_vector():
    n = 20
    edges = random_sc_edges(n, 60, seed=7)
    g = build_graph(edges)
    s = np.random.default_rng(1).random(n)
    alpha = 0.5 / spectral_radius(g)
    got = alpha_centrality(g, s=s, alpha=alpha, tol=1e-13).values
    want = np.linalg.solve(np.eye(n) - alpha * dense_adjacency(edges, n).T, s)
    assert np.max(np.abs(got - want)) < 1e-9 * np.max(np.abs(want))


def test_alpha_zero_returns_start_vector_exactly():
    g = build_graph(edges_chain(4))
    got = alpha_centrality(g, alpha=0.0)
    assert np.array_equal(got.values, indegree_vector(g))


# ------------------------------------------------------- process equivalences

def test_pagerank_is_conservative_steady_state():
    # same damped fixed point, reached through the process interface
    n = 30
    g = build_graph(random_sc_edges(n, 90, seed=9))
    alpha = 0.85
    cfg = ProcessConfig(kind=CONSERVATIVE, alpha=alpha, delta=0.0,
                        dangling_policy=DanglingPolicy.UNIFORM_TELEPORT)
    x0 = np.full(n, 1.0 / n)
    via_process = conservative_steady_state(g, x0, cfg, tol=1e-13)
    via_measure = pagerank(g, alpha=alpha, tol=1e-13).values
    assert np.max(np.abs(via_process - via_measure)) < 1e-9


def test_alpha_centrality_is_nonconservative_accumulation():
    n = 30
    g = build_graph(random_sc_edges(n, 90, seed=11))
    alpha = 0.4 / spectral_radius(g)
    cfg = ProcessConfig(kind=NONCONSERVATIVE, alpha=alpha, delta=0.0)
    via_process = nonconservative_accumulate(g, indegree_vector(g), cfg, tol=1e-13)
    via_measure = alpha_centrality(g, alpha=alpha, tol=1e-13).values
    assert np.max(np.abs(via_process - via_measure)) < 1e-9 * np.max(via_measure)


# ------------------------------------------------------------------ guard band

def test_alpha_centrality_guard_band_boundary():
    g = build_graph(edges_ring(4))  # lambda1 = 1 exactly
    below = 1.0 - 2.0 * SPECTRAL_GUARD
    above = 1.0 - 0.5 * SPECTRAL_GUARD
    # below the band the call is accepted; the series is merely slow, so a
    # tiny iteration budget surfaces an honest nonconvergence instead of
    # the spectral rejection
    with pytest.raises(ConvergenceError):
        alpha_centrality(g, alpha=below, max_iter=50)
    for alpha in (above, 1.0, 2.0):
        with pytest.raises(NumericalError, match="normalized variant"):
            alpha_centrality(g, alpha=alpha)
    # comfortably subcritical converges outright
    vals = alpha_centrality(g, alpha=0.99, tol=1e-10).values
    assert np.all(np.isfinite(vals))


def test_normalized_alpha_at_singularity_rejected():
    g = build_graph(edges_ring(4))
    with pytest.raises(NumericalError, match="singularity"):
        normalized_alpha_centrality(g, alpha=1.0)


# --------------------------------------------------------- supercritical side

def test_normalized_alpha_supercritical_equals_eigenvector():
    g = build_graph(random_sc_edges(50, 200, seed=13))
    lam = spectral_radius(g)
    got = normalized_alpha_centrality(g, alpha=2.0 / lam)
    want = eigenvector_centrality(g)
    assert np.max(np.abs(got.values - want.values)) < 1e-8


def test_normalized_alpha_truncated_sum_approaches_eigenvector():
    # brute-force the normalized partial sums well past mixing
    n = 25
    edges = random_sc_edges(n, 80, seed=15)
    g = build_graph(edges)
    a = dense_adjacency(edges, n)
    lam = np.max(np.abs(np.linalg.eigvals(a)))
    alpha = 1.5 / lam
    got = normalized_alpha_centrality(g, alpha=alpha, horizon_cap=400).values
    s = indegree_vector(g)
    acc = s.copy()
    term = s.copy()
    for _ in range(400):
        term = alpha * (term @ a)
        acc = acc + term
    want = acc / np.abs(acc).sum()
    assert np.max(np.abs(got - want)) < 1e-9
    ev = eigenvector_centrality(g).values
    assert np.max(np.abs(got - ev)) < 1e-6


def test_normalized_alpha_subcritical_matches_normalized_series():
    g = build_graph(random_sc_edges(30, 90, seed=17))
    alpha = 0.5 / spectral_radius(g)
    raw = alpha_centrality(g, alpha=alpha, tol=1e-13).values
    got = normalized_alpha_centrality(g, alpha=alpha, tol=1e-13).values
    assert np.max(np.abs(got - raw / np.abs(raw).sum())) < 1e-12


def test_ranking_continuity_across_spectral_bound():
    # orderings just below and just above 1/lambda1 agree near the top
    g = build_graph(random_sc_edges(60, 240, seed=19))
    lam = spectral_radius(g)
    lo = rank(normalized_alpha_centrality(g, alpha=0.999 / lam)).order
    hi = rank(normalized_alpha_centrality(g, alpha=1.001 / lam)).order
    assert lo[0] == hi[0]


# -------------------------------------------------------------------- degrees

def test_degree_centrality_directions():
    g = build_graph(edges_chain(3))
    assert np.array_equal(degree_centrality(g, "in").values, [0.0, 1.0, 1.0])
    assert np.array_equal(degree_centrality(g, "out").values, [1.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        degree_centrality(g, "sideways")


def test_eigenvector_centrality_is_unit_dominant_left_vector():
    edges = random_sc_edges(40, 150, seed=21)
    g = build_graph(edges)
    got = eigenvector_centrality(g).values
    est = power_iteration(g)
    a = dense_adjacency(edges, 40)
    assert np.max(np.abs(got @ a - est.lambda1 * got)) < 1e-7
    assert abs(np.abs(got).sum() - 1.0) < 1e-12


# --------------------------------------------------------------------- ranking

def test_rank_breaks_ties_by_node_id():
    g = build_graph(edges_ring(4))
    scores = degree_centrality(g, "in")  # all ones
    r = rank(scores)
    assert list(r.order) == [0, 1, 2, 3]
    assert list(r.ranks) == [1, 2, 3, 4]


def test_rank_orders_descending():
    g = build_graph(edges_chain(3))
    r = rank(alpha_centrality(g, alpha=0.5))
    assert list(r.order) == [2, 1, 0]
    assert list(r.ranks) == [3, 2, 1]


# ----------------------------------------------------------------- validation

def test_pagerank_validates_inputs():
    g = build_graph(edges_ring(3))
    with pytest.raises(ValueError):
        pagerank(g, alpha=1.0)
    with pytest.raises(ValueError):
        pagerank(g, s=np.array([0.5, 0.5, 0.5]), alpha=0.5)  # not unit L1
    with pytest.raises(ValueError):
        pagerank(g, s=np.array([1.5, -0.5, 0.0]), alpha=0.5)


def test_normalized_alpha_validates_alpha():
    g = build_graph(edges_ring(3))
    with pytest.raises(ValueError):
        normalized_alpha_centrality(g, alpha=-0.1)
