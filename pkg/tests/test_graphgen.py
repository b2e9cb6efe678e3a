import itertools
import math

import numpy as np
import pytest
from scipy import stats

import robustsub.graphgen as gg
from robustsub.ambiguity import AmbiguityParams, ThreePointDistribution, powerlaw_params, three_point
from robustsub.bounds import tight_bound
from robustsub.errors import TooLarge
from robustsub.graphgen import (
    WeightSource,
    WeightVector,
    conditional_expected_count,
    extremal_graph,
    realize_graph,
    sample_weights_powerlaw,
    sample_weights_three_point,
)
from robustsub.kernels import CHUNG_LU, GENERALIZED, custom_kernel
from robustsub.motifs import count_copies
from robustsub.patterns import automorphism_count, catalog, clique, named

TRI = named("triangle")


def _const_kernel(p):
    # f(u) = p * u, so every pair of weight-h_s vertices connects w.p. p
    return custom_kernel([0.0, 1.0], [0.0, p])


def test_three_point_sampler_fraction():
    dist = ThreePointDistribution((0.0, 2.0, 10.0), (0.25, 0.6875, 0.0625))
    n = 10 ** 6
    w = sample_weights_three_point(dist, n, seed=11)
    assert w.source is WeightSource.THREE_POINT
    frac = np.mean(w.weights == 10.0)
    assert abs(frac - 0.0625) <= 3 * math.sqrt(0.0625 * 0.9375 / n)
    emp = w.weights
    assert abs(emp.mean() - 2.0) <= 3 * emp.std() / math.sqrt(n)


def test_three_point_sampler_degenerate():
    w = sample_weights_three_point(ThreePointDistribution((0.0, 2.0, 10.0), (0.0, 1.0, 0.0)), 5, 1)
    assert (w.weights == 2.0).all()


def test_powerlaw_sampler_cdf():
    pl = powerlaw_params(2.5, 100.0)
    n = 10 ** 6
    w = sample_weights_powerlaw(pl, n, seed=3).weights
    assert w.min() >= 1.0 and w.max() <= 100.0
    assert abs(np.mean(w <= 10.0) - float(pl.cdf(10.0))) < 0.005
    ks = stats.kstest(w, lambda h: pl.cdf(h)).statistic
    assert ks < 0.005
    assert abs(w.mean() - pl.mu) <= 3 * w.std() / math.sqrt(n)


def test_powerlaw_sampler_degenerate():
    pl = powerlaw_params(2.5, 4.0, 4.0)
    w = sample_weights_powerlaw(pl, 7, seed=0)
    assert (w.weights == 4.0).all()


def test_complete_graph_when_all_weights_at_cutoff():
    w = WeightVector(np.full(25, 3.0))
    g = realize_graph(w, CHUNG_LU, 3.0, seed=0)
    assert g.edge_count == 25 * 24 // 2


def test_erdos_renyi_edge_count():
    n, p = 400, 0.3
    g = realize_graph(WeightVector(np.full(n, 2.0)), _const_kernel(p), 2.0, seed=5)
    m = n * (n - 1) // 2
    assert abs(g.edge_count - p * m) <= 3 * math.sqrt(m * p * (1 - p))


def test_zero_weights_isolated():
    params = AmbiguityParams(0, 2, 1, 2000)
    g, w = extremal_graph(params, CHUNG_LU, seed=2)
    zero = np.flatnonzero(w.weights == 0.0)
    assert len(zero) > 0
    assert (g.degrees[zero] == 0).all()


def test_graph_is_simple():
    g, _ = extremal_graph(AmbiguityParams(0, 2, 1, 3000), CHUNG_LU, seed=4)
    e = g.edges
    assert (e[:, 0] < e[:, 1]).all()
    assert len(np.unique(e, axis=0)) == len(e)
    for v in range(0, g.n, 97):
        nb = g.adjacency[v]
        assert (np.diff(nb) > 0).all()
        for u in nb:
            assert v in g.neighbor_sets[u]


def test_determinism():
    params = AmbiguityParams(0, 2, 1, 5000)
    g1, w1 = extremal_graph(params, CHUNG_LU, seed=9)
    g2, w2 = extremal_graph(params, CHUNG_LU, seed=9)
    g3, _ = extremal_graph(params, CHUNG_LU, seed=10)
    assert np.array_equal(w1.weights, w2.weights)
    assert g1.edges.tobytes() == g2.edges.tobytes()
    assert not g1.same_as(g3)
    pl = powerlaw_params(2.5, 50.0)
    a = realize_graph(sample_weights_powerlaw(pl, 300, 1), CHUNG_LU, 50.0, 1)
    b = realize_graph(sample_weights_powerlaw(pl, 300, 1), CHUNG_LU, 50.0, 1)
    assert a.meta["method"] == "pairwise" and a.same_as(b)


def test_clamp_flag():
    w = WeightVector(np.array([1.0, 5.0, 5.0]))
    g = realize_graph(w, CHUNG_LU, 3.0, seed=0)
    assert g.meta["clamped"] is True
    assert g.edge_count >= 1  # the 5-5 pair connects with probability f(1) = 1


def test_blockwise_matches_binomial():
    # n = 30 vertices in three fixed classes; per-block edge counts over 10^4
    # realizations must follow Binomial(pairs, p).
    weights = np.array([1.0] * 10 + [2.0] * 12 + [4.0] * 8)
    w = WeightVector(weights)
    h_s = 4.5
    classes = [np.flatnonzero(weights == v) for v in (1.0, 2.0, 4.0)]
    cls_of = np.empty(30, dtype=int)
    for c, idx in enumerate(classes):
        cls_of[idx] = c
    reps = 10 ** 4
    blocks = list(itertools.combinations_with_replacement(range(3), 2))
    counts = {b: np.zeros(reps, dtype=int) for b in blocks}
    for s in range(reps):
        g = realize_graph(w, CHUNG_LU, h_s, seed=s)
        cu, cv = cls_of[g.edges[:, 0]], cls_of[g.edges[:, 1]]
        lo, hi = np.minimum(cu, cv), np.maximum(cu, cv)
        for b in blocks:
            counts[b][s] = np.sum((lo == b[0]) & (hi == b[1]))
    vals = (1.0, 2.0, 4.0)
    sizes = [len(c) for c in classes]
    for i, j in blocks:
        m = sizes[i] * (sizes[i] - 1) // 2 if i == j else sizes[i] * sizes[j]
        p = min(vals[i] * vals[j] / h_s ** 2, 1.0)
        obs = np.bincount(counts[(i, j)], minlength=m + 1)
        pmf = stats.binom.pmf(np.arange(m + 1), m, p)
        exp = pmf * reps
        # pool sparse tails so every cell expects at least 5
        order = np.arange(m + 1)
        keep = exp >= 5
        lo_tail = order < order[keep].min()
        hi_tail = order > order[keep].max()
        o = np.concatenate([[obs[lo_tail].sum()], obs[keep], [obs[hi_tail].sum()]])
        e = np.concatenate([[exp[lo_tail].sum()], exp[keep], [exp[hi_tail].sum()]])
        mask = e > 0
        e = e[mask] * o.sum() / e[mask].sum()
        pval = stats.chisquare(o[mask], e).pvalue
        assert pval > 0.01, (i, j, pval)


def test_conditional_expected_examples():
    w = WeightVector(np.full(10, 3.0))
    assert conditional_expected_count(TRI, w, CHUNG_LU, 3.0) == pytest.approx(120.0)
    w = WeightVector(np.full(3, 3.0))
    assert conditional_expected_count(TRI, w, _const_kernel(0.4), 3.0) == pytest.approx(0.4 ** 3)


def _brute_conditional(pattern, weights, kernel, h_s):
    total = 0.0
    for tup in itertools.permutations(range(len(weights)), pattern.k):
        t = 1.0
        for u, v in pattern.edges:
            t *= float(kernel(min(weights[tup[u]] * weights[tup[v]] / h_s ** 2, 1.0)))
        total += t
    return total / automorphism_count(pattern)


@pytest.mark.parametrize("pattern", catalog(3) + catalog(4), ids=lambda p: p.label)
def test_conditional_both_paths_match_brute_force(pattern):
    rng = np.random.default_rng(0)
    cont = rng.uniform(0.5, 3.0, 9)
    disc = rng.choice([0.5, 1.0, 3.0], 9)
    for weights in (cont, disc):
        w = WeightVector(weights)
        brute = _brute_conditional(pattern, weights, GENERALIZED, 3.0)
        assert conditional_expected_count(pattern, w, GENERALIZED, 3.0) == pytest.approx(brute, rel=1e-10)


def test_conditional_paths_agree(monkeypatch):
    rng = np.random.default_rng(1)
    w = WeightVector(rng.choice([1.0, 2.0, 5.0, 7.0], 60))
    fast = conditional_expected_count(clique(4), w, CHUNG_LU, 8.0)
    monkeypatch.setattr(gg, "MAX_COLLAPSE_CLASSES", 0)
    slow = conditional_expected_count(clique(4), w, CHUNG_LU, 8.0)
    assert fast == pytest.approx(slow, rel=1e-10)


def test_conditional_too_large():
    w = WeightVector(np.linspace(1, 2, 300))
    with pytest.raises(TooLarge):
        conditional_expected_count(TRI, w, CHUNG_LU, 3.0)
    w = WeightVector(np.linspace(1, 2, 50))
    with pytest.raises(TooLarge):
        conditional_expected_count(named("c5"), w, CHUNG_LU, 3.0)
    # collapsed weights have no size limit
    w = WeightVector(np.repeat([1.0, 2.0], 5000))
    assert conditional_expected_count(named("c5"), w, CHUNG_LU, 3.0) > 0


@pytest.mark.slow
def test_realized_triangles_match_conditional_expectation():
    params = AmbiguityParams(0, 2, 1, 50, 10, 10)
    w = sample_weights_three_point(three_point(params), 50, seed=123)
    expected = conditional_expected_count(TRI, w, CHUNG_LU, 10.0)
    reps = 10 ** 4
    counts = np.array([count_copies(realize_graph(w, CHUNG_LU, 10.0, seed=s), TRI) for s in range(reps)])
    se = counts.std(ddof=1) / math.sqrt(reps)
    assert abs(counts.mean() - expected) <= 3 * se


def test_weight_average_converges_to_tight_bound():
    n = 1000
    params = AmbiguityParams(0, 2, 1, n, 10, 10)
    dist = three_point(params)
    vals = np.array([
        conditional_expected_count(TRI, sample_weights_three_point(dist, n, seed=s), CHUNG_LU, 10.0)
        for s in range(1000)
    ])
    tb = tight_bound(TRI, params).value
    # tight_bound counts ordered triples with repetition (n**3); the exact mean
    # over weight draws uses n (n-1) (n-2)
    exact = tb * (n - 1) * (n - 2) / n ** 2
    se = vals.std(ddof=1) / math.sqrt(len(vals))
    assert abs(vals.mean() - exact) <= 3 * se
