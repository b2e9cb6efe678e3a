import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st
from scipy import integrate

from robustsub.ambiguity import (
    AmbiguityParams,
    feasible_vertices,
    grid_search_optimality_oracle,
    mad_bounds_from_variance,
    max_feasible_mad,
    powerlaw_ambiguity,
    powerlaw_params,
    self_consistent_cutoff,
    three_point,
    variance_of_three_point,
)
from robustsub.bounds import tight_bound
from robustsub.errors import ExponentUnsupported, GridInfeasible, Infeasible
from robustsub.kernels import CHUNG_LU
from robustsub.patterns import named


@st.composite
def feasible_params(draw):
    a = draw(st.floats(0.0, 5.0))
    mu = a + draw(st.floats(0.1, 10.0))
    h_c = mu + draw(st.floats(0.1, 100.0))
    frac = draw(st.floats(0.0, 1.0))
    d = frac * max_feasible_mad(a, mu, h_c)
    return AmbiguityParams(a, mu, d, 100, h_c, h_c)


def test_three_point_examples():
    dist = three_point(AmbiguityParams(0, 2, 1, 100, 10))
    assert dist.probs == pytest.approx((0.25, 0.6875, 0.0625), abs=1e-15)
    assert dist.support == (0, 2, 10)
    dist = three_point(AmbiguityParams(0, 2, 0.0, 100, 10))
    assert dist.probs == (0.0, 1.0, 0.0)
    with pytest.raises(Infeasible) as exc:
        three_point(AmbiguityParams(0, 2, 3.6, 100, 10))
    assert exc.value.max_mad == pytest.approx(3.2)
    assert "3.2" in str(exc.value)


def test_three_point_boundary_clamp():
    dmax = max_feasible_mad(0, 2, 10)
    dist = three_point(AmbiguityParams(0, 2, dmax * (1 + 1e-14), 100, 10))
    assert dist.probs[1] == 0.0


def test_params_validation():
    with pytest.raises(ValueError):
        AmbiguityParams(3, 2, 1, 100, 10)
    with pytest.raises(ValueError):
        AmbiguityParams(0, 2, -1, 100, 10)
    with pytest.raises(ValueError):
        AmbiguityParams(-1, 2, 1, 100, 10)
    p = AmbiguityParams(0, 2, 1, 50)
    assert p.h_c == pytest.approx(10.0) and p.h_s == p.h_c


@settings(max_examples=200)
@given(feasible_params())
def test_three_point_moments(params):
    dist = three_point(params)
    assert sum(dist.probs) == pytest.approx(1.0, abs=1e-12)
    assert min(dist.probs) >= 0
    assert dist.mean == pytest.approx(params.mu, rel=1e-10)
    assert dist.mad == pytest.approx(params.d, rel=1e-10, abs=1e-12)
    expected_var = params.d * (params.h_c - params.a) / 2
    assert variance_of_three_point(dist) == pytest.approx(expected_var, rel=1e-10, abs=1e-12)


def test_variance_examples():
    assert variance_of_three_point(three_point(AmbiguityParams(0, 2, 1, 100, 10))) == pytest.approx(5.0)
    assert variance_of_three_point(three_point(AmbiguityParams(0, 2, 0.0, 100, 10))) == 0.0
    assert variance_of_three_point(three_point(AmbiguityParams(1, 3, 1, 100, 5))) == pytest.approx(2.0)


def test_mad_bounds_examples():
    assert mad_bounds_from_variance(5, 0, 10) == pytest.approx((1.0, math.sqrt(5)))
    assert mad_bounds_from_variance(0, 0, 10) == (0.0, 0.0)
    assert mad_bounds_from_variance(4, 1, 9) == pytest.approx((1.0, 2.0))


@given(st.floats(1e-6, 100.0), st.floats(0.0, 5.0), st.floats(0.1, 100.0))
def test_mad_bounds_ordered(sigma2, a, width):
    h_c = a + width
    lo, hi = mad_bounds_from_variance(sigma2, a, h_c)
    s = math.sqrt(sigma2)
    if s <= width / 2:  # a law with this variance fits in the range
        assert lo <= hi * (1 + 1e-12)
    assert (lo == pytest.approx(hi)) == (s == pytest.approx(width / 2))


def _quad_moments(tau, h_c, h_min=1.0):
    dens = lambda h: h ** -tau
    Z = integrate.quad(dens, h_min, h_c, limit=200)[0]
    mu = integrate.quad(lambda h: h * dens(h), h_min, h_c, limit=200)[0] / Z
    m2 = integrate.quad(lambda h: h * h * dens(h), h_min, h_c, limit=200)[0] / Z
    mad = (integrate.quad(lambda h: (mu - h) * dens(h), h_min, mu, limit=200)[0]
           + integrate.quad(lambda h: (h - mu) * dens(h), mu, h_c, limit=200)[0]) / Z
    return 1 / Z, mu, mad, m2 - mu * mu


@pytest.mark.parametrize("tau, h_c, h_min", [
    (2.5, 100.0, 1.0), (3.5, 50.0, 1.0), (1.5, 1000.0, 1.0), (2.2, 300.0, 2.0),
    (2.0, 100.0, 1.0), (3.0, 100.0, 1.0), (2.0 + 1e-9, 100.0, 1.0),
])
def test_powerlaw_moments_match_quadrature(tau, h_c, h_min):
    pl = powerlaw_params(tau, h_c, h_min)
    C, mu, mad, var = _quad_moments(tau, h_c, h_min)
    assert pl.C == pytest.approx(C, rel=1e-8)
    assert pl.mu == pytest.approx(mu, rel=1e-8)
    assert pl.d == pytest.approx(mad, rel=1e-8)
    assert pl.sigma2 == pytest.approx(var, rel=1e-8)
    assert float(pl.cdf(h_c)) == pytest.approx(1.0, rel=1e-12)


def test_powerlaw_infinite_cutoff():
    pl = powerlaw_params(2.5, math.inf)
    assert pl.C == pytest.approx(1.5)
    assert pl.mu == pytest.approx(3.0)
    assert pl.sigma2 == math.inf
    pl = powerlaw_params(3.5, math.inf)
    # sigma2 = C/(tau-3) - mu**2 with C = 2.5, mu = 2.5/1.5
    assert pl.sigma2 == pytest.approx(2.5 / 0.5 - (2.5 / 1.5) ** 2)
    Z = integrate.quad(lambda h: h ** -3.5, 1, math.inf)[0]
    m1 = integrate.quad(lambda h: h ** -2.5, 1, math.inf)[0] / Z
    m2 = integrate.quad(lambda h: h ** -1.5, 1, math.inf)[0] / Z
    assert pl.sigma2 == pytest.approx(m2 - m1 * m1, rel=1e-8)


def test_powerlaw_variance_growth():
    pl = powerlaw_params(2.5, 100.0)
    closed = pl.C * (100 ** 0.5 - 1) / 0.5 - pl.mu ** 2
    assert pl.sigma2 == pytest.approx(closed, rel=1e-12)


def test_powerlaw_errors_and_degenerate():
    with pytest.raises(ExponentUnsupported):
        powerlaw_params(1.0, 100.0)
    pl = powerlaw_params(2.5, 3.0, 3.0)
    assert pl.mu == 3.0 and pl.d == 0.0 and pl.sigma2 == 0.0


@pytest.mark.parametrize("tau, n", [(2.5, 10 ** 4), (1.5, 10 ** 6), (3.5, 10 ** 5)])
def test_self_consistent_cutoff(tau, n):
    h = self_consistent_cutoff(tau, n)
    mu = powerlaw_params(tau, h).mu
    assert mu * n == pytest.approx(h * h, rel=1e-8)
    pl, params = powerlaw_ambiguity(tau, n)
    assert params.h_c == pytest.approx(h) and params.a == 1.0 and params.d == pytest.approx(pl.d)


def test_dense_cutoff_exponent():
    hs = [self_consistent_cutoff(1.5, n) for n in (10 ** 8, 10 ** 10)]
    slope = math.log(hs[1] / hs[0]) / math.log(100)
    assert slope == pytest.approx(1 / 1.5, abs=0.02)


def test_oracle_examples():
    params = AmbiguityParams(0, 2, 1, 100, 10, 10)
    tri = named("triangle")
    tb = tight_bound(tri, params).value
    best, support, probs = grid_search_optimality_oracle(params, tri, CHUNG_LU, [0, 1, 2, 5, 10], 0.1)
    assert best <= tb * (1 + 1e-9)
    best, _, probs = grid_search_optimality_oracle(params, tri, CHUNG_LU, [0, 2, 10])
    assert best == pytest.approx(tb, rel=1e-12)
    assert probs == pytest.approx((0.25, 0.6875, 0.0625))
    with pytest.raises(GridInfeasible):
        grid_search_optimality_oracle(params, tri, CHUNG_LU, [1.5, 2, 2.5])


def test_feasible_vertices_satisfy_moments():
    xs = [0, 1, 2, 5, 10]
    for p in feasible_vertices(xs, 2.0, 1.0):
        assert p.sum() == pytest.approx(1)
        assert p @ xs == pytest.approx(2)
        assert p @ np.abs(np.array(xs) - 2.0) == pytest.approx(1)
        assert (p >= 0).all()


@settings(max_examples=20, deadline=None)
@given(feasible_params(), st.integers(0, 2 ** 31))
def test_oracle_never_beats_three_point(params, seed):
    assume(params.d > 1e-3 and params.mu - params.a > 0.2 and params.h_c - params.mu > 0.2)
    rng = np.random.default_rng(seed)
    grid = sorted({params.a, params.mu, params.h_c, *rng.uniform(params.a, params.h_c, 2)})
    tri = named("triangle")
    best, _, _ = grid_search_optimality_oracle(params, tri, CHUNG_LU, grid, 0.25)
    assert best <= tight_bound(tri, params).value * (1 + 1e-9)
