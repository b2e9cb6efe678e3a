"""Mean/MAD/range ambiguity sets and the distributions that live in them.

The extremal weight law over all distributions on ``[a, h_c]`` with mean
``mu`` and mean absolute deviation ``d`` puts mass on the three points
``a``, ``mu`` and ``h_c`` only.  This module builds that law, converts
between MAD and variance, and evaluates the moments of a continuous
power law truncated to ``[h_min, h_c]``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import optimize

from .errors import ExponentUnsupported, Infeasible

FEASIBILITY_TOL = 1e-12
# Width of the window around tau = 2 and tau = 3 where log limits are used.
EXPONENT_EPS = 1e-8


def max_feasible_mad(a: float, mu: float, h_c: float) -> float:
    """Largest MAD compatible with mean ``mu`` on ``[a, h_c]``."""
    return 2.0 * (mu - a) * (h_c - mu) / (h_c - a)


@dataclass(frozen=True)
class AmbiguityParams:
    """Parameters of the ambiguity set and of the graph scale.

    ``h_c`` defaults to ``sqrt(mu * n)`` and ``h_s`` to ``h_c``.
    """

    a: float
    mu: float
    d: float
    n: int
    h_c: float | None = None
    h_s: float | None = None

    def __post_init__(self):
        if self.h_c is None:
            object.__setattr__(self, "h_c", math.sqrt(self.mu * self.n))
        if self.h_s is None:
            object.__setattr__(self, "h_s", self.h_c)
        if self.a < 0:
            raise ValueError(f"minimum weight a={self.a} must be >= 0")
        if not (self.a < self.mu < self.h_c):
            raise ValueError(f"need a < mu < h_c, got a={self.a}, mu={self.mu}, h_c={self.h_c}")
        if self.d < 0:
            raise ValueError(f"MAD d={self.d} must be >= 0")
        if self.h_s <= 0:
            raise ValueError("h_s must be positive")
        if self.n < 1:
            raise ValueError("n must be a positive integer")

    @property
    def max_mad(self) -> float:
        return max_feasible_mad(self.a, self.mu, self.h_c)

    @property
    def correlated(self) -> bool:
        """True when some weight product exceeds ``h_s**2``."""
        return self.h_c > self.h_s * (1.0 + 1e-12)

    def with_n(self, n: int, canonical_cutoff: bool = False) -> "AmbiguityParams":
        if canonical_cutoff:
            return AmbiguityParams(self.a, self.mu, self.d, n)
        return AmbiguityParams(self.a, self.mu, self.d, n, self.h_c, self.h_s)

    def with_d(self, d: float) -> "AmbiguityParams":
        return AmbiguityParams(self.a, self.mu, d, self.n, self.h_c, self.h_s)


@dataclass(frozen=True)
class ThreePointDistribution:
    support: tuple[float, float, float]
    probs: tuple[float, float, float]

    def moment(self, power: float) -> float:
        return math.fsum(p * x ** power for x, p in zip(self.support, self.probs) if p > 0)

    @property
    def mean(self) -> float:
        return self.moment(1)

    @property
    def mad(self) -> float:
        m = self.support[1]
        return math.fsum(p * abs(x - m) for x, p in zip(self.support, self.probs))

    @property
    def variance(self) -> float:
        return variance_of_three_point(self)


def three_point(params: AmbiguityParams) -> ThreePointDistribution:
    """Extremal three-point law on ``{a, mu, h_c}``.

    Raises ``Infeasible`` when ``d`` exceeds the largest MAD the range allows.
    """
    a, mu, d, h_c = params.a, params.mu, params.d, params.h_c
    p_a = d / (2.0 * (mu - a))
    p_hc = d / (2.0 * (h_c - mu))
    p_mu = 1.0 - p_a - p_hc
    if p_mu < -FEASIBILITY_TOL:
        dmax = max_feasible_mad(a, mu, h_c)
        raise Infeasible(
            f"MAD d={d} infeasible for a={a}, mu={mu}, h_c={h_c}; "
            f"largest feasible MAD is {dmax:.9g}",
            max_mad=dmax,
        )
    p_mu = max(p_mu, 0.0)
    return ThreePointDistribution((a, mu, h_c), (p_a, p_mu, p_hc))


def variance_of_three_point(dist: ThreePointDistribution) -> float:
    mu = dist.support[1]
    return math.fsum(p * (x - mu) ** 2 for x, p in zip(dist.support, dist.probs))


def mad_bounds_from_variance(sigma2: float, a: float, h_c: float) -> tuple[float, float]:
    """Range of MAD values compatible with variance ``sigma2`` on ``[a, h_c]``."""
    if sigma2 < 0:
        raise ValueError("sigma2 must be non-negative")
    if h_c <= a:
        raise ValueError("need h_c > a")
    return 2.0 * sigma2 / (h_c - a), math.sqrt(sigma2)


def mad_for_variance(sigma2: float, a: float, h_c: float) -> float:
    """MAD at which the three-point law has variance ``sigma2``."""
    return mad_bounds_from_variance(sigma2, a, h_c)[0]


# -- truncated continuous power law -----------------------------------------

def _pow(x: float, e: float) -> float:
    if math.isinf(x):
        if e < 0:
            return 0.0
        return math.inf if e > 0 else 1.0
    return x ** e


def _power_integral(e: float, lo: float, hi: float) -> float:
    """``int_lo^hi h**(e - 1) dh``, with the log limit near ``e = 0``."""
    if abs(e) < EXPONENT_EPS:
        return math.log(hi) - math.log(lo)
    return (_pow(hi, e) - _pow(lo, e)) / e


@dataclass(frozen=True)
class PowerLawParams:
    """Density ``C * h**(-tau)`` on ``[h_min, h_c]`` with its moments."""

    tau: float
    h_c: float
    h_min: float
    C: float
    mu: float
    d: float
    sigma2: float
    second_moment: float = field(repr=False)

    def cdf(self, h):
        h = np.clip(np.asarray(h, dtype=float), self.h_min, self.h_c)
        if self.h_c == self.h_min:
            return np.ones_like(h)
        one_minus = 1.0 - self.tau
        if abs(one_minus) < EXPONENT_EPS:
            return self.C * np.log(h / self.h_min)
        return self.C * (self.h_min ** one_minus - h ** one_minus) / (self.tau - 1.0)

    def density(self, h):
        h = np.asarray(h, dtype=float)
        inside = (h >= self.h_min) & (h <= self.h_c)
        return np.where(inside, self.C * h ** (-self.tau), 0.0)


def _mad_closed_form(tau: float, C: float, mu: float, h_min: float, h_c: float) -> float:
    # E|h - mu| = int_{h_min}^{mu} (mu - h) dP + int_{mu}^{h_c} (h - mu) dP,
    # collected into the h^(2-tau) and h^(1-tau) antiderivatives.
    lower_first = _power_integral(1.0 - tau, h_min, mu)
    upper_first = _power_integral(1.0 - tau, mu, h_c)
    lower_second = _power_integral(2.0 - tau, h_min, mu)
    upper_second = _power_integral(2.0 - tau, mu, h_c)
    return C * (mu * (lower_first - upper_first) + upper_second - lower_second)


def powerlaw_params(tau: float, h_c: float, h_min: float = 1.0) -> PowerLawParams:
    """Normalizing constant and moments of a power law truncated to ``[h_min, h_c]``.

    ``h_c`` may be ``math.inf``; then moments that diverge come back as ``inf``.
    Near ``tau = 2`` and ``tau = 3`` the logarithmic limits of the moment
    integrals are used.
    """
    if tau <= 1.0:
        raise ExponentUnsupported(f"tau={tau} must exceed 1")
    if h_min <= 0:
        raise ValueError("h_min must be positive")
    if h_c < h_min:
        raise ValueError("h_c must be >= h_min")
    if h_c == h_min:
        return PowerLawParams(tau, h_c, h_min, math.inf, h_min, 0.0, 0.0, h_min ** 2)
    C = 1.0 / _power_integral(1.0 - tau, h_min, h_c)
    mu = C * _power_integral(2.0 - tau, h_min, h_c)
    m2 = C * _power_integral(3.0 - tau, h_min, h_c)
    sigma2 = m2 - mu * mu if math.isfinite(m2) else math.inf
    d = _mad_closed_form(tau, C, mu, h_min, h_c) if math.isfinite(mu) else math.inf
    return PowerLawParams(tau, h_c, h_min, C, mu, d, sigma2, m2)


def self_consistent_cutoff(tau: float, n: int, h_min: float = 1.0, rtol: float = 1e-9) -> float:
    """Cutoff solving ``mu(h_c) * n = h_c**2`` by bisection.

    For ``1 < tau < 2`` the mean itself grows with the cutoff, giving
    ``h_c ~ n**(1/tau)``; for ``tau > 2`` the root is close to ``sqrt(mu * n)``.
    """
    if n <= h_min:
        raise ValueError("n must exceed h_min")

    def gap(h):
        return powerlaw_params(tau, h, h_min).mu * n - h * h

    lo = h_min * (1.0 + 1e-9)
    hi = 2.0 * n
    return optimize.bisect(gap, lo, hi, xtol=1e-300, rtol=rtol, maxiter=500)


def powerlaw_ambiguity(tau: float, n: int, h_min: float = 1.0,
                       h_c: float | None = None) -> tuple[PowerLawParams, AmbiguityParams]:
    """Ambiguity parameters matching a truncated power law's mean and MAD.

    Uses the self-consistent cutoff unless ``h_c`` is given, with
    ``a = h_min`` and ``h_s = h_c``.
    """
    if h_c is None:
        h_c = self_consistent_cutoff(tau, n, h_min)
    pl = powerlaw_params(tau, h_c, h_min)
    return pl, AmbiguityParams(h_min, pl.mu, pl.d, n, h_c, h_c)


# -- finite-grid optimality oracle ------------------------------------------

def grid_search_optimality_oracle(params: AmbiguityParams, pattern, kernel,
                                  support_grid, prob_resolution: float | None = None):
    """Best expected count over distributions on a finite support grid.

    The feasible laws on a finite grid with fixed mean and MAD form a
    polytope whose vertices are the basic solutions of the three moment
    equations.  The expected count is a degree-``k`` polynomial in the
    probabilities, so the search evaluates every vertex and, when
    ``prob_resolution`` is given, every convex combination of vertices on a
    barycentric lattice of that step.

    Returns ``(best_value, support, best_probs)``.
    """
    from .bounds import expected_count_discrete
    from .errors import GridInfeasible

    xs = sorted(set(float(x) for x in support_grid))
    if xs[0] < params.a - 1e-12 or xs[-1] > params.h_c + 1e-12:
        raise ValueError("support grid must lie inside [a, h_c]")
    vertices = feasible_vertices(xs, params.mu, params.d)
    if not vertices:
        raise GridInfeasible("no distribution on the grid matches the mean and MAD")

    candidates = list(vertices)
    if prob_resolution and len(vertices) > 1:
        steps = int(round(1.0 / prob_resolution))
        V = np.array(vertices)
        for weights in _lattice(len(vertices), steps):
            candidates.append(np.asarray(weights) / steps @ V)

    best_value, best_probs = -math.inf, None
    for probs in candidates:
        v = expected_count_discrete(pattern, xs, probs, params.h_s, kernel, params.n)
        if v > best_value:
            best_value, best_probs = v, probs
    return best_value, tuple(xs), tuple(float(p) for p in best_probs)


def _lattice(parts: int, total: int):
    """Compositions of ``total`` into ``parts`` non-negative integers."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _lattice(parts - 1, total - first):
            yield (first,) + rest


def feasible_vertices(xs, mu: float, d: float, tol: float = 1e-10) -> list[np.ndarray]:
    """Basic feasible solutions of {sum p = 1, sum p x = mu, sum p |x - mu| = d, p >= 0}."""
    xs = np.asarray(xs, dtype=float)
    A = np.vstack([np.ones_like(xs), xs, np.abs(xs - mu)])
    b = np.array([1.0, mu, d])
    out = []
    m = len(xs)
    for size in (1, 2, 3):
        for cols in itertools.combinations(range(m), size):
            sub = A[:, cols]
            sol, *_ = np.linalg.lstsq(sub, b, rcond=None)
            if np.max(np.abs(sub @ sol - b)) > tol or np.any(sol < -tol):
                continue
            p = np.zeros(m)
            p[list(cols)] = np.clip(sol, 0.0, None)
            if not any(np.allclose(p, q, atol=1e-12) for q in out):
                out.append(p)
    return out


