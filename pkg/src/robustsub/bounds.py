"""Tight and asymptotic bounds on expected subgraph counts.

``tight_bound`` is exact for every ``n``: it enumerates the ``3**k`` weight
assignments of the extremal three-point law.  The remaining functions are
closed-form large-``n`` expressions (MAD scaling, diminishing-MAD /
variance scaling, and power-law clique counts).  Each returns a
:class:`BoundResult` carrying the value at the requested ``n`` together with
the normalization it was scaled by, so callers can plot either.
"""

from __future__ import annotations

import enum
import itertools
import math
import string
import warnings
from dataclasses import dataclass

import numpy as np

from .ambiguity import (
    AmbiguityParams,
    max_feasible_mad,
    powerlaw_ambiguity,
    powerlaw_params,
    self_consistent_cutoff,
    three_point,
)
from .errors import (
    ExponentOutOfRange,
    PreconditionViolated,
    RegimeViolation,
    RegimeWarning,
)
from .kernels import CHUNG_LU, Kernel, KernelKind, check_assumption1
from .patterns import Pattern, automorphism_count, degree_stats

CUTOFF_RTOL = 1e-9


class Regime(enum.Enum):
    EXACT_TIGHT = "exact-tight"
    ASYMPTOTIC_MAD = "asymptotic-mad"
    ASYMPTOTIC_VARIANCE = "asymptotic-variance"
    POWER_LAW = "power-law"


@dataclass(frozen=True)
class BoundResult:
    value: float
    regime: Regime
    normalization: float | None = None
    exponent: float | None = None
    clamped: bool = False
    notes: tuple[str, ...] = ()

    @property
    def constant(self) -> float | None:
        """``value / normalization``, the large-``n`` leading constant."""
        if self.normalization is None:
            return None
        return self.value / self.normalization

    def __float__(self):
        return float(self.value)


def _kernel_notes(kernel: Kernel) -> tuple[str, ...]:
    if kernel.kind is KernelKind.CHUNG_LU:
        return ()
    if not check_assumption1(kernel).convex:
        return ("kernel is not convex on [0,1]",)
    return ()


def _same_cutoff(params: AmbiguityParams) -> bool:
    return math.isclose(params.h_c, params.h_s, rel_tol=CUTOFF_RTOL)


# -- exact bound ------------------------------------------------------------

def tight_bound(pattern: Pattern, params: AmbiguityParams, kernel: Kernel = CHUNG_LU) -> BoundResult:
    """Largest expected copy count of ``pattern`` over the ambiguity set.

    Sums over all ``3**k`` assignments of ``{a, mu, h_c}`` to the pattern's
    vertices with the three-point probabilities.  Kernel arguments above 1
    (only possible when ``h_c > h_s``) are evaluated at 1 and the result is
    flagged as clamped.
    """
    dist = three_point(params)
    xs, ps = dist.support, dist.probs
    hs2 = params.h_s * params.h_s
    clamped = False
    ftab = [[0.0] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(3):
            u = xs[i] * xs[j] / hs2
            if u > 1.0:
                clamped = True
                u = 1.0
            ftab[i][j] = float(kernel(u))
    edges = pattern.edges
    terms = []
    for assign in itertools.product(range(3), repeat=pattern.k):
        t = 1.0
        for j in assign:
            t *= ps[j]
        if t == 0.0:
            continue
        for s, u in edges:
            t *= ftab[assign[s]][assign[u]]
        terms.append(t)
    value = float(params.n) ** pattern.k / automorphism_count(pattern) * math.fsum(terms)
    notes = _kernel_notes(kernel)
    if clamped:
        notes += ("correlated regime: h_c > h_s, kernel arguments clamped at 1",)
    return BoundResult(value, Regime.EXACT_TIGHT, clamped=clamped, notes=notes)


def expected_count_discrete(pattern: Pattern, support, probs, h_s: float,
                            kernel: Kernel = CHUNG_LU, n: int = 1) -> float:
    """``n**k / Aut(H) * E[prod_edges f(h_u h_v / h_s**2)]`` for i.i.d. discrete weights.

    Kernel arguments are clamped at 1.  Evaluated as a tensor contraction, so
    supports with hundreds of atoms are fine for small patterns.
    """
    x = np.asarray(support, dtype=float)
    p = np.asarray(probs, dtype=float)
    F = kernel(np.minimum(np.outer(x, x) / (h_s * h_s), 1.0))
    letters = string.ascii_lowercase[: pattern.k]
    subs = list(letters) + [letters[u] + letters[v] for u, v in pattern.edges]
    ops = [p] * pattern.k + [F] * pattern.n_edges
    total = np.einsum(",".join(subs) + "->", *ops, optimize=True)
    return float(n) ** pattern.k / automorphism_count(pattern) * float(total)


def moment_identity_bound_cliques(k: int, params: AmbiguityParams) -> float:
    """Chung-Lu clique bound via moments, valid when every kernel argument is <= 1.

    Each vertex of ``K_k`` has degree ``k - 1``, so the expectation factorizes
    as ``E[h**(k-1)]**k / h_s**(k(k-1))``.  Matches :func:`tight_bound` in
    this regime; for ``k = 3`` the moment is ``E[h**2]``.
    """
    if params.h_c * params.h_c > params.h_s * params.h_s * (1.0 + 1e-12):
        raise PreconditionViolated("kernel arguments exceed 1: need h_c <= h_s")
    dist = three_point(params)
    e = k * (k - 1) // 2
    m = dist.moment(k - 1)
    return float(params.n) ** k / math.factorial(k) * m ** k / params.h_s ** (2 * e)


def variance_sandwich(pattern: Pattern, mu: float, sigma2: float, a: float, h_c: float,
                      n: int, kernel: Kernel = CHUNG_LU) -> tuple[float, float]:
    """Lower and upper bounds on the variance-constrained maximum.

    The tight MAD bound is non-decreasing in ``d`` and every law with variance
    ``sigma2`` on ``[a, h_c]`` has MAD between ``2 sigma2 / (h_c - a)`` and
    ``sigma``, so the maximum under a variance constraint lies between the
    tight bounds at those two MAD values (the upper one capped at the largest
    feasible MAD).
    """
    d_lo = 2.0 * sigma2 / (h_c - a)
    d_hi = min(math.sqrt(sigma2), max_feasible_mad(a, mu, h_c))
    base = AmbiguityParams(a, mu, d_lo, n, h_c, h_c)
    lo = tight_bound(pattern, base, kernel).value
    hi = tight_bound(pattern, base.with_d(d_hi), kernel).value
    return lo, hi


# -- fixed-MAD asymptotics --------------------------------------------------

def _mad_constant(pattern: Pattern, mu: float, d: float, r1: float) -> float:
    st = degree_stats(pattern)
    aut = automorphism_count(pattern)
    k = pattern.k
    if st.n1 == 0:
        return d ** k / (2 ** k * aut) * r1 ** st.e_h
    if k < 3:
        raise RegimeViolation("patterns with degree-1 vertices need k >= 3")
    leaf_factor = d / 2.0 * (r1 - 1.0) + mu
    if leaf_factor < 0:
        raise RegimeViolation(
            f"d/2*(r(1)-1) + mu = {leaf_factor:.6g} < 0; the leaf contribution is negative"
        )
    return (d ** (k - st.n1) / (aut * 2 ** (k - st.n1))
            * leaf_factor ** st.n1 * r1 ** (st.e_h - st.n1))


def scaling_mad(pattern: Pattern, params: AmbiguityParams, kernel: Kernel = CHUNG_LU) -> BoundResult:
    """Large-``n`` form of the tight bound at fixed MAD, for ``h_s = h_c``.

    Returns ``n**k h_c**-k`` times the limit constant.  Patterns without
    degree-1 vertices get ``d**k r(1)**|E| / (2**k Aut)``; with ``n1`` leaves
    each leaf contributes ``d/2 (r(1) - 1) + mu`` instead of ``d/2``.
    """
    if not _same_cutoff(params):
        raise RegimeViolation("MAD scaling requires h_s == h_c")
    const = _mad_constant(pattern, params.mu, params.d, kernel.r1)
    norm = float(params.n) ** pattern.k * params.h_c ** (-pattern.k)
    return BoundResult(const * norm, Regime.ASYMPTOTIC_MAD, norm, notes=_kernel_notes(kernel))


def scaling_mad_chunglu(pattern: Pattern, mu: float, d: float, n: int) -> BoundResult:
    """MAD scaling for ``r(1) = 1`` and ``h_s = h_c = sqrt(mu n)``.

    ``n**(k/2) d**(k-n1) / (Aut 2**(k-n1) mu**(k/2-n1))``.
    """
    k = pattern.k
    if k < 3:
        raise RegimeViolation("MAD scaling needs k >= 3")
    st = degree_stats(pattern)
    aut = automorphism_count(pattern)
    const = d ** (k - st.n1) / (aut * 2 ** (k - st.n1) * mu ** (k / 2 - st.n1))
    norm = float(n) ** (k / 2)
    return BoundResult(const * norm, Regime.ASYMPTOTIC_MAD, norm, exponent=k / 2)


def clique_bound_mad(k: int, params: AmbiguityParams, kernel: Kernel = CHUNG_LU) -> BoundResult:
    """Leading-order ``K_k`` bound with ``h_s = h_c = sqrt(mu n)``.

    ``n**(k/2) d**k r(1)**(k(k-1)/2) / (k! 2**k mu**(k/2))``; largest for
    Chung-Lu since it is increasing in ``r(1)``.
    """
    if not _same_cutoff(params):
        raise RegimeViolation("clique bound requires h_s == h_c")
    canonical = math.sqrt(params.mu * params.n)
    if not math.isclose(params.h_c, canonical, rel_tol=CUTOFF_RTOL):
        warnings.warn(
            f"h_c={params.h_c:.6g} differs from sqrt(mu n)={canonical:.6g}; "
            "the formula assumes the canonical cutoff",
            RegimeWarning, stacklevel=2,
        )
    mu, d, n = params.mu, params.d, params.n
    const = d ** k * kernel.r1 ** (k * (k - 1) // 2) / (math.factorial(k) * 2 ** k * mu ** (k / 2))
    norm = float(n) ** (k / 2)
    return BoundResult(const * norm, Regime.ASYMPTOTIC_MAD, norm, exponent=k / 2,
                       notes=_kernel_notes(kernel))


# -- diminishing-MAD (variance) asymptotics ---------------------------------

def scaling_variance(pattern: Pattern, mu: float, sigma2: float, h_c: float, n: int,
                     kernel: Kernel = CHUNG_LU, a: float = 1.0) -> BoundResult:
    """Large-``n`` bound when ``d = 2 sigma2 / (h_c - a)`` matches a target variance.

    Normalized by ``n**k h_c**(n1 - 2k)``.  Warns with ``RegimeWarning`` when
    ``sigma2 / h_c`` is not small (above 0.1).
    """
    if sigma2 / h_c > 0.1:
        warnings.warn(f"sigma2/h_c = {sigma2 / h_c:.3g} is not small", RegimeWarning, stacklevel=2)
    st = degree_stats(pattern)
    aut = automorphism_count(pattern)
    r1 = kernel.r1
    const = (r1 ** st.e_ge3_ge3 / aut
             * (sigma2 * r1 + mu * mu) ** st.n2_1
             * (sigma2 * r1 * r1 + mu * mu) ** (st.n2 - st.n2_1)
             * mu ** st.n1
             * sigma2 ** st.n_ge3)
    norm = float(n) ** pattern.k * h_c ** (st.n1 - 2 * pattern.k)
    d = 2.0 * sigma2 / (h_c - a)
    return BoundResult(const * norm, Regime.ASYMPTOTIC_VARIANCE, norm,
                       notes=(f"implied MAD d={d:.9g}",) + _kernel_notes(kernel))


def subgraph_bound_variance_chunglu(pattern: Pattern, mu: float, sigma2: float, n: int) -> BoundResult:
    """Variance-matched Chung-Lu bound with ``h_s = h_c = sqrt(mu n)``.

    ``n**(n1/2) (mu**2 + sigma2)**n2 sigma2**n_ge3 / (Aut mu**(k - 3 n1 / 2))``.
    """
    st = degree_stats(pattern)
    aut = automorphism_count(pattern)
    k = pattern.k
    const = ((mu * mu + sigma2) ** st.n2 * sigma2 ** st.n_ge3
             / (aut * mu ** (k - 1.5 * st.n1)))
    norm = float(n) ** (st.n1 / 2)
    return BoundResult(const * norm, Regime.ASYMPTOTIC_VARIANCE, norm, exponent=st.n1 / 2)


# -- power-law comparisons --------------------------------------------------

def _sparse_constants(tau: float, h_min: float = 1.0, h_c: float = math.inf):
    pl = powerlaw_params(tau, h_c, h_min)
    return pl.C, pl.mu


def powerlaw_clique_count(k: int, tau: float, n: int, h_c: float = math.inf,
                          h_min: float = 1.0) -> BoundResult:
    """Expected ``K_k`` count in a power-law Chung-Lu graph, ``2 < tau < 3``.

    ``n**(k(3-tau)/2) mu**(k(1-tau)/2) / k! (C / (k - tau))**k``.  ``C`` and
    ``mu`` come from the power law on ``[h_min, h_c]``; the default
    ``h_c = inf`` holds them at their ``n``-independent limits.
    """
    if not 2.0 < tau < 3.0:
        raise ExponentOutOfRange(f"tau={tau} outside (2, 3); use powerlaw_clique_scaling_dense for (1, 2)")
    C, mu = _sparse_constants(tau, h_min, h_c)
    exponent = k / 2 * (3.0 - tau)
    const = mu ** (k / 2 * (1.0 - tau)) / math.factorial(k) * (C / (k - tau)) ** k
    norm = float(n) ** exponent
    return BoundResult(const * norm, Regime.POWER_LAW, norm, exponent=exponent)


def variance_matched_clique_bound(k: int, tau: float, n: int, h_c: float = math.inf,
                                  h_min: float = 1.0) -> BoundResult:
    """``K_k`` bound for the three-point law matching a power law's variance.

    Same form as :func:`powerlaw_clique_count` with ``C / (3 - tau)`` in place
    of ``C / (k - tau)``; the two coincide for triangles.
    """
    if not 2.0 < tau < 3.0:
        raise ExponentOutOfRange(f"tau={tau} outside (2, 3)")
    C, mu = _sparse_constants(tau, h_min, h_c)
    exponent = k / 2 * (3.0 - tau)
    const = mu ** (k / 2 * (1.0 - tau)) / math.factorial(k) * (C / (3.0 - tau)) ** k
    norm = float(n) ** exponent
    return BoundResult(const * norm, Regime.POWER_LAW, norm, exponent=exponent)


def powerlaw_variance_matched_params(tau: float, n: int, h_min: float = 1.0,
                                     mu: float | None = None, C: float | None = None):
    """``(mu, sigma2, d, h_c)`` for the variance-matched three-point model.

    ``h_c = sqrt(mu n)``, ``sigma2 = C / (3 - tau) h_c**(3 - tau)`` and
    ``d = 2 sigma2 / (h_c - h_min)``.  ``C`` and ``mu`` default to the
    ``n``-independent power-law constants.
    """
    C0, mu0 = _sparse_constants(tau, h_min)
    mu = mu0 if mu is None else mu
    C = C0 if C is None else C
    h_c = math.sqrt(mu * n)
    sigma2 = C / (3.0 - tau) * h_c ** (3.0 - tau)
    d = 2.0 * sigma2 / (h_c - h_min)
    return mu, sigma2, d, h_c


def powerlaw_clique_scaling_dense(k: int, tau: float, n: int) -> BoundResult:
    """Order of the ``K_k`` count in a dense power-law graph, ``1 < tau < 2``.

    Only the growth exponent ``k / tau`` is known; ``value`` is ``n**(k/tau)``
    with a unit constant and should be read as an order of magnitude.
    """
    if not 1.0 < tau < 2.0:
        raise ExponentOutOfRange(f"tau={tau} outside (1, 2)")
    exponent = k / tau
    norm = float(n) ** exponent
    return BoundResult(norm, Regime.POWER_LAW, norm, exponent=exponent,
                       notes=("order only: unit constant",))


def powerlaw_mad_bound(pattern: Pattern, tau: float, n: int, h_min: float = 1.0,
                       kernel: Kernel = CHUNG_LU) -> BoundResult:
    """Tight bound for the ambiguity set sharing a power law's mean and MAD.

    Uses the self-consistent cutoff ``mu(h_c) n = h_c**2`` and ``a = h_min``.
    """
    _, params = powerlaw_ambiguity(tau, n, h_min)
    return tight_bound(pattern, params, kernel)


def powerlaw_expected_count(pattern: Pattern, tau: float, n: int, h_c: float | None = None,
                            h_min: float = 1.0, atoms: int = 200,
                            kernel: Kernel = CHUNG_LU) -> BoundResult:
    """Expected copies of ``pattern`` in a power-law hidden-variable graph.

    The truncated density is discretized into ``atoms`` log-spaced cells
    (mass from the exact CDF, atom at the geometric midpoint) and the
    expectation is contracted exactly on that discrete law.
    """
    if h_c is None:
        h_c = self_consistent_cutoff(tau, n, h_min)
    pl = powerlaw_params(tau, h_c, h_min)
    edges = np.geomspace(h_min, h_c, atoms + 1)
    probs = np.diff(pl.cdf(edges))
    x = np.sqrt(edges[1:] * edges[:-1])
    value = expected_count_discrete(pattern, x, probs, h_c, kernel, n)
    return BoundResult(value, Regime.POWER_LAW, notes=(f"discretized with {atoms} atoms",))


# -- sweeps ----------------------------------------------------------------

def log_grid(start: float, stop: float, points: int) -> list[int]:
    """Integer ``n`` values spaced evenly in log between ``start`` and ``stop``."""
    return [int(round(x)) for x in np.geomspace(start, stop, points)]


def loglog_slope(ns, values) -> float:
    """Least-squares slope of ``log(value)`` against ``log(n)``."""
    x = np.log(np.asarray(ns, dtype=float))
    y = np.log(np.asarray(values, dtype=float))
    return float(np.polyfit(x, y, 1)[0])

