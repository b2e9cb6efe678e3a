"""Exact non-induced subgraph counts, degree statistics and bound ratios.

A copy of a pattern ``H`` is a subgraph isomorphic to ``H``; non-edges of
``H`` are unconstrained.  Counts equal the number of injective
homomorphisms divided by ``Aut(H)``.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass

import numpy as np

from .bounds import (
    BoundResult,
    _mad_constant,
    scaling_mad_chunglu,
    scaling_variance,
    subgraph_bound_variance_chunglu,
)
from .errors import EmptyGraph, PatternTooLarge
from .graph import Graph
from .patterns import Pattern, automorphism_count, catalog, named

MAX_COUNT_K = 5


# -- counting ---------------------------------------------------------------

def _comb2(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) // 2


def _comb3(x):
    x = np.asarray(x, dtype=np.int64)
    return x * (x - 1) * (x - 2) // 6


def edge_triangles(g: Graph) -> np.ndarray:
    """Number of triangles through each edge, aligned with ``g.edges``."""
    if g.edge_count == 0:
        return np.zeros(0, dtype=np.int64)
    A = g.csr
    common = (A @ A).multiply(A).tocsr()
    u, v = g.edges[:, 0], g.edges[:, 1]
    return np.asarray(common[u, v]).ravel().astype(np.int64)


def _triangles(t_e: np.ndarray) -> int:
    return int(t_e.sum()) // 3


def _vertex_triangles(g: Graph, t_e: np.ndarray) -> np.ndarray:
    t_v = np.zeros(g.n, dtype=np.int64)
    np.add.at(t_v, g.edges[:, 0], t_e)
    np.add.at(t_v, g.edges[:, 1], t_e)
    return t_v // 2


def _c4(g: Graph) -> int:
    if g.edge_count == 0:
        return 0
    A = g.csr
    co = (A @ A).tocoo()
    off = co.row != co.col
    return int(_comb2(co.data[off]).sum()) // 4


def _k4(g: Graph) -> int:
    # Orient each edge from lower to higher (degree, id); every K4 is then
    # found exactly once from its lowest-ranked edge.
    deg = g.degrees
    rank = np.lexsort((np.arange(g.n), deg))
    pos = np.empty(g.n, dtype=np.int64)
    pos[rank] = np.arange(g.n)
    out = [set() for _ in range(g.n)]
    for u, v in g.edges.tolist():
        if pos[u] < pos[v]:
            out[u].add(v)
        else:
            out[v].add(u)
    total = 0
    for u in range(g.n):
        nu = out[u]
        for v in nu:
            w = nu & out[v]
            if len(w) < 2:
                continue
            for x in w:
                total += len(out[x] & w)
    return total


def _fast_counts(g: Graph) -> dict:
    """Closed-form counts for every connected pattern on at most 4 vertices."""
    deg = g.degrees
    t_e = edge_triangles(g)
    tri = _triangles(t_e)
    du = deg[g.edges[:, 0]] - 1
    dv = deg[g.edges[:, 1]] - 1
    t_v = _vertex_triangles(g, t_e)
    return {
        "edge": lambda: g.edge_count,
        "p3": lambda: int(_comb2(deg).sum()),
        "triangle": lambda: tri,
        "claw": lambda: int(_comb3(deg).sum()),
        "p4": lambda: int((du * dv).sum()) - 3 * tri,
        "paw": lambda: int((t_v * (deg - 2)).sum()),
        "c4": lambda: _c4(g),
        "diamond": lambda: int(_comb2(t_e).sum()),
        "k4": lambda: _k4(g),
    }


_FAST_NAMES = ("edge", "p3", "triangle", "claw", "p4", "paw", "c4", "diamond", "k4")


def _fast_name(pattern: Pattern) -> str | None:
    if pattern.k > 4:
        return None
    for nm in _FAST_NAMES:
        if pattern.is_isomorphic(named(nm)):
            return nm
    return None


def count_copies(g: Graph, pattern: Pattern, method: str = "auto") -> int:
    """Exact number of non-induced copies of ``pattern`` in ``g``.

    ``method`` is ``"auto"`` (closed forms for patterns on at most four
    vertices, backtracking otherwise), ``"fast"`` or ``"backtrack"``.
    """
    if pattern.k > MAX_COUNT_K:
        raise PatternTooLarge(f"counting supports k <= {MAX_COUNT_K}, got k={pattern.k}")
    if method not in ("auto", "fast", "backtrack"):
        raise ValueError(f"unknown method {method!r}")
    if method != "backtrack":
        nm = _fast_name(pattern)
        if nm is not None:
            return int(_fast_counts(g)[nm]())
        if method == "fast":
            raise ValueError(f"no closed form for {pattern.label}")
    return count_embeddings(g, pattern) // automorphism_count(pattern)


def count_many(g: Graph, patterns) -> list[int]:
    """Counts for several patterns, sharing the closed-form precomputation."""
    fast = None
    out = []
    for p in patterns:
        nm = _fast_name(p)
        if nm is None:
            out.append(count_copies(g, p, "backtrack"))
            continue
        if fast is None:
            fast = _fast_counts(g)
        out.append(int(fast[nm]()))
    return out


def _match_order(pattern: Pattern) -> list[int]:
    # Start at a highest-degree vertex; always extend by the vertex with the
    # most already-placed neighbors so candidates come from a neighbor list.
    adj = pattern.adjacency
    order = [max(range(pattern.k), key=lambda v: (len(adj[v]), -v))]
    while len(order) < pattern.k:
        placed = set(order)
        best = max(
            (v for v in range(pattern.k) if v not in placed),
            key=lambda v: (len(adj[v] & placed), len(adj[v]), -v),
        )
        order.append(best)
    return order


def count_embeddings(g: Graph, pattern: Pattern) -> int:
    """Number of injective homomorphisms from ``pattern`` into ``g``."""
    if pattern.k > g.n:
        return 0
    order = _match_order(pattern)
    pdeg = pattern.degrees
    back = [[order.index(w) for w in pattern.adjacency[v] if order.index(w) < i]
            for i, v in enumerate(order)]
    need = [pdeg[v] for v in order]
    nbrs = g.neighbor_sets
    deg = g.degrees
    image = [0] * pattern.k
    k = pattern.k

    def extend(i: int) -> int:
        if i == k:
            return 1
        prev = back[i]
        cand = nbrs[image[prev[0]]]
        for j in prev[1:]:
            cand = cand & nbrs[image[j]]
        used = image[:i]
        total = 0
        for x in cand:
            if deg[x] < need[i] or x in used:
                continue
            image[i] = x
            total += extend(i + 1)
        return total

    total = 0
    first_need = need[0]
    for x in np.flatnonzero(deg >= first_need).tolist():
        image[0] = x
        total += extend(1)
    return total


# -- degree statistics ------------------------------------------------------

@dataclass(frozen=True)
class SummaryStats:
    n: int
    mu: float
    mad: float
    h_max: int
    sigma2: float
    h_min: int = 0

    def row(self) -> tuple:
        return (self.n, self.mu, self.mad, self.h_max, self.sigma2)


def summary_stats(g: Graph) -> SummaryStats:
    """Degree mean, MAD, maximum and population variance."""
    if g.n == 0:
        raise EmptyGraph("graph has no vertices")
    deg = g.degrees.astype(float)
    mu = 2.0 * g.edge_count / g.n
    dev = deg - mu
    mad = float(np.abs(dev).mean())
    sigma2 = float((dev * dev).mean())
    if mad > math.sqrt(sigma2) * (1 + 1e-12) + 1e-12:
        raise ArithmeticError(f"MAD {mad} exceeds standard deviation {math.sqrt(sigma2)}")
    return SummaryStats(g.n, mu, mad, int(deg.max()), sigma2, int(deg.min()))


# -- ratios -----------------------------------------------------------------

class CutoffChoice(enum.Enum):
    SQRT_MU_N = "sqrt-mu-n"
    H_MAX = "h-max"


class Variant(enum.Enum):
    MAD = "mad"
    VARIANCE_MAD = "variance"


@dataclass(frozen=True)
class RatioRow:
    pattern: str
    observed: int
    bound: float
    ratio: float


@dataclass(frozen=True)
class RatioReport:
    rows: tuple[RatioRow, ...]
    cutoff_choice: CutoffChoice
    variant: Variant
    stats: SummaryStats
    h_c: float
    d: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["pattern", "observed", "bound", "ratio", "variant", "cutoff"])
        for r in self.rows:
            w.writerow([r.pattern, r.observed, f"{r.bound:.9g}", f"{r.ratio:.9g}",
                        self.variant.value, self.cutoff_choice.value])
        return buf.getvalue()


def _bound_for(pattern: Pattern, variant: Variant, mu: float, d: float, sigma2: float,
               n: int, h_c: float, canonical: bool) -> BoundResult | float:
    if variant is Variant.MAD:
        if canonical:
            return scaling_mad_chunglu(pattern, mu, d, n)
        return _mad_constant(pattern, mu, d, 1.0) * float(n) ** pattern.k * h_c ** (-pattern.k)
    if canonical:
        return subgraph_bound_variance_chunglu(pattern, mu, sigma2, n)
    return scaling_variance(pattern, mu, sigma2, h_c, n)


def bound_ratio(g: Graph, patterns=None, cutoff_choice: CutoffChoice = CutoffChoice.SQRT_MU_N,
                variant: Variant = Variant.MAD, mu: float | None = None, d: float | None = None,
                sigma2: float | None = None, counts=None) -> RatioReport:
    """Observed counts divided by the MAD or variance-matched bound.

    Degree statistics default to the graph's own; ``mu``, ``d`` and
    ``sigma2`` override them (e.g. with the parameters a graph was generated
    from).  The variance variant uses the MAD implied by ``sigma2`` at the
    chosen cutoff, ``d = 2 sigma2 / (h_c - 1)``.  A zero bound gives an
    infinite ratio.
    """
    patterns = catalog(4) if patterns is None else list(patterns)
    st = summary_stats(g)
    mu = st.mu if mu is None else mu
    sigma2 = st.sigma2 if sigma2 is None else sigma2
    canonical = cutoff_choice is CutoffChoice.SQRT_MU_N
    h_c = math.sqrt(mu * g.n) if canonical else float(st.h_max)
    if variant is Variant.VARIANCE_MAD:
        d = 2.0 * sigma2 / (h_c - 1.0)
    elif d is None:
        d = st.mad
    observed = count_many(g, patterns) if counts is None else list(counts)
    rows = []
    for p, obs in zip(patterns, observed):
        bound = float(_bound_for(p, variant, mu, d, sigma2, g.n, h_c, canonical))
        ratio = obs / bound if bound > 0 else math.inf
        rows.append(RatioRow(p.label, int(obs), bound, ratio))
    return RatioReport(tuple(rows), cutoff_choice, variant, st, h_c, d)
