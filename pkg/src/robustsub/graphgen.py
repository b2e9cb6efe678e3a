"""Sampling hidden-variable random graphs.

Weights come from the extremal three-point law or from a truncated power
law; each vertex pair ``{i, j}`` is then joined independently with
probability ``f(h_i h_j / h_s**2)``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass

import numpy as np

from ._rng import substream
from .ambiguity import AmbiguityParams, PowerLawParams, ThreePointDistribution, three_point
from .errors import TooLarge
from .graph import Graph
from .kernels import Kernel
from .patterns import Pattern, automorphism_count

# Stream tags under one seed.
_WEIGHTS, _BLOCKS, _PAIRS = 0, 1, 2

# Weight vectors with at most this many distinct values are realized block-wise.
MAX_BLOCK_CLASSES = 64
# Distinct-value limit for the class-collapsed conditional expectation.
MAX_COLLAPSE_CLASSES = 16
# Size limits when the weights do not collapse.
MAX_DIRECT_N, MAX_DIRECT_K = 200, 4


class WeightSource(enum.Enum):
    THREE_POINT = "three-point"
    POWER_LAW = "power-law"
    EXTERNAL = "external"


@dataclass(frozen=True, eq=False)
class WeightVector:
    weights: np.ndarray
    source: WeightSource = WeightSource.EXTERNAL

    @property
    def n(self) -> int:
        return int(self.weights.shape[0])

    def classes(self):
        """Distinct values and the class index of every vertex (exact equality)."""
        values, inverse = np.unique(self.weights, return_inverse=True)
        return values, inverse


def sample_weights_three_point(dist: ThreePointDistribution, n: int, seed: int) -> WeightVector:
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = substream(seed, _WEIGHTS)
    idx = rng.choice(3, size=n, p=np.asarray(dist.probs) / sum(dist.probs))
    w = np.asarray(dist.support, dtype=float)[idx]
    w.setflags(write=False)
    return WeightVector(w, WeightSource.THREE_POINT)


def sample_weights_powerlaw(pl: PowerLawParams, n: int, seed: int) -> WeightVector:
    """Inverse-transform draws from the truncated continuous power law."""
    if n < 1:
        raise ValueError("n must be >= 1")
    if pl.h_c == pl.h_min:
        return WeightVector(np.full(n, float(pl.h_min)), WeightSource.POWER_LAW)
    u = substream(seed, _WEIGHTS).random(n)
    one_minus = 1.0 - pl.tau
    if abs(one_minus) < 1e-12:
        w = pl.h_min * np.exp(u / pl.C)
    else:
        base = pl.h_min ** one_minus - u * (pl.tau - 1.0) / pl.C
        w = base ** (1.0 / one_minus)
    w = np.clip(w, pl.h_min, pl.h_c)
    w.setflags(write=False)
    return WeightVector(w, WeightSource.POWER_LAW)


def _pair_probability(kernel: Kernel, x, y, h_s2: float):
    u = np.multiply(x, y) / h_s2
    return kernel(np.minimum(u, 1.0)), bool(np.any(u > 1.0))


def _decode_within(t: np.ndarray, s: int) -> tuple[np.ndarray, np.ndarray]:
    # Row r of the strict upper triangle of an s x s matrix holds s-1-r pairs.
    row_len = np.arange(s - 1, 0, -1, dtype=np.int64)
    offsets = np.concatenate(([0], np.cumsum(row_len)))
    r = np.searchsorted(offsets, t, side="right") - 1
    c = t - offsets[r] + r + 1
    return r, c


def _sample_block(rng, m: int, p: float) -> np.ndarray:
    if m == 0 or p <= 0.0:
        return np.empty(0, dtype=np.int64)
    count = int(rng.binomial(m, p))
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if count == m:
        return np.arange(m, dtype=np.int64)
    return np.sort(rng.choice(m, size=count, replace=False)).astype(np.int64)


def _realize_blockwise(w: WeightVector, kernel: Kernel, h_s2: float, seed: int):
    values, inverse = w.classes()
    members = [np.flatnonzero(inverse == c) for c in range(len(values))]
    chunks = []
    clamped = False
    for b, (i, j) in enumerate(itertools.combinations_with_replacement(range(len(values)), 2)):
        p, over = _pair_probability(kernel, values[i], values[j], h_s2)
        clamped |= over
        rng = substream(seed, _BLOCKS, b)
        si, sj = len(members[i]), len(members[j])
        if i == j:
            idx = _sample_block(rng, si * (si - 1) // 2, float(p))
            r, c = _decode_within(idx, si)
            u, v = members[i][r], members[i][c]
        else:
            idx = _sample_block(rng, si * sj, float(p))
            r, c = np.divmod(idx, sj)
            u, v = members[i][r], members[j][c]
        if len(idx):
            chunks.append(np.column_stack([u, v]))
    return chunks, clamped


def _realize_pairwise(w: WeightVector, kernel: Kernel, h_s2: float, seed: int,
                      cells_per_chunk: int = 2_000_000):
    x = w.weights
    n = len(x)
    rows = max(1, cells_per_chunk // max(n, 1))
    chunks = []
    clamped = False
    cols = np.arange(n)
    for ci, start in enumerate(range(0, n, rows)):
        stop = min(n, start + rows)
        rng = substream(seed, _PAIRS, ci)
        p, over = _pair_probability(kernel, x[start:stop, None], x[None, :], h_s2)
        clamped |= over
        hit = rng.random(p.shape) < p
        hit &= cols[None, :] > np.arange(start, stop)[:, None]
        r, c = np.nonzero(hit)
        if len(r):
            chunks.append(np.column_stack([r + start, c]))
    return chunks, clamped


def realize_graph(w: WeightVector, kernel: Kernel, h_s: float, seed: int) -> Graph:
    """Sample a graph given vertex weights.

    With at most ``MAX_BLOCK_CLASSES`` distinct weights the sampler works per
    block pair: it draws the block's edge count from a binomial law and places
    that many edges uniformly without replacement.  Otherwise every pair gets
    its own Bernoulli draw.  Pairs whose weight product exceeds ``h_s**2`` use
    ``f(1)``; ``meta["clamped"]`` records whether that happened.
    """
    h_s2 = float(h_s) ** 2
    values, _ = w.classes()
    if len(values) <= MAX_BLOCK_CLASSES:
        chunks, clamped = _realize_blockwise(w, kernel, h_s2, seed)
        method = "blockwise"
    else:
        chunks, clamped = _realize_pairwise(w, kernel, h_s2, seed)
        method = "pairwise"
    pairs = np.concatenate(chunks) if chunks else np.empty((0, 2), dtype=np.int64)
    meta = {"seed": int(seed), "kernel": kernel.name, "h_s": float(h_s),
            "clamped": clamped, "method": method}
    return Graph.from_edges(w.n, pairs, meta)


def extremal_graph(params: AmbiguityParams, kernel: Kernel, seed: int) -> tuple[Graph, WeightVector]:
    """Sample the extremal three-point hidden-variable graph for ``params``."""
    w = sample_weights_three_point(three_point(params), params.n, seed)
    return realize_graph(w, kernel, params.h_s, seed), w


def powerlaw_graph(pl: PowerLawParams, n: int, kernel: Kernel, seed: int,
                   h_s: float | None = None) -> tuple[Graph, WeightVector]:
    w = sample_weights_powerlaw(pl, n, seed)
    return realize_graph(w, kernel, pl.h_c if h_s is None else h_s, seed), w


# -- conditional expectation given the weights --------------------------------

def conditional_expected_count(pattern: Pattern, w: WeightVector, kernel: Kernel,
                               h_s: float) -> float:
    """Expected copies of ``pattern`` given the weights.

    ``(1/Aut) * sum over injective maps V_H -> [n] of prod_edges f(h_u h_v / h_s**2)``.
    With at most ``MAX_COLLAPSE_CLASSES`` distinct weights the sum runs over
    class assignments weighted by falling factorials of the class sizes.
    Otherwise injectivity is handled by Moebius inversion over set partitions
    of the pattern's vertices; that path is limited to ``n <= 200`` and
    ``k <= 4``.
    """
    values, inverse = w.classes()
    counts = np.bincount(inverse, minlength=len(values))
    h_s2 = float(h_s) ** 2
    F, _ = _pair_probability(kernel, values[:, None], values[None, :], h_s2)
    if len(values) <= MAX_COLLAPSE_CLASSES:
        total = _collapsed_sum(pattern, np.asarray(F, dtype=float), counts)
    else:
        if w.n > MAX_DIRECT_N or pattern.k > MAX_DIRECT_K:
            raise TooLarge(f"n={w.n}, k={pattern.k} with {len(values)} distinct weights exceeds "
                           f"the limit n<={MAX_DIRECT_N}, k<={MAX_DIRECT_K}")
        Fx, _ = _pair_probability(kernel, w.weights[:, None], w.weights[None, :], h_s2)
        total = _injective_sum(pattern, np.asarray(Fx, dtype=float))
    return total / automorphism_count(pattern)


def _collapsed_sum(pattern: Pattern, F: np.ndarray, counts: np.ndarray) -> float:
    q, k = len(counts), pattern.k
    assign = np.indices((q,) * k).reshape(k, -1).T
    prod = np.ones(assign.shape[0])
    for s, t in pattern.edges:
        prod *= F[assign[:, s], assign[:, t]]
    # falling[c, m] = counts[c] * (counts[c] - 1) * ... (m factors)
    falling = np.ones((q, k + 1))
    for m in range(1, k + 1):
        falling[:, m] = falling[:, m - 1] * np.maximum(counts - (m - 1), 0)
    for c in range(q):
        prod *= falling[c, (assign == c).sum(axis=1)]
    return math.fsum(prod.tolist())


def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def _injective_sum(pattern: Pattern, F: np.ndarray) -> float:
    letters = "abcdefgh"
    diag = np.diag(F).copy()
    total = 0.0
    for part in _set_partitions(list(range(pattern.k))):
        block_of = {v: b for b, blk in enumerate(part) for v in blk}
        coef = 1
        for blk in part:
            coef *= (-1) ** (len(blk) - 1) * math.factorial(len(blk) - 1)
        subs, ops = [], []
        for s, t in pattern.edges:
            bs, bt = block_of[s], block_of[t]
            if bs == bt:
                subs.append(letters[bs])
                ops.append(diag)
            else:
                subs.append(letters[bs] + letters[bt])
                ops.append(F)
        total += coef * float(np.einsum(",".join(subs) + "->", *ops, optimize=True))
    return total
