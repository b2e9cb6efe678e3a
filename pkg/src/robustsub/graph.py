"""Undirected simple graphs and the edge-list file format."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy import sparse

log = logging.getLogger(__name__)

# A leading "# n=<count>" comment declares the vertex count, so isolated
# vertices survive a write/read round trip.
_N_HEADER = re.compile(r"[#%]\s*n\s*=\s*(\d+)\b")


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``edges`` is an ``(m, 2)`` int64 array with ``u < v`` in every row,
    sorted lexicographically and duplicate-free.  Use :meth:`from_edges` to
    build one from arbitrary pairs.
    """

    n: int
    edges: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def from_edges(cls, n: int, pairs, meta: dict | None = None) -> "Graph":
        if not isinstance(pairs, np.ndarray):
            pairs = list(pairs)
        arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if arr.size and (arr.min() < 0 or arr.max() >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        arr = arr[arr[:, 0] != arr[:, 1]]
        arr = np.sort(arr, axis=1)
        arr = np.unique(arr, axis=0) if len(arr) else arr.reshape(0, 2)
        arr.setflags(write=False)
        return cls(int(n), arr, dict(meta or {}))

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def degrees(self) -> np.ndarray:
        deg = np.bincount(self.edges.ravel(), minlength=self.n).astype(np.int64)
        deg.setflags(write=False)
        return deg

    @cached_property
    def csr(self) -> sparse.csr_matrix:
        """Symmetric 0/1 adjacency matrix (int64) with sorted column indices."""
        u, v = self.edges[:, 0], self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(rows.shape[0], dtype=np.int64)
        mat = sparse.csr_matrix((data, (rows, cols)), shape=(self.n, self.n))
        mat.sort_indices()
        return mat

    def neighbors(self, v: int) -> np.ndarray:
        m = self.csr
        return m.indices[m.indptr[v]:m.indptr[v + 1]]

    @cached_property
    def adjacency(self) -> tuple[np.ndarray, ...]:
        """Per-vertex sorted neighbor arrays."""
        return tuple(self.neighbors(v) for v in range(self.n))

    @cached_property
    def neighbor_sets(self) -> tuple[frozenset, ...]:
        return tuple(frozenset(a.tolist()) for a in self.adjacency)

    def same_as(self, other: "Graph") -> bool:
        return self.n == other.n and np.array_equal(self.edges, other.edges)

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edge_count})"


@dataclass(frozen=True)
class ReadReport:
    self_loops: int
    duplicates: int
    id_map: dict


def read_edge_list(path) -> tuple[Graph, ReadReport]:
    """Read a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` are comments; columns beyond the first
    two (weights, timestamps) are ignored.  Vertex ids are remapped densely
    in order of first appearance.  Self-loops and repeated edges are dropped
    and counted in the returned report.  A comment ``# n=<count>`` before the
    first edge pads the graph with isolated vertices up to ``count``.
    """
    ids: dict[int, int] = {}
    pairs = []
    loops = 0
    declared = None
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            s = line.strip()
            if not s:
                continue
            if s[0] in "#%":
                m = _N_HEADER.match(s)
                if m and not ids and declared is None:
                    declared = int(m.group(1))
                continue
            parts = s.split()
            if len(parts) < 2:
                raise ValueError(f"{path}:{lineno}: expected two vertex ids")
            try:
                a, b = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: vertex ids must be integers") from None
            if a < 0 or b < 0:
                raise ValueError(f"{path}:{lineno}: vertex ids must be non-negative")
            u = ids.setdefault(a, len(ids))
            v = ids.setdefault(b, len(ids))
            if u == v:
                loops += 1
                continue
            pairs.append((u, v))
    n = len(ids)
    if declared is not None:
        if declared < n:
            raise ValueError(f"{path}: header declares n={declared} but {n} vertices appear")
        n = declared
    g = Graph.from_edges(n, pairs)
    dups = len(pairs) - g.edge_count
    if loops or dups:
        log.warning("%s: dropped %d self-loops and %d duplicate edges", path, loops, dups)
    return g, ReadReport(loops, dups, ids)


def write_edge_list(g: Graph, path, header: str | None = None) -> None:
    path = Path(path)
    with path.open("w") as fh:
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        for u, v in g.edges:
            fh.write(f"{u} {v}\n")
