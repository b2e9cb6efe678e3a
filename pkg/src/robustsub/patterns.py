"""Small connected subgraph patterns and their combinatorial invariants."""

from __future__ import annotations

import itertools
import math
import re
from collections import deque
from dataclasses import dataclass
from functools import cached_property, lru_cache

from .errors import NotConnected, NotSimple, PatternError, VertexOutOfRange

MAX_K = 8

Edge = tuple[int, int]


@dataclass(frozen=True)
class DegreeStats:
    degrees: tuple[int, ...]
    e_h: int
    n1: int
    n2: int
    n2_1: int
    n_ge3: int
    e_ge3_ge3: int


@dataclass(frozen=True)
class Pattern:
    """Connected simple graph on vertices ``0..k-1``.

    Build instances with :func:`pattern_from_edge_list`, which validates and
    canonicalizes the edge list.
    """

    k: int
    edges: tuple[Edge, ...]
    name: str | None = None

    def __post_init__(self):
        _validate(self.k, self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj = [set() for _ in range(self.k)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def min_degree(self) -> int:
        return min(self.degrees)

    @property
    def is_clique(self) -> bool:
        return self.n_edges == self.k * (self.k - 1) // 2

    @cached_property
    def canonical_form(self) -> tuple[Edge, ...]:
        return canonical_form(self.k, self.edges)

    @property
    def label(self) -> str:
        return self.name if self.name else self.literal()

    def literal(self) -> str:
        """Pattern literal in the ``k=4;edges=0-1,1-2,2-3`` syntax."""
        body = ",".join(f"{u}-{v}" for u, v in self.edges)
        return f"k={self.k};edges={body}"

    def is_isomorphic(self, other: "Pattern") -> bool:
        return self.k == other.k and self.canonical_form == other.canonical_form

    def __str__(self):
        return self.label


def _validate(k: int, edges) -> None:
    if not isinstance(k, int) or k < 2 or k > MAX_K:
        raise PatternError(f"pattern size k={k!r} must be an integer in [2, {MAX_K}]")
    seen = set()
    for e in edges:
        u, v = e
        if not (0 <= u < k and 0 <= v < k):
            raise VertexOutOfRange(f"edge {e} references a vertex outside 0..{k - 1}")
        if u == v:
            raise NotSimple(f"self-loop at vertex {u}")
        key = (min(u, v), max(u, v))
        if key in seen:
            raise NotSimple(f"duplicate edge {key}")
        seen.add(key)
    if not _connected(k, seen):
        raise NotConnected(f"pattern on {k} vertices with edges {sorted(seen)} is not connected")


def _connected(k: int, edges) -> bool:
    adj = [[] for _ in range(k)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    queue = deque([0])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return len(seen) == k


def pattern_from_edge_list(k: int, edges, name: str | None = None) -> Pattern:
    """Validate and canonicalize a pattern.

    Raises ``VertexOutOfRange``, ``NotSimple`` or ``NotConnected``.
    """
    edges = list(edges)
    _validate(k, edges)
    canon = tuple(sorted((min(u, v), max(u, v)) for u, v in edges))
    return Pattern(k, canon, name)


def canonical_form(k: int, edges) -> tuple[Edge, ...]:
    """Lexicographically smallest relabeled edge list over all permutations."""
    best = None
    for perm in itertools.permutations(range(k)):
        relabeled = tuple(sorted(
            (perm[u], perm[v]) if perm[u] < perm[v] else (perm[v], perm[u])
            for u, v in edges
        ))
        if best is None or relabeled < best:
            best = relabeled
    return best


def automorphism_count(p: Pattern) -> int:
    """Number of automorphisms, by exhaustive permutation check."""
    return _aut(p.k, p.edges)


@lru_cache(maxsize=None)
def _aut(k: int, edges: tuple[Edge, ...]) -> int:
    edge_set = frozenset(edges)
    adj = [set() for _ in range(k)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    deg = [len(a) for a in adj]
    count = 0
    # Backtrack over degree-preserving partial maps; exhaustive but pruned.
    perm = [-1] * k
    used = [False] * k

    def extend(i):
        nonlocal count
        if i == k:
            count += 1
            return
        for img in range(k):
            if used[img] or deg[img] != deg[i]:
                continue
            ok = True
            for j in adj[i]:
                if j < i and (min(img, perm[j]), max(img, perm[j])) not in edge_set:
                    ok = False
                    break
            if not ok:
                continue
            perm[i] = img
            used[img] = True
            extend(i + 1)
            used[img] = False
        perm[i] = -1

    extend(0)
    return count


def degree_stats(p: Pattern) -> DegreeStats:
    deg = p.degrees
    n1 = sum(1 for x in deg if x == 1)
    n2 = sum(1 for x in deg if x == 2)
    n2_1 = sum(
        1 for v in range(p.k)
        if deg[v] == 2 and any(deg[w] == 1 for w in p.adjacency[v])
    )
    n_ge3 = sum(1 for x in deg if x >= 3)
    e33 = sum(1 for u, v in p.edges if deg[u] >= 3 and deg[v] >= 3)
    return DegreeStats(deg, p.n_edges, n1, n2, n2_1, n_ge3, e33)


def leading_constant(p: Pattern, c: float) -> float:
    """Subgraph-frequency ordering constant ``c**n1 / Aut(H)``, with ``c = 2*mu/d``."""
    if c <= 0:
        raise ValueError("c must be positive")
    return c ** degree_stats(p).n1 / automorphism_count(p)


# -- named families ---------------------------------------------------------

def clique(k: int) -> Pattern:
    return pattern_from_edge_list(k, itertools.combinations(range(k), 2), f"k{k}")


def path(k: int) -> Pattern:
    return pattern_from_edge_list(k, [(i, i + 1) for i in range(k - 1)], f"p{k}")


def cycle(k: int) -> Pattern:
    if k < 3:
        raise PatternError("a cycle needs at least 3 vertices")
    return pattern_from_edge_list(k, [(i, (i + 1) % k) for i in range(k)], f"c{k}")


def star(leaves: int) -> Pattern:
    return pattern_from_edge_list(leaves + 1, [(0, i) for i in range(1, leaves + 1)], f"star{leaves}")


_NAMED = {
    "edge": (2, [(0, 1)]),
    "p3": (3, [(0, 1), (1, 2)]),
    "triangle": (3, [(0, 1), (1, 2), (0, 2)]),
    "p4": (4, [(0, 1), (1, 2), (2, 3)]),
    "claw": (4, [(0, 1), (0, 2), (0, 3)]),
    "paw": (4, [(0, 1), (1, 2), (0, 2), (0, 3)]),
    "c4": (4, [(0, 1), (1, 2), (2, 3), (0, 3)]),
    "diamond": (4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)]),
    "k4": (4, list(itertools.combinations(range(4), 2))),
    "p5": (5, [(0, 1), (1, 2), (2, 3), (3, 4)]),
    "star4": (5, [(0, 1), (0, 2), (0, 3), (0, 4)]),
    "fork": (5, [(0, 1), (1, 2), (2, 3), (2, 4)]),
    "c5": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]),
    "bull": (5, [(0, 1), (1, 2), (0, 2), (1, 3), (2, 4)]),
    "house": (5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 4)]),
    "w4": (5, [(0, 1), (1, 2), (2, 3), (0, 3), (4, 0), (4, 1), (4, 2), (4, 3)]),
    "k5": (5, list(itertools.combinations(range(5), 2))),
}

_ALIASES = {
    "k2": "edge", "wedge": "p3", "k3": "triangle", "c3": "triangle",
    "star3": "claw", "k1_3": "claw", "k1_4": "star4", "chair": "fork",
}


def named(name: str) -> Pattern:
    key = name.strip().lower()
    key = _ALIASES.get(key, key)
    if key in _NAMED:
        k, edges = _NAMED[key]
        return pattern_from_edge_list(k, edges, key)
    m = re.fullmatch(r"([kpc]|star)(\d+)", key)
    if m:
        fam, size = m.group(1), int(m.group(2))
        build = {"k": clique, "p": path, "c": cycle, "star": star}[fam]
        return build(size)
    raise PatternError(f"unknown pattern name {name!r}")


@lru_cache(maxsize=None)
def _name_for_canon(k: int) -> dict:
    out = {}
    for nm, (kk, edges) in _NAMED.items():
        if kk == k:
            out[canonical_form(k, edges)] = nm
    return out


@lru_cache(maxsize=None)
def _catalog(k: int) -> tuple[Pattern, ...]:
    all_pairs = list(itertools.combinations(range(k), 2))
    seen = {}
    for mask in range(1, 1 << len(all_pairs)):
        edges = [all_pairs[i] for i in range(len(all_pairs)) if mask >> i & 1]
        if len(edges) < k - 1 or not _connected(k, edges):
            continue
        canon = canonical_form(k, edges)
        seen.setdefault(canon, None)
    ordered = sorted(seen, key=lambda c: (len(c), c))
    names = _name_for_canon(k)
    return tuple(
        Pattern(k, canon, names.get(canon, f"g{k}_{i}"))
        for i, canon in enumerate(ordered)
    )


def catalog(k: int) -> list[Pattern]:
    """All connected simple graphs on ``k`` vertices up to isomorphism.

    Ordered by edge count, then canonical edge list; unnamed members are
    labelled ``g{k}_{index}``.
    """
    if k not in (3, 4, 5):
        raise ValueError("catalog is available for k in {3, 4, 5}")
    return list(_catalog(k))


_LITERAL = re.compile(r"\s*k\s*=\s*(\d+)\s*;\s*edges\s*=\s*(.*)\s*", re.IGNORECASE)


def parse_pattern(text: str) -> Pattern:
    """Resolve a CLI pattern selector.

    Accepts a built-in name (``triangle``, ``k4``, ``p5`` ...), a literal
    ``k=4;edges=0-1,1-2,2-3``, or a catalog address ``5:7`` (size, index).
    """
    m = _LITERAL.fullmatch(text)
    if m:
        k = int(m.group(1))
        edges = []
        for tok in filter(None, (t.strip() for t in m.group(2).split(","))):
            try:
                u, v = (int(x) for x in tok.split("-"))
            except ValueError:
                raise PatternError(f"bad edge token {tok!r}") from None
            edges.append((u, v))
        p = pattern_from_edge_list(k, edges)
        names = _name_for_canon(k) if k <= 5 else {}
        canon = p.canonical_form
        return Pattern(p.k, p.edges, names.get(canon))
    m = re.fullmatch(r"\s*(\d)\s*:\s*(\d+)\s*", text)
    if m:
        members = catalog(int(m.group(1)))
        idx = int(m.group(2))
        if idx >= len(members):
            raise PatternError(f"catalog({m.group(1)}) has {len(members)} members")
        return members[idx]
    m = re.fullmatch(r"\s*g(\d)_(\d+)\s*", text)
    if m:
        return parse_pattern(f"{m.group(1)}:{m.group(2)}")
    return named(text)
