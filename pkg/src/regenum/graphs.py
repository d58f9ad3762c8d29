"""Bitset-backed immutable graphs and the per-graph mathematics.

A Graph stores one integer bitmask per vertex (bit j of row i set iff {i,j}
is an edge), which keeps every metric here a matter of shifts and popcounts.
Orders up to 64 fit one machine word per row.

Distances and ASPL are exact: ASPL is returned as a Fraction with numerator
sum(d(i,j)) over ordered pairs and denominator n*(n-1), so comparisons between
candidate graphs never touch floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    DegenerateOrderError,
    DisconnectedError,
    InfeasibleSpecError,
    OrderMismatchError,
)

MAX_VERTICES = 64


@dataclass(frozen=True)
class DegreeSpec:
    """An (order, degree) pair for which k-regular graphs can exist.

    Constructible only when n*k is even (handshake), 0 <= k < n and
    1 <= n <= 64; everything downstream may assume a valid spec.
    """

    n: int
    k: int

    def __post_init__(self):
        if not (1 <= self.n <= MAX_VERTICES):
            raise InfeasibleSpecError(f"order must be in 1..{MAX_VERTICES}, got {self.n}")
        if not (0 <= self.k < self.n):
            raise InfeasibleSpecError(f"degree must satisfy 0 <= k < n, got k={self.k} n={self.n}")
        if (self.n * self.k) % 2 != 0:
            raise InfeasibleSpecError(
                f"no {self.k}-regular graph on {self.n} vertices: n*k is odd"
            )

    @property
    def edge_count(self) -> int:
        return self.n * self.k // 2


class Graph:
    """Immutable undirected simple graph on vertices 0..n-1.

    rows[i] is the neighbor bitmask of vertex i. The constructor validates
    symmetry and irreflexivity; factories that build rows by construction use
    _from_trusted_rows to skip the re-check.
    """

    __slots__ = ("n", "rows")

    def __init__(self, n: int, rows: Sequence[int]):
        if not (1 <= n <= MAX_VERTICES):
            raise ValueError(f"order must be in 1..{MAX_VERTICES}, got {n}")
        rows = tuple(int(r) for r in rows)
        if len(rows) != n:
            raise ValueError(f"expected {n} adjacency rows, got {len(rows)}")
        full = (1 << n) - 1
        for i, r in enumerate(rows):
            if r & ~full:
                raise ValueError(f"row {i} has bits beyond vertex {n - 1}")
            if r >> i & 1:
                raise ValueError(f"self-loop at vertex {i}")
        for i, r in enumerate(rows):
            m = r
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                if not rows[j] >> i & 1:
                    raise ValueError(f"asymmetric adjacency between {i} and {j}")
        self._set("n", n)
        self._set("rows", rows)

    def _set(self, name: str, value) -> None:
        object.__setattr__(self, name, value)

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @classmethod
    def _from_trusted_rows(cls, n: int, rows: tuple[int, ...]) -> "Graph":
        g = object.__new__(cls)
        g._set("n", n)
        g._set("rows", rows)
        return g

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        rows = [0] * n
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise ValueError(f"edge ({a},{b}) out of range for order {n}")
            rows[a] |= 1 << b
            rows[b] |= 1 << a
        return cls(n, rows)

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i in range(self.n):
            m = self.rows[i] >> (i + 1) << (i + 1)
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                out.append((i, j))
        return out

    @property
    def edge_count(self) -> int:
        return sum(r.bit_count() for r in self.rows) // 2

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.edges()!r})"


def degree(g: Graph, v: int) -> int:
    return g.rows[v].bit_count()


def is_regular(g: Graph, k: int) -> bool:
    return all(r.bit_count() == k for r in g.rows)


def _reach_mask(rows: Sequence[int], n: int, src: int) -> int:
    """Bitmask of vertices reachable from src."""
    seen = 1 << src
    frontier = seen
    while frontier:
        nxt = 0
        m = frontier
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            nxt |= rows[v]
        frontier = nxt & ~seen
        seen |= frontier
    return seen


def is_connected(g: Graph) -> bool:
    return _reach_mask(g.rows, g.n, 0) == (1 << g.n) - 1


def _bfs_row(rows: Sequence[int], n: int, src: int, dist_row) -> bool:
    """Fill dist_row with distances from src; False if some vertex unreachable."""
    seen = 1 << src
    frontier = seen
    dist_row[src] = 0
    d = 0
    while frontier:
        d += 1
        nxt = 0
        m = frontier
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            nxt |= rows[v]
        frontier = nxt & ~seen
        seen |= frontier
        m = frontier
        while m:
            v = (m & -m).bit_length() - 1
            m &= m - 1
            dist_row[v] = d
    return seen == (1 << n) - 1


def all_pairs_distances(g: Graph) -> np.ndarray:
    """Shortest-path distance matrix (symmetric, zero diagonal).

    Raises DisconnectedError when any pair is unreachable.
    """
    n = g.n
    dist = np.zeros((n, n), dtype=np.int64)
    for s in range(n):
        if not _bfs_row(g.rows, n, s, dist[s]):
            raise DisconnectedError(f"graph on {n} vertices is not connected")
    return dist


def aspl(g: Graph) -> Fraction:
    """Average shortest path length over ordered vertex pairs, exact."""
    if g.n == 1:
        raise DegenerateOrderError("ASPL undefined on a single vertex")
    total, _diam = _distance_totals(g)
    return Fraction(total, g.n * (g.n - 1))


def diameter(g: Graph) -> int:
    _total, diam = _distance_totals(g)
    return diam


def _distance_totals(g: Graph) -> tuple[int, int]:
    """(sum of distances over ordered pairs, maximum distance)."""
    n = g.n
    rows = g.rows
    full = (1 << n) - 1
    total = 0
    diam = 0
    for s in range(n):
        seen = 1 << s
        frontier = seen
        d = 0
        while frontier and seen != full:
            d += 1
            nxt = 0
            m = frontier
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                nxt |= rows[v]
            frontier = nxt & ~seen
            seen |= frontier
            total += d * frontier.bit_count()
            if frontier:
                diam = max(diam, d)
        if seen != full:
            raise DisconnectedError(f"graph on {n} vertices is not connected")
    return total, diam


def aspl_lower_bound(spec: DegreeSpec) -> Fraction:
    """Moore-style lower bound on the ASPL of any connected k-regular graph.

    From any root at most k vertices sit at distance 1, k(k-1) at distance 2
    and k(k-1)^(t-1) at distance t; packing all n-1 other vertices into the
    nearest shells minimizes the distance sum. Regularity makes the per-root
    bound identical for every root, so it bounds the ASPL itself.
    """
    n, k = spec.n, spec.k
    if n < 2:
        raise DegenerateOrderError("ASPL bound undefined on a single vertex")
    if k < 2 and n > k + 1:
        raise InfeasibleSpecError(
            f"no connected {k}-regular graph on {n} vertices exists"
        )
    remaining = n - 1
    shell = k
    d = 1
    total = 0
    while remaining > 0:
        take = min(shell, remaining)
        total += take * d
        remaining -= take
        shell *= k - 1
        d += 1
    return Fraction(total, n - 1)


def canonical_form(g: Graph) -> bytes:
    """Relabeling-invariant byte string; equal iff isomorphic.

    Lexicographically smallest upper-triangle bit string of the adjacency
    matrix over all vertex permutations, read row-major, preceded by the
    order byte. Computed by partition-refinement branch and bound.
    """
    from . import _kernels

    n = g.n
    if n == 1:
        return bytes([1])
    adj = np.array(g.rows, dtype=np.uint64)
    best = _kernels.min_form_rows(adj, n)
    acc = 0
    bits = 0
    for t in range(n - 1):
        width = n - 1 - t
        acc = (acc << width) | int(best[t])
        bits += width
    pad = (-bits) % 8
    acc <<= pad
    return bytes([n]) + acc.to_bytes((bits + pad) // 8, "big")


def is_isomorphic(g1: Graph, g2: Graph) -> bool:
    """Exhaustive permutation search with degree pruning (oracle scale).

    Workable up to roughly 10 vertices; beyond that use canonical_form
    equality instead.
    """
    if g1.n != g2.n:
        raise OrderMismatchError(f"orders differ: {g1.n} vs {g2.n}")
    n = g1.n
    deg1 = [r.bit_count() for r in g1.rows]
    deg2 = [r.bit_count() for r in g2.rows]
    if sorted(deg1) != sorted(deg2):
        return False
    if sum(deg1) != sum(deg2):
        return False

    mapping = [-1] * n
    used = 0

    def extend(v: int) -> bool:
        nonlocal used
        if v == n:
            return True
        row = g1.rows[v]
        for w in range(n):
            if used >> w & 1 or deg2[w] != deg1[v]:
                continue
            ok = True
            for u in range(v):
                if (row >> u & 1) != (g2.rows[mapping[u]] >> w & 1):
                    ok = False
                    break
            if not ok:
                continue
            mapping[v] = w
            used |= 1 << w
            if extend(v + 1):
                return True
            used &= ~(1 << w)
            mapping[v] = -1
        return False

    return extend(0)
