"""Orderly generation of connected k-regular graphs up to isomorphism.

One compiled depth-first walk produces every isomorphism class exactly once,
in a deterministic order: always extend the lowest-index unsaturated vertex
with ascending partners, prune non-canonical branches, accept a leaf iff it
is connected and equal to its own canonical form.

The same walk, cut at an edge-depth (the split level), yields the task
decomposition: nodes at that depth are numbered 0,1,2,... in traversal
order, each the root of an independently runnable subtree. Pruning does not
depend on the mode, so prefix ordinals mean the same thing to a prefix
listing, a task executor and a monolithic run, on any machine.

count_oracle is the validation path: a separate brute-force walk over all
labeled k-regular graphs (no canonicity machinery) bucketed by canonical
form. It shares nothing with enumerate_graphs except the form convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterator, Optional

import numpy as np

from . import _kernels
from .errors import OracleScaleError, UnknownTaskError
from .graphs import DegreeSpec, Graph

NO_LIMIT = 1 << 62

_EMPTY_U64 = np.empty(0, dtype=np.uint64)
_EMPTY_I64 = np.empty(0, dtype=np.int64)

Visitor = Callable[[Graph], None]


@dataclass(frozen=True)
class PartialGraph:
    """A generation-order edge prefix: the root of one search subtree."""

    spec: DegreeSpec
    edges: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((int(a), int(b)) for a, b in self.edges))
        n, k = self.spec.n, self.spec.k
        deg = [0] * n
        prev_ext = -1
        prev_partner = -1
        seen = set()
        for a, b in self.edges:
            if not (0 <= a < b < n):
                raise ValueError(f"edge ({a},{b}) malformed for order {n}")
            if (a, b) in seen:
                raise ValueError(f"duplicate edge ({a},{b})")
            seen.add((a, b))
            cur = next((u for u in range(n) if deg[u] < k), None)
            if a != cur:
                raise ValueError(
                    f"edge ({a},{b}) does not extend the lowest unsaturated vertex ({cur})"
                )
            if a == prev_ext and b <= prev_partner:
                raise ValueError(f"partners of {a} not ascending at ({a},{b})")
            if deg[b] >= k:
                raise ValueError(f"edge ({a},{b}) oversaturates vertex {b}")
            deg[a] += 1
            deg[b] += 1
            prev_ext, prev_partner = a, b

    @property
    def residual_degrees(self) -> tuple[int, ...]:
        deg = [0] * self.spec.n
        for a, b in self.edges:
            deg[a] += 1
            deg[b] += 1
        return tuple(self.spec.k - d for d in deg)

    def graph(self) -> Graph:
        return Graph.from_edges(self.spec.n, self.edges)


@dataclass(frozen=True)
class TaskDescriptor:
    """One unit of distributable work: subtree task_index at split_level."""

    spec: DegreeSpec
    split_level: int
    task_index: int

    def __post_init__(self):
        m = self.spec.edge_count
        if not (0 <= self.split_level <= m):
            raise ValueError(f"split_level must be in 0..{m}, got {self.split_level}")
        if self.task_index < 0:
            raise ValueError(f"task_index must be nonnegative, got {self.task_index}")


def _call_kernel(spec: DegreeSpec, split_level: int = -1, lo: int = 0, hi: int = NO_LIMIT,
                 collect_cap: int = 0, want_task_ids: bool = False,
                 task_counts: Optional[np.ndarray] = None,
                 prefix_mode: bool = False, prefix_cap: int = 0):
    """Run the generation kernel once; returns (accepted, stored, seen, arrays)."""
    n = spec.n
    out_rows = np.empty(collect_cap * n, dtype=np.uint64) if collect_cap else _EMPTY_U64
    out_task = (np.empty(collect_cap, dtype=np.int64) if collect_cap and want_task_ids
                else _EMPTY_I64)
    counts = task_counts if task_counts is not None else _EMPTY_I64
    out_prefix = (np.empty(prefix_cap * 2 * split_level, dtype=np.int64)
                  if prefix_mode and prefix_cap and split_level > 0 else _EMPTY_I64)
    accepted, stored, seen = _kernels.enumerate_kernel(
        n, spec.k, split_level, lo, hi, collect_cap,
        out_rows, out_task, counts, 1 if prefix_mode else 0, prefix_cap, out_prefix)
    return int(accepted), int(stored), int(seen), out_rows, out_task, out_prefix


def _graph_from_flat(rows_flat: np.ndarray, n: int, idx: int) -> Graph:
    base = idx * n
    return Graph._from_trusted_rows(n, tuple(int(x) for x in rows_flat[base:base + n]))


def enumerate_graphs(spec: DegreeSpec, visitor: Optional[Visitor] = None) -> int:
    """Visit every connected k-regular graph on n vertices exactly once.

    Returns the number of isomorphism classes; with no visitor this is a
    pure count and materializes nothing.
    """
    if spec.k == 0:
        if spec.n == 1:
            if visitor is not None:
                visitor(Graph(1, (0,)))
            return 1
        return 0
    if visitor is None:
        accepted, _, _, _, _, _ = _call_kernel(spec)
        return accepted
    cap = 1 << 19
    while True:
        accepted, stored, _, rows, _, _ = _call_kernel(spec, collect_cap=cap)
        if stored == accepted:
            break
        cap = accepted
    for i in range(stored):
        visitor(_graph_from_flat(rows, spec.n, i))
    return accepted


@lru_cache(maxsize=None)
def _prefix_count_cached(n: int, k: int, split_level: int) -> int:
    spec = DegreeSpec(n, k)
    if k == 0 or split_level == 0:
        return 1
    _, _, seen, _, _, _ = _call_kernel(spec, split_level=split_level, prefix_mode=True)
    return seen


def count_prefixes(spec: DegreeSpec, split_level: int) -> int:
    """Number of depth-split_level nodes of the pruned search tree."""
    m = spec.edge_count
    if not (0 <= split_level <= m):
        raise ValueError(f"split_level must be in 0..{m}, got {split_level}")
    return _prefix_count_cached(spec.n, spec.k, split_level)


def enumerate_prefixes(spec: DegreeSpec, split_level: int) -> Iterator[PartialGraph]:
    """Yield the depth-split_level prefixes in generation order.

    Prefix i is the root of task i; the stream is identical across runs and
    machines. Subtrees may be empty: a prefix guarantees nothing about how
    many accepted leaves lie below it.
    """
    total = count_prefixes(spec, split_level)
    if split_level == 0 or spec.k == 0:
        yield PartialGraph(spec, ())
        return
    _, _, seen, _, _, flat = _call_kernel(
        spec, split_level=split_level, prefix_mode=True, prefix_cap=total)
    assert seen == total
    width = 2 * split_level
    for i in range(total):
        chunk = flat[i * width:(i + 1) * width]
        edges = tuple((int(chunk[2 * e]), int(chunk[2 * e + 1])) for e in range(split_level))
        yield PartialGraph(spec, edges)


def enumerate_task(task: TaskDescriptor, visitor: Optional[Visitor] = None) -> int:
    """Visit the accepted leaves of one subtree; counts like enumerate_graphs.

    Concatenating the outputs for task_index = 0..T-1 reproduces the
    monolithic stream byte for byte.
    """
    spec = task.spec
    total = count_prefixes(spec, task.split_level)
    if not (0 <= task.task_index < total):
        raise UnknownTaskError(
            f"task {task.task_index} out of range for {total} prefixes")
    if spec.k == 0:
        return enumerate_graphs(spec, visitor)
    lo, hi = task.task_index, task.task_index + 1
    if visitor is None:
        accepted, _, _, _, _, _ = _call_kernel(spec, split_level=task.split_level,
                                               lo=lo, hi=hi)
        return accepted
    cap = 1 << 16
    while True:
        accepted, stored, _, rows, _, _ = _call_kernel(
            spec, split_level=task.split_level, lo=lo, hi=hi, collect_cap=cap)
        if stored == accepted:
            break
        cap = accepted
    for i in range(stored):
        visitor(_graph_from_flat(rows, spec.n, i))
    return accepted


def count_oracle(spec: DegreeSpec) -> int:
    """Isomorphism-class count by brute force, for validating the generator.

    Enumerates labeled k-regular graphs outright (no canonicity pruning,
    only degree feasibility and a fixed gauge on vertex 0's partners) and
    counts distinct canonical forms of the connected ones.
    """
    if spec.n > 10:
        raise OracleScaleError(f"reference counter is limited to n <= 10, got {spec.n}")
    return len(_oracle_forms(spec, gauge=True))


def _oracle_forms(spec: DegreeSpec, gauge: bool) -> np.ndarray:
    """Distinct canonical forms over all connected labeled k-regular graphs."""
    if spec.k == 0:
        return np.zeros(1 if spec.n == 1 else 0, dtype=np.int64)
    cap = 1 << 21
    while True:
        forms = np.empty(cap, dtype=np.int64)
        cnt, stored = _kernels.oracle_collect(spec.n, spec.k, 1 if gauge else 0, forms)
        if stored == cnt:
            break
        cap = int(cnt)
    return np.unique(forms[:stored])


def labeled_connected_count(spec: DegreeSpec, gauge: bool = False) -> int:
    """Connected labeled k-regular graph count (test support)."""
    if spec.k == 0:
        return 1 if spec.n == 1 else 0
    cnt, _ = _kernels.oracle_collect(spec.n, spec.k, 1 if gauge else 0, _EMPTY_I64)
    return int(cnt)


def choose_split_level(spec: DegreeSpec, worker_count: int, tasks_per_worker: int = 50) -> int:
    """Split level for a balanced dynamic pool: the widest cut at or just
    past the first level yielding tasks_per_worker tasks per worker.

    Task count alone is a poor proxy for balance: subtree sizes at a fixed
    depth are grossly uneven (most prefixes prune out almost immediately),
    and a narrow cut can leave one subtree holding most of the work however
    many tasks it produces. Widening the cut splits exactly those dominant
    subtrees, so among the nearby sufficient levels the widest wins. Prefix
    counts are not monotone in the level (interior pruning), hence the
    explicit scan. Capped at the edge count when the tree never gets wide
    enough.
    """
    if worker_count < 1:
        raise ValueError("worker_count must be at least 1")
    target = worker_count * tasks_per_worker
    m = spec.edge_count
    first = m
    for level in range(m + 1):
        if count_prefixes(spec, level) >= target:
            first = level
            break
    best, best_count = first, count_prefixes(spec, first)
    for level in range(first + 1, min(first + 4, m) + 1):
        width = count_prefixes(spec, level)
        if width > best_count:
            best, best_count = level, width
    return best
