"""Filter pipeline for topology search: diameter cap, minimum-ASPL tracking.

A FilterSpec travels with the job; every enumerated graph flows through
apply_filter (or the batch equivalent) into a SearchResult. Partial results
from different tasks merge exactly: counts add, the best ASPL is an exact
rational minimum, and champion lists concatenate in task order on ties, so
the outcome is independent of how work was scheduled.

ASPL comparisons inside the hot loop are integer-only: all graphs of one job
share the denominator n*(n-1), so comparing distance sums suffices.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import _kernels
from .codec import encode_rows, to_graph6
from .errors import JobMismatchError, MissingDataError
from .graphs import DegreeSpec, Graph, aspl_lower_bound, diameter as graph_diameter


@dataclass(frozen=True)
class FilterSpec:
    """What to keep while enumerating.

    max_diameter: drop graphs whose diameter exceeds the cap (None = keep all)
    track_min_aspl: maintain the running minimum ASPL and its champions
    champion_limit: how many champion graphs to retain (0 with tracking off)
    """

    max_diameter: Optional[int] = None
    track_min_aspl: bool = False
    champion_limit: int = 0

    def __post_init__(self):
        if self.champion_limit < 0:
            raise ValueError("champion_limit must be nonnegative")
        if not self.track_min_aspl and self.champion_limit != 0:
            raise ValueError("champion_limit requires track_min_aspl")
        if self.max_diameter is not None and self.max_diameter < 1:
            raise ValueError("max_diameter must be at least 1")

    @property
    def inert(self) -> bool:
        """True when the filter neither drops nor tracks anything."""
        return self.max_diameter is None and not self.track_min_aspl

    def digest(self) -> str:
        """Stable short identity used in checkpoint headers."""
        text = f"d={self.max_diameter};a={int(self.track_min_aspl)};c={self.champion_limit}"
        return hashlib.sha256(text.encode()).hexdigest()[:12]


@dataclass
class SearchResult:
    """Mergeable accumulator of one enumeration under one filter.

    total_count counts graphs that passed the diameter cap; raw_count counts
    accepted leaves before filtering (None when the run happened on remote
    workers, whose result frames carry only the filtered count).
    champion_count counts every graph attaining best_aspl, even beyond
    champion_limit; champions holds at most champion_limit graph6 strings in
    generation/task order.
    """

    spec: DegreeSpec
    filter: FilterSpec
    total_count: int = 0
    raw_count: Optional[int] = 0
    best_aspl: Optional[Fraction] = None
    champions: list[str] = field(default_factory=list)
    champion_count: int = 0
    tasks_done: int = 0
    per_task_counts: Optional[dict[int, int]] = None

    def check_invariants(self) -> None:
        """Belt-and-braces checks used by tests."""
        if self.best_aspl is not None:
            assert self.best_aspl >= aspl_lower_bound(self.spec)
            assert len(self.champions) <= max(self.filter.champion_limit, 0)
            assert self.champion_count >= len(self.champions)


def empty_result(spec: DegreeSpec, f: FilterSpec) -> SearchResult:
    return SearchResult(spec=spec, filter=f)


def apply_filter(state: SearchResult, g: Graph, f: Optional[FilterSpec] = None) -> SearchResult:
    """Fold one accepted graph into the running result; returns state."""
    if f is None:
        f = state.filter
    elif f != state.filter:
        raise JobMismatchError("filter differs from the result's filter")
    if state.raw_count is not None:
        state.raw_count += 1
    if f.max_diameter is not None and graph_diameter(g) > f.max_diameter:
        return state
    state.total_count += 1
    if not f.track_min_aspl:
        return state
    n = g.n
    total = 0
    for s in range(n):
        # distance sum from s; accepted graphs are connected
        seen = 1 << s
        frontier = seen
        d = 0
        while frontier:
            d += 1
            nxt = 0
            m = frontier
            while m:
                v = (m & -m).bit_length() - 1
                m &= m - 1
                nxt |= g.rows[v]
            frontier = nxt & ~seen
            seen |= frontier
            total += d * frontier.bit_count()
    _note_candidate(state, total, lambda: to_graph6(g))
    return state


def _note_candidate(state: SearchResult, dist_sum: int, encode) -> None:
    """Update best/champions given one surviving graph's distance sum."""
    n = state.spec.n
    cand = Fraction(dist_sum, n * (n - 1))
    if state.best_aspl is None or cand < state.best_aspl:
        state.best_aspl = cand
        state.champion_count = 1
        state.champions = [encode()] if state.filter.champion_limit > 0 else []
    elif cand == state.best_aspl:
        state.champion_count += 1
        if len(state.champions) < state.filter.champion_limit:
            state.champions.append(encode())


def accumulate_rows(state: SearchResult, rows_flat: np.ndarray, count: int) -> None:
    """Fold `count` collected graphs (flat uint64 bitset rows) into state.

    Batch form of apply_filter for the kernel-collected representation;
    distance work runs compiled.
    """
    if state.raw_count is not None:
        state.raw_count += count
    if count == 0:
        return
    f = state.filter
    if f.inert:
        state.total_count += count
        return
    n = state.spec.n
    stats = np.empty((count, 3), dtype=np.int64)
    _kernels.distance_stats(rows_flat, count, n, stats)
    cap = f.max_diameter
    for i in range(count):
        if cap is not None and stats[i, 1] > cap:
            continue
        state.total_count += 1
        if f.track_min_aspl:
            base = i * n
            _note_candidate(
                state, int(stats[i, 0]),
                lambda b=base: encode_rows(rows_flat[b:b + n], n))


def merge(a: SearchResult, b: SearchResult) -> SearchResult:
    """Combine two partial results of the same job.

    Associative, and commutative up to champion ordering; merging partials
    in ascending task order makes champion lists fully deterministic.
    """
    if a.spec != b.spec or a.filter != b.filter:
        raise JobMismatchError("cannot merge results from different jobs")
    out = SearchResult(spec=a.spec, filter=a.filter)
    out.total_count = a.total_count + b.total_count
    out.raw_count = (None if a.raw_count is None or b.raw_count is None
                     else a.raw_count + b.raw_count)
    out.tasks_done = a.tasks_done + b.tasks_done
    if a.per_task_counts is not None or b.per_task_counts is not None:
        out.per_task_counts = {**(a.per_task_counts or {}), **(b.per_task_counts or {})}
    limit = a.filter.champion_limit
    if a.best_aspl is None and b.best_aspl is None:
        pass
    elif b.best_aspl is None or (a.best_aspl is not None and a.best_aspl < b.best_aspl):
        out.best_aspl = a.best_aspl
        out.champions = list(a.champions)
        out.champion_count = a.champion_count
    elif a.best_aspl is None or b.best_aspl < a.best_aspl:
        out.best_aspl = b.best_aspl
        out.champions = list(b.champions)
        out.champion_count = b.champion_count
    else:
        out.best_aspl = a.best_aspl
        out.champions = (list(a.champions) + list(b.champions))[:limit]
        out.champion_count = a.champion_count + b.champion_count
    return out


def emit_task_histogram(result: SearchResult) -> list[tuple[int, int, int]]:
    """Log-spaced (bucket_lo, bucket_hi, frequency) rows of graphs per task.

    Buckets are (0,0), (1,1), (2,3), (4,7), ... doubling, since per-task
    counts span several orders of magnitude at useful split levels.
    """
    if result.per_task_counts is None:
        raise MissingDataError("per-task counts were not collected for this run")
    counts = list(result.per_task_counts.values())
    if not counts:
        return [(0, 0, 0)]
    peak = max(counts)
    rows = [(0, 0, 0)]
    lo = 1
    while lo <= peak:
        rows.append((lo, 2 * lo - 1, 0))
        lo *= 2
    freqs = [0] * len(rows)
    for c in counts:
        if c == 0:
            freqs[0] += 1
        else:
            freqs[c.bit_length()] += 1
    return [(lo, hi, fr) for (lo, hi, _), fr in zip(rows, freqs)]
