"""Compiled inner loops: orderly generation, canonical-form search, oracles.

Adjacency lives in uint64 bitmask rows (bit j of row i = edge {i,j}), so the
whole enumeration runs on shifts and popcounts. Everything here is njit'd
with nogil so scheduler threads overlap, and cached so the compile cost is
paid once per machine.

Conventions shared with the pure-Python layer:
  - a graph's "form" is the upper triangle of its adjacency matrix read
    row-major; row t is held as an integer whose bit for column c has weight
    2^(n-1-c), so integer comparison of rows = lexicographic comparison of
    the bit string;
  - the generator always extends the lowest-index unsaturated vertex,
    partners ascending, which makes rows finalize in index order: when
    vertex v saturates, rows 0..v can never change again. That is what lets
    the canonicity test run on interior nodes of the search tree.
"""

from __future__ import annotations

import numpy as np
from numba import int64, njit, uint64

ALL1 = np.uint64(0xFFFFFFFFFFFFFFFF)
M1 = np.uint64(0x5555555555555555)
M2 = np.uint64(0x3333333333333333)
M4 = np.uint64(0x0F0F0F0F0F0F0F0F)
M8 = np.uint64(0x00FF00FF00FF00FF)
M16 = np.uint64(0x0000FFFF0000FFFF)


@njit(cache=True, nogil=True, inline="always")
def _pc(x):
    """Population count of a 64-bit word, as int64."""
    x = x - ((x >> uint64(1)) & M1)
    x = (x & M2) + ((x >> uint64(2)) & M2)
    x = (x + (x >> uint64(4))) & M4
    return int64((x * uint64(0x0101010101010101)) >> uint64(56))


@njit(cache=True, nogil=True, inline="always")
def _ctz(x):
    """Index of the lowest set bit (undefined on zero)."""
    return _pc((x & (~x + uint64(1))) - uint64(1))


@njit(cache=True, nogil=True, inline="always")
def _rev_top(x, n):
    """Reverse the low n bits of x (bit c -> bit n-1-c)."""
    x = ((x & M1) << uint64(1)) | ((x >> uint64(1)) & M1)
    x = ((x & M2) << uint64(2)) | ((x >> uint64(2)) & M2)
    x = ((x & M4) << uint64(4)) | ((x >> uint64(4)) & M4)
    x = ((x & M8) << uint64(8)) | ((x >> uint64(8)) & M8)
    x = ((x & M16) << uint64(16)) | ((x >> uint64(16)) & M16)
    x = ((x << uint64(32)) | (x >> uint64(32))) & ALL1
    return x >> uint64(64 - n)


@njit(cache=True, nogil=True, inline="always")
def _reach(adj, v, full):
    """Bitmask of vertices reachable from v."""
    seen = uint64(1) << uint64(v)
    frontier = seen
    while frontier != uint64(0):
        nxt = uint64(0)
        mm = frontier
        while mm != uint64(0):
            u = _ctz(mm)
            mm &= mm - uint64(1)
            nxt |= adj[u]
        frontier = nxt & ~seen
        seen |= frontier
        if seen == full:
            break
    return seen


@njit(cache=True, nogil=True)
def _beats_form(adj, n, sat, max_row, own, cells, ncells, cand, tried, ntried):
    """1 iff some relabeling makes rows 0..max_row smaller than the identity's.

    Placements are built position by position. The invariant maintained by
    the cell partition: permutations that keep every compared row so far
    tied are exactly those that keep each cell's members inside its column
    block, so position t must be filled from the first cell. Row t's least
    achievable value with x at position t puts x's neighbors at the tail of
    each block. Strictly smaller row -> reject; larger -> next candidate;
    tie -> refine (non-neighbors of x ahead of neighbors) and go deeper.

    Only vertices in `sat` may be placed: their adjacency rows are final, so
    every compared bit is determined even on a partial graph. Candidates y
    with a placed twin x (transposing x,y is an automorphism) are skipped.
    """
    full = ALL1 >> uint64(64 - n)
    for t in range(max_row + 1):
        own[t] = _rev_top(adj[t], n) & ((uint64(1) << uint64(n - 1 - t)) - uint64(1))
    cells[0, 0] = full
    ncells[0] = 1
    cand[0] = full & sat
    ntried[0] = 0
    t = 0
    while t >= 0:
        moved = False
        while cand[t] != uint64(0):
            xbit = cand[t] & (~cand[t] + uint64(1))
            x = _ctz(xbit)
            cand[t] = cand[t] & (cand[t] - uint64(1))
            ax = adj[x]
            dup = False
            for r in range(ntried[t]):
                y = tried[t, r]
                pairm = ~(xbit | (uint64(1) << uint64(y)))
                if (ax & pairm) == (adj[y] & pairm):
                    dup = True
                    break
            if dup:
                continue
            tried[t, ntried[t]] = x
            ntried[t] += 1
            val = uint64(0)
            col = t + 1
            for i in range(ncells[t]):
                cm = cells[t, i]
                if i == 0:
                    cm = cm & ~xbit
                sz = _pc(cm)
                if sz == 0:
                    continue
                a = _pc(cm & ax)
                if a > 0:
                    val |= ((uint64(1) << uint64(a)) - uint64(1)) << uint64(n - col - sz)
                col += sz
            if val < own[t]:
                return int64(1)
            if val > own[t]:
                continue
            if t == max_row:
                continue
            nc = 0
            for i in range(ncells[t]):
                cm = cells[t, i]
                if i == 0:
                    cm = cm & ~xbit
                non = cm & ~ax
                nei = cm & ax
                if non != uint64(0):
                    cells[t + 1, nc] = non
                    nc += 1
                if nei != uint64(0):
                    cells[t + 1, nc] = nei
                    nc += 1
            ncells[t + 1] = nc
            cand[t + 1] = cells[t + 1, 0] & sat
            ntried[t + 1] = 0
            t += 1
            moved = True
            break
        if not moved:
            t -= 1
    return int64(0)


@njit(cache=True, nogil=True)
def _min_form_into(adj, n, best, cells, ncells, cand, tried, ntried):
    """Fill best[0..n-2] with the lexicographically smallest form rows.

    Same search as _beats_form but minimizing against a running best instead
    of testing a fixed target; works on any graph, not just regular ones.
    """
    for t in range(n):
        best[t] = ALL1
    if n == 1:
        best[0] = uint64(0)
        return
    full = ALL1 >> uint64(64 - n)
    last = n - 2
    cells[0, 0] = full
    ncells[0] = 1
    cand[0] = full
    ntried[0] = 0
    t = 0
    while t >= 0:
        moved = False
        while cand[t] != uint64(0):
            xbit = cand[t] & (~cand[t] + uint64(1))
            x = _ctz(xbit)
            cand[t] = cand[t] & (cand[t] - uint64(1))
            ax = adj[x]
            dup = False
            for r in range(ntried[t]):
                y = tried[t, r]
                pairm = ~(xbit | (uint64(1) << uint64(y)))
                if (ax & pairm) == (adj[y] & pairm):
                    dup = True
                    break
            if dup:
                continue
            tried[t, ntried[t]] = x
            ntried[t] += 1
            val = uint64(0)
            col = t + 1
            for i in range(ncells[t]):
                cm = cells[t, i]
                if i == 0:
                    cm = cm & ~xbit
                sz = _pc(cm)
                if sz == 0:
                    continue
                a = _pc(cm & ax)
                if a > 0:
                    val |= ((uint64(1) << uint64(a)) - uint64(1)) << uint64(n - col - sz)
                col += sz
            if val > best[t]:
                continue
            if val < best[t]:
                best[t] = val
                for s in range(t + 1, last + 1):
                    best[s] = ALL1
            if t == last:
                continue
            nc = 0
            for i in range(ncells[t]):
                cm = cells[t, i]
                if i == 0:
                    cm = cm & ~xbit
                non = cm & ~ax
                nei = cm & ax
                if non != uint64(0):
                    cells[t + 1, nc] = non
                    nc += 1
                if nei != uint64(0):
                    cells[t + 1, nc] = nei
                    nc += 1
            ncells[t + 1] = nc
            cand[t + 1] = cells[t + 1, 0]
            ntried[t + 1] = 0
            t += 1
            moved = True
            break
        if not moved:
            t -= 1


@njit(cache=True, nogil=True)
def min_form_rows(adj, n):
    """Lex-min form rows of an arbitrary graph (row t weighted 2^(n-1-c))."""
    best = np.empty(max(n, 1), dtype=np.uint64)
    cells = np.empty((n + 1, n), dtype=np.uint64)
    ncells = np.empty(n + 1, dtype=np.int64)
    cand = np.empty(n + 1, dtype=np.uint64)
    tried = np.empty((n + 1, n), dtype=np.int64)
    ntried = np.empty(n + 1, dtype=np.int64)
    _min_form_into(adj, n, best, cells, ncells, cand, tried, ntried)
    return best


@njit(cache=True, nogil=True, inline="always")
def _pack_rows(best, n):
    """Concatenate form rows into one integer (fits n <= 10: 45 bits)."""
    acc = int64(0)
    for t in range(n - 1):
        acc = (acc << int64(n - 1 - t)) | int64(best[t])
    return acc


@njit(cache=True, nogil=True)
def enumerate_kernel(n, k, split_level, task_lo, task_hi, collect_cap,
                     out_rows, out_task, task_counts,
                     prefix_mode, prefix_cap, out_prefix):
    """Depth-first orderly generation of connected k-regular graphs.

    Returns (accepted, stored, split_nodes_seen).

    split_level < 0 runs monolithically. Otherwise nodes at edge-depth
    split_level get ordinals 0,1,2,... in traversal order; with prefix_mode
    the walk records each such node's edge list into out_prefix (up to
    prefix_cap) and never descends, else it descends only into ordinals in
    [task_lo, task_hi) and returns early once the range is exhausted.
    Pruning below is identical in every mode, which is what keeps ordinals
    stable between prefix listing, task execution and monolithic runs.

    Accepted leaves are counted; the first collect_cap of them have their
    adjacency rows appended to out_rows (n words each) and, when out_task is
    non-empty, their task ordinal recorded. task_counts (when non-empty) is
    indexed by ordinal and incremented per accepted leaf.

    Prunes, each argued in the package docs: forced row 0 (partners of
    vertex 0 are exactly n-k..n-1 in any lex-min labeling); partner-count
    feasibility; dead-component closure (a full component with no
    unsaturated vertex can never rejoin the rest); prefix canonicity at
    every saturation of the extending vertex; full canonicity plus
    connectivity at leaves.
    """
    m = n * k // 2
    full = ALL1 >> uint64(64 - n)
    adj = np.zeros(n, dtype=np.uint64)
    deg = np.zeros(n, dtype=np.int64)
    ev = np.zeros(m + 1, dtype=np.int64)
    ew = np.zeros(m + 1, dtype=np.int64)
    cursor = np.zeros(m + 1, dtype=np.int64)
    extv = np.zeros(m + 1, dtype=np.int64)
    own = np.empty(max(n, 1), dtype=np.uint64)
    cells = np.empty((n + 1, n), dtype=np.uint64)
    ncells = np.empty(n + 1, dtype=np.int64)
    cand = np.empty(n + 1, dtype=np.uint64)
    tried = np.empty((n + 1, n), dtype=np.int64)
    ntried = np.empty(n + 1, dtype=np.int64)
    accepted = int64(0)
    stored = int64(0)
    seen_nodes = int64(0)
    cur_task = int64(-1)
    sl = split_level
    if sl == 0:
        # the root is the one and only prefix
        if prefix_mode != 0:
            return int64(0), int64(0), int64(1)
        if task_lo > 0 or task_hi < 1:
            return int64(0), int64(0), int64(1)
        cur_task = int64(0)
        seen_nodes = int64(1)
        sl = -1
    unsat = full
    d = 0
    extv[0] = 0
    cursor[0] = n - k
    while d >= 0:
        v = extv[d]
        w = cursor[d]
        found = int64(-1)
        if v == 0:
            # row 0 forced: next partner of vertex 0 is exactly n-k+deg[0]
            want = n - k + deg[0]
            if w <= want:
                found = want
                cursor[d] = n
        else:
            need = k - deg[v]
            while w < n:
                if deg[w] < k:
                    avail = _pc(unsat & (ALL1 << uint64(w)))
                    if avail < need:
                        break
                    found = w
                    cursor[d] = w + 1
                    break
                w += 1
        if found < 0:
            d -= 1
            if d >= 0:
                a = ev[d]
                b = ew[d]
                ba = uint64(1) << uint64(a)
                bb = uint64(1) << uint64(b)
                if deg[a] == k:
                    unsat |= ba
                if deg[b] == k:
                    unsat |= bb
                deg[a] -= 1
                deg[b] -= 1
                adj[a] = adj[a] & ~bb
                adj[b] = adj[b] & ~ba
            continue
        w = found
        ev[d] = v
        ew[d] = w
        bv = uint64(1) << uint64(v)
        bw = uint64(1) << uint64(w)
        adj[v] |= bw
        adj[w] |= bv
        deg[v] += 1
        deg[w] += 1
        if deg[w] == k:
            unsat = unsat & ~bw
        if deg[v] == k:
            unsat = unsat & ~bv
        nd = d + 1
        is_leaf = nd == m
        keep = True
        if deg[v] == k:
            compv = _reach(adj, v, full)
            if compv != full and (compv & unsat) == uint64(0):
                keep = False
            elif is_leaf:
                if compv != full:
                    keep = False
                elif _beats_form(adj, n, full, n - 2, own, cells, ncells,
                                 cand, tried, ntried) != 0:
                    keep = False
            else:
                sat = full & ~unsat
                if _beats_form(adj, n, sat, v, own, cells, ncells,
                               cand, tried, ntried) != 0:
                    keep = False
        if keep and sl >= 0 and nd == sl:
            my_ord = seen_nodes
            seen_nodes += 1
            if prefix_mode != 0:
                if my_ord < prefix_cap:
                    base = my_ord * 2 * sl
                    for e in range(sl):
                        out_prefix[base + 2 * e] = ev[e]
                        out_prefix[base + 2 * e + 1] = ew[e]
                keep = False
            elif my_ord >= task_hi:
                # ordinals only grow from here; the range is exhausted
                return accepted, stored, seen_nodes
            elif my_ord < task_lo:
                keep = False
            else:
                cur_task = my_ord
        if keep and is_leaf:
            accepted += 1
            if stored < collect_cap:
                base = stored * n
                for i in range(n):
                    out_rows[base + i] = adj[i]
                if out_task.shape[0] > 0:
                    out_task[stored] = cur_task
                stored += 1
            if task_counts.shape[0] > 0 and 0 <= cur_task < task_counts.shape[0]:
                task_counts[cur_task] += 1
            keep = False
        if keep:
            if deg[v] < k:
                extv[nd] = v
                cursor[nd] = w + 1
            else:
                nv = _ctz(unsat)
                extv[nd] = nv
                cursor[nd] = nv + 1
            d = nd
        else:
            if deg[v] == k:
                unsat |= bv
            if deg[w] == k:
                unsat |= bw
            deg[v] -= 1
            deg[w] -= 1
            adj[v] = adj[v] & ~bw
            adj[w] = adj[w] & ~bv
    return accepted, stored, seen_nodes


@njit(cache=True, nogil=True)
def oracle_collect(n, k, gauge, out_forms):
    """Reference counter: plain labeled enumeration, no canonicity pruning.

    Walks every labeled k-regular graph (lowest unsaturated vertex, partners
    ascending, degree-feasibility prune only), and for each connected one
    packs its canonical form into out_forms. Returns (connected labeled
    count, forms stored). With gauge=1 vertex 0's partners are fixed to the
    top k indices, which every isomorphism class can realize, so the class
    inventory (the set of distinct forms) is unchanged while the walk
    shrinks by a factor near C(n-1, k).
    """
    m = n * k // 2
    full = ALL1 >> uint64(64 - n)
    adj = np.zeros(n, dtype=np.uint64)
    deg = np.zeros(n, dtype=np.int64)
    ev = np.zeros(m + 1, dtype=np.int64)
    ew = np.zeros(m + 1, dtype=np.int64)
    cursor = np.zeros(m + 1, dtype=np.int64)
    extv = np.zeros(m + 1, dtype=np.int64)
    best = np.empty(max(n, 1), dtype=np.uint64)
    cells = np.empty((n + 1, n), dtype=np.uint64)
    ncells = np.empty(n + 1, dtype=np.int64)
    cand = np.empty(n + 1, dtype=np.uint64)
    tried = np.empty((n + 1, n), dtype=np.int64)
    ntried = np.empty(n + 1, dtype=np.int64)
    count = int64(0)
    stored = int64(0)
    unsat = full
    d = 0
    extv[0] = 0
    cursor[0] = n - k if gauge != 0 else 1
    while d >= 0:
        v = extv[d]
        w = cursor[d]
        found = int64(-1)
        if gauge != 0 and v == 0:
            want = n - k + deg[0]
            if w <= want:
                found = want
                cursor[d] = n
        else:
            need = k - deg[v]
            while w < n:
                if deg[w] < k:
                    avail = _pc(unsat & (ALL1 << uint64(w)))
                    if avail < need:
                        break
                    found = w
                    cursor[d] = w + 1
                    break
                w += 1
        if found < 0:
            d -= 1
            if d >= 0:
                a = ev[d]
                b = ew[d]
                ba = uint64(1) << uint64(a)
                bb = uint64(1) << uint64(b)
                if deg[a] == k:
                    unsat |= ba
                if deg[b] == k:
                    unsat |= bb
                deg[a] -= 1
                deg[b] -= 1
                adj[a] = adj[a] & ~bb
                adj[b] = adj[b] & ~ba
            continue
        w = found
        ev[d] = v
        ew[d] = w
        bv = uint64(1) << uint64(v)
        bw = uint64(1) << uint64(w)
        adj[v] |= bw
        adj[w] |= bv
        deg[v] += 1
        deg[w] += 1
        if deg[w] == k:
            unsat = unsat & ~bw
        if deg[v] == k:
            unsat = unsat & ~bv
        nd = d + 1
        if nd == m:
            if _reach(adj, 0, full) == full:
                count += 1
                if stored < out_forms.shape[0]:
                    _min_form_into(adj, n, best, cells, ncells, cand, tried, ntried)
                    out_forms[stored] = _pack_rows(best, n)
                    stored += 1
            if deg[v] == k:
                unsat |= bv
            if deg[w] == k:
                unsat |= bw
            deg[v] -= 1
            deg[w] -= 1
            adj[v] = adj[v] & ~bw
            adj[w] = adj[w] & ~bv
        else:
            if deg[v] < k:
                extv[nd] = v
                cursor[nd] = w + 1
            else:
                nv = _ctz(unsat)
                extv[nd] = nv
                cursor[nd] = nv + 1
            d = nd
    return count, stored


@njit(cache=True, nogil=True)
def distance_stats(rows_flat, count, n, out):
    """Per-graph [distance sum over ordered pairs, diameter, connected flag].

    rows_flat holds `count` graphs of n uint64 rows each; out is (count, 3).
    """
    full = ALL1 >> uint64(64 - n)
    for gidx in range(count):
        base = gidx * n
        total = int64(0)
        diam = int64(0)
        ok = int64(1)
        for s in range(n):
            seen = uint64(1) << uint64(s)
            frontier = seen
            dd = int64(0)
            while frontier != uint64(0) and seen != full:
                dd += 1
                nxt = uint64(0)
                mm = frontier
                while mm != uint64(0):
                    u = _ctz(mm)
                    mm &= mm - uint64(1)
                    nxt |= rows_flat[base + u]
                frontier = nxt & ~seen
                seen |= frontier
                c = _pc(frontier)
                total += dd * c
                if c > 0 and dd > diam:
                    diam = dd
            if seen != full:
                ok = int64(0)
                break
        out[gidx, 0] = total
        out[gidx, 1] = diam
        out[gidx, 2] = ok
