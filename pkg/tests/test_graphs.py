"""Core graph types: construction, metrics, canonical forms.

Expected values here are frozen from independent computation: closed-form
path sums for the named small graphs, a brute-force n!-permutation minimum
as the canonical-form reference, and a Floyd-Warshall implementation as the
distance reference.
"""

import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from regenum import (
    DegenerateOrderError,
    DegreeSpec,
    DisconnectedError,
    Graph,
    InfeasibleSpecError,
    OrderMismatchError,
    all_pairs_distances,
    aspl,
    aspl_lower_bound,
    canonical_form,
    degree,
    diameter,
    is_connected,
    is_isomorphic,
)
from regenum.graphs import is_regular


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def petersen():
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    return Graph.from_edges(10, outer + inner + spokes)


def hypercube3():
    edges = [(a, b) for a in range(8) for b in range(a + 1, 8)
             if bin(a ^ b).count("1") == 1]
    return Graph.from_edges(8, edges)


def relabel(g, perm):
    return Graph.from_edges(g.n, [(perm[a], perm[b]) for a, b in g.edges()])


def graphs_strategy(min_n=2, max_n=8):
    def build(draw):
        n = draw(st.integers(min_n, max_n))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        return Graph.from_edges(n, [p for p, keep in zip(pairs, mask) if keep])
    return st.composite(build)()


# ---------------------------------------------------------------------------
# DegreeSpec

class TestDegreeSpec:
    def test_edge_count(self):
        assert DegreeSpec(10, 3).edge_count == 15
        assert DegreeSpec(14, 4).edge_count == 28

    @pytest.mark.parametrize("n,k", [(9, 3), (5, 5), (4, 5), (0, 0), (-1, 2), (3, -1)])
    def test_invalid_specs_rejected(self, n, k):
        with pytest.raises(InfeasibleSpecError):
            DegreeSpec(n, k)

    def test_valid_edge_cases(self):
        assert DegreeSpec(1, 0).edge_count == 0
        assert DegreeSpec(2, 1).edge_count == 1


# ---------------------------------------------------------------------------
# Graph construction

class TestGraph:
    def test_from_edges_roundtrip(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
        assert sorted(g.edges()) == [(0, 1), (0, 3), (1, 2), (2, 3)]
        assert g.edge_count == 4

    def test_duplicate_and_reversed_edges_collapse(self):
        g = Graph.from_edges(3, [(0, 1), (1, 0), (0, 1)])
        assert g.edge_count == 1

    def test_self_loop_rejected(self):
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(1, 1)])

    def test_out_of_range_rejected(self):
        with pytest.raises(ValueError):
            Graph.from_edges(3, [(0, 3)])

    def test_equality_and_hash(self):
        a = Graph.from_edges(4, [(0, 1), (2, 3)])
        b = Graph.from_edges(4, [(2, 3), (0, 1)])
        assert a == b and hash(a) == hash(b)
        assert a != Graph.from_edges(4, [(0, 1)])

    def test_degrees(self):
        g = petersen()
        assert [degree(g, v) for v in range(10)] == [3] * 10
        assert is_regular(g, 3)
        assert not is_regular(g, 4)


# ---------------------------------------------------------------------------
# connectivity and distances

def floyd_warshall(g):
    n = g.n
    inf = 10 ** 9
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for a, b in g.edges():
        d[a][b] = d[b][a] = 1
    for m in range(n):
        for i in range(n):
            for j in range(n):
                if d[i][m] + d[m][j] < d[i][j]:
                    d[i][j] = d[i][m] + d[m][j]
    return d


class TestDistances:
    def test_connected(self):
        assert is_connected(cycle(6))
        assert not is_connected(Graph.from_edges(4, [(0, 1), (2, 3)]))
        assert is_connected(Graph.from_edges(1, []))

    def test_distance_matrix_matches_reference(self):
        for g in [cycle(7), petersen(), hypercube3(), complete(5),
                  Graph.from_edges(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)])]:
            assert all_pairs_distances(g).tolist() == floyd_warshall(g)

    def test_disconnected_raises(self):
        with pytest.raises(DisconnectedError):
            all_pairs_distances(Graph.from_edges(4, [(0, 1), (2, 3)]))
        with pytest.raises(DisconnectedError):
            aspl(Graph.from_edges(2, []))

    def test_aspl_frozen_values(self):
        assert aspl(complete(4)) == Fraction(1)
        assert aspl(cycle(5)) == Fraction(3, 2)
        assert aspl(cycle(6)) == Fraction(9, 5)
        assert aspl(petersen()) == Fraction(5, 3)
        assert aspl(hypercube3()) == Fraction(12, 7)

    def test_diameter_frozen_values(self):
        assert diameter(complete(4)) == 1
        assert diameter(cycle(6)) == 3
        assert diameter(petersen()) == 2
        assert diameter(hypercube3()) == 3

    def test_single_vertex_aspl_degenerate(self):
        with pytest.raises(DegenerateOrderError):
            aspl(Graph.from_edges(1, []))


class TestLowerBound:
    def test_frozen_values(self):
        assert aspl_lower_bound(DegreeSpec(10, 3)) == Fraction(5, 3)
        assert aspl_lower_bound(DegreeSpec(14, 4)) == Fraction(22, 13)
        assert aspl_lower_bound(DegreeSpec(16, 4)) == Fraction(26, 15)
        assert aspl_lower_bound(DegreeSpec(4, 3)) == Fraction(1)

    def test_bound_reached_by_moore_graphs(self):
        assert aspl(petersen()) == aspl_lower_bound(DegreeSpec(10, 3))
        assert aspl(complete(5)) == aspl_lower_bound(DegreeSpec(5, 4))

    def test_bound_below_cycle_aspl(self):
        assert aspl_lower_bound(DegreeSpec(6, 2)) <= aspl(cycle(6))

    def test_degenerate(self):
        with pytest.raises(DegenerateOrderError):
            aspl_lower_bound(DegreeSpec(1, 0))


# ---------------------------------------------------------------------------
# canonical forms

def brute_canonical(g):
    """Reference: lexicographic minimum over all n! relabelings of the
    row-major upper-triangle bitstring, packed like canonical_form."""
    n = g.n
    adj = [[0] * n for _ in range(n)]
    for a, b in g.edges():
        adj[a][b] = adj[b][a] = 1
    best = None
    for perm in itertools.permutations(range(n)):
        bits = []
        for i in range(n):
            for j in range(i + 1, n):
                bits.append(adj[perm[i]][perm[j]])
        if best is None or bits < best:
            best = bits
    packed = bytearray([n])
    acc, filled = 0, 0
    for bit in best:
        acc = (acc << 1) | bit
        filled += 1
        if filled == 8:
            packed.append(acc)
            acc, filled = 0, 0
    if filled:
        packed.append(acc << (8 - filled))
    return bytes(packed)


class TestCanonicalForm:
    @pytest.mark.parametrize("g", [
        complete(4), cycle(5), cycle(6), hypercube3(),
        Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]),
        Graph.from_edges(6, [(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]),
        Graph.from_edges(4, []),
        Graph.from_edges(1, []),
    ], ids=["K4", "C5", "C6", "Q3", "P5", "star6", "empty4", "single"])
    def test_matches_permutation_minimum(self, g):
        if g.n <= 7:
            assert canonical_form(g) == brute_canonical(g)

    def test_exhaustive_small_orders(self):
        for n in (2, 3, 4):
            pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
            for bits in itertools.product((0, 1), repeat=len(pairs)):
                g = Graph.from_edges(n, [p for p, b in zip(pairs, bits) if b])
                assert canonical_form(g) == brute_canonical(g)

    def test_invariant_under_relabeling(self):
        g = petersen()
        rng = np.random.default_rng(7)
        for _ in range(20):
            perm = list(rng.permutation(10))
            assert canonical_form(relabel(g, perm)) == canonical_form(g)

    @settings(max_examples=60, deadline=None)
    @given(graphs_strategy(), st.randoms(use_true_random=False))
    def test_relabeling_invariance_random(self, g, rnd):
        perm = list(range(g.n))
        rnd.shuffle(perm)
        h = relabel(g, perm)
        assert canonical_form(h) == canonical_form(g)
        assert is_isomorphic(g, h)


class TestIsomorphism:
    def test_petersen_drawings(self):
        # standard drawing vs the Kneser-graph construction
        labels = list(itertools.combinations(range(5), 2))
        edges = [(i, j) for i in range(10) for j in range(i + 1, 10)
                 if not set(labels[i]) & set(labels[j])]
        kneser = Graph.from_edges(10, edges)
        assert is_isomorphic(petersen(), kneser)

    def test_distinguishes_same_degree_sequence(self):
        # C6 and 2xC3 are both 2-regular on 6 vertices
        two_triangles = Graph.from_edges(
            6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
        assert not is_isomorphic(cycle(6), two_triangles)
        assert canonical_form(cycle(6)) != canonical_form(two_triangles)

    def test_order_mismatch(self):
        with pytest.raises(OrderMismatchError):
            is_isomorphic(cycle(5), cycle(6))

    @settings(max_examples=40, deadline=None)
    @given(graphs_strategy(2, 7))
    def test_canonical_form_agrees_with_isomorphism(self, g):
        flipped = relabel(g, list(reversed(range(g.n))))
        assert is_isomorphic(g, flipped)
        assert canonical_form(g) == canonical_form(flipped)
