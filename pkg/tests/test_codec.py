"""graph6 encode/decode: identities, frozen strings, malformed input."""

import pytest
from hypothesis import given, settings, strategies as st

from regenum import DegreeSpec, Graph, Graph6ParseError, from_graph6, to_graph6
from regenum.generate import enumerate_graphs


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


class TestFrozenStrings:
    def test_k4(self):
        k4 = Graph.from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])
        assert to_graph6(k4) == "C~"
        assert from_graph6("C~") == k4

    def test_single_vertex(self):
        g = Graph.from_edges(1, [])
        assert to_graph6(g) == "@"
        assert from_graph6("@") == g

    def test_empty_graphs(self):
        for n in (2, 3, 5, 10):
            g = Graph.from_edges(n, [])
            enc = to_graph6(g)
            assert enc[0] == chr(n + 63)
            assert set(enc[1:]) <= {"?"}
            assert from_graph6(enc) == g

    def test_path2(self):
        g = Graph.from_edges(2, [(0, 1)])
        assert to_graph6(g) == "A_"


class TestRoundTrip:
    @pytest.mark.parametrize("n", [2, 3, 7, 13, 20, 40, 62])
    def test_cycles(self, n):
        assert from_graph6(to_graph6(cycle(n))) == cycle(n)

    def test_all_cubic_order8(self):
        seen = []

        def visit(g):
            assert from_graph6(to_graph6(g)) == g
            seen.append(to_graph6(g))

        total = enumerate_graphs(DegreeSpec(8, 3), visit)
        assert total == 5
        assert len(seen) == len(set(seen)) == 5

    @settings(max_examples=80, deadline=None)
    @given(st.data())
    def test_random_graphs(self, data):
        n = data.draw(st.integers(1, 62))
        pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
        if pairs:
            chosen = data.draw(st.sets(st.sampled_from(pairs), max_size=min(len(pairs), 60)))
        else:
            chosen = set()
        g = Graph.from_edges(n, sorted(chosen))
        enc = to_graph6(g)
        assert enc.isascii() and all(63 <= ord(c) <= 126 for c in enc)
        assert from_graph6(enc) == g

    def test_dense_boundary(self):
        g = Graph.from_edges(62, [(i, j) for i in range(62) for j in range(i + 1, 62)])
        assert from_graph6(to_graph6(g)) == g


class TestErrors:
    def test_empty_string(self):
        with pytest.raises(Graph6ParseError):
            from_graph6("")

    def test_bad_order_byte(self):
        with pytest.raises(Graph6ParseError) as exc:
            from_graph6("\x1f")
        assert exc.value.offset == 0

    def test_wrong_length(self):
        with pytest.raises(Graph6ParseError):
            from_graph6("C~~")
        with pytest.raises(Graph6ParseError):
            from_graph6("C")

    def test_char_out_of_range(self):
        bad = "C" + chr(30)
        with pytest.raises(Graph6ParseError) as exc:
            from_graph6(bad)
        assert exc.value.offset == 1

    def test_nonzero_padding_rejected(self):
        # order 2 needs 1 bit; the other 5 bits of the single body char
        # must be zero, so only "?" (000000) and "_" (100000) are legal
        assert from_graph6("A?").edge_count == 0
        assert from_graph6("A_").edge_count == 1
        for ch in "@ABCDEFG~":
            with pytest.raises(Graph6ParseError):
                from_graph6("A" + ch)

    def test_order_too_large_to_encode(self):
        big = Graph.from_edges(63, [(0, 1)])
        with pytest.raises(ValueError):
            to_graph6(big)
