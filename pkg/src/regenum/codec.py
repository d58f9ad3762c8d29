"""graph6 serialization (headerless short form).

Layout: one order byte (n + 63), then the upper triangle of the adjacency
matrix read column by column (bit (i,j) for j = 1..n-1, i = 0..j-1), packed
big-endian into 6-bit groups, each offset by 63 into printable ASCII. The
final group is zero-padded.

Encoding works column-at-a-time on the bitset rows (a 64-bit reversal per
column) rather than bit-at-a-time, since the enumeration paths push six-digit
graph counts through this codec.
"""

from __future__ import annotations

from .errors import Graph6ParseError
from .graphs import Graph

_SHORT_MAX = 62

_M1 = 0x5555555555555555
_M2 = 0x3333333333333333
_M4 = 0x0F0F0F0F0F0F0F0F
_M8 = 0x00FF00FF00FF00FF
_M16 = 0x0000FFFF0000FFFF


def _rev64(x: int) -> int:
    """Reverse the 64 low bits of x."""
    x = ((x & _M1) << 1) | ((x >> 1) & _M1)
    x = ((x & _M2) << 2) | ((x >> 2) & _M2)
    x = ((x & _M4) << 4) | ((x >> 4) & _M4)
    x = ((x & _M8) << 8) | ((x >> 8) & _M8)
    x = ((x & _M16) << 16) | ((x >> 16) & _M16)
    return ((x << 32) | (x >> 32)) & 0xFFFFFFFFFFFFFFFF


def encode_rows(rows, n: int) -> str:
    """graph6 text for n adjacency bitmask rows (any int-like sequence)."""
    if n > _SHORT_MAX:
        raise ValueError(f"short-form graph6 encodes at most {_SHORT_MAX} vertices, got {n}")
    acc = 0
    nbits = 0
    for j in range(1, n):
        # column j holds bits (0,j)..(j-1,j), vertex 0 first = most significant
        col = int(rows[j]) & ((1 << j) - 1)
        acc = (acc << j) | (_rev64(col) >> (64 - j))
        nbits += j
    pad = (-nbits) % 6
    acc <<= pad
    total = nbits + pad
    out = [chr(n + 63)]
    for shift in range(total - 6, -1, -6):
        out.append(chr((acc >> shift & 63) + 63))
    return "".join(out)


def to_graph6(g: Graph) -> str:
    return encode_rows(g.rows, g.n)


def from_graph6(text: str | bytes) -> Graph:
    if isinstance(text, str):
        data = text.encode("ascii", errors="replace")
    else:
        data = bytes(text)
    data = data.rstrip(b"\n")
    if not data:
        raise Graph6ParseError("empty graph6 string", 0)
    n = data[0] - 63
    if not (1 <= n <= _SHORT_MAX):
        raise Graph6ParseError(f"order byte {data[0]!r} outside the short form", 0)
    nbits = n * (n - 1) // 2
    expect = 1 + (nbits + 5) // 6
    if len(data) < expect:
        raise Graph6ParseError(
            f"truncated bit field: need {expect} bytes, got {len(data)}", len(data)
        )
    if len(data) > expect:
        raise Graph6ParseError(f"trailing data after byte {expect}", expect)
    acc = 0
    for off in range(1, expect):
        byte = data[off]
        if not (63 <= byte <= 126):
            raise Graph6ParseError(f"illegal character {chr(byte)!r}", off)
        acc = (acc << 6) | (byte - 63)
    pad = 6 * (expect - 1) - nbits
    if acc & ((1 << pad) - 1):
        raise Graph6ParseError("nonzero padding bits", expect - 1)
    acc >>= pad
    rows = [0] * n
    consumed = 0
    for j in range(n - 1, 0, -1):
        # low j bits of the remaining accumulator are column j, vertex j-1 first
        col = _rev64(acc & ((1 << j) - 1)) >> (64 - j)
        acc >>= j
        rows[j] |= col
        m = col
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            rows[i] |= 1 << j
        consumed += j
    return Graph._from_trusted_rows(n, tuple(rows))
