"""Vertex sets as Python integers.

A vertex set over [0, n) is an int with bit v set iff v is a member.  Python
ints give O(words) boolean algebra, arbitrary width and fast popcounts, which
is all the set calculus the library needs.
"""

from __future__ import annotations

from typing import Iterable, Iterator

VertexSet = int


def mask_of(vertices: Iterable[int]) -> VertexSet:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def bits_of(mask: VertexSet) -> Iterator[int]:
    """Yield members in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def members_of(mask: VertexSet) -> list[int]:
    return list(bits_of(mask))


def full_mask(n: int) -> VertexSet:
    return (1 << n) - 1


def popcount(mask: VertexSet) -> int:
    return mask.bit_count()


def is_subset(a: VertexSet, b: VertexSet) -> bool:
    return a & ~b == 0


def interval_mask(lo: int, hi: int) -> VertexSet:
    """Vertices lo..hi-1."""
    if hi <= lo:
        return 0
    return ((1 << (hi - lo)) - 1) << lo


def nth_member(mask: VertexSet, k: int) -> int:
    """k-th smallest member (0-indexed)."""
    for i, v in enumerate(bits_of(mask)):
        if i == k:
            return v
    raise IndexError(k)
