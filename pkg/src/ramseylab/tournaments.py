"""Tournaments with bit-packed adjacency, median orders and interval densities.

Rows are Python ints: bit v of out_row(u) is set iff u beats v.  Hosts up to
a few tens of thousands of vertices fit comfortably; generation and the local
median-order search use numpy underneath.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

import numpy as np

from .bitset import VertexSet, bits_of, full_mask, interval_mask, mask_of
from .errors import FormatError, HypothesisViolation, TooLarge

_LOCAL_SEARCH_CAP = 20_000


class Tournament:
    __slots__ = ("n", "_rows",)

    def __init__(self, n: int, rows: Sequence[int], validate: bool = True):
        self.n = n
        self._rows = list(rows)
        if len(self._rows) != n:
            raise ValueError("row count mismatch")
        if validate and n <= 4096:
            full = full_mask(n)
            for u in range(n):
                if self._rows[u] & ~full or (self._rows[u] >> u) & 1:
                    raise ValueError(f"row {u} has out-of-range or diagonal bits")
            for u in range(n):
                for v in range(u + 1, n):
                    if ((self._rows[u] >> v) & 1) == ((self._rows[v] >> u) & 1):
                        raise ValueError(f"pair ({u},{v}) not oriented exactly once")

    # -- queries -----------------------------------------------------------

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self._rows[u] >> v) & 1)

    def out_row(self, u: int) -> VertexSet:
        return self._rows[u]

    def in_row(self, u: int) -> VertexSet:
        return full_mask(self.n) ^ self._rows[u] ^ (1 << u)

    def out_degree(self, u: int, within: Optional[VertexSet] = None) -> int:
        r = self._rows[u]
        if within is not None:
            r &= within
        return r.bit_count()

    def in_degree(self, u: int, within: Optional[VertexSet] = None) -> int:
        r = self.in_row(u)
        if within is not None:
            r &= within
        return r.bit_count()

    def restrict(self, vertices: Sequence[int]) -> "Tournament":
        """Subtournament in the induced order of `vertices` (old index i maps
        to new index position-of-i)."""
        vs = list(vertices)
        rows = []
        for u in vs:
            r = 0
            src = self._rows[u]
            for j, v in enumerate(vs):
                r |= ((src >> v) & 1) << j
            rows.append(r)
        return Tournament(len(vs), rows, validate=False)

    def submatrix_bool(self, rows: Sequence[int], cols: Sequence[int]) -> np.ndarray:
        """Dense 0/1 matrix of the adjacency restricted to rows x cols."""
        nb = (self.n + 7) // 8
        cols_arr = np.asarray(cols, dtype=np.int64)
        out = np.empty((len(rows), len(cols_arr)), dtype=np.uint8)
        for i, u in enumerate(rows):
            b = np.frombuffer(self._rows[u].to_bytes(nb, "little"), dtype=np.uint8)
            bits = np.unpackbits(b, bitorder="little", count=self.n)
            out[i] = bits[cols_arr]
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Tournament)
            and self.n == other.n
            and self._rows == other._rows
        )

    def __hash__(self):
        return hash((self.n, tuple(self._rows)))

    def __repr__(self):
        return f"Tournament(n={self.n})"


@dataclass(frozen=True)
class MedianOrder:
    order: tuple[int, ...]
    forward_edges: int
    certificate: bool

    @property
    def n(self) -> int:
        return len(self.order)

    def position_of(self) -> dict[int, int]:
        """vertex -> 0-based position"""
        return {v: i for i, v in enumerate(self.order)}


# --- generators -----------------------------------------------------------


def _antisymmetrize(M: np.ndarray, n: int, block: int = 4096) -> None:
    """Turn random bytes into a valid adjacency: for u < v keep bit (u,v),
    force bit (v,u) to its complement, clear the diagonal.  In place."""
    for jb in range(0, n, block):
        j1 = min(jb + block, n)
        jw = jb // 8
        for ib in range(jb, n, block):
            i1 = min(ib + block, n)
            if ib == jb:
                sub = np.unpackbits(
                    M[ib:i1, jw : (j1 + 7) // 8], axis=1, bitorder="little", count=j1 - jb
                )
                upper = np.triu(sub, 1)
                lower = np.tril(1 - sub.T, -1)
                packed = np.packbits(upper | lower, axis=1, bitorder="little")
            else:
                src = np.unpackbits(
                    M[jb:j1, ib // 8 : (i1 + 7) // 8],
                    axis=1,
                    bitorder="little",
                    count=i1 - ib,
                )
                packed = np.packbits(1 - src.T, axis=1, bitorder="little")
            M[ib:i1, jw : jw + packed.shape[1]] = packed


def _rows_from_bytes(M: np.ndarray, n: int) -> list[int]:
    return [int.from_bytes(M[u].tobytes(), "little") for u in range(n)]


def random_tournament(n: int, seed: int) -> Tournament:
    """Uniform random orientation of every pair; deterministic in (n, seed)."""
    if n < 1:
        raise ValueError("n >= 1")
    rng = np.random.default_rng(seed)
    nb = (n + 7) // 8
    M = rng.integers(0, 256, size=(n, nb), dtype=np.uint8)
    if n % 8:
        M[:, -1] &= (1 << (n % 8)) - 1
    _antisymmetrize(M, n)
    return Tournament(n, _rows_from_bytes(M, n), validate=False)


def transitive_tournament(n: int) -> Tournament:
    return Tournament(n, [interval_mask(u + 1, n) for u in range(n)], validate=False)


def rotational_tournament(n: int) -> Tournament:
    """n odd: v beats v+1, ..., v+(n-1)/2 (mod n)."""
    if n % 2 == 0:
        raise ValueError("rotational tournaments need odd n")
    rows = []
    for u in range(n):
        r = 0
        for d in range(1, n // 2 + 1):
            r |= 1 << ((u + d) % n)
        rows.append(r)
    return Tournament(n, rows, validate=False)


def qr_tournament(p: int) -> Tournament:
    """Quadratic-residue tournament for a prime p congruent to 3 mod 4."""
    if p % 4 != 3:
        raise ValueError("need p = 3 (mod 4)")
    residues = {(x * x) % p for x in range(1, p)}
    rows = []
    for u in range(p):
        r = 0
        for v in range(p):
            if v != u and (v - u) % p in residues:
                r |= 1 << v
        rows.append(r)
    return Tournament(p, rows)


def blowup(
    pattern: Tournament,
    part_size: int,
    inner: Union[Tournament, str, None] = None,
    seed: int = 0,
) -> tuple[Tournament, list[VertexSet]]:
    """Replace each pattern vertex by a part of `part_size` vertices.

    Cross-part edges follow the pattern; inside a part the orientation comes
    from `inner`: a fixed Tournament reused in every part, "transitive", or
    None/"random" for a fresh seeded random tournament per part.
    """
    k = pattern.n
    n = k * part_size
    if inner is None or inner == "random":
        inner_ts = [
            random_tournament(part_size, seed * k + p) if part_size > 1 else transitive_tournament(part_size)
            for p in range(k)
        ]
    elif inner == "transitive":
        inner_ts = [transitive_tournament(part_size)] * k
    elif isinstance(inner, Tournament):
        if inner.n != part_size:
            raise ValueError("inner tournament size must equal part_size")
        inner_ts = [inner] * k
    else:
        raise ValueError(f"bad inner spec {inner!r}")
    rows = [0] * n
    parts = [interval_mask(p * part_size, (p + 1) * part_size) for p in range(k)]
    for p in range(k):
        cross = 0
        for q in bits_of(pattern.out_row(p)):
            cross |= parts[q]
        for i in range(part_size):
            u = p * part_size + i
            rows[u] = cross | (inner_ts[p].out_row(i) << (p * part_size))
    return Tournament(n, rows, validate=(n <= 1024)), parts


def layered_tournament(R: Tournament, H: int) -> tuple[Tournament, list[VertexSet]]:
    """H stacked copies of R; all edges between different copies point from
    the earlier copy to the later one."""
    pattern = transitive_tournament(H)
    return blowup(pattern, R.n, inner=R)


# --- median orders --------------------------------------------------------


def _bool_matrix(T: Tournament) -> np.ndarray:
    nb = (T.n + 7) // 8
    M = np.empty((T.n, nb), dtype=np.uint8)
    for u in range(T.n):
        M[u] = np.frombuffer(T.out_row(u).to_bytes(nb, "little"), dtype=np.uint8)
    return np.unpackbits(M, axis=1, bitorder="little", count=T.n)


def forward_edges(T: Tournament, order: Sequence[int]) -> int:
    total = 0
    placed = 0
    for v in order:
        v = int(v)
        total += T.out_degree(v, within=placed)
        placed |= 1 << v
    # edges from v into already-placed vertices are backward; forward count is
    # all pairs minus those
    return T.n * (T.n - 1) // 2 - total


def median_order_local(
    T: Tournament, seed: int, max_rounds: Optional[int] = None
) -> MedianOrder:
    """Single-vertex-relocation local optimum, first-improvement sweeps from a
    seeded shuffle.

    Each sweep walks positions left to right; the first vertex admitting an
    improving relocation moves to its best target position.  Terminates
    because the forward-edge count strictly increases.
    """
    n = T.n
    if n > _LOCAL_SEARCH_CAP:
        raise TooLarge(f"local search capped at {_LOCAL_SEARCH_CAP} vertices")
    A = _bool_matrix(T).astype(np.int64)
    rng = np.random.default_rng(seed)
    order = [int(x) for x in rng.permutation(n)]
    rounds = 0
    while True:
        improved = False
        i = 0
        while i < n:
            v = order[i]
            ordv = np.asarray(order)
            invec = A[ordv, v]  # invec[t] = 1 iff vertex at position t beats v
            best_delta, best_p = 0, i
            if i > 0:
                csum = np.cumsum(invec[:i])
                s_from = csum[i - 1] - np.concatenate(([0], csum[:-1]))
                p_arr = np.arange(i)
                deltas = (i - p_arr) - 2 * s_from
                j = int(np.argmax(deltas))
                if deltas[j] > best_delta:
                    best_delta, best_p = int(deltas[j]), j
            if i < n - 1:
                tail = invec[i + 1 :]
                deltas = 2 * np.cumsum(tail) - np.arange(1, n - i)
                j = int(np.argmax(deltas))
                if deltas[j] > best_delta:
                    best_delta, best_p = int(deltas[j]), i + 1 + j
            if best_delta > 0:
                order.pop(i)
                order.insert(best_p, v)
                improved = True
            i += 1
        rounds += 1
        if not improved or (max_rounds is not None and rounds >= max_rounds):
            break
    fwd = forward_edges(T, order)
    cert = check_median_certificate(T, order)
    return MedianOrder(tuple(order), fwd, cert)


def check_median_certificate(T: Tournament, order: Sequence[int]) -> bool:
    """Independent check of local optimality under single-vertex relocation:
    for every position i and p < i the vertex at i has at least ceil((i-p)/2)
    in-neighbours among positions [p, i), and symmetrically to the right."""
    n = T.n
    A = _bool_matrix(T)
    ordv = np.asarray(order)
    for i in range(n):
        v = order[i]
        invec = A[ordv, v].astype(np.int64)
        if i > 0:
            csum = np.cumsum(invec[:i])
            s_from = csum[i - 1] - np.concatenate(([0], csum[:-1]))
            gaps = np.arange(i, 0, -1)  # i - p for p = 0..i-1
            if np.any(s_from < (gaps + 1) // 2):
                return False
        if i < n - 1:
            outvec = 1 - invec[i + 1 :]
            csum = np.cumsum(outvec)
            gaps = np.arange(1, n - i)
            if np.any(csum < (gaps + 1) // 2):
                return False
    return True


def median_order_exact(T: Tournament, vertex_cap: int = 14) -> MedianOrder:
    """Exact maximum-forward-edge order by subset DP (placing the first vertex
    of each remaining set)."""
    n = T.n
    if n > vertex_cap:
        raise TooLarge(f"exact median order capped at {vertex_cap} vertices")
    rows = [T.out_row(u) for u in range(n)]
    size = 1 << n
    F = [0] * size
    choice = [0] * size
    for S in range(1, size):
        best, bestv = -1, -1
        rem = S
        while rem:
            low = rem & -rem
            v = low.bit_length() - 1
            rem ^= low
            val = (rows[v] & (S ^ (1 << v))).bit_count() + F[S ^ (1 << v)]
            if val > best:
                best, bestv = val, v
        F[S] = best
        choice[S] = bestv
    order = []
    S = size - 1
    while S:
        v = choice[S]
        order.append(v)
        S ^= 1 << v
    fwd = F[size - 1]
    assert fwd == forward_edges(T, order)
    return MedianOrder(tuple(order), fwd, check_median_certificate(T, order))


def median_order_bruteforce(T: Tournament) -> int:
    """Test oracle: max forward edges over all n! orders (tiny n only)."""
    import itertools

    if T.n > 8:
        raise TooLarge("brute force beyond n=8 is pointless")
    return max(forward_edges(T, p) for p in itertools.permutations(range(T.n)))


def identity_order(T: Tournament) -> MedianOrder:
    """The identity order with its true forward count; certificate as checked."""
    order = tuple(range(T.n))
    return MedianOrder(order, forward_edges(T, order), False)


# --- densities and neighbourhoods ----------------------------------------


def directed_density(T: Tournament, X: VertexSet, Y: VertexSet) -> Fraction:
    """d(X, Y) = e(X -> Y) / (|X| |Y|), exact."""
    if X & Y:
        raise ValueError("X and Y must be disjoint")
    nx, ny = X.bit_count(), Y.bit_count()
    if nx == 0 or ny == 0:
        raise ValueError("X and Y must be nonempty")
    e = sum((T.out_row(u) & Y).bit_count() for u in bits_of(X))
    return Fraction(e, nx * ny)


def interval_density(
    T: Tournament, M: MedianOrder, i_start: int, i_end: int, A: VertexSet
) -> Fraction:
    """Density from the positions [i_start, i_end) into the vertex set A.

    Positions are 1-based along M.order.  A must sit fully inside a window
    [i_end, i_end + a) where a divides the interval length into k >= 1 equal
    pieces and position i_end + a + 1 still exists; otherwise the pair is
    outside the guarantee and HypothesisViolation is raised.
    """
    n = T.n
    if not (1 <= i_start < i_end <= n):
        raise HypothesisViolation(f"bad interval [{i_start}, {i_end})")
    if A == 0:
        raise HypothesisViolation("A is empty")
    pos = M.position_of()
    apos = [pos[v] + 1 for v in bits_of(A)]  # 1-based
    if min(apos) < i_end:
        raise HypothesisViolation("A starts before the interval ends")
    span = max(apos) - i_end + 1
    length = i_end - i_start
    a_ok = None
    for k in range(length, 0, -1):
        if length % k:
            continue
        a = length // k
        if a >= span and i_end + a + 1 <= n:
            a_ok = a
            break
    if a_ok is None:
        raise HypothesisViolation(
            f"no admissible split: |I|={length}, A-span={span}, n={n}, end={i_end}"
        )
    I = mask_of(M.order[i_start - 1 : i_end - 1])
    return directed_density(T, I, A & ~I)


def common_out_neighborhood(T: Tournament, S: VertexSet, R: VertexSet) -> VertexSet:
    """Vertices of R beaten by every member of S; all of R when S is empty."""
    acc = R
    for v in bits_of(S):
        acc &= T.out_row(v)
        if not acc:
            break
    return acc


def common_in_neighborhood(T: Tournament, S: VertexSet, R: VertexSet) -> VertexSet:
    acc = R
    for v in bits_of(S):
        acc &= T.in_row(v)
        if not acc:
            break
    return acc


# --- TOURN 1 format and DOT ----------------------------------------------


def _upper_bits(T: Tournament) -> list[int]:
    bits = []
    for u in range(T.n):
        row = T.out_row(u)
        for v in range(u + 1, T.n):
            bits.append((row >> v) & 1)
    return bits


def write_tourn(T: Tournament) -> str:
    """TOURN 1: header, n, then the upper triangle row-major as hex (bits
    packed MSB-first, zero padded)."""
    bits = _upper_bits(T)
    nbytes = (len(bits) + 7) // 8
    val = 0
    for b in bits:
        val = (val << 1) | b
    val <<= nbytes * 8 - len(bits)
    hexstr = val.to_bytes(nbytes, "big").hex() if nbytes else ""
    return f"TOURN 1\n{T.n}\n{hexstr}\n"


def parse_tourn(text: str) -> Tournament:
    lines = text.split("\n")
    if len(lines) != 4 or lines[0] != "TOURN 1" or lines[3] != "":
        raise FormatError("expected TOURN 1 header, n, hex line")
    try:
        n = int(lines[1])
    except ValueError as e:
        raise FormatError("bad vertex count") from e
    if n < 1:
        raise FormatError("n >= 1 required")
    nbits = n * (n - 1) // 2
    nbytes = (nbits + 7) // 8
    if len(lines[2]) != 2 * nbytes:
        raise FormatError(f"hex payload must be {2 * nbytes} chars")
    try:
        raw = bytes.fromhex(lines[2])
    except ValueError as e:
        raise FormatError("bad hex payload") from e
    val = int.from_bytes(raw, "big") >> (nbytes * 8 - nbits) if nbytes else 0
    rows = [0] * n
    idx = nbits - 1
    for u in range(n):
        for v in range(u + 1, n):
            bit = (val >> idx) & 1
            idx -= 1
            if bit:
                rows[u] |= 1 << v
            else:
                rows[v] |= 1 << u
    if nbytes and (int.from_bytes(raw, "big") & ((1 << (nbytes * 8 - nbits)) - 1)):
        raise FormatError("nonzero padding bits")
    return Tournament(n, rows, validate=False)


def to_dot(T: Tournament, name: str = "T") -> str:
    lines = [f"digraph {name} {{"]
    for u in range(T.n):
        for v in bits_of(T.out_row(u)):
            lines.append(f"  {u} -> {v};")
    lines.append("}")
    return "\n".join(lines) + "\n"
