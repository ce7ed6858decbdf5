"""Exhaustive catalogue of small tournaments up to isomorphism, and the exact
oriented-Ramsey machinery built on it.

Enumeration is by column extension: canonical codes on n vertices are exactly
the canonical one-column extensions of canonical codes on n-1 vertices, so
each level is produced from the previous with a branch-and-bound canonicity
test per candidate column.  Levels are cached on disk (CENSUS 1 files).
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .digraphs import Digraph, validate_acyclic
from .errors import FormatError, TooLarge
from .tournaments import Tournament, random_tournament

MAX_CENSUS_N = 9

#: classes of tournaments on 1..9 vertices
CLASS_COUNTS = (1, 1, 2, 4, 12, 56, 456, 6880, 191536)


def cache_dir() -> Path:
    env = os.environ.get("RAMSEYLAB_CACHE")
    if env:
        return Path(env)
    return Path.home() / ".cache" / "ramseylab"


# --- code helpers ---------------------------------------------------------


def code_to_tournament(code: int, n: int) -> Tournament:
    dirmat = _kernels.py_decode_dirmat(code, n)
    rows = []
    for u in range(n):
        r = 0
        for v in range(n):
            if dirmat[u, v]:
                r |= 1 << v
        rows.append(r)
    return Tournament(n, rows, validate=False)


def tournament_to_code(T: Tournament) -> int:
    """Code under the identity labelling (not canonicalized)."""
    c = 0
    for j in range(1, T.n):
        for i in range(j):
            c = (c << 1) | (1 if T.has_edge(i, j) else 0)
    return c


def canonical_code(T: Tournament, vertex_cap: int = 10) -> int:
    """Minimum code over all relabelings, by column-wise branch and bound."""
    n = T.n
    if n > vertex_cap:
        raise TooLarge(f"canonicalization capped at {vertex_cap} vertices")
    if n == 1:
        return 0
    dirm = [[1 if T.has_edge(i, j) else 0 for j in range(n)] for i in range(n)]
    best_cols: Optional[list[int]] = None
    cur_cols = [0] * n
    sigma: list[int] = []
    used = [False] * n

    def rec(depth: int) -> None:
        nonlocal best_cols
        if depth == n:
            if best_cols is None or cur_cols < best_cols:
                best_cols = cur_cols.copy()
            return
        cands = []
        for v in range(n):
            if not used[v]:
                col = 0
                for i in range(depth):
                    col = (col << 1) | dirm[sigma[i]][v]
                cands.append((col, v))
        cands.sort()
        for col, v in cands:
            cur_cols[depth] = col
            if best_cols is not None and cur_cols[: depth + 1] > best_cols[: depth + 1]:
                break  # sorted candidates: the rest are no better
            sigma.append(v)
            used[v] = True
            rec(depth + 1)
            sigma.pop()
            used[v] = False

    rec(0)
    assert best_cols is not None
    code = 0
    for j in range(1, n):
        code = (code << j) | best_cols[j]
    return code


# --- CENSUS 1 files -------------------------------------------------------


def write_census(n: int, codes: np.ndarray) -> str:
    width = max(1, (n * (n - 1) // 2 + 3) // 4)
    body = "".join(f"{int(c):0{width}x}\n" for c in codes)
    digest = hashlib.sha256(body.encode()).hexdigest()
    return f"CENSUS 1\nn {n}\ncount {len(codes)}\n{body}sha256 {digest}\n"


def parse_census(text: str) -> tuple[int, np.ndarray]:
    lines = text.split("\n")
    if len(lines) < 4 or lines[0] != "CENSUS 1" or lines[-1] != "":
        raise FormatError("bad CENSUS header or missing final newline")
    if not lines[1].startswith("n ") or not lines[2].startswith("count "):
        raise FormatError("expected 'n' and 'count' lines")
    n = int(lines[1][2:])
    count = int(lines[2][6:])
    if len(lines) != count + 5:
        raise FormatError("line count mismatch")
    body_lines = lines[3 : 3 + count]
    body = "".join(l + "\n" for l in body_lines)
    tail = lines[3 + count]
    if not tail.startswith("sha256 "):
        raise FormatError("missing sha256 trailer")
    if hashlib.sha256(body.encode()).hexdigest() != tail[7:]:
        raise FormatError("census payload digest mismatch")
    codes = np.array([int(l, 16) for l in body_lines], dtype=np.int64)
    return n, codes


# --- enumeration ----------------------------------------------------------


def enumerate_tournaments(
    n: int, cache: bool = True, cache_path: Optional[Path] = None
) -> np.ndarray:
    """Sorted canonical codes of all n-vertex tournaments, n <= 9."""
    if n < 1:
        raise ValueError("n >= 1")
    if n > MAX_CENSUS_N:
        raise TooLarge(f"census capped at {MAX_CENSUS_N} vertices")
    cdir = cache_path or cache_dir()
    if cache:
        f = cdir / f"census_n{n}.txt"
        if f.exists():
            fn, codes = parse_census(f.read_text())
            if fn != n:
                raise FormatError(f"cache file {f} holds n={fn}")
            return codes
    if n == 1:
        codes = np.zeros(1, dtype=np.int64)
    else:
        parents = enumerate_tournaments(n - 1, cache=cache, cache_path=cache_path)
        # crude upper bound on the number of children
        out = np.empty(len(parents) << (n - 1), dtype=np.int64)
        cnt = _kernels.extend_batch(parents, n - 1, out)
        codes = out[:cnt].copy()
    expected = CLASS_COUNTS[n - 1]
    if len(codes) != expected:
        raise RuntimeError(
            f"enumeration produced {len(codes)} classes on {n} vertices, expected {expected}"
        )
    if cache:
        cdir.mkdir(parents=True, exist_ok=True)
        tmp = cdir / f"census_n{n}.txt.tmp"
        tmp.write_text(write_census(n, codes))
        tmp.replace(cdir / f"census_n{n}.txt")
    return codes


def census_counts(max_n: int, cache: bool = True) -> list[int]:
    return [len(enumerate_tournaments(n, cache=cache)) for n in range(1, max_n + 1)]


def census_counts_oracle(n: int) -> np.ndarray:
    """Independent catalogue for n <= 6: canonicalize every labelled
    tournament by brute permutation action, vectorized over all codes."""
    import itertools

    if n > 6:
        raise TooLarge("oracle is all-codes x all-perms; keep n <= 6")
    pairs = [(i, j) for j in range(1, n) for i in range(j)]
    nbits = len(pairs)
    pair_idx = {p: k for k, p in enumerate(pairs)}
    ncodes = 1 << nbits
    codes = np.arange(ncodes, dtype=np.int64)
    bits = ((codes[:, None] >> np.arange(nbits - 1, -1, -1)[None, :]) & 1).astype(np.uint8)
    weights = (1 << np.arange(nbits - 1, -1, -1)).astype(np.int64)
    best = codes.copy()
    for perm in itertools.permutations(range(n)):
        pos_map = np.empty(nbits, dtype=np.int64)
        flip = np.empty(nbits, dtype=np.uint8)
        for k, (i, j) in enumerate(pairs):
            a, b = perm[i], perm[j]
            if a < b:
                pos_map[k] = pair_idx[(a, b)]
                flip[k] = 0
            else:
                pos_map[k] = pair_idx[(b, a)]
                flip[k] = 1
        relab = (bits[:, pos_map] ^ flip[None, :]).astype(np.int64) @ weights
        np.minimum(best, relab, out=best)
    return np.unique(best)


def orbit_count_identity(n: int, codes: Optional[np.ndarray] = None) -> tuple[int, int]:
    """(sum over classes of n!/|Aut|, 2^C(n,2)) - equal iff the census is a
    complete, duplicate-free set of class representatives."""
    import math

    if codes is None:
        codes = enumerate_tournaments(n)
    auts = np.empty(len(codes), dtype=np.int64)
    _kernels.aut_batch(codes, n, auts)
    if np.any(auts <= 0):
        raise RuntimeError("non-canonical code in census")
    fact = math.factorial(n)
    total = sum(fact // int(a) for a in auts)
    return total, 1 << (n * (n - 1) // 2)


# --- containment and exact Ramsey numbers ---------------------------------


def _topo_premasks(G: Digraph) -> np.ndarray:
    order = validate_acyclic(G)
    posn = {v: i for i, v in enumerate(order)}
    masks = np.zeros(G.n, dtype=np.int64)
    for i, v in enumerate(order):
        for u in G.in_adj[v]:
            masks[i] |= 1 << posn[u]
    return masks


def contains_digraph(T: Tournament, G: Digraph) -> bool:
    """Does T contain a copy of G (edges preserved, non-edges free)?"""
    if G.n > T.n:
        return False
    masks = _topo_premasks(G)
    rows = [T.out_row(u) for u in range(T.n)]
    return _kernels.py_contains(rows, T.n, masks, G.n)


def universality_check(
    G: Digraph, n: int, codes: Optional[np.ndarray] = None
) -> Optional[int]:
    """None if every n-vertex tournament contains G, else a counterexample
    code."""
    if codes is None:
        codes = enumerate_tournaments(n)
    if G.n > n:
        return int(codes[0])
    masks = _topo_premasks(G)
    flags = np.empty(len(codes), dtype=np.uint8)
    _kernels.contains_batch(codes, n, masks, G.n, flags)
    missing = np.nonzero(flags == 0)[0]
    if len(missing):
        return int(codes[missing[0]])
    return None


@dataclass(frozen=True)
class RamseyExact:
    found: bool
    value: Optional[int]        # least N making every N-tournament contain G
    checked_up_to: int
    witness_code: Optional[int]  # counterexample on value-1 (or checked_up_to)
    witness_n: Optional[int]

    def witness(self) -> Optional[Tournament]:
        if self.witness_code is None:
            return None
        return code_to_tournament(self.witness_code, self.witness_n)


def oriented_ramsey_exact(G: Digraph, n_max: int = MAX_CENSUS_N) -> RamseyExact:
    """Exact oriented Ramsey number by sweeping the census upward.

    Containment is monotone in N (drop a vertex of an (N+1)-tournament), so
    the first universal level is the answer."""
    if n_max > MAX_CENSUS_N:
        raise TooLarge(f"exact search capped at {MAX_CENSUS_N}")
    validate_acyclic(G)
    last_witness: Optional[tuple[int, int]] = None
    for n in range(max(G.n, 1), n_max + 1):
        bad = universality_check(G, n)
        if bad is None:
            return RamseyExact(
                True,
                n,
                n,
                last_witness[0] if last_witness else None,
                last_witness[1] if last_witness else None,
            )
        last_witness = (bad, n)
    return RamseyExact(
        False,
        None,
        n_max,
        last_witness[0] if last_witness else None,
        last_witness[1] if last_witness else None,
    )


def witness_search_random(
    G: Digraph, n: int, tries: int, seed: int
) -> Optional[Tournament]:
    """Random search for an n-vertex tournament with no copy of G."""
    rng = np.random.default_rng(seed)
    for _ in range(tries):
        T = random_tournament(n, int(rng.integers(0, 2**63 - 1)))
        if not contains_digraph(T, G):
            return T
    return None


# --- spanning-path orientation spectrum -----------------------------------


def reverse_pattern(p: int, m: int) -> int:
    """Pattern of the reversed path: reverse the m bits and complement."""
    r = 0
    for t in range(m):
        r |= (1 - ((p >> (m - 1 - t)) & 1)) << t
    return r


def pattern_class_count(m: int) -> int:
    """Orientation patterns of a path with m edges up to reversal."""
    seen = set()
    for p in range(1 << m):
        seen.add(min(p, reverse_pattern(p, m)))
    return len(seen)


@dataclass(frozen=True)
class PathSpectrumReport:
    n: int
    classes_checked: int
    all_patterns_everywhere: bool
    missing: tuple[tuple[int, int], ...]  # (code, first missing pattern)


def path_spectrum_report(
    n: int, codes: Optional[np.ndarray] = None, max_missing: int = 16
) -> PathSpectrumReport:
    """Check that every orientation of the n-vertex path occurs in every
    n-vertex tournament, via one subset DP per tournament."""
    if n > 9:
        raise TooLarge("spectrum DP uses 256-bit sets; n <= 9")
    if codes is None:
        codes = enumerate_tournaments(n)
    words = np.zeros((len(codes), 4), dtype=np.uint64)
    _kernels.path_spectrum_batch(codes, n, words)
    npat = 1 << (n - 1)
    full_words = np.zeros(4, dtype=np.uint64)
    for t in range(npat):
        full_words[t >> 6] |= np.uint64(1 << (t & 63))
    ok = np.all(words == full_words[None, :], axis=1)
    missing = []
    for i in np.nonzero(~ok)[0][:max_missing]:
        spect = 0
        for w in range(4):
            spect |= int(words[i, w]) << (64 * w)
        first = next(p for p in range(npat) if not (spect >> p) & 1)
        missing.append((int(codes[i]), first))
    return PathSpectrumReport(n, len(codes), bool(ok.all()), tuple(missing))
