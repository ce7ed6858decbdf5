"""Compiled inner loops (numba) plus pure-Python twins used to cross-check
them on small inputs.

Tournament codes: bits of the upper triangle grouped by column, column j
contributing bits (0,j)..(j-1,j) with (0,j) most significant inside the
column, columns in increasing j, earlier columns more significant.  A code is
canonical when no relabeling produces a smaller one; restricting a canonical
code to its first n-1 vertices keeps it canonical, which is what makes
column-extension enumeration work.
"""

from __future__ import annotations

import numpy as np
from numba import njit


# --- code <-> dense matrix ------------------------------------------------


@njit(cache=True)
def decode_dirmat(code, m, out):
    """Fill out[:m,:m] with the 0/1 adjacency of `code` (out may be bigger)."""
    c = code
    for j in range(m - 1, 0, -1):
        for i in range(j - 1, -1, -1):
            b = c & 1
            c >>= 1
            out[i, j] = b
            out[j, i] = 1 - b
    for i in range(m):
        out[i, i] = 0


@njit(cache=True)
def encode_dirmat(dirmat, m):
    c = 0
    for j in range(1, m):
        for i in range(j):
            c = (c << 1) | dirmat[i, j]
    return c


@njit(cache=True)
def code_columns(code, m, out):
    """out[j] = value of column j (j bits, bit (0,j) most significant)."""
    c = code
    for j in range(m - 1, 0, -1):
        v = 0
        for k in range(j):
            v |= (c & 1) << k
            c >>= 1
        out[j] = v
    out[0] = 0


# --- canonicity -----------------------------------------------------------


@njit(cache=True)
def canon_aut(dirmat, n, target, want_aut):
    """(canonical, aut) for the code whose column values are target[0..n-1].

    Branch and bound over position assignments: a column strictly below the
    target proves non-canonicity, strictly above prunes the branch, equality
    descends.  aut counts full assignments reproducing the code exactly and
    is only meaningful when the code is canonical.
    """
    sigma = np.zeros(n, np.int64)
    used = np.zeros(n, np.uint8)
    cand = np.zeros(n + 1, np.int64)
    depth = 0
    aut = 0
    while depth >= 0:
        v = cand[depth]
        if v >= n:
            depth -= 1
            if depth >= 0:
                used[sigma[depth]] = 0
                cand[depth] += 1
            continue
        if used[v]:
            cand[depth] += 1
            continue
        col = 0
        for i in range(depth):
            col = (col << 1) | dirmat[sigma[i], v]
        t = target[depth]
        if col < t:
            return 0, 0
        if col > t:
            cand[depth] += 1
            continue
        if depth == n - 1:
            aut += 1
            cand[depth] += 1
            continue
        sigma[depth] = v
        used[v] = 1
        depth += 1
        cand[depth] = 0
    return 1, aut


@njit(cache=True)
def extend_batch(parents, n_par, out):
    """Write codes of canonical (n_par+1)-vertex extensions into out; return
    the count.  Parents must be canonical codes on n_par vertices."""
    n = n_par + 1
    dirmat = np.zeros((n, n), np.uint8)
    target = np.zeros(n, np.int64)
    cnt = 0
    for pi in range(parents.shape[0]):
        p = parents[pi]
        decode_dirmat(p, n_par, dirmat)
        code_columns(p, n_par, target)
        for col in range(1 << n_par):
            for i in range(n_par):
                b = (col >> (n_par - 1 - i)) & 1
                dirmat[i, n - 1] = b
                dirmat[n - 1, i] = 1 - b
            dirmat[n - 1, n - 1] = 0
            target[n - 1] = col
            ok, _ = canon_aut(dirmat, n, target, 0)
            if ok:
                out[cnt] = (p << n_par) | col
                cnt += 1
    return cnt


@njit(cache=True)
def aut_batch(codes, n, out):
    dirmat = np.zeros((n, n), np.uint8)
    target = np.zeros(n, np.int64)
    for i in range(codes.shape[0]):
        decode_dirmat(codes[i], n, dirmat)
        code_columns(codes[i], n, target)
        ok, aut = canon_aut(dirmat, n, target, 1)
        out[i] = aut if ok else -1


# --- digraph containment --------------------------------------------------


@njit(cache=True)
def _contains_rows(rows, n, g_premask, ng):
    """1 iff the digraph described by g_premask embeds into the tournament
    with out-bitmasks `rows`.  g_premask[k] = bitmask over earlier topological
    positions of the in-neighbours of the k-th digraph vertex."""
    if ng > n:
        return 0
    phi = np.zeros(ng, np.int64)
    avail = np.zeros(ng, np.int64)
    full = (1 << n) - 1
    used = 0
    depth = 0
    avail[0] = full
    while depth >= 0:
        a = avail[depth]
        if a == 0:
            depth -= 1
            if depth >= 0:
                used &= ~(1 << phi[depth])
            continue
        low = a & (-a)
        avail[depth] = a ^ low
        v = 0
        t = low
        while t > 1:
            t >>= 1
            v += 1
        phi[depth] = v
        if depth == ng - 1:
            return 1
        used |= 1 << v
        cand = full & ~used
        pm = g_premask[depth + 1]
        t = 0
        while pm and cand:
            if pm & 1:
                cand &= rows[phi[t]]
            pm >>= 1
            t += 1
        depth += 1
        avail[depth] = cand & ~used
    return 0


@njit(cache=True)
def contains_batch(codes, n, g_premask, ng, out):
    dirmat = np.zeros((n, n), np.uint8)
    rows = np.zeros(n, np.int64)
    for i in range(codes.shape[0]):
        decode_dirmat(codes[i], n, dirmat)
        for u in range(n):
            r = 0
            for v in range(n):
                if dirmat[u, v]:
                    r |= 1 << v
            rows[u] = r
        out[i] = _contains_rows(rows, n, g_premask, ng)


# --- all path orientations in one sweep -----------------------------------


@njit(cache=True)
def path_spectrum_batch(codes, n, out_words):
    """For each n-vertex code (n <= 9) compute the set of orientation
    patterns of spanning paths as a 2^(n-1)-bit set in out_words[i, :4]
    (little-endian 64-bit words).

    dp[S, v] holds the pattern set of paths through S ending at v; appending
    w flips nothing for a backward edge and shifts the whole set left by
    2^(|S|-1) positions for a forward one.
    """
    size = 1 << n
    dirmat = np.zeros((n, n), np.uint8)
    dp = np.zeros((size, n, 4), np.uint64)
    pc = np.zeros(size, np.int64)
    for s in range(1, size):
        pc[s] = pc[s >> 1] + (s & 1)
    for ci in range(codes.shape[0]):
        decode_dirmat(codes[ci], n, dirmat)
        for s in range(size):
            for v in range(n):
                dp[s, v, 0] = 0
                dp[s, v, 1] = 0
                dp[s, v, 2] = 0
                dp[s, v, 3] = 0
        for v in range(n):
            dp[1 << v, v, 0] = 1
        for S in range(1, size):
            k = pc[S]
            if k == n:
                continue
            shift = 1 << (k - 1)
            ws = shift >> 6
            bs = shift & 63
            for v in range(n):
                if not (S >> v) & 1:
                    continue
                w0 = dp[S, v, 0]
                w1 = dp[S, v, 1]
                w2 = dp[S, v, 2]
                w3 = dp[S, v, 3]
                if w0 == 0 and w1 == 0 and w2 == 0 and w3 == 0:
                    continue
                if bs == 0:
                    if ws == 0:
                        s0, s1, s2, s3 = w0, w1, w2, w3
                    elif ws == 1:
                        s0, s1, s2, s3 = np.uint64(0), w0, w1, w2
                    else:
                        s0, s1, s2, s3 = np.uint64(0), np.uint64(0), w0, w1
                else:
                    b = np.uint64(bs)
                    r = np.uint64(64 - bs)
                    s0 = w0 << b
                    s1 = (w1 << b) | (w0 >> r)
                    s2 = (w2 << b) | (w1 >> r)
                    s3 = (w3 << b) | (w2 >> r)
                for w in range(n):
                    if (S >> w) & 1:
                        continue
                    S2 = S | (1 << w)
                    if dirmat[v, w]:
                        dp[S2, w, 0] |= s0
                        dp[S2, w, 1] |= s1
                        dp[S2, w, 2] |= s2
                        dp[S2, w, 3] |= s3
                    else:
                        dp[S2, w, 0] |= w0
                        dp[S2, w, 1] |= w1
                        dp[S2, w, 2] |= w2
                        dp[S2, w, 3] |= w3
        a0 = np.uint64(0)
        a1 = np.uint64(0)
        a2 = np.uint64(0)
        a3 = np.uint64(0)
        for v in range(n):
            a0 |= dp[size - 1, v, 0]
            a1 |= dp[size - 1, v, 1]
            a2 |= dp[size - 1, v, 2]
            a3 |= dp[size - 1, v, 3]
        out_words[ci, 0] = a0
        out_words[ci, 1] = a1
        out_words[ci, 2] = a2
        out_words[ci, 3] = a3


# --- packed triple expansion counts ---------------------------------------


@njit(cache=True)
def count_bad_triples(words, s):
    """Number of index triples i<j<k whose AND of bitset rows has at most s
    set bits.  words: (g, W) uint64, one packed neighborhood row per index."""
    g, W = words.shape
    m5 = np.uint64(0x5555555555555555)
    m3 = np.uint64(0x3333333333333333)
    mf = np.uint64(0x0F0F0F0F0F0F0F0F)
    m1 = np.uint64(0x0101010101010101)
    sh = np.uint64(56)
    pair = np.zeros(W, np.uint64)
    bad = 0
    for i in range(g):
        for j in range(i + 1, g):
            for w in range(W):
                pair[w] = words[i, w] & words[j, w]
            for k in range(j + 1, g):
                c = np.uint64(0)
                for w in range(W):
                    x = pair[w] & words[k, w]
                    x = x - ((x >> np.uint64(1)) & m5)
                    x = (x & m3) + ((x >> np.uint64(2)) & m3)
                    x = (x + (x >> np.uint64(4))) & mf
                    c += (x * m1) >> sh
                if c <= np.uint64(s):
                    bad += 1
    return bad


# --- pure-Python twins ----------------------------------------------------


def py_decode_dirmat(code, m):
    out = np.zeros((m, m), np.uint8)
    decode_dirmat.py_func(code, m, out)
    return out


def py_canon_aut(code, n):
    """Reference implementation by full enumeration of relabelings."""
    import itertools

    dirmat = py_decode_dirmat(code, n)
    best = None
    aut = 0
    for perm in itertools.permutations(range(n)):
        c = 0
        for j in range(1, n):
            for i in range(j):
                c = (c << 1) | int(dirmat[perm[i], perm[j]])
        if best is None or c < best:
            best = c
        if c == code:
            aut += 1
    return (1 if best == code else 0), aut


def py_contains(rows, n, g_premask, ng, used=0, phi=None):
    """Recursive twin of _contains_rows on Python ints."""
    if ng > n:
        return False
    phi = [] if phi is None else phi
    depth = len(phi)
    if depth == ng:
        return True
    cand = (1 << n) - 1
    pm = int(g_premask[depth])
    t = 0
    while pm:
        if pm & 1:
            cand &= rows[phi[t]]
        pm >>= 1
        t += 1
    cand &= ~used
    while cand:
        low = cand & -cand
        cand ^= low
        v = low.bit_length() - 1
        if py_contains(rows, n, g_premask, ng, used | low, phi + [v]):
            return True
    return False


def py_path_spectrum(rows, n):
    """Pattern set of spanning paths as a Python int (bit p = pattern p)."""
    size = 1 << n
    dp = [[0] * n for _ in range(size)]
    for v in range(n):
        dp[1 << v][v] = 1
    for S in range(1, size):
        k = bin(S).count("1")
        if k == n:
            continue
        for v in range(n):
            if not (S >> v) & 1 or dp[S][v] == 0:
                continue
            cur = dp[S][v]
            shifted = cur << (1 << (k - 1))
            for w in range(n):
                if (S >> w) & 1:
                    continue
                if (rows[v] >> w) & 1:
                    dp[S | (1 << w)][w] |= shifted
                else:
                    dp[S | (1 << w)][w] |= cur
    acc = 0
    for v in range(n):
        acc |= dp[size - 1][v]
    return acc
