"""Acyclic digraphs, layerings and degree data.

Guests are small acyclic digraphs carved into layers V_1..V_H.  A layering is
valid when every edge goes forward, spanning between 1 and w layers; w = 1 is
the graded case where edges only join consecutive layers.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import (
    CycleFound,
    FormatError,
    InfeasibleDegree,
    LayeringMismatch,
    SizeOverflow,
    TooLarge,
)

MAX_GRID_VERTICES = 1 << 20


class Digraph:
    """Immutable digraph on vertices 0..n-1 with an edge set of (u, v) pairs."""

    __slots__ = ("n", "edges", "out_adj", "in_adj")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]]):
        self.n = n
        es = sorted(set((int(u), int(v)) for u, v in edges))
        for u, v in es:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"loop at {u}")
        self.edges = tuple(es)
        out = [[] for _ in range(n)]
        inn = [[] for _ in range(n)]
        for u, v in es:
            out[u].append(v)
            inn[v].append(u)
        self.out_adj = tuple(tuple(a) for a in out)
        self.in_adj = tuple(tuple(a) for a in inn)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.out_adj[u]

    def out_degree(self, v: int) -> int:
        return len(self.out_adj[v])

    def in_degree(self, v: int) -> int:
        return len(self.in_adj[v])

    def __eq__(self, other):
        return isinstance(other, Digraph) and self.n == other.n and self.edges == other.edges

    def __hash__(self):
        return hash((self.n, self.edges))

    def __repr__(self):
        return f"Digraph(n={self.n}, m={len(self.edges)})"


@dataclass(frozen=True)
class Layering:
    """1-based layer assignment; height is the number of layers, width the max
    edge span.  Edgeless digraphs get width 1 by convention (trivially graded)."""

    layers: tuple[int, ...]
    height: int
    width: int

    @property
    def n(self) -> int:
        return len(self.layers)

    def layer_members(self, i: int) -> list[int]:
        return [v for v, l in enumerate(self.layers) if l == i]

    def layer_sizes(self) -> list[int]:
        sizes = [0] * self.height
        for l in self.layers:
            sizes[l - 1] += 1
        return sizes


@dataclass(frozen=True)
class DegreeProfile:
    max_degree: int          # max in+out over vertices
    max_out: int
    max_in: int
    # per boundary i in 1..H-1: max in-degree inside the induced subgraph on
    # V_i union V_{i+1}; index 0 of this tuple is boundary 1
    layer_max_in: tuple[int, ...]


@dataclass(frozen=True)
class BoundReport:
    n: int
    width: int
    main_bound: int
    easy_bound: int
    refined_bound: Optional[int]
    degenerate: bool


# --- validation and layering ---------------------------------------------


def validate_acyclic(G: Digraph) -> list[int]:
    """Return a topological order, or raise CycleFound with a witness cycle.

    Kahn peeling; the witness is recovered by walking in-edges inside the
    unpeeled remainder until a vertex repeats.
    """
    indeg = [G.in_degree(v) for v in range(G.n)]
    queue = [v for v in range(G.n) if indeg[v] == 0]
    order = []
    while queue:
        v = queue.pop()
        order.append(v)
        for x in G.out_adj[v]:
            indeg[x] -= 1
            if indeg[x] == 0:
                queue.append(x)
    if len(order) == G.n:
        return order
    remaining = {v for v in range(G.n) if indeg[v] > 0}
    v = min(remaining)
    seen: dict[int, int] = {}
    path = []
    while v not in seen:
        seen[v] = len(path)
        path.append(v)
        v = next(u for u in G.in_adj[v] if u in remaining)
    cycle = path[seen[v]:][::-1]
    raise CycleFound(cycle)


def compute_layering(G: Digraph) -> Layering:
    """Longest-path layering: layer(v) = 1 + longest path ending at v.

    Each weakly-connected component is levelled independently (every source
    sits in layer 1 of its own component), which makes the layering canonical
    for disconnected inputs.
    """
    layer = [1] * G.n
    for v in validate_acyclic(G):
        for x in G.out_adj[v]:
            if layer[x] < layer[v] + 1:
                layer[x] = layer[v] + 1
    height = max(layer) if layer else 1
    width = max((layer[v] - layer[u] for u, v in G.edges), default=1)
    return Layering(tuple(layer), height, width)


def check_layering(G: Digraph, L: Layering) -> None:
    """Raise LayeringMismatch unless L is a valid layering of G."""
    if L.n != G.n:
        raise LayeringMismatch(f"layering over {L.n} vertices, digraph has {G.n}")
    if any(l < 1 or l > L.height for l in L.layers):
        raise LayeringMismatch("layer index out of range")
    for u, v in G.edges:
        span = L.layers[v] - L.layers[u]
        if span < 1 or span > L.width:
            raise LayeringMismatch(f"edge ({u},{v}) spans {span}, width {L.width}")


# --- generators -----------------------------------------------------------


def grid_digraph(d: int, k: int, max_vertices: int = MAX_GRID_VERTICES) -> Digraph:
    """d-dimensional grid [k]^d, edges increment one coordinate."""
    if d < 1 or k < 1:
        raise ValueError("need d >= 1 and k >= 1")
    n = k**d
    if n > max_vertices:
        raise SizeOverflow(f"k^d = {n} exceeds cap {max_vertices}")
    # index = sum coord[i] * k^i
    edges = []
    for idx in range(n):
        rem = idx
        for i in range(d):
            c = rem % k
            rem //= k
            if c + 1 < k:
                edges.append((idx, idx + k**i))
    return Digraph(n, edges)


def hypercube_digraph(d: int) -> Digraph:
    """Hypercube Q_d oriented by increasing Hamming weight."""
    return grid_digraph(d, 2)


def path_digraph(orientation: Sequence[int]) -> Digraph:
    """Oriented path on len(orientation)+1 vertices.

    orientation[i] == 1 means the i-th path edge points forward (i -> i+1),
    0 means backward.
    """
    edges = []
    for i, d in enumerate(orientation):
        edges.append((i, i + 1) if d else (i + 1, i))
    return Digraph(len(orientation) + 1, edges)


def transitive_digraph(n: int) -> Digraph:
    return Digraph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def random_layered_digraph(
    layer_sizes: Sequence[int], max_degree: int, w: int, seed: int
) -> tuple[Digraph, Layering]:
    """Random digraph with the given layer sizes, edge spans in [1, w] and
    total degree at most max_degree; deterministic in seed.

    Candidate pairs are shuffled once and added greedily while both endpoints
    have spare degree.
    """
    if max_degree < 1:
        raise InfeasibleDegree(f"max_degree={max_degree}")
    if w < 1:
        raise ValueError("w >= 1 required")
    layers = []
    for i, sz in enumerate(layer_sizes, start=1):
        layers.extend([i] * sz)
    n = len(layers)
    cand = [
        (u, v)
        for u in range(n)
        for v in range(n)
        if 1 <= layers[v] - layers[u] <= w
    ]
    rng = np.random.default_rng(seed)
    deg = [0] * n
    edges = []
    for idx in rng.permutation(len(cand)):
        u, v = cand[idx]
        if deg[u] < max_degree and deg[v] < max_degree:
            edges.append((u, v))
            deg[u] += 1
            deg[v] += 1
    G = Digraph(n, edges)
    width = max((layers[v] - layers[u] for u, v in G.edges), default=1)
    return G, Layering(tuple(layers), len(layer_sizes), width)


# --- bandwidth ------------------------------------------------------------


def min_graded_bandwidth_exact(
    G: Digraph, vertex_cap: int = 16
) -> tuple[int, Layering]:
    """Minimum width over all valid layerings, with an achieving layering.

    A layering is valid iff 1 <= layer(v) - layer(u) <= w for every edge,
    which is a difference-constraint system; feasibility for fixed w is a
    negative-cycle check, and the answer is the smallest feasible w.
    """
    if G.n > vertex_cap:
        raise TooLarge(f"{G.n} vertices exceeds cap {vertex_cap}")
    validate_acyclic(G)
    if not G.edges:
        return 1, Layering(tuple([1] * G.n), 1, 1)
    lo, hi = 1, G.n - 1
    best = None
    while lo <= hi:
        mid = (lo + hi) // 2
        sol = _difference_feasible(G, mid)
        if sol is not None:
            best = sol
            hi = mid - 1
        else:
            lo = mid + 1
    assert best is not None  # w = n-1 always feasible for acyclic inputs
    layers = best
    shift = 1 - min(layers)
    layers = [l + shift for l in layers]
    width = max(layers[v] - layers[u] for u, v in G.edges)
    return width, Layering(tuple(layers), max(layers), width)


def _difference_feasible(G: Digraph, w: int) -> Optional[list[int]]:
    """Bellman-Ford over the constraint graph; None when infeasible."""
    # constraint L(v)-L(u) <= w    -> arc (u, v, w)
    # constraint L(u)-L(v) <= -1   -> arc (v, u, -1)
    arcs = []
    for u, v in G.edges:
        arcs.append((u, v, w))
        arcs.append((v, u, -1))
    dist = [0] * G.n
    for it in range(G.n):
        changed = False
        for a, b, c in arcs:
            if dist[a] + c < dist[b]:
                dist[b] = dist[a] + c
                changed = True
        if not changed:
            return dist
    return None


def min_graded_bandwidth_bruteforce(G: Digraph, max_assignments: int = 2_000_000) -> int:
    """Test oracle: try every layer assignment in [1..n]^n."""
    validate_acyclic(G)
    if not G.edges:
        return 1
    n = G.n
    if n**n > max_assignments:
        raise TooLarge(f"{n}^{n} assignments")
    best = n
    for assign in itertools.product(range(1, n + 1), repeat=n):
        spans = [assign[v] - assign[u] for u, v in G.edges]
        if min(spans) >= 1:
            best = min(best, max(spans))
    return best


# --- degrees and bounds ---------------------------------------------------


def degree_profile(G: Digraph, L: Layering) -> DegreeProfile:
    check_layering(G, L)
    outd = [G.out_degree(v) for v in range(G.n)]
    ind = [G.in_degree(v) for v in range(G.n)]
    total = [o + i for o, i in zip(outd, ind)]
    per_boundary = []
    for i in range(1, L.height):
        block = {v for v in range(G.n) if L.layers[v] in (i, i + 1)}
        best = 0
        for v in block:
            best = max(best, sum(1 for u in G.in_adj[v] if u in block))
        per_boundary.append(best)
    return DegreeProfile(
        max_degree=max(total, default=0),
        max_out=max(outd, default=0),
        max_in=max(ind, default=0),
        layer_max_in=tuple(per_boundary),
    )


def ramsey_bounds(profile: DegreeProfile, L: Layering, n: int) -> BoundReport:
    """Exact big-integer upper bounds for the host size, three flavours.

    The refined sum is only defined for graded layerings (width 1); boundary
    in-degrees outside 1..H-1 count as zero.
    """
    D, Dp, Dm = profile.max_degree, profile.max_out, profile.max_in
    w = L.width
    main = 3 ** (57 * D * w) * n
    easy = 10**9 * Dp * Dm**2 * 2 ** (4 * Dm) * n
    refined = None
    if w == 1:
        sizes = L.layer_sizes()
        dm = [0] + list(profile.layer_max_in) + [0]
        refined = 10**9 * Dm**2 * Dp * sum(
            2 ** (2 * (dm[i - 1] + dm[i])) * sizes[i - 1] for i in range(1, L.height + 1)
        )
    return BoundReport(
        n=n,
        width=w,
        main_bound=main,
        easy_bound=easy,
        refined_bound=refined,
        degenerate=(Dp == 0 and Dm == 0),
    )


def hypercube_bound_sum(d: int) -> tuple[int, int]:
    """Internal sum of the refined bound for Q_d after weakening each boundary
    in-degree to its index: returns (sum of C(d,i)*4*2^(4i), 4*17^d)."""
    import math

    total = sum(math.comb(d, i) * 4 * 2 ** (4 * i) for i in range(d + 1))
    return total, 4 * 17**d


# --- DGRAPH 1 format ------------------------------------------------------


def write_dgraph(G: Digraph, L: Optional[Layering] = None) -> str:
    """Serialize in the DGRAPH 1 text format (canonical ordering)."""
    lines = ["DGRAPH 1", f"n {G.n}"]
    if L is not None:
        check_layering(G, L)
        for v in range(G.n):
            lines.append(f"layer {v} {L.layers[v]}")
    for u, v in G.edges:
        lines.append(f"e {u} {v}")
    return "\n".join(lines) + "\n"


def parse_dgraph(text: str) -> tuple[Digraph, Optional[Layering]]:
    lines = text.split("\n")
    if not lines or lines[0] != "DGRAPH 1":
        raise FormatError("missing DGRAPH 1 header")
    if lines[-1] != "":
        raise FormatError("missing trailing newline")
    body = lines[1:-1]
    if not body or not body[0].startswith("n "):
        raise FormatError("missing vertex count")
    try:
        n = int(body[0][2:])
    except ValueError as e:
        raise FormatError(f"bad vertex count: {body[0]!r}") from e
    layer_map: dict[int, int] = {}
    edges = []
    for ln in body[1:]:
        parts = ln.split()
        if len(parts) == 3 and parts[0] == "layer":
            layer_map[int(parts[1])] = int(parts[2])
        elif len(parts) == 3 and parts[0] == "e":
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise FormatError(f"unrecognized line {ln!r}")
    G = Digraph(n, edges)
    L = None
    if layer_map:
        if sorted(layer_map) != list(range(n)):
            raise FormatError("layer lines must cover all vertices exactly once")
        layers = tuple(layer_map[v] for v in range(n))
        height = max(layers)
        width = max((layers[v] - layers[u] for u, v in edges), default=1)
        L = Layering(layers, height, width)
        check_layering(G, L)
    return G, L
