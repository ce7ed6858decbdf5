"""Layer-by-layer guest embedding.

One layer round places W1 into a host interval by independent uniform draws
from per-vertex candidate sets, then resamples violated events (collisions,
forbidden neighborhood placements) until none remain.  The pipelines chain
rounds over a prepared interval structure and re-verify the community
conditions they rely on; a backtracking searcher gives ground truth at small
scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

import numpy as np

from .bitset import VertexSet, bits_of, full_mask, mask_of, members_of
from .communities import CommunityCheck, MonotoneFamily, is_community
from .digraphs import Digraph, Layering, check_layering, validate_acyclic
from .errors import (
    LayerFailed,
    PreconditionUnverified,
    PreconditionViolated,
    ResampleBudgetExhausted,
)
from .structure import (
    SQRT_HALF_LOW,
    EmbeddingStructure,
    GradedStructure,
    _subseed,
    audit_graded_structure,
    audit_structure,
    rename_structure,
    structure_report,
)
from .tournaments import Tournament, common_out_neighborhood


def _comb(n: int, k: int) -> int:
    return math.comb(n, k) if n >= k >= 0 else 0


# --- embeddings and verification -----------------------------------------


@dataclass
class Embedding:
    """Injective guest->host map together with its verification status."""

    mapping: dict[int, int]
    verified: bool
    seed: Optional[int] = None

    def __len__(self) -> int:
        return len(self.mapping)

    def to_dict(self) -> dict:
        return {
            "pairs": sorted((int(u), int(x)) for u, x in self.mapping.items()),
            "verified": self.verified,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Embedding":
        return cls({int(u): int(x) for u, x in d["pairs"]}, bool(d["verified"]), d.get("seed"))


@dataclass(frozen=True)
class NotFound:
    """Exhaustive search ruled the guest out of the host."""

    nodes: int


@dataclass(frozen=True)
class BudgetExhausted:
    """Search stopped at its node budget without a verdict."""

    nodes: int


SearchOutcome = Union[Embedding, NotFound, BudgetExhausted]


def verify_embedding(G: Digraph, T: Tournament, phi: dict[int, int]) -> bool:
    """Total, injective, and every guest edge forward in T."""
    if len(phi) != G.n or set(phi) != set(range(G.n)):
        return False
    imgs = list(phi.values())
    if len(set(imgs)) != len(imgs):
        return False
    if any(not 0 <= x < T.n for x in imgs):
        return False
    return all(T.has_edge(phi[u], phi[v]) for u, v in G.edges)


def backtracking_embed(
    G: Digraph, T: Tournament, node_budget: int = 10_000_000
) -> SearchOutcome:
    """Exact search for a copy of G in T, extending along a topological order.

    Candidate sets shrink by host neighborhood intersections as guest
    neighbors get placed; a node is one attempted assignment.  Either finds a
    (verified) embedding, proves there is none, or gives up at the budget.
    """
    order = validate_acyclic(G)
    host_all = full_mask(T.n)
    phi: dict[int, int] = {}
    used = 0
    nodes = 0

    def candidates(v: int) -> VertexSet:
        m = host_all & ~used
        for p in G.in_adj[v]:
            if p in phi:
                m &= T.out_row(phi[p])
        for q in G.out_adj[v]:
            if q in phi:
                m &= T.in_row(phi[q])
        return m

    def extend(idx: int) -> Optional[bool]:
        # True = found, False = exhausted, None = budget
        nonlocal used, nodes
        if idx == len(order):
            return True
        v = order[idx]
        for x in bits_of(candidates(v)):
            nodes += 1
            if nodes > node_budget:
                return None
            phi[v] = x
            used |= 1 << x
            res = extend(idx + 1)
            if res:
                return True
            used &= ~(1 << x)
            del phi[v]
            if res is None:
                return None
        return False

    res = extend(0)
    if res is True:
        assert verify_embedding(G, T, phi)
        return Embedding(dict(phi), verified=True)
    if res is None:
        return BudgetExhausted(nodes)
    return NotFound(nodes)


# --- one local-lemma layer round ------------------------------------------


@dataclass
class EmbedLayerInstance:
    """Inputs for one resampling round.

    W1 goes into A with candidate sets f (each at least b big); each v in W2
    forbids the image of its W1-neighbors from landing in the family F[v].
    delta_plus / delta_minus cap the bipartite degrees and set the density
    budget (1/(4 d+ d-)) (2^{-1/2} b/a)^{deg v} that F[v] has to respect.
    """

    W1: tuple[int, ...]
    W2: tuple[int, ...]
    in_nbrs: dict[int, tuple[int, ...]]
    A: VertexSet
    b: int
    f: dict[int, VertexSet]
    F: dict[int, MonotoneFamily]
    delta_plus: int
    delta_minus: int
    floor_factor: int = 32
    name: str = "layer"

    @property
    def a(self) -> int:
        return self.A.bit_count()

    def density_cap(self, d: int) -> Fraction:
        base = SQRT_HALF_LOW * Fraction(self.b, self.a)
        return Fraction(1, 4 * self.delta_plus * self.delta_minus) * base**d

    def validate(
        self,
        density_mode: str = "exact",
        exact_cap: int = 2_000_000,
        samples: int = 20_000,
        seed: Optional[int] = None,
    ) -> list[tuple[str, bool, str]]:
        """Check the round's preconditions; hard failures raise.

        density_mode 'exact' enumerates each F[v] at its own degree,
        'sampled' estimates (undecided -> PreconditionUnverified), 'skip'
        leaves families to the caller.
        """
        items: list[tuple[str, bool, str]] = []
        if self.delta_plus < 1 or self.delta_minus < 1:
            raise PreconditionViolated("degree bounds must be at least 1")
        if set(self.W1) & set(self.W2):
            raise PreconditionViolated("W1 and W2 overlap")
        if not (self.a >= self.b >= self.floor_factor * len(self.W1)):
            raise PreconditionViolated(
                f"need a >= b >= {self.floor_factor}|W1|, got "
                f"a={self.a} b={self.b} |W1|={len(self.W1)}"
            )
        items.append(("sizes", True, f"a={self.a} b={self.b} |W1|={len(self.W1)}"))
        w1set = set(self.W1)
        deg_plus = {u: 0 for u in self.W1}
        for v in self.W2:
            nb = self.in_nbrs.get(v, ())
            if len(set(nb)) != len(nb) or not set(nb) <= w1set:
                raise PreconditionViolated(f"neighbors of {v} not a subset of W1")
            if len(nb) > self.delta_minus:
                raise PreconditionViolated(f"deg({v})={len(nb)} exceeds {self.delta_minus}")
            for u in nb:
                deg_plus[u] += 1
        if any(d > self.delta_plus for d in deg_plus.values()):
            raise PreconditionViolated("a W1 vertex exceeds its degree bound")
        items.append(("degrees", True, ""))
        for u in self.W1:
            fu = self.f[u]
            if fu & ~self.A:
                raise PreconditionViolated(f"f({u}) leaves A")
            if fu.bit_count() < self.b:
                raise PreconditionViolated(
                    f"|f({u})|={fu.bit_count()} below b={self.b}"
                )
        items.append(("candidates", True, ""))
        if density_mode == "skip":
            return items
        for v in self.W2:
            fam = self.F[v]
            if fam.ground != self.A:
                raise PreconditionViolated(f"family for {v} not grounded on A")
            d = len(self.in_nbrs.get(v, ()))
            cap = self.density_cap(d)
            total = _comb(self.a, d)
            if density_mode == "exact" and total <= exact_cap:
                dens = fam.k_density_exact(d, cap=exact_cap)
                ok = dens <= cap
                items.append(
                    (f"density[{v}]", ok, f"{float(dens):.3g} vs cap {float(cap):.3g}")
                )
                if not ok:
                    raise PreconditionViolated(
                        f"family for {v} too dense: {float(dens):.3g} > {float(cap):.3g}"
                    )
            else:
                if seed is None:
                    raise PreconditionUnverified(
                        f"no seed to sample density of F[{v}]"
                    )
                sd = fam.k_density_sampled(d, samples, _subseed(seed, "dens", v))
                if sd.ci_hi <= cap:
                    items.append((f"density[{v}]", True, f"<= {sd.ci_hi:.3g} sampled"))
                elif sd.ci_lo > cap:
                    raise PreconditionViolated(
                        f"family for {v} too dense (sampled {sd.estimate:.3g})"
                    )
                else:
                    raise PreconditionUnverified(
                        f"density of F[{v}] undecided at {samples} samples"
                    )
        return items


@dataclass
class LayerEmbedResult:
    phi: dict[int, int]
    resamples: int
    collision_events: int
    family_events: int


def lll_embed_layer(
    inst: EmbedLayerInstance, seed: int, max_resamples: int = 1_000_000
) -> LayerEmbedResult:
    """Resample to an assignment avoiding collisions and all families.

    Independent uniform draws from each f(u); the first violated event in a
    fixed scan order (candidate-sharing pairs, then family vertices) has its
    own variables redrawn.  A family event only fires on an injectively
    placed neighborhood whose image set lies in the family.  Postconditions
    are re-checked from scratch before returning.
    """
    rng = np.random.default_rng(seed)
    pool = {u: members_of(inst.f[u]) for u in inst.W1}

    def draw(u: int) -> int:
        return pool[u][int(rng.integers(len(pool[u])))]

    phi = {u: draw(u) for u in inst.W1}
    pairs = [
        (u, w)
        for i, u in enumerate(inst.W1)
        for w in inst.W1[i + 1 :]
        if inst.f[u] & inst.f[w]
    ]
    fam_vs = [v for v in inst.W2 if v in inst.F]

    def fam_violated(v: int) -> bool:
        nb = inst.in_nbrs.get(v, ())
        imgs = [phi[u] for u in nb]
        if len(set(imgs)) != len(imgs):
            return False  # a collision event owns this configuration
        return mask_of(imgs) in inst.F[v]

    for v in fam_vs:
        if not inst.in_nbrs.get(v, ()) and fam_violated(v):
            raise ResampleBudgetExhausted([f"{inst.name}:empty-family[{v}]"], 0)

    resamples = 0
    while True:
        bad_vars: Optional[tuple[int, ...]] = None
        bad_name = ""
        for u, w in pairs:
            if phi[u] == phi[w]:
                bad_vars, bad_name = (u, w), f"collision({u},{w})"
                break
        if bad_vars is None:
            for v in fam_vs:
                if fam_violated(v):
                    bad_vars, bad_name = inst.in_nbrs[v], f"family({v})"
                    break
        if bad_vars is None:
            break
        if resamples >= max_resamples:
            stuck = [f"{inst.name}:{bad_name}"]
            stuck += [
                f"{inst.name}:collision({u},{w})" for u, w in pairs if phi[u] == phi[w]
            ]
            stuck += [f"{inst.name}:family({v})" for v in fam_vs if fam_violated(v)]
            raise ResampleBudgetExhausted(sorted(set(stuck)), resamples)
        for u in bad_vars:
            phi[u] = draw(u)
        resamples += 1

    imgs = list(phi.values())
    assert len(set(imgs)) == len(imgs), "post: injectivity"
    assert all(1 << phi[u] & inst.f[u] for u in inst.W1), "post: f-membership"
    for v in fam_vs:
        nb = inst.in_nbrs.get(v, ())
        m = mask_of(phi[u] for u in nb)
        assert m.bit_count() == len(nb) and m not in inst.F[v], "post: family miss"
    return LayerEmbedResult(phi, resamples, len(pairs), len(fam_vs))


# --- pipeline over a block structure --------------------------------------


@dataclass(frozen=True)
class LayerSchedule:
    """Per-guest-layer constants after renaming block rungs to layers."""

    H: int
    w: int
    delta: int
    s: tuple[int, ...]
    m3: tuple[int, ...]
    b_inst: tuple[int, ...]
    ratio: Fraction  # rational lower bound on 2^{-1/2} s_1 / (2 b_1)

    def delta_kd(self, k: int, d: int) -> Fraction:
        return Fraction(1, 4 * self.delta**2) ** k * self.ratio**d

    def k_of(self, i: int, j: int) -> int:
        return min(self.w, j - i - 1)


def _schedule_from(es: EmbeddingStructure, H: int) -> LayerSchedule:
    p = es.params
    blk = lambda t: (t - 1) // p.w + 1
    s = tuple(p.s[blk(t) - 1] for t in range(1, H + 1))
    m3 = tuple(p.m_int(blk(t)) // 3 for t in range(1, H + 1))
    b_inst = tuple(x // 2 for x in s)
    ratio = SQRT_HALF_LOW * Fraction(p.s[0], 2 * p.b_int(1))
    return LayerSchedule(H, p.w, p.delta_comm, s, m3, b_inst, ratio)


def _layer_union(A: list[VertexSet], lo: int, hi: int) -> VertexSet:
    """Union of A_lo .. A_hi (1-based, empty when the range is)."""
    m = 0
    for t in range(max(lo, 1), hi + 1):
        m |= A[t - 1]
    return m


@dataclass
class PipelineReport:
    base_checks: list[CommunityCheck] = field(default_factory=list)
    cond3_checks: list[tuple[int, int, CommunityCheck]] = field(default_factory=list)
    resamples: list[int] = field(default_factory=list)


def _require(chk: CommunityCheck, what: str, layer: int) -> None:
    if chk.passed is True:
        return
    if chk.passed is None:
        raise PreconditionUnverified(f"{what}: sampled check undecided")
    raise LayerFailed(layer, what)


def embed_pipeline(
    G: Digraph,
    L: Layering,
    T: Tournament,
    es: EmbeddingStructure,
    seed: int,
    floor_factor: int = 32,
    check_condition3: bool = True,
    audit: bool = True,
    exact_cap: int = 2_000_000,
    samples: int = 20_000,
    max_resamples: int = 1_000_000,
    report: Optional[PipelineReport] = None,
) -> Embedding:
    """Embed a layered guest along the renamed rungs of a block structure.

    Keeps the out-community condition toward every not-yet-finished layer:
    for v in layer j with r unembedded in-neighbors, the pair (union of up
    to w preceding layer sets, images of v's placed in-neighbors) stays an
    (A_j, r, s_j, delta_{k,r} C(m_j/3, r))-out-community.  Each round then
    has candidate sets of size > s_i/2 and per-vertex families sparse enough
    for the local lemma.
    """
    check_layering(G, L)
    validate_acyclic(G)
    p = es.params
    H = L.height
    if L.width > p.w:
        raise PreconditionViolated(f"guest width {L.width} exceeds structure w={p.w}")
    if H > p.h * p.w:
        raise PreconditionViolated(f"height {H} exceeds {p.h}x{p.w} layers")
    dmax = max(
        [0]
        + [G.in_degree(v) for v in range(G.n)]
        + [G.out_degree(v) for v in range(G.n)]
    )
    if dmax > p.delta_comm:
        raise PreconditionViolated(f"guest degree {dmax} exceeds delta={p.delta_comm}")
    if audit:
        rep = structure_report(audit_structure(T, es))
        if not rep["passed"]:
            bad = [c for c in rep["checks"] if not c["ok"]]
            raise PreconditionViolated(f"structure audit failed: {bad[:3]}")
    A = rename_structure(es, H)
    sched = _schedule_from(es, H)
    layers = [sorted(L.layer_members(i)) for i in range(1, H + 1)]
    for i in range(1, H + 1):
        if sched.b_inst[i - 1] < floor_factor * len(layers[i - 1]):
            raise PreconditionViolated(
                f"layer {i}: s_i/2={sched.b_inst[i - 1]} below "
                f"{floor_factor}*{len(layers[i - 1])}"
            )
    rep = report if report is not None else PipelineReport()

    # ground condition before anything is placed, one check per in-degree
    # class per layer
    for j in range(1, H + 1):
        k0 = sched.k_of(0, j)
        ground = _layer_union(A, j - k0, j - 1)
        for r in sorted({G.in_degree(v) for v in layers[j - 1]}):
            e = sched.delta_kd(k0, r) * _comb(sched.m3[j - 1], r)
            chk = is_community(
                T, ground, 0, A[j - 1], r, sched.s[j - 1], e, "out",
                exact_cap, samples, _subseed(seed, "base", j, r),
            )
            rep.base_checks.append(chk)
            _require(chk, f"base condition at layer {j}, r={r}", 0)

    phi: dict[int, int] = {}
    r = {v: G.in_degree(v) for v in range(G.n)}
    layer_of = L.layers

    for i in range(1, H + 1):
        W1 = tuple(layers[i - 1])
        if not W1:
            rep.resamples.append(0)
            continue
        placed = mask_of(phi.values())
        f: dict[int, VertexSet] = {}
        for u in W1:
            pu = mask_of(phi[q] for q in G.in_adj[u] if q in phi)
            assert r[u] == sum(1 for q in G.in_adj[u] if q not in phi) == 0
            fu = common_out_neighborhood(T, pu, A[i - 1]) & ~placed
            if fu.bit_count() < sched.b_inst[i - 1]:
                raise LayerFailed(
                    i, f"candidate floor: |f({u})|={fu.bit_count()} "
                    f"< {sched.b_inst[i - 1]}"
                )
            f[u] = fu
        W2 = tuple(sorted({v for u in W1 for v in G.out_adj[u]}))
        in_nbrs = {
            v: tuple(u for u in G.in_adj[v] if layer_of[u] == i) for v in W2
        }
        F: dict[int, MonotoneFamily] = {}
        for v in W2:
            j = layer_of[v]
            assert i < j <= i + sched.w
            d_v = len(in_nbrs[v])
            r_new = r[v] - d_v
            kij = sched.k_of(i, j)
            ground = _layer_union(A, j - kij, j - 1)
            Cv = mask_of(phi[q] for q in G.in_adj[v] if q in phi)
            e_obs = sched.delta_kd(kij, r_new) * _comb(
                sched.m3[j - 1] - d_v, r_new
            )

            def bad(
                S: VertexSet,
                ground=ground,
                Cv=Cv,
                Rj=A[j - 1],
                r_new=r_new,
                sj=sched.s[j - 1],
                e=e_obs,
                tag=(i, v),
            ) -> bool:
                chk = is_community(
                    T, ground, Cv | S, Rj, r_new, sj, e, "out",
                    exact_cap, samples, _subseed(seed, "fam", *tag, S % (1 << 24)),
                )
                return chk.passed is not True

            F[v] = MonotoneFamily(A[i - 1], predicate=bad, name=f"F[{v}]@{i}")
        inst = EmbedLayerInstance(
            W1, W2, in_nbrs, A[i - 1], sched.b_inst[i - 1], f, F,
            p.delta_comm, p.delta_comm, floor_factor, name=f"layer{i}",
        )
        inst.validate(density_mode="skip")
        for v in W2:
            # density precondition, fast form: with the community reduced to
            # its core when k=0 and r_new=0 this is one matrix count
            j = layer_of[v]
            d_v = len(in_nbrs[v])
            kij = sched.k_of(i, j)
            r_new = r[v] - d_v
            cap = inst.density_cap(d_v)
            if kij == 0 and r_new == 0:
                Cv = mask_of(phi[q] for q in G.in_adj[v] if q in phi)
                chk = is_community(
                    T, A[i - 1], Cv, A[j - 1], d_v, sched.s[j - 1],
                    cap * _comb(inst.a, d_v), "out",
                    exact_cap, samples, _subseed(seed, "cap", i, v),
                )
                _require(chk, f"family density cap for {v}", i)
            else:
                total = _comb(inst.a, d_v)
                if total <= exact_cap:
                    dens = F[v].k_density_exact(d_v, cap=exact_cap)
                    if dens > cap:
                        raise LayerFailed(
                            i, f"family for {v} too dense: {float(dens):.3g}"
                        )
                else:
                    sd = F[v].k_density_sampled(
                        d_v, samples, _subseed(seed, "capS", i, v)
                    )
                    if sd.ci_lo > cap:
                        raise LayerFailed(i, f"family for {v} too dense (sampled)")
                    if sd.ci_hi > cap:
                        raise PreconditionUnverified(
                            f"layer {i}: density of F[{v}] undecided"
                        )
        try:
            res = lll_embed_layer(inst, _subseed(seed, "lll", i), max_resamples)
        except ResampleBudgetExhausted as ex:
            raise LayerFailed(i, f"resampling stalled: {ex.events[:4]}") from ex
        rep.resamples.append(res.resamples)
        phi.update(res.phi)
        for v in W2:
            d_v = len(in_nbrs[v])
            assert d_v == sum(1 for u in G.in_adj[v] if layer_of[u] == i)
            r[v] -= d_v
        if check_condition3:
            for v in W2:
                j = layer_of[v]
                kij = sched.k_of(i, j)
                ground = _layer_union(A, j - kij, j - 1)
                Cv = mask_of(phi[q] for q in G.in_adj[v] if q in phi)
                e = sched.delta_kd(kij, r[v]) * _comb(sched.m3[j - 1], r[v])
                chk = is_community(
                    T, ground, Cv, A[j - 1], r[v], sched.s[j - 1], e, "out",
                    exact_cap, samples, _subseed(seed, "c3", i, v),
                )
                rep.cond3_checks.append((i, v, chk))
                _require(chk, f"condition for {v} after layer {i}", i)

    if not verify_embedding(G, T, phi):
        raise LayerFailed(H, "final verification failed")
    return Embedding(phi, verified=True, seed=seed)


# --- pipeline over a graded structure -------------------------------------


def embed_graded_pipeline(
    G: Digraph,
    L: Layering,
    T: Tournament,
    gs: GradedStructure,
    seed: int,
    floor_factor: int = 32,
    audit: bool = True,
    exact_cap: int = 2_000_000,
    samples: int = 20_000,
    max_resamples: int = 1_000_000,
    report: Optional[PipelineReport] = None,
) -> Embedding:
    """Embed a width-1 guest left to right along graded layer sets.

    Every round forbids placements whose common out-neighborhood in the next
    layer set drops to s_{i+1} or below, so the next round's candidate sets
    stay above the local-lemma floor; the last layer is filled greedily off
    its s_H-sized guarantee.
    """
    check_layering(G, L)
    validate_acyclic(G)
    p = gs.params
    H = p.height
    if L.height != H or L.layer_sizes() != list(p.layer_sizes):
        raise PreconditionViolated("layering does not match the structure")
    for u, v in G.edges:
        if L.layers[v] - L.layers[u] != 1:
            raise PreconditionViolated("graded pipeline needs width exactly 1")
    if audit:
        rep0 = structure_report(audit_graded_structure(T, gs))
        if not rep0["passed"]:
            bad = [c for c in rep0["checks"] if not c["ok"]]
            raise PreconditionViolated(f"graded audit failed: {bad[:3]}")
    rep = report if report is not None else PipelineReport()
    A = gs.A
    layers = [sorted(L.layer_members(i)) for i in range(1, H + 1)]
    phi: dict[int, int] = {}

    for i in range(1, H):
        W1 = tuple(layers[i - 1])
        a_i = A[i - 1].bit_count()
        b_inst = p.b[0] if i == 1 else p.s[i - 1]
        if b_inst < floor_factor * len(W1):
            raise PreconditionViolated(
                f"layer {i}: floor {b_inst} < {floor_factor}*{len(W1)}"
            )
        f: dict[int, VertexSet] = {}
        for u in W1:
            if i == 1:
                fu = A[0]
            else:
                pu = mask_of(phi[q] for q in G.in_adj[u])
                fu = common_out_neighborhood(T, pu, A[i - 1])
            if fu.bit_count() < b_inst:
                raise LayerFailed(i, f"candidate floor: |f({u})|={fu.bit_count()}")
            f[u] = fu
        W2 = tuple(layers[i])
        in_nbrs = {v: tuple(G.in_adj[v]) for v in W2}
        s_next = p.s[i]

        def thin(S: VertexSet, Rn=A[i], s=s_next) -> bool:
            return common_out_neighborhood(T, S, Rn).bit_count() <= s

        fam = MonotoneFamily(A[i - 1], predicate=thin, name=f"thin@{i}")
        F = {v: fam for v in W2}
        inst = EmbedLayerInstance(
            W1, W2, in_nbrs, A[i - 1], b_inst, f, F,
            p.delta_plus, p.delta_minus, floor_factor, name=f"glayer{i}",
        )
        inst.validate(density_mode="skip")
        for d_v in sorted({len(in_nbrs[v]) for v in W2}):
            cap = inst.density_cap(d_v)
            chk = is_community(
                T, A[i - 1], 0, A[i], d_v, s_next, cap * _comb(a_i, d_v), "out",
                exact_cap, samples, _subseed(seed, "gcap", i, d_v),
            )
            rep.base_checks.append(chk)
            _require(chk, f"thinness density cap at layer {i}, d={d_v}", i)
        try:
            res = lll_embed_layer(inst, _subseed(seed, "glll", i), max_resamples)
        except ResampleBudgetExhausted as ex:
            raise LayerFailed(i, f"resampling stalled: {ex.events[:4]}") from ex
        rep.resamples.append(res.resamples)
        phi.update(res.phi)
        for v in W2:
            pu = mask_of(phi[q] for q in G.in_adj[v])
            got = common_out_neighborhood(T, pu, A[i]).bit_count()
            if in_nbrs[v] and got <= s_next:
                raise LayerFailed(i, f"guarantee lost for {v}: {got} <= {s_next}")

    used = mask_of(phi.values())
    for v in layers[H - 1]:
        pu = mask_of(phi[q] for q in G.in_adj[v])
        fv = common_out_neighborhood(T, pu, A[H - 1]) & ~used
        if not fv:
            raise LayerFailed(H, f"greedy ran dry at {v}")
        x = next(bits_of(fv))
        phi[v] = x
        used |= 1 << x
    if not verify_embedding(G, T, phi):
        raise LayerFailed(H, "final verification failed")
    return Embedding(phi, verified=True, seed=seed)
