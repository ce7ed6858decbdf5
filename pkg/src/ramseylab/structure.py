"""Carving a layered embedding structure out of a host tournament.

The structure is a chain of blocks B_h, ..., B_1 sitting in disjoint windows
of a (locally) median order, each block carrying a nested ladder
B_{i,0} <= ... <= B_{i,w} <= B_i, so that the previous block together with
each ladder rung forms an out-community toward the next rung.  Blocks are
found right to left; each step is one backward_step: a dependent random
choice from the interval into the current block, then w inner choices that
thin the block while keeping interval-side communities alive.

Every probabilistic step is verified after the fact; failed stages are
retried with fresh randomness and an exhausted budget raises
StructureFailed with the stage name.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .bitset import VertexSet, bits_of, mask_of, members_of
from .communities import (
    CommunityCheck,
    MonotoneFamily,
    dependent_random_choice,
    extension_bad_family,
    is_community,
)
from .errors import (
    InfeasibleParams,
    PreconditionViolated,
    RetriesExhausted,
    StructureFailed,
    TooLarge,
    TooSmall,
)
from .tournaments import (
    MedianOrder,
    Tournament,
    common_in_neighborhood,
    directed_density,
    identity_order,
    median_order_exact,
    median_order_local,
)


def _subseed(seed: int, *key) -> int:
    flat = tuple(
        k if isinstance(k, int) else int.from_bytes(str(k).encode(), "big") % (1 << 32)
        for k in key
    )
    ss = np.random.SeedSequence(entropy=seed, spawn_key=flat)
    return int(ss.generate_state(1, dtype=np.uint64)[0] & 0x7FFFFFFFFFFFFFFF)


def _ceil_frac(f: Fraction) -> int:
    return -((-f.numerator) // f.denominator)


def _ceil_root_mul(f: Fraction, root_of: Fraction, deg: int) -> int:
    """Exact ceil(f * root_of**(1/deg)) by big-integer bisection."""
    g = Fraction(f) ** deg * Fraction(root_of)
    num, den = g.numerator, g.denominator
    lo, hi = 0, 1 << ((num // den).bit_length() // deg + 2)
    while lo < hi:
        mid = (lo + hi) // 2
        if mid**deg * den >= num:
            hi = mid
        else:
            lo = mid + 1
    return lo


def _lowest(mask: VertexSet, k: int) -> VertexSet:
    out = 0
    for i, v in enumerate(bits_of(mask)):
        if i >= k:
            break
        out |= 1 << v
    return out


# --- parameters -----------------------------------------------------------


@dataclass(frozen=True)
class StructureParams:
    """Size ladder for an h-block, width-w structure.

    m_i = ceil(c_m delta^{-1/Delta} s_i), b_i = ceil(c_b m_i),
    a_i = ceil(c_a b_i), mid_i = ceil(b_i / c_mid) (trim size of the top
    rung).  The c-constants replace the published 3^{30 Delta w},
    3^{6 Delta w}, 3^{10 Delta w}, 3^{3 Delta w} factors; all deriveds are
    exact big integers (the root is taken by integer bisection).
    """

    delta_comm: int
    w: int
    h: int
    s: tuple[int, ...]
    delta: Fraction
    c_m: Fraction
    c_b: Fraction
    c_a: Fraction
    c_mid: Fraction

    def __post_init__(self):
        if self.delta_comm < 1 or self.w < 1 or self.h < 1:
            raise InfeasibleParams("delta_comm, w, h must be positive")
        if len(self.s) != self.h:
            raise InfeasibleParams("need one s value per block")
        if not 0 < self.delta <= 1:
            raise InfeasibleParams("delta must lie in (0, 1]")
        for i, si in enumerate(self.s):
            if si < 1:
                raise InfeasibleParams("s values must be positive")
            if i > 0 and 2 * si < self.s[i - 1]:
                raise InfeasibleParams(f"s ladder: 2*s_{i+1} < s_{i}")
            if i + 1 < self.h and 2 * si < self.s[i + 1]:
                raise InfeasibleParams(f"s ladder: 2*s_{i+1} < s_{i+2}")
        m, b, a, mid = [], [], [], []
        for i in range(self.h):
            m.append(_ceil_root_mul(self.c_m * self.s[i], 1 / self.delta,
                                    self.delta_comm))
            b.append(_ceil_frac(self.c_b * m[i]))
            a.append(_ceil_frac(self.c_a * b[i]))
            mid.append(_ceil_frac(Fraction(b[i]) / self.c_mid))
            if m[i] < 3:
                raise InfeasibleParams("m_i >= 3 required for inner densities")
            if not m[i] <= mid[i] <= b[i] <= a[i]:
                raise InfeasibleParams(
                    f"ladder must give m <= mid <= b <= a at block {i + 1}")
        object.__setattr__(self, "_m", tuple(m))
        object.__setattr__(self, "_b", tuple(b))
        object.__setattr__(self, "_a", tuple(a))
        object.__setattr__(self, "_mid", tuple(mid))

    @classmethod
    def paper(
        cls, delta_comm: int, w: int, h: int, s: Sequence[int], delta: Fraction
    ) -> "StructureParams":
        """Published constants: c_m = 3^{30 Delta w}, c_b = 3^{6 Delta w},
        c_a = 3^{10 Delta w}, trim 3^{3 Delta w}."""
        dw = delta_comm * w
        return cls(
            delta_comm, w, h, tuple(s), Fraction(delta),
            Fraction(3) ** (30 * dw),
            Fraction(3) ** (6 * dw),
            Fraction(3) ** (10 * dw),
            Fraction(3) ** (3 * dw),
        )

    def m_int(self, i: int) -> int:
        return self._m[i - 1]

    def b_int(self, i: int) -> int:
        return self._b[i - 1]

    def a_int(self, i: int) -> int:
        return self._a[i - 1]

    def mid_int(self, i: int) -> int:
        return self._mid[i - 1]

    @property
    def n_required(self) -> int:
        return sum(6 * self.a_int(i) for i in range(1, self.h + 1))

    def e_out(self, i: int) -> Fraction:
        """Budget of the block-i out-community certificates."""
        return (
            self.delta
            * (Fraction(self.s[i - 1], 2 * self.b_int(i))) ** self.delta_comm
            * math.comb(self.m_int(i) // 3, self.delta_comm)
        )

    def to_dict(self) -> dict:
        return {
            "delta_comm": self.delta_comm, "w": self.w, "h": self.h,
            "s": list(self.s), "delta": str(self.delta), "c_m": str(self.c_m),
            "c_b": str(self.c_b), "c_a": str(self.c_a), "c_mid": str(self.c_mid),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StructureParams":
        return cls(
            d["delta_comm"], d["w"], d["h"], tuple(d["s"]), Fraction(d["delta"]),
            Fraction(d["c_m"]), Fraction(d["c_b"]), Fraction(d["c_a"]),
            Fraction(d["c_mid"]),
        )


@dataclass(frozen=True)
class StepTuning:
    """Knobs of the probabilistic steps (published values: k_in = 2 Delta,
    delta_inner = 3^{-3 Delta}, d = 1/3)."""

    k_in: int
    delta_inner: Fraction
    d: Fraction = Fraction(1, 3)
    drc_retries: int = 64
    step_retries: int = 3
    exact_cap: int = 2_000_000
    samples: int = 20_000

    def __post_init__(self):
        if self.k_in < 1:
            raise InfeasibleParams("k_in >= 1")
        if not Fraction(self.delta_inner) < Fraction(self.d) ** self.k_in / 2:
            raise InfeasibleParams("delta_inner must be below d^k_in / 2")

    def to_dict(self) -> dict:
        return {
            "k_in": self.k_in, "delta_inner": str(self.delta_inner),
            "d": str(self.d), "drc_retries": self.drc_retries,
            "step_retries": self.step_retries, "exact_cap": self.exact_cap,
            "samples": self.samples,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "StepTuning":
        return cls(
            d["k_in"], Fraction(d["delta_inner"]), Fraction(d["d"]),
            d["drc_retries"], d["step_retries"], d["exact_cap"], d["samples"],
        )


# --- one backward step ----------------------------------------------------


class _StageRetry(Exception):
    def __init__(self, reason: str):
        self.reason = reason


@dataclass
class BackwardStepResult:
    A: VertexSet                      # next block, |A| = b_target (0 when final)
    levels: tuple[VertexSet, ...]     # B_0 <= ... <= B_w
    K_levels: tuple[VertexSet, ...]   # K_w = {} <= ... <= K_0
    out_certs: list[CommunityCheck]   # j = 1..w toward levels[j]
    in_certs: list[CommunityCheck]    # interval-side audits, top rung first
    drc_meta: list[dict]
    attempts_used: int


def backward_step(
    T: Tournament,
    I: Optional[VertexSet],
    B: VertexSet,
    s: int,
    b_target: int,
    m_target: int,
    mid_target: int,
    delta_comm: int,
    w: int,
    e_out: Fraction,
    tuning: StepTuning,
    seed: int,
) -> BackwardStepResult:
    """Extend the structure one block to the left.

    With an interval I: one choice pulls the top rung B_w out of B (an
    in-community toward I), then w choices inside the shrinking rungs peel
    off K-vertices whose common in-neighborhood keeps both the rung ladder
    and a large interval-side survivor set A alive.  I = None is the final
    block: only the rung ladder is built.
    """
    if I is not None:
        if I & B:
            raise PreconditionViolated("I and B must be disjoint")
        dens = directed_density(T, I, B)
        if dens < tuning.d:
            raise PreconditionViolated(f"d(I, B) = {dens} < {tuning.d}")
    if B.bit_count() < mid_target:
        raise PreconditionViolated("B smaller than the trim size")
    last = None
    for attempt in range(tuning.step_retries):
        try:
            return _backward_attempt(
                T, I, B, s, b_target, m_target, mid_target, delta_comm, w,
                e_out, tuning, _subseed(seed, attempt), attempt,
            )
        except (_StageRetry, RetriesExhausted) as ex:
            last = ex
    reason = last.reason if isinstance(last, _StageRetry) else "drc_retries"
    raise StructureFailed("backward_step", reason)


def _backward_attempt(
    T, I, B, s, b_target, m_target, mid_target, delta_comm, w, e_out,
    tuning, seed, attempt,
) -> BackwardStepResult:
    in_certs: list[CommunityCheck] = []
    drc_meta: list[dict] = []
    k_in = tuning.k_in
    if I is not None:
        k_out = k_in * w
        drc1 = dependent_random_choice(
            T, L=B, R=I, A=0, k=k_out, delta=k_out, s=b_target, d=tuning.d,
            seed=_subseed(seed, 0), mode="in", retries=tuning.drc_retries,
            exact_cap=tuning.exact_cap, samples=tuning.samples,
            m_floor=Fraction(mid_target), check_density=False,
        )
        drc_meta.append(drc1.to_dict())
        Bw = _lowest(drc1.M, mid_target)
        e_top = Fraction(tuning.delta_inner) ** w * math.comb(m_target, k_out)
        cert = is_community(
            T, Bw, 0, I, k_out, b_target, e_top, "in",
            exact_cap=tuning.exact_cap, samples=tuning.samples,
            seed=_subseed(seed, 1),
        )
        if cert.passed is not True:
            raise _StageRetry("top_rung_interval_cert")
        in_certs.append(cert)
    else:
        Bw = _lowest(B, mid_target)
    levels: list[VertexSet] = [0] * (w + 1)
    K_levels: list[VertexSet] = [0] * (w + 1)
    levels[w] = Bw
    A_cur = I if I is not None else 0
    for j in range(w, 0, -1):
        Bj, Kj = levels[j], K_levels[j]
        fam = None
        fdens = Fraction(0)
        if I is not None:
            fam, _ = extension_bad_family(
                T, A=Bj, C=Kj, R=I, delta1=k_in, delta2=k_in * (j - 1),
                m=m_target, s=b_target,
                delta2_density=Fraction(tuning.delta_inner) ** (j - 1),
                direction="in", exact_cap=tuning.exact_cap,
            )
            fdens = Fraction(tuning.delta_inner)
        drc = dependent_random_choice(
            T, L=Bj, R=Bj, A=A_cur, k=k_in, delta=delta_comm, s=s, d=tuning.d,
            seed=_subseed(seed, 2, j), mode="out", retries=tuning.drc_retries,
            family=fam, family_density=fdens,
            exact_cap=tuning.exact_cap, samples=tuning.samples,
            m_floor=Fraction(m_target),
        )
        drc_meta.append(drc.to_dict())
        levels[j - 1] = drc.M
        K_levels[j - 1] = Kj | drc.K
        if I is not None:
            A_cur = common_in_neighborhood(T, drc.K, A_cur)
            e_j = Fraction(tuning.delta_inner) ** (j - 1) * math.comb(
                m_target, k_in * (j - 1)
            )
            ic = is_community(
                T, levels[j - 1], K_levels[j - 1], I, k_in * (j - 1), b_target,
                e_j, "in", exact_cap=tuning.exact_cap, samples=tuning.samples,
                seed=_subseed(seed, 3, j),
            )
            if ic.passed is not True:
                raise _StageRetry(f"rung_{j - 1}_interval_cert")
            in_certs.append(ic)
    if I is not None:
        if A_cur.bit_count() < b_target:
            raise _StageRetry("interval_survivors_small")
        A = _lowest(A_cur, b_target)
    else:
        A = 0
    out_certs = []
    for j in range(1, w + 1):
        oc = is_community(
            T, A | levels[j - 1], 0, levels[j], delta_comm, s, e_out, "out",
            exact_cap=tuning.exact_cap, samples=tuning.samples,
            seed=_subseed(seed, 4, j),
        )
        if oc.passed is not True:
            raise _StageRetry(f"out_cert_{j}")
        out_certs.append(oc)
    return BackwardStepResult(
        A, tuple(levels), tuple(K_levels), out_certs, in_certs, drc_meta,
        attempt + 1,
    )


# --- whole structure ------------------------------------------------------


@dataclass
class BlockStructure:
    index: int                      # i in 1..h
    o: int                          # window start (0-based position)
    ell: Optional[int]              # pigeonhole slot used to place the window left of block i+1
    B: VertexSet
    levels: tuple[VertexSet, ...]
    K_levels: tuple[VertexSet, ...]
    out_certs: list[CommunityCheck]
    in_certs: list[CommunityCheck]
    drc_meta: list[dict]

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "o": self.o,
            "ell": self.ell,
            "B": members_of(self.B),
            "levels": [members_of(m) for m in self.levels],
            "K_levels": [members_of(m) for m in self.K_levels],
            "out_certs": [
                {"passed": c.passed, "bad": c.bad_count, "total": c.total_subsets,
                 "threshold": str(c.threshold)} for c in self.out_certs
            ],
            "in_certs": [
                {"passed": c.passed, "bad": c.bad_count, "total": c.total_subsets,
                 "threshold": str(c.threshold)} for c in self.in_certs
            ],
            "drc": self.drc_meta,
        }


@dataclass
class EmbeddingStructure:
    n: int
    order: tuple[int, ...]
    params: StructureParams
    tuning: StepTuning
    blocks: list[BlockStructure]    # index h first, 1 last
    seed: int
    order_mode: str

    def block(self, i: int) -> BlockStructure:
        return self.blocks[self.params.h - i]

    def layer_sets(self) -> list[VertexSet]:
        """A_1, ..., A_{hw}: rung j of block i becomes layer (i-1)w + j."""
        out = []
        for i in range(1, self.params.h + 1):
            blk = self.block(i)
            out.extend(blk.levels[1:])
        return out

    def base_rung(self, i: int) -> VertexSet:
        return self.block(i).levels[0]

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "seed": self.seed,
            "order_mode": self.order_mode,
            "order": list(self.order),
            "params": self.params.to_dict(),
            "tuning": self.tuning.to_dict(),
            "blocks": [b.to_dict() for b in self.blocks],
        }


def build_structure(
    T: Tournament,
    params: StructureParams,
    tuning: StepTuning,
    seed: int,
    order: Optional[MedianOrder] = None,
    order_mode: str = "local",
) -> EmbeddingStructure:
    """Find the full block chain in T, right to left along the order.

    order_mode: 'local' runs the relocation search, 'identity' takes the
    vertex numbering as-is (densities are still verified exactly), 'exact'
    solves small hosts optimally, 'given' uses the passed order.
    """
    N = T.n
    if N < params.n_required:
        raise TooSmall(f"host has {N} vertices, ladder needs {params.n_required}")
    if order_mode == "given":
        if order is None:
            raise ValueError("order_mode 'given' needs an order")
    elif order_mode == "local":
        order = median_order_local(T, seed=_subseed(seed, 999))
    elif order_mode == "exact":
        order = median_order_exact(T)
    elif order_mode == "identity":
        order = identity_order(T)
    else:
        raise ValueError(f"bad order_mode {order_mode!r}")
    ov = order.order
    h, w = params.h, params.w

    def window(p0: int, p1: int) -> VertexSet:
        return mask_of(ov[p0:p1])

    o_i = N - params.a_int(h)
    B_i = window(o_i, o_i + params.b_int(h))
    blocks: list[BlockStructure] = []
    pending_ell: Optional[int] = None  # slot that placed the current window
    for i in range(h, 0, -1):
        if i > 1:
            a_prev = params.a_int(i - 1)
            Iprime = window(o_i - 6 * a_prev, o_i)
            if directed_density(T, Iprime, B_i) < tuning.d:
                raise StructureFailed(f"block_{i}", "wide_interval_density")
            ell = None
            for cand in range(1, 7):
                Ic = window(o_i - cand * a_prev, o_i - (cand - 1) * a_prev)
                if directed_density(T, Ic, B_i) >= tuning.d:
                    ell = cand
                    break
            if ell is None:
                raise StructureFailed(f"block_{i}", "pigeonhole_density")
            o_prev = o_i - ell * a_prev
            I_mask = window(o_prev, o_prev + a_prev)
        else:
            ell, o_prev, I_mask = None, None, None
        try:
            res = backward_step(
                T, I_mask, B_i, params.s[i - 1], params.b_int(i - 1) if i > 1 else 0,
                params.m_int(i), params.mid_int(i), params.delta_comm, w,
                params.e_out(i), tuning, _subseed(seed, 100 + i),
            )
        except StructureFailed as ex:
            raise StructureFailed(f"block_{i}", ex.deficit) from ex
        blocks.append(
            BlockStructure(
                i, o_i, pending_ell, B_i, res.levels, res.K_levels,
                res.out_certs, res.in_certs, res.drc_meta,
            )
        )
        if i > 1:
            pending_ell = ell
            B_i = res.A
            o_i = o_prev
    return EmbeddingStructure(N, tuple(ov), params, tuning, blocks, seed, order_mode)


# --- audits ---------------------------------------------------------------


@dataclass(frozen=True)
class AuditItem:
    name: str
    ok: bool
    detail: str = ""


def audit_structure(
    T: Tournament, S: EmbeddingStructure, recheck_certs: bool = False
) -> list[AuditItem]:
    p = S.params
    items: list[AuditItem] = []
    seen: VertexSet = 0
    prev_o = None
    for i in range(p.h, 0, -1):
        blk = S.block(i)
        a_i, b_i, m_i = p.a_int(i), p.b_int(i), p.m_int(i)
        win = mask_of(S.order[blk.o : blk.o + a_i])
        items.append(AuditItem(f"B_{i}_in_window", blk.B & ~win == 0))
        items.append(
            AuditItem(f"B_{i}_size", blk.B.bit_count() == b_i,
                      f"{blk.B.bit_count()} vs {b_i}")
        )
        items.append(AuditItem(f"B_{i}_disjoint", blk.B & seen == 0))
        seen |= blk.B
        ok_nest = all(
            blk.levels[j] & ~blk.levels[j + 1] == 0 for j in range(p.w)
        ) and blk.levels[p.w] & ~blk.B == 0
        items.append(AuditItem(f"B_{i}_rungs_nested", ok_nest))
        ok_sand = all(
            m_i <= blk.levels[j].bit_count() <= b_i for j in range(1, p.w + 1)
        )
        items.append(
            AuditItem(
                f"B_{i}_rung_sizes", ok_sand,
                str([blk.levels[j].bit_count() for j in range(p.w + 1)]),
            )
        )
        if prev_o is not None:
            lo, hi = prev_o - 6 * a_i, prev_o - a_i
            items.append(
                AuditItem(f"o_{i}_window_chain", lo <= blk.o <= hi,
                          f"{blk.o} not in [{lo}, {hi}]")
            )
        prev_o = blk.o
        items.append(
            AuditItem(
                f"block_{i}_certs_passed",
                all(c.passed is True for c in blk.out_certs)
                and all(c.passed is True for c in blk.in_certs),
            )
        )
        if recheck_certs:
            ground_prev = S.block(i - 1).B if i > 1 else 0
            for j in range(1, p.w + 1):
                chk = is_community(
                    T, ground_prev | blk.levels[j - 1], 0, blk.levels[j],
                    p.delta_comm, p.s[i - 1], p.e_out(i), "out",
                    exact_cap=S.tuning.exact_cap, samples=S.tuning.samples,
                    seed=_subseed(S.seed, 500 + i, j),
                )
                items.append(
                    AuditItem(
                        f"recheck_out_cert_{i}_{j}", chk.passed is True,
                        f"bad={chk.bad_count} e={float(chk.threshold):.3g}",
                    )
                )
    return items


def structure_report(items: list[AuditItem]) -> dict:
    return {
        "passed": all(it.ok for it in items),
        "checks": [
            {"name": it.name, "ok": it.ok, **({"detail": it.detail} if it.detail else {})}
            for it in items
        ],
    }


# --- renaming -------------------------------------------------------------


def rename_structure(es: EmbeddingStructure, H: int) -> list[VertexSet]:
    """A_t = rung ((t-1) mod w)+1 of block ceil(t/w), for t = 1..H."""
    if H > es.params.h * es.params.w:
        raise IndexError(f"H = {H} exceeds h*w = {es.params.h * es.params.w}")
    return es.layer_sets()[:H]


def renamed_ground(es: EmbeddingStructure, t: int) -> VertexSet:
    """Certificate ground of layer t: B_{i-1} | rung j-1 where t = (i-1)w + j.

    Contains A_{t-w} | ... | A_{t-1} by rung nesting, so layer-t community
    statements restrict to any embedded prefix of the previous w layers.
    """
    w = es.params.w
    i, j = (t - 1) // w + 1, (t - 1) % w + 1
    prev = es.block(i - 1).B if i > 1 else 0
    return prev | es.block(i).levels[j - 1]


# --- graded (width-1) ladder ----------------------------------------------

# rational lower bound on 2^{-1/2}: used for odd half-powers so thresholds
# only ever tighten
SQRT_HALF_LOW = Fraction(7071067811, 10**10)


def _pow_sqrt_half(exp: int) -> Fraction:
    q = Fraction(1, 2) ** (exp // 2)
    return q * SQRT_HALF_LOW if exp % 2 else q


@dataclass(frozen=True)
class GradedParams:
    """Per-layer ladder for graded guests (every edge spans one layer).

    The published schedule sets eps = 2/Delta^-, ell = 4 Delta^- + 4,
    c_s = 32, c_b = 2000 Delta^+ Delta^- c_s, c_a = 2 c_b, draws
    k_i = 2 Delta^-_i, and sizes a_i = c_a n_i etc. with
    n_i = (2+eps)^{2(D_{i-1}+D_i)} |V_i| + n_{i+1}/2.  Any of these can be
    replaced wholesale; validation keeps only what the steps truly need.
    """

    height: int
    layer_sizes: tuple[int, ...]
    delta_in: tuple[int, ...]        # D_i = max in-degree of layer i+1, i = 1..H-1
    delta_plus: int
    delta_minus: int
    eps: Fraction
    ell: int
    k: tuple[int, ...]               # DRC draw counts per step
    a: tuple[int, ...]
    b: tuple[int, ...]
    s: tuple[int, ...]
    delta_list: tuple[Fraction, ...]  # community density levels per step

    def __post_init__(self):
        H = self.height
        if H < 1 or len(self.layer_sizes) != H:
            raise InfeasibleParams("layer_sizes must have one entry per layer")
        if not (len(self.a) == len(self.b) == len(self.s) == H):
            raise InfeasibleParams("a, b, s must have one entry per layer")
        if not (len(self.delta_in) == len(self.k) == len(self.delta_list) == max(H - 1, 0)):
            raise InfeasibleParams("delta_in, k, delta_list must have H-1 entries")
        if self.ell < 2:
            raise InfeasibleParams("ell >= 2")
        if Fraction(2 * self.ell, self.ell - 1) > 2 + self.eps:
            raise InfeasibleParams("need 2*ell/(ell-1) <= 2 + eps")
        for i in range(H - 1):
            if self.delta_in[i] < 1:
                raise InfeasibleParams(
                    "consecutive layers must be joined (split disconnected guests)")
            if self.k[i] < 1:
                raise InfeasibleParams("draw counts must be positive")
        for i in range(H):
            if not 1 <= self.s[i] <= self.b[i] <= self.a[i]:
                raise InfeasibleParams(f"need s <= b <= a at layer {i + 1}")
            if i + 1 < H and 2 * self.a[i] < self.a[i + 1]:
                raise InfeasibleParams(f"need 2 a_{i + 1} >= a_{i + 2}")
        if self.s[H - 1] < self.layer_sizes[H - 1]:
            raise InfeasibleParams("s_H must cover the last layer for the greedy finish")

    @classmethod
    def from_digraph(
        cls,
        G,
        L,
        c_s: Fraction | int | None = None,
        c_b: Fraction | int | None = None,
        c_a: Fraction | int | None = None,
        eps: Fraction | None = None,
        ell: int | None = None,
        k: Sequence[int] | None = None,
    ) -> "GradedParams":
        H = L.height
        sizes = tuple(L.layer_sizes())
        din = []
        for i in range(1, H):
            members = L.layer_members(i + 1)
            din.append(max(len(G.in_adj[v]) for v in members))
        dm = max(din, default=1)
        dp = max((len(vs) for vs in G.out_adj), default=1) or 1
        eps = Fraction(2, dm) if eps is None else Fraction(eps)
        ell = 4 * dm + 4 if ell is None else ell
        c_s = Fraction(32) if c_s is None else Fraction(c_s)
        c_b = 2000 * dp * dm * c_s if c_b is None else Fraction(c_b)
        c_a = 2 * c_b if c_a is None else Fraction(c_a)
        k = tuple(2 * d for d in din) if k is None else tuple(k)
        dpad = [0] + din + [0]
        n = [Fraction(0)] * (H + 2)
        for i in range(H, 0, -1):
            n[i] = (2 + eps) ** (2 * (dpad[i - 1] + dpad[i])) * sizes[i - 1] \
                + n[i + 1] / 2
        a = tuple(_ceil_frac(c_a * n[i]) for i in range(1, H + 1))
        b = tuple(_ceil_frac(c_b * (2 + eps) ** (-2 * dpad[i]) * n[i])
                  for i in range(1, H + 1))
        s = tuple(_ceil_frac(c_s * (2 + eps) ** (-2 * (dpad[i] + dpad[i - 1])) * n[i])
                  for i in range(1, H + 1))
        dlist = tuple(
            Fraction(1, 4 * dm * dp)
            * _pow_sqrt_half(din[i - 1])
            * Fraction(s[i], b[i]) ** din[i - 1]
            for i in range(1, H)
        )
        return cls(H, sizes, tuple(din), dp, dm, eps, ell, k, a, b, s, dlist)

    @property
    def n_required(self) -> int:
        return sum(2 * self.ell * ai for ai in self.a)

    def e_threshold(self, i: int) -> Fraction:
        """Budget of the (A_i, {}) -> A_{i+1} certificate, ground size b_i."""
        return self.delta_list[i - 1] * math.comb(self.b[i - 1], self.delta_in[i - 1])

    def to_dict(self) -> dict:
        return {
            "height": self.height, "layer_sizes": list(self.layer_sizes),
            "delta_in": list(self.delta_in), "delta_plus": self.delta_plus,
            "delta_minus": self.delta_minus, "eps": str(self.eps),
            "ell": self.ell, "k": list(self.k), "a": list(self.a),
            "b": list(self.b), "s": list(self.s),
            "delta_list": [str(d) for d in self.delta_list],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "GradedParams":
        return cls(
            d["height"], tuple(d["layer_sizes"]), tuple(d["delta_in"]),
            d["delta_plus"], d["delta_minus"], Fraction(d["eps"]), d["ell"],
            tuple(d["k"]), tuple(d["a"]), tuple(d["b"]), tuple(d["s"]),
            tuple(Fraction(x) for x in d["delta_list"]),
        )


def graded_backward_step(
    T: Tournament,
    M: MedianOrder,
    o: int,
    B: VertexSet,
    a: int,
    a_prime: int,
    b: int,
    ell: int,
    k: int,
    s: int,
    delta_in: int,
    e_threshold: Fraction,
    seed: int,
    a_floor: int = 0,
    drc_retries: int = 64,
    step_retries: int = 3,
    exact_cap: int = 2_000_000,
    samples: int = 20_000,
) -> tuple[int, VertexSet, CommunityCheck, list[dict]]:
    """One ladder step: pick the best of 2*ell subintervals left of o, then a
    single choice of k draws from B whose common in-neighborhood inside the
    subinterval is the next layer set.

    o is a 0-based order position; returns (o', A, certificate, drc meta)
    with o - 2*ell*a' <= o' <= o - a' and A in positions [o', o'+a').
    """
    if 2 * a_prime < a:
        raise PreconditionViolated("need 2a' >= a")
    if o < 2 * ell * a_prime or o + a > T.n:
        raise PreconditionViolated("window [o, o+a) must fit with 2*ell*a' run-up")
    ov = M.order
    win = mask_of(ov[o : o + a])
    if B & ~win:
        raise PreconditionViolated("B must lie in positions [o, o+a)")
    if B.bit_count() < b:
        raise PreconditionViolated(f"|B| = {B.bit_count()} < b = {b}")
    Bt = _lowest(B, b)
    best_t, best_score = None, -1
    for t in range(1, 2 * ell + 1):
        start = o - (2 * ell - t + 1) * a_prime
        It = mask_of(ov[start : start + a_prime])
        score = sum(T.out_degree(u, Bt) for u in bits_of(It))
        if score > best_score:
            best_t, best_score = t, score
    if Fraction(best_score) < Fraction(b * (ell - 1) * a_prime, 2 * ell):
        raise StructureFailed("graded_step", "subinterval_density")
    o_prime = o - (2 * ell - best_t + 1) * a_prime
    I = mask_of(ov[o_prime : o_prime + a_prime])
    d = Fraction(ell - 1, 2 * ell)
    last = None
    for attempt in range(step_retries):
        try:
            drc = dependent_random_choice(
                T, L=I, R=Bt, A=0, k=k, delta=delta_in, s=s, d=d,
                seed=_subseed(seed, attempt, 0), mode="out",
                retries=drc_retries, exact_cap=exact_cap, samples=samples,
                m_floor=Fraction(a_floor), check_density=False,
            )
            A = _lowest(drc.M, a_floor) if a_floor else drc.M
            cert = is_community(
                T, A, 0, Bt, delta_in, s, e_threshold, "out",
                exact_cap=exact_cap, samples=samples,
                seed=_subseed(seed, attempt, 1),
            )
            if cert.passed is not True:
                raise _StageRetry("layer_cert")
            return o_prime, A, cert, [drc.to_dict()]
        except (_StageRetry, RetriesExhausted) as ex:
            last = ex
    reason = last.reason if isinstance(last, _StageRetry) else "drc_retries"
    raise StructureFailed("graded_step", reason)


@dataclass
class GradedStructure:
    n: int
    order: tuple[int, ...]
    params: GradedParams
    A: list[VertexSet]              # A_1 .. A_H, |A_i| = b_i
    o: list[int]                    # 0-based window starts
    certs: list[CommunityCheck]     # i = 1..H-1, (A_i, {}) toward A_{i+1}
    drc_meta: list[dict]
    seed: int
    order_mode: str

    def to_dict(self) -> dict:
        return {
            "n": self.n, "seed": self.seed, "order_mode": self.order_mode,
            "order": list(self.order), "params": self.params.to_dict(),
            "o": list(self.o), "A": [members_of(m) for m in self.A],
            "certs": [
                {"passed": c.passed, "bad": c.bad_count, "total": c.total_subsets,
                 "threshold": str(c.threshold)} for c in self.certs
            ],
            "drc": self.drc_meta,
        }


def build_graded_structure(
    T: Tournament,
    G,
    L,
    params: GradedParams,
    seed: int,
    order: Optional[MedianOrder] = None,
    order_mode: str = "local",
    drc_retries: int = 64,
    step_retries: int = 3,
    exact_cap: int = 2_000_000,
    samples: int = 20_000,
) -> GradedStructure:
    """Find A_H, ..., A_1 right to left, each an out-community toward its
    successor.  The guest must have every edge spanning exactly one layer."""
    H = params.height
    for u, v in G.edges:
        if L.layers[v] - L.layers[u] != 1:
            raise PreconditionViolated("guest edges must span exactly one layer")
    if tuple(L.layer_sizes()) != params.layer_sizes:
        raise PreconditionViolated("layer sizes disagree with params")
    N = T.n
    if N < params.n_required:
        raise TooSmall(f"host has {N} vertices, ladder needs {params.n_required}")
    if order_mode == "given":
        if order is None:
            raise ValueError("order_mode 'given' needs an order")
    elif order_mode == "local":
        order = median_order_local(T, seed=_subseed(seed, 999))
    elif order_mode == "exact":
        order = median_order_exact(T)
    elif order_mode == "identity":
        order = identity_order(T)
    else:
        raise ValueError(f"bad order_mode {order_mode!r}")
    ov = order.order
    o_list = [0] * (H + 1)
    A_list: list[VertexSet] = [0] * (H + 1)
    o_list[H] = N - params.a[H - 1]
    A_list[H] = _lowest(mask_of(ov[o_list[H] : o_list[H] + params.a[H - 1]]),
                        params.b[H - 1])
    certs: list[CommunityCheck] = []
    meta: list[dict] = []
    for i in range(H - 1, 0, -1):
        try:
            o_i, A_i, cert, m = graded_backward_step(
                T, order, o_list[i + 1], A_list[i + 1], params.a[i],
                params.a[i - 1], params.b[i], params.ell, params.k[i - 1],
                params.s[i], params.delta_in[i - 1], params.e_threshold(i),
                _subseed(seed, 200 + i), a_floor=params.b[i - 1],
                drc_retries=drc_retries, step_retries=step_retries,
                exact_cap=exact_cap, samples=samples,
            )
        except StructureFailed as ex:
            raise StructureFailed(f"graded_layer_{i}", ex.deficit) from ex
        o_list[i], A_list[i] = o_i, A_i
        certs.append(cert)
        meta.extend(m)
    return GradedStructure(
        N, tuple(ov), params, A_list[1:], o_list[1:], certs[::-1], meta[::-1],
        seed, order_mode,
    )


def audit_graded_structure(
    T: Tournament, S: GradedStructure, recheck_certs: bool = False
) -> list[AuditItem]:
    p = S.params
    H = p.height
    items: list[AuditItem] = []
    seen: VertexSet = 0
    for i in range(1, H + 1):
        Ai, oi = S.A[i - 1], S.o[i - 1]
        win = mask_of(S.order[oi : oi + p.a[i - 1]])
        items.append(AuditItem(f"A_{i}_in_window", Ai & ~win == 0))
        items.append(AuditItem(f"A_{i}_size", Ai.bit_count() == p.b[i - 1],
                               f"{Ai.bit_count()} vs {p.b[i - 1]}"))
        items.append(AuditItem(f"A_{i}_disjoint", Ai & seen == 0))
        seen |= Ai
        if i < H:
            lo = S.o[i] - 2 * p.ell * p.a[i - 1]
            hi = S.o[i] - p.a[i - 1]
            items.append(AuditItem(f"o_{i}_chain", lo <= oi <= hi,
                                   f"{oi} not in [{lo}, {hi}]"))
    items.append(AuditItem("o_1_nonnegative", S.o[0] >= 0))
    items.append(
        AuditItem("certs_passed", all(c.passed is True for c in S.certs)))
    if recheck_certs:
        for i in range(1, H):
            chk = is_community(
                T, S.A[i - 1], 0, S.A[i], p.delta_in[i - 1], p.s[i],
                p.e_threshold(i), "out", seed=_subseed(S.seed, 700 + i),
            )
            items.append(AuditItem(f"recheck_cert_{i}", chk.passed is True,
                                   f"bad={chk.bad_count}"))
    return items
