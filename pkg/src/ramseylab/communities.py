"""Upward-closed families, communities and the dependent random choice step.

A community (A, C) toward R with parameters (Delta, s, e) demands a common
neighborhood of C in R of size > s, and the same for C together with all but
at most e of the Delta-subsets of A minus C.  Verification is exact whenever
the subset count fits the cap, otherwise sampled with a Hoeffding interval
(which can come back undecided).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .bitset import VertexSet, bits_of, members_of
from .errors import (
    DensityTooLow,
    InfeasibleParams,
    NotSubset,
    RetriesExhausted,
    TooLarge,
)
from .tournaments import (
    Tournament,
    common_in_neighborhood,
    common_out_neighborhood,
)


def _comb(n: int, k: int) -> int:
    return math.comb(n, k) if n >= k >= 0 else 0


# --- families -------------------------------------------------------------


@dataclass
class SampledDensity:
    estimate: float
    ci_lo: float
    ci_hi: float
    samples: int
    hits: int


class MonotoneFamily:
    """Family of subsets of `ground`, via generators (explicit upward
    closure) or an arbitrary predicate.  Predicate families *claim* upward
    closure where the construction promises it; `check_monotone_*` probes the
    claim instead of trusting it."""

    def __init__(
        self,
        ground: VertexSet,
        predicate: Optional[Callable[[VertexSet], bool]] = None,
        generators: Optional[Sequence[VertexSet]] = None,
        name: str = "F",
    ):
        if (predicate is None) == (generators is None):
            raise ValueError("exactly one of predicate/generators")
        self.ground = ground
        self.name = name
        self._gens = None if generators is None else [g & ground for g in generators]
        self._pred = predicate
        self._cache: dict[int, bool] = {}

    @classmethod
    def empty(cls, ground: VertexSet) -> "MonotoneFamily":
        return cls(ground, generators=[], name="empty")

    def contains(self, S: VertexSet) -> bool:
        if S & ~self.ground:
            raise NotSubset("S must live inside the ground set")
        if self._gens is not None:
            return any((g & S) == g for g in self._gens)
        hit = self._cache.get(S)
        if hit is None:
            hit = bool(self._pred(S))
            self._cache[S] = hit
        return hit

    __contains__ = contains

    def k_count_exact(self, k: int, cap: int = 10_000_000) -> int:
        g = members_of(self.ground)
        total = _comb(len(g), k)
        if total > cap:
            raise TooLarge(f"{total} {k}-subsets exceeds cap {cap}")
        cnt = 0
        for combo in itertools.combinations(g, k):
            m = 0
            for v in combo:
                m |= 1 << v
            if self.contains(m):
                cnt += 1
        return cnt

    def k_density_exact(self, k: int, cap: int = 10_000_000) -> Fraction:
        g = self.ground.bit_count()
        total = _comb(g, k)
        if total == 0:
            return Fraction(0)
        return Fraction(self.k_count_exact(k, cap), total)

    def k_density_sampled(
        self, k: int, samples: int, seed: int, alpha: float = 0.05
    ) -> SampledDensity:
        g = members_of(self.ground)
        if len(g) < k:
            return SampledDensity(0.0, 0.0, 0.0, 0, 0)
        rng = np.random.default_rng(seed)
        hits = 0
        garr = np.asarray(g)
        for _ in range(samples):
            pick = rng.choice(garr, size=k, replace=False)
            m = 0
            for v in pick:
                m |= 1 << int(v)
            if self.contains(m):
                hits += 1
        p = hits / samples
        eps = math.sqrt(math.log(2 / alpha) / (2 * samples))
        return SampledDensity(p, max(0.0, p - eps), min(1.0, p + eps), samples, hits)

    def check_monotone_exact(self, cap: int = 1 << 20) -> bool:
        """Every member stays a member after adding any ground element."""
        g = self.ground.bit_count()
        if 1 << g > cap:
            raise TooLarge(f"2^{g} subsets exceeds cap")
        subs = [0]
        elems = members_of(self.ground)
        for v in elems:
            subs += [s | (1 << v) for s in subs]
        for S in subs:
            if self.contains(S):
                for v in elems:
                    b = 1 << v
                    if not S & b and not self.contains(S | b):
                        return False
        return True

    def check_monotone_sampled(self, trials: int, seed: int) -> bool:
        rng = np.random.default_rng(seed)
        elems = members_of(self.ground)
        for _ in range(trials):
            S = 0
            for v in elems:
                if rng.random() < 0.5:
                    S |= 1 << v
            if self.contains(S):
                free = [v for v in elems if not S & (1 << v)]
                if free and not self.contains(S | (1 << int(rng.choice(free)))):
                    return False
        return True


def cascade_densities(
    fam: MonotoneFamily, k_max: int, cap: int = 10_000_000
) -> list[Fraction]:
    """Exact i-densities for i = 1..k_max."""
    return [fam.k_density_exact(i, cap) for i in range(1, k_max + 1)]


def check_upward_density_cascade(
    fam: MonotoneFamily, k_max: int, cap: int = 10_000_000
) -> tuple[bool, list[Fraction]]:
    """For an upward-closed family the i-density is at most the k-density for
    i <= k; equivalently the density sequence is non-decreasing."""
    ds = cascade_densities(fam, k_max, cap)
    ok = all(ds[i] <= ds[i + 1] for i in range(len(ds) - 1))
    return ok, ds


# --- communities ----------------------------------------------------------


def _neighborhood(T: Tournament, X: VertexSet, R: VertexSet, direction: str) -> VertexSet:
    if direction == "out":
        return common_out_neighborhood(T, X, R)
    if direction == "in":
        return common_in_neighborhood(T, X, R)
    raise ValueError(f"direction must be 'out' or 'in', got {direction!r}")


@dataclass(frozen=True)
class CommunityCheck:
    passed: Optional[bool]       # None = sampled and undecided
    exact: bool
    direction: str
    core_nbhd: int               # |N(C) cap R|
    ground_size: int             # |A \ C|
    total_subsets: int
    threshold: Fraction          # e
    s: int
    delta: int
    bad_count: Optional[int] = None
    bad_sampled: Optional[SampledDensity] = None

    def __bool__(self) -> bool:
        return self.passed is True


def _pair_bad_count(
    T: Tournament, ground: list[int], RC: list[int], s: int, direction: str
) -> int:
    """Bad 2-subsets by one dense matrix product: counts of common neighbors
    inside RC for every pair of ground vertices."""
    if direction == "out":
        B = T.submatrix_bool(ground, RC).astype(np.float32)
    else:
        B = T.submatrix_bool(RC, ground).astype(np.float32).T
    counts = np.rint(B @ B.T).astype(np.int64)
    iu = np.triu_indices(len(ground), k=1)
    return int(np.count_nonzero(counts[iu] <= s))


def _triple_bad_count(
    T: Tournament, ground: list[int], RC: list[int], s: int, direction: str
) -> int:
    """Bad 3-subsets via packed bitset rows and a compiled popcount sweep."""
    from ._kernels import count_bad_triples

    if direction == "out":
        B = T.submatrix_bool(ground, RC)
    else:
        B = T.submatrix_bool(RC, ground).T
    packed = np.packbits(np.ascontiguousarray(B), axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.hstack(
            [packed, np.zeros((packed.shape[0], pad), np.uint8)]
        )
    words = np.ascontiguousarray(packed).view(np.uint64)
    return int(count_bad_triples(words, s))


def is_community(
    T: Tournament,
    A: VertexSet,
    C: VertexSet,
    R: VertexSet,
    delta: int,
    s: int,
    e: Fraction,
    direction: str = "out",
    exact_cap: int = 2_000_000,
    samples: int = 20_000,
    seed: Optional[int] = None,
) -> CommunityCheck:
    """Check that (A, C) is an (R, delta, s, e)-community in the given
    direction.  Exact when C(|A\\C|, delta) <= exact_cap, else sampled
    (requires a seed) with a tri-state verdict."""
    e = Fraction(e)
    RC = _neighborhood(T, C, R, direction)
    core = RC.bit_count()
    ground_mask = A & ~C
    g = ground_mask.bit_count()
    base = CommunityCheck(False, True, direction, core, g, 0, e, s, delta)
    if core < s + 1 or g < delta:
        return base
    if delta == 0:
        return CommunityCheck(True, True, direction, core, g, 1, e, s, delta, bad_count=0)
    ground = members_of(ground_mask)
    total = _comb(g, delta)
    if total <= exact_cap:
        if delta == 1:
            bad = sum(
                1
                for u in ground
                if _neighborhood(T, 1 << u, RC, direction).bit_count() <= s
            )
        elif delta == 2 and g >= 48:
            bad = _pair_bad_count(T, ground, members_of(RC), s, direction)
        elif delta == 3 and g >= 24:
            bad = _triple_bad_count(T, ground, members_of(RC), s, direction)
        else:
            bad = 0
            for combo in itertools.combinations(ground, delta):
                m = 0
                for v in combo:
                    m |= 1 << v
                if _neighborhood(T, m, RC, direction).bit_count() <= s:
                    bad += 1
        return CommunityCheck(
            Fraction(bad) <= e, True, direction, core, g, total, e, s, delta, bad_count=bad
        )
    if seed is None:
        raise TooLarge(
            f"{total} subsets above exact cap and no seed given for sampling"
        )
    rng = np.random.default_rng(seed)
    garr = np.asarray(ground)
    hits = 0
    for _ in range(samples):
        pick = rng.choice(garr, size=delta, replace=False)
        m = 0
        for v in pick:
            m |= 1 << int(v)
        if _neighborhood(T, m, RC, direction).bit_count() <= s:
            hits += 1
    p = hits / samples
    eps = math.sqrt(math.log(2 / 0.05) / (2 * samples))
    sd = SampledDensity(p, max(0.0, p - eps), min(1.0, p + eps), samples, hits)
    frac_e = e / total
    if sd.ci_hi <= frac_e:
        verdict: Optional[bool] = True
    elif sd.ci_lo > frac_e:
        verdict = False
    else:
        verdict = None
    return CommunityCheck(
        verdict, False, direction, core, g, total, e, s, delta, bad_sampled=sd
    )


def subset_community(
    T: Tournament,
    A: VertexSet,
    A_sub: VertexSet,
    C: VertexSet,
    R: VertexSet,
    delta: int,
    s: int,
    e: Fraction,
    direction: str = "out",
    **kw,
) -> CommunityCheck:
    """Restriction of the ground set keeps the community parameters; checks
    the restricted pair (A_sub must be a subset of A)."""
    if A_sub & ~A:
        raise NotSubset("A_sub must be contained in A")
    return is_community(T, A_sub, C, R, delta, s, e, direction, **kw)


def extension_bad_family(
    T: Tournament,
    A: VertexSet,
    C: VertexSet,
    R: VertexSet,
    delta1: int,
    delta2: int,
    m: int,
    s: int,
    delta2_density: Fraction,
    direction: str = "out",
    exact_cap: int = 2_000_000,
    name: str = "F_ext",
) -> tuple[MonotoneFamily, Fraction]:
    """The family of S' in A \\ C for which (A, C u S') stops being an
    (R, delta2, s, delta2_density * C(m - delta1, delta2))-community, plus the
    promised ceiling on its delta1-subset count (second return value).

    The construction argues the family is upward closed; that claim is
    checkable (check_monotone_*) rather than assumed by the code."""
    e2 = Fraction(delta2_density) * _comb(m - delta1, delta2)

    def pred(Sp: VertexSet) -> bool:
        chk = is_community(
            T, A, C | Sp, R, delta2, s, e2, direction, exact_cap=exact_cap
        )
        return chk.passed is not True

    fam = MonotoneFamily(A & ~C, predicate=pred, name=name)
    return fam, e2


# --- dependent random choice ----------------------------------------------


@dataclass
class DrcResult:
    K: VertexSet
    k: int
    mode: str
    M: VertexSet
    m_required: Fraction
    community: CommunityCheck
    e_bound: Fraction
    family_checked: bool
    retries_used: int
    seed: int

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "mode": self.mode,
            "K": members_of(self.K),
            "M_size": self.M.bit_count(),
            "m_required": str(self.m_required),
            "bad_count": self.community.bad_count,
            "e_bound": str(self.e_bound),
            "retries_used": self.retries_used,
            "seed": self.seed,
        }


def bipartite_density(T: Tournament, L: VertexSet, R: VertexSet, mode: str) -> Fraction:
    """Average over v in L of d(v, R)/|R| in the orientation matching `mode`
    ('out': edges L->R count; 'in': edges R->L)."""
    nl, nr = L.bit_count(), R.bit_count()
    if nl == 0 or nr == 0:
        raise ValueError("L and R must be nonempty")
    total = 0
    for v in bits_of(L):
        if mode == "out":
            total += (T.out_row(v) & R & ~(1 << v)).bit_count()
        else:
            total += (T.in_row(v) & R & ~(1 << v)).bit_count()
    return Fraction(total, nl * nr)


def dependent_random_choice(
    T: Tournament,
    L: VertexSet,
    R: VertexSet,
    A: VertexSet,
    k: int,
    delta: int,
    s: int,
    d: Fraction,
    seed: int,
    family: Optional[MonotoneFamily] = None,
    family_density: Fraction = Fraction(0),
    mode: str = "out",
    retries: int = 64,
    exact_cap: int = 2_000_000,
    samples: int = 20_000,
    check_density: bool = True,
    m_floor: Fraction = Fraction(0),
) -> DrcResult:
    """Sample K (k draws with repetition from R) until all three conclusions
    verify: K avoids the family, M = N(K) cap L is large, and
    (N(K) cap (L u A), {}) is a community toward R with the promised budget.

    mode 'out': a vertex u counts as adjacent to r when u beats r, M is the
    common in-neighborhood of K, and the produced community is an
    out-community.  mode 'in' is the mirror image.

    m_floor raises the acceptance bar on |M| above the guaranteed
    (d^k - delta)/2 |L| when the caller needs a bigger survivor set.
    """
    if mode not in ("out", "in"):
        raise ValueError(f"bad mode {mode!r}")
    d = Fraction(d)
    fam_delta = Fraction(family_density)
    if not fam_delta < d**k / 2:
        raise InfeasibleParams(
            f"family density {fam_delta} must be below d^k/2 = {d**k / 2}"
        )
    if check_density:
        dens = bipartite_density(T, L, R, mode)
        if dens < d:
            raise DensityTooLow(f"density {dens} < required {d}")
    nl, nr = L.bit_count(), R.bit_count()
    m_required = max((d**k - fam_delta) / 2 * nl, Fraction(m_floor))
    LA = L | A
    e_bound = (
        Fraction(4, 1) / (d**k - fam_delta) * _comb(LA.bit_count(), delta) * Fraction(s, nr) ** k
    )
    rng = np.random.default_rng(seed)
    rarr = np.asarray(members_of(R))
    transcript = []
    nbhd = common_in_neighborhood if mode == "out" else common_out_neighborhood
    for attempt in range(retries):
        draw = rng.choice(rarr, size=k, replace=True)
        K = 0
        for v in draw:
            K |= 1 << int(v)
        if family is not None and family.contains(K):
            transcript.append({"attempt": attempt, "K": members_of(K), "fail": "family"})
            continue
        M = nbhd(T, K, L)
        if Fraction(M.bit_count()) < m_required:
            transcript.append(
                {
                    "attempt": attempt,
                    "K": members_of(K),
                    "fail": "M_small",
                    "M_size": M.bit_count(),
                }
            )
            continue
        cand = nbhd(T, K, LA)
        chk = is_community(
            T, cand, 0, R, delta, s, e_bound, mode, exact_cap, samples, seed=seed + attempt + 1
        )
        if chk.passed is True:
            return DrcResult(
                K, k, mode, M, m_required, chk, e_bound, family is not None,
                attempt, seed,
            )
        transcript.append(
            {
                "attempt": attempt,
                "K": members_of(K),
                "fail": "community" if chk.passed is False else "community_undecided",
                "bad_count": chk.bad_count,
            }
        )
    raise RetriesExhausted(transcript)
