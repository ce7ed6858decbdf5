"""Guests, hosts, stacked constructions, and the no-embedding diagnostics."""
import itertools
from fractions import Fraction

import numpy as np
import pytest

from ramseylab.bitset import mask_of
from ramseylab.digraphs import Digraph
from ramseylab.errors import (
    InfeasibleParams,
    PartialLayers,
    PreconditionViolated,
    TooLarge,
)
from ramseylab.lowerbound import (
    DESK_PROFILE,
    PAPER_PROFILE,
    TWO_POW_03_LOW,
    BipartiteGuest,
    GuestParams,
    LowerBoundProfile,
    build_D0_and_R,
    build_height_h_guest,
    build_lower_host,
    check_guest_property1,
    check_guest_property2,
    check_host_property,
    front_index_diagnostic,
    oriented_complete_bipartite,
    random_guest_bipartite,
    verify_no_embedding,
)
from ramseylab.lowerbound import _part_value
from ramseylab.tournaments import Tournament, random_tournament, transitive_tournament

from host_oracle import host_W_oracle


# --- constant packs --------------------------------------------------------


def test_profile_constants_exact():
    # c_0 = 1.0011 sits just inside (5/4)^{1/202}: integer powers decide it
    assert 10011**202 * 4 < 5 * 10000**202
    assert 10011**203 * 4 > 5 * 10000**203
    assert PAPER_PROFILE.c_0**202 < Fraction(5, 4) < PAPER_PROFILE.c_0**203
    # 1.2311 < 2^{0.3} < 1.2312
    assert 12311**10 < 8 * 10**40 < 12312**10
    assert TWO_POW_03_LOW == Fraction(12311, 10000)
    for prof in (PAPER_PROFILE, DESK_PROFILE):
        assert 1 < prof.c_1**2 < prof.c_0


def test_profile_rejects_inconsistent_constants():
    with pytest.raises(InfeasibleParams):
        LowerBoundProfile("bad", Fraction(11, 10), Fraction(21, 20))
    with pytest.raises(InfeasibleParams):
        LowerBoundProfile("flat", Fraction(2), Fraction(1))


def test_guest_params_paper_scale():
    p = GuestParams(300, 202, PAPER_PROFILE.c_0, PAPER_PROFILE.c_1)
    assert p.m == 303 and p.d == 2 and p.removal == 3
    assert not p.degenerate
    # at most d m/(delta+1) vertices can exceed degree delta, and 606/203 <= 3
    assert p.degree_guaranteed
    assert p.k_int == 1  # c_0^202 < 5/4
    assert p.part_cap() == 265 and p.dump_cap() == 6


def test_guest_params_toy_and_validation():
    p = GuestParams(6, 1, Fraction(3), Fraction(7, 5))
    assert p.m == 7 and p.d == 1 and p.removal == 0 and p.degenerate
    assert p.k == 3 and p.k_int == 3
    assert p.part_cap() == 2 and p.dump_cap() == 0
    with pytest.raises(InfeasibleParams):
        GuestParams(0, 2)
    with pytest.raises(InfeasibleParams):
        GuestParams(10, 0)
    with pytest.raises(InfeasibleParams):
        GuestParams(10, 2, Fraction(11, 10), Fraction(21, 20))


# --- random guest ----------------------------------------------------------


def test_random_guest_shape_and_determinism():
    p = GuestParams(206, 2)
    g1 = random_guest_bipartite(p, seed=5)
    g2 = random_guest_bipartite(p, seed=5)
    assert g1.digraph == g2.digraph
    # m = 209 per side minus removal 3
    assert len(g1.side_a) == len(g1.side_b) == 206
    assert g1.digraph.n == 412
    assert g1.provenance["edges_before_removal"] == 209
    assert len(g1.digraph.edges) <= 209
    aset, bset = set(g1.side_a), set(g1.side_b)
    for u, v in g1.digraph.edges:
        assert u in aset and v in bset
    assert g1.provenance["max_degree"] == g1.max_degree()
    g3 = random_guest_bipartite(p, seed=6)
    assert g3.digraph != g1.digraph


def test_random_guest_rejects_overfull_grid():
    # m = 3, d = 5: 15 edges cannot fit distinctly in a 3x3 grid
    with pytest.raises(InfeasibleParams):
        random_guest_bipartite(GuestParams(2, 500), seed=0)


def test_oriented_complete_bipartite():
    H = oriented_complete_bipartite(2, 3)
    assert H.digraph.n == 5 and len(H.digraph.edges) == 6
    assert H.max_degree() == 3
    assert H.nbhd_masks() == {0: mask_of([2, 3, 4]), 1: mask_of([2, 3, 4])}


# --- mutual-edge property of subset pairs ----------------------------------


def _brute_property2(H: BipartiteGuest, a0x: int, a0y: int) -> bool:
    """From the definition: every (a0x, a0y) subset pair spans an edge."""
    edges = set(H.digraph.edges)
    for xs in itertools.combinations(H.side_a, a0x):
        for ys in itertools.combinations(H.side_b, a0y):
            if not any((x, y) in edges for x in xs for y in ys):
                return False
    return True


def _random_guest(seed: int, side: int = 8, p_edge: float = 0.8) -> BipartiteGuest:
    rng = np.random.default_rng(seed)
    edges = [
        (i, side + j)
        for i in range(side)
        for j in range(side)
        if rng.random() < p_edge
    ]
    return BipartiteGuest(
        Digraph(2 * side, edges), tuple(range(side)), tuple(range(side, 2 * side))
    )


def test_property2_exact_matches_bruteforce():
    outcomes = set()
    for seed in range(8):
        H = _random_guest(seed)
        rep = check_guest_property2(H, alpha=Fraction(1, 4), mode="exact")
        expected = _brute_property2(H, rep.a0_x, rep.a0_y)
        assert rep.passed is expected
        outcomes.add(expected)
        if not expected:
            xs, ys = rep.witness
            edges = set(H.digraph.edges)
            assert len(xs) == rep.a0_x and len(ys) == rep.a0_y
            assert not any((x, y) in edges for x in xs for y in ys)
    assert outcomes == {True, False}  # the seed range exercises both verdicts


def test_property2_exact_extremes():
    K = oriented_complete_bipartite(6, 6)
    rep = check_guest_property2(K, mode="exact")
    assert rep.passed is True and rep.mode == "exact"
    assert rep.a0_x == rep.a0_y == 1 and rep.subsets_checked == 6
    empty = BipartiteGuest(Digraph(12, []), tuple(range(6)), tuple(range(6, 12)))
    bad = check_guest_property2(empty, mode="exact")
    assert bad.passed is False and bad.witness is not None
    assert not bad  # __bool__ mirrors falsification


def test_property2_sampled_and_caps():
    empty = BipartiteGuest(Digraph(12, []), tuple(range(6)), tuple(range(6, 12)))
    rep = check_guest_property2(empty, mode="sampled", seed=1)
    assert rep.passed is False and rep.mode == "sampled"
    assert rep.subsets_checked == 1  # every sample is a witness
    K = oriented_complete_bipartite(6, 6)
    ok = check_guest_property2(K, mode="sampled", seed=1, samples=50)
    assert ok.passed is None and bool(ok)
    with pytest.raises(TooLarge):
        check_guest_property2(K, mode="sampled")
    with pytest.raises(TooLarge):
        check_guest_property2(
            _random_guest(0), alpha=Fraction(1, 4), mode="exact", exact_cap=3
        )


# --- part-pair weight of admissible splits ---------------------------------


def _brute_part_value(H, k, px, py):
    base = len(H.side_a)
    edges = set(H.digraph.edges)
    xs = {i: [a for a in H.side_a if px[a] == i] for i in range(k)}
    ys = {j: [b for b in H.side_b if py[b - base] == j] for j in range(k)}
    total = 0
    for i in range(k):
        for j in range(k):
            if i == j:
                continue
            if any((a, b) in edges for a in xs[i] for b in ys[j]):
                total += len(xs[i]) * len(ys[j])
    return total


def test_part_value_matches_bruteforce():
    rng = np.random.default_rng(3)
    H = _random_guest(7, side=6, p_edge=0.5)
    for _ in range(25):
        k = int(rng.integers(2, 4))
        px = tuple(int(x) for x in rng.integers(k + 1, size=6))
        py = tuple(int(x) for x in rng.integers(k + 1, size=6))
        assert _part_value(H, k, px, py) == _brute_part_value(H, k, px, py)


def test_property1_forced_spread_instance_passes():
    # part cap 2 with three parts forces a 2+2+2 split of each side; on the
    # complete guest every ordered pair is hit, so each admissible split is
    # worth 36 - 12 = 24, above the 0.55 (0.98 n)^2 = 19.016 threshold
    p = GuestParams(6, 1, Fraction(3), Fraction(7, 5))
    K = oriented_complete_bipartite(6, 6)
    K.params = p
    rep = check_guest_property1(K, cap_exact=20_000_000)
    assert rep.passed is True and rep.mode == "exact"
    assert rep.k == 3
    assert rep.best_value == 24 > rep.threshold
    assert rep.partitions_checked == 90 * 90  # multinomial(6; 2,2,2) per side


def test_property1_empty_guest_fails():
    p = GuestParams(6, 1, Fraction(3), Fraction(7, 5))
    empty = BipartiteGuest(
        Digraph(12, []), tuple(range(6)), tuple(range(6, 12)), params=p
    )
    rep = check_guest_property1(empty, cap_exact=20_000_000)
    assert rep.passed is False and rep.best_value == 0
    assert not rep


def test_property1_sampled_modes():
    p = GuestParams(6, 1, Fraction(3), Fraction(7, 5))
    K = oriented_complete_bipartite(6, 6)
    K.params = p
    rep = check_guest_property1(K, mode="sampled", seed=4)
    assert rep.passed is None and rep.best_value == 24
    assert rep.partitions_checked > 0
    empty = BipartiteGuest(
        Digraph(12, []), tuple(range(6)), tuple(range(6, 12)), params=p
    )
    bad = check_guest_property1(empty, mode="sampled", seed=4)
    assert bad.passed is False
    with pytest.raises(TooLarge):
        check_guest_property1(K, mode="sampled")


def test_property1_edge_cases():
    p = GuestParams(6, 1, Fraction(3), Fraction(7, 5))
    K = oriented_complete_bipartite(6, 6)
    K.params = p
    # k = 1: a 6-vertex side cannot fit under the part cap, so no admissible
    # split exists and the condition holds vacuously
    rep = check_guest_property1(K, k=1, cap_exact=20_000_000)
    assert rep.passed is True and rep.best_value is None and rep.partitions_checked == 0
    with pytest.raises(TooLarge):
        check_guest_property1(K, cap_exact=10)
    K.params = None
    with pytest.raises(PreconditionViolated):
        check_guest_property1(K)


# --- host cut-weight check -------------------------------------------------


def test_host_check_transitive_is_worst_case():
    rep = check_host_property(transitive_tournament(8), 3, mode="exact")
    assert rep.mode == "exact" and not rep.vacuous
    assert rep.worst_W == 9 == 3 * 3  # a full forward cut T -> S
    assert rep.passed is False and rep.criterion_passed is False
    # sum over t+s in {5,6} of C(8,t) C(8-t,s): 1792 each by symmetry
    assert rep.pairs_checked == 3584
    t, s = (len(side) for side in rep.worst_pair)
    assert t + s in (5, 6)
    assert not rep


def test_host_check_matches_alternating_oracle():
    for seed in range(1, 5):
        R = random_tournament(8, seed)
        rep = check_host_property(R, 3, mode="exact")
        w = host_W_oracle(R, 3)
        assert abs(float(rep.worst_W) - w) < 1e-6
        # desk-sized hosts always carry a heavy cut; the bound is asymptotic
        assert rep.passed is False


def test_host_check_isomorphism_invariant():
    R = random_tournament(8, 1)
    rng = np.random.default_rng(2)
    perm = [int(x) for x in rng.permutation(8)]
    rows = [0] * 8
    for u in range(8):
        for v in range(8):
            if u != v and R.has_edge(u, v):
                rows[perm[u]] |= 1 << perm[v]
    Rp = Tournament(8, rows)
    a = check_host_property(R, 3, mode="exact")
    b = check_host_property(Rp, 3, mode="exact")
    assert a.worst_W == b.worst_W


def test_host_check_vacuous_and_errors():
    rep = check_host_property(transitive_tournament(5), 3)
    assert rep.vacuous and rep.passed is True and rep.mode == "vacuous"
    assert bool(rep)
    with pytest.raises(PreconditionViolated):
        check_host_property(transitive_tournament(5), 0)
    with pytest.raises(TooLarge):
        check_host_property(transitive_tournament(8), 3, mode="sampled")


def test_host_check_sampled():
    rep = check_host_property(
        transitive_tournament(10), 4, mode="sampled", seed=3, samples=300
    )
    assert rep.mode == "sampled"
    assert rep.passed in (None, False)
    assert rep.criterion_passed is None
    assert rep.worst_W is not None and rep.worst_W >= 0


# --- D_0 / R and the stacked construction ----------------------------------


def test_build_small_branch():
    D0, R, prov = build_D0_and_R(2, 2, DESK_PROFILE, seed=11)
    assert prov["branch"] == "small"
    assert prov["r_size"] == 5 and R.n == 5
    assert prov["host_search"]["method"] == "census"
    assert len(D0.side_a) == len(D0.side_b) == 2
    assert len(D0.digraph.edges) == 4
    # the found host really avoids the threshold piece (here: all of D0)
    assert verify_no_embedding(D0.digraph, R).verdict == "exact-not-found"


def test_build_large_branch():
    D0, R, prov = build_D0_and_R(206, 2, DESK_PROFILE, seed=5)
    assert prov["branch"] == "large"
    assert prov["k"] == 2 and prov["per_part"] == 123 and prov["N"] == 246 == R.n
    assert D0.digraph.n == 412
    # between-part edges follow the 2-vertex host pattern uniformly
    per = prov["per_part"]
    p0, p1 = mask_of(range(per)), mask_of(range(per, 2 * per))
    out01 = {(R.out_row(v) & p1).bit_count() for v in range(per)}
    out10 = {(R.out_row(v) & p0).bit_count() for v in range(per, 2 * per)}
    assert (out01, out10) in (({per}, {0}), ({0}, {per}))


def test_stacked_guest_layers():
    D0, _, _ = build_D0_and_R(2, 2, DESK_PROFILE, seed=11)
    G, L = build_height_h_guest(D0, 4)
    assert G.n == 8 and len(G.edges) == 12
    assert L.layers == (1, 1, 2, 2, 3, 3, 4, 4) and L.height == 4 and L.width == 1
    for layer in range(3):
        lo, hi = 2 * layer, 2 * (layer + 1)
        for i in (0, 1):
            for j in (0, 1):
                assert (lo + i, hi + j) in G.edges
    with pytest.raises(PreconditionViolated):
        build_height_h_guest(D0, 1)
    with pytest.raises(PreconditionViolated):
        build_height_h_guest(oriented_complete_bipartite(2, 3), 3)


def test_lower_host_layers_forward():
    D0, R, _ = build_D0_and_R(2, 2, DESK_PROFILE, seed=11)
    T, parts = build_lower_host(R, 3)
    assert T.n == 15 and len(parts) == 3
    assert parts[0] == mask_of(range(5))
    assert T.has_edge(0, 5) and T.has_edge(4, 14) and not T.has_edge(5, 0)
    with pytest.raises(PreconditionViolated):
        build_lower_host(R, 0)


def test_stacked_guest_needs_enough_host_layers():
    # height 4 fits three stacked host copies but genuinely not two: the
    # 10-vertex double host has room for the 8 guest vertices yet exhaustive
    # search still rules the embedding out
    D0, R, _ = build_D0_and_R(2, 2, DESK_PROFILE, seed=11)
    G, L = build_height_h_guest(D0, 4)
    for H, verdict in ((1, "exact-not-found"), (2, "exact-not-found"), (3, "found")):
        T, _ = build_lower_host(R, H)
        rep = verify_no_embedding(G, T)
        assert rep.verdict == verdict
        if verdict == "found":
            assert rep.embedding is not None and rep.embedding.verified
        else:
            assert rep.nodes > 0
    T2, _ = build_lower_host(R, 2)
    assert verify_no_embedding(G, T2, budget=10).verdict == "inconclusive"


# --- front-index diagnostic ------------------------------------------------


@pytest.fixture()
def toy_parts():
    D0, R, _ = build_D0_and_R(2, 2, DESK_PROFILE, seed=11)
    G, L = build_height_h_guest(D0, 4)
    T, parts = build_lower_host(R, 4)
    return G, L, T, parts


def test_front_index_clean_on_aligned_map(toy_parts):
    G, L, T, parts = toy_parts
    phi = {v: 5 * ((v // 2)) + (v % 2) for v in range(G.n)}
    rep = front_index_diagnostic(G, L, T, parts, phi)
    assert rep.j_index == [1, 2, 3, 4]
    assert rep.clean and rep.violations == []
    assert rep.fractions[0][0] == 1 and rep.fractions[0][1] == 0
    d = rep.to_dict()
    assert d["j_index"] == [1, 2, 3, 4] and d["fractions"][0][0] == "1"


def test_front_index_monotonicity_and_jump(toy_parts):
    G, L, T, parts = toy_parts
    dest = [2, 0, 1, 0]  # layer -> part
    phi = {v: 5 * dest[v // 2] + (v % 2) for v in range(G.n)}
    rep = front_index_diagnostic(G, L, T, parts, phi)
    assert rep.j_index == [3, 1, 2, 1]
    kinds = set(rep.violations)
    assert ("monotonicity", 1) in kinds and ("monotonicity", 3) in kinds
    assert ("jump", 1) in kinds and ("jump", 2) in kinds
    assert not rep.clean


def test_front_index_flags_every_map_into_one_part():
    D0, R, _ = build_D0_and_R(2, 2, DESK_PROFILE, seed=11)
    G, L = build_height_h_guest(D0, 4)
    T, parts = build_lower_host(R, 1)
    rng = np.random.default_rng(0)
    kinds = set()
    for _ in range(60):
        phi = {v: int(rng.integers(T.n)) for v in range(G.n)}
        rep = front_index_diagnostic(G, L, T, parts, phi)
        assert rep.violations  # j stays at 1 (or drops to 0 on collisions)
        kinds |= {k for k, _ in rep.violations}
    assert kinds == {"front", "monotonicity", "jump"}


def test_front_index_preconditions(toy_parts):
    G, L, T, parts = toy_parts
    phi = {v: v for v in range(G.n)}
    with pytest.raises(PartialLayers):
        front_index_diagnostic(G, L, T, parts, {v: v for v in range(G.n - 1)})
    with pytest.raises(PreconditionViolated, match="overlap"):
        front_index_diagnostic(G, L, T, [parts[0]] + parts, phi)
    with pytest.raises(PreconditionViolated, match="cover"):
        front_index_diagnostic(G, L, T, parts[:-1], phi)
