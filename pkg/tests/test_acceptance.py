"""Acceptance gate: the headline guarantees, one criterion per test.

Each test re-derives its expected values from scratch (definitions, brute
enumeration, or the frozen oracles next to this file) and emits a single
``CRITERION n: PASS|FAIL`` line on the real stdout so the verdicts survive
pytest's capture.  Stated runtime ceilings are asserted where a criterion
carries one.
"""
import itertools
import math
import time
from fractions import Fraction

import numpy as np

from ramseylab.bitset import mask_of, members_of
from ramseylab.census import (
    census_counts,
    census_counts_oracle,
    contains_digraph,
    oriented_ramsey_exact,
    path_spectrum_report,
    pattern_class_count,
)
from ramseylab.communities import (
    MonotoneFamily,
    check_upward_density_cascade,
    dependent_random_choice,
    extension_bad_family,
    is_community,
)
from ramseylab.digraphs import (
    compute_layering,
    degree_profile,
    grid_digraph,
    hypercube_bound_sum,
    hypercube_digraph,
    ramsey_bounds,
    transitive_digraph,
)
from ramseylab.embedding import lll_embed_layer, verify_embedding
from ramseylab.errors import (
    LayerFailed,
    PreconditionUnverified,
    ResampleBudgetExhausted,
    RetriesExhausted,
    StructureFailed,
)
from ramseylab.lowerbound import (
    DESK_PROFILE,
    build_D0_and_R,
    build_height_h_guest,
    build_lower_host,
    check_host_property,
    front_index_diagnostic,
    verify_no_embedding,
)
from ramseylab.profiles import desk_guest, run_desk_pipeline
from ramseylab.structure import StructureParams
from ramseylab.tournaments import (
    check_median_certificate,
    common_in_neighborhood,
    common_out_neighborhood,
    interval_density,
    median_order_local,
    random_tournament,
    transitive_tournament,
)

from host_oracle import host_W_oracle
from lll_instances import capped_instance


def _verdict(num, ok):
    import sys

    sys.__stdout__.write(f"CRITERION {num}: {'PASS' if ok else 'FAIL'}\n")
    sys.__stdout__.flush()


def test_criterion_01_exact_small_ramsey_numbers():
    t0 = time.time()
    ok = False
    try:
        r3 = oriented_ramsey_exact(transitive_digraph(3))
        assert r3.found and r3.value == 4
        r4 = oriented_ramsey_exact(transitive_digraph(4))
        assert r4.found and r4.value == 8
        # the extremal witness one level down really avoids TT_4
        assert r4.witness_n == 7
        W = r4.witness()
        assert W.n == 7 and not contains_digraph(W, transitive_digraph(4))
        # consistency with the doubling bound r(TT_h) <= 2^(h-1)
        assert r3.value <= 2**2 and r4.value <= 2**3
        assert r3.value == 2**2 and r4.value == 2**3  # tight at these sizes
        ok = time.time() - t0 < 300
        assert ok, "exceeded 5 minute budget"
    finally:
        _verdict(1, ok)


def test_criterion_02_path_spectrum_n9():
    t0 = time.time()
    ok = False
    try:
        rep = path_spectrum_report(9)
        assert rep.n == 9
        assert rep.classes_checked == 191536
        assert rep.all_patterns_everywhere and rep.missing == ()
        # the 256 checked orientations collapse to 136 reversal classes,
        # so covering all patterns covers every class
        assert pattern_class_count(8) == 136 == (2**8 + 2**4) // 2
        ok = time.time() - t0 < 7200
        assert ok, "exceeded 2 hour budget"
    finally:
        _verdict(2, ok)


def test_criterion_03_census_counts_and_oracle():
    ok = False
    try:
        counts = census_counts(8)
        assert counts == [1, 1, 2, 4, 12, 56, 456, 6880]
        # independent all-codes x all-permutations catalogue for n <= 6
        for n in range(1, 7):
            assert len(census_counts_oracle(n)) == counts[n - 1]
        ok = True
    finally:
        _verdict(3, ok)


def test_criterion_04_median_certificates_and_interval_floor():
    t0 = time.time()
    ok = False
    try:
        orders = []
        for seed in range(100):
            T = random_tournament(200, seed=seed)
            mo = median_order_local(T, seed=seed)
            assert check_median_certificate(T, mo.order)
            if seed < 5:
                orders.append((T, mo))
        # every admissible interval instance sits on or above (k-1)/2k
        for T, mo in orders:
            A = mask_of(mo.order[100:110])  # positions 101..110
            for k in (1, 2, 4, 5, 10):
                d = interval_density(T, mo, 101 - 10 * k, 101, A)
                assert d >= Fraction(k - 1, 2 * k)
        for seed in range(3):
            T = random_tournament(40, seed=seed)
            mo = median_order_local(T, seed=seed)
            A = mask_of(mo.order[20:30])
            for k in (1, 2):
                d = interval_density(T, mo, 21 - 10 * k, 21, A)
                assert d >= Fraction(k - 1, 2 * k)
        ok = time.time() - t0 < 60
        assert ok, "exceeded 1 minute budget"
    finally:
        _verdict(4, ok)


def test_criterion_05_dependent_random_choice_instances():
    t0 = time.time()
    ok = False
    try:
        rng = np.random.default_rng(20250823)
        for trial in range(100):
            nl = int(rng.integers(20, 41))
            nr = int(rng.integers(20, 41))
            n = nl + nr
            T = random_tournament(n, int(rng.integers(1 << 31)))
            L, R = mask_of(range(nl)), mask_of(range(nl, n))
            k = int(rng.integers(1, 4))
            delta = int(rng.integers(1, 4))
            s = int(rng.integers(2, 5))
            mode = "out" if trial % 2 == 0 else "in"
            gen = mask_of(int(x) + nl for x in rng.choice(nr, size=k, replace=False))
            fam = MonotoneFamily(R, generators=[gen])
            res = dependent_random_choice(
                T, L, R, L, k, delta, s, Fraction(1, 4), seed=trial,
                family=fam, family_density=Fraction(1, 200), mode=mode,
            )
            # conclusion 1: K avoids the forbidden family (picks are
            # independent, so K may have fewer than k distinct vertices)
            assert res.K not in fam and 0 < res.K.bit_count() <= k
            # conclusion 2: M is the full common neighborhood and is large
            nbhd = common_in_neighborhood if mode == "out" else common_out_neighborhood
            assert res.M == nbhd(T, res.K, L)
            assert res.M.bit_count() >= res.m_required
            # conclusion 3: M is a community for the advertised budget,
            # re-established here by exhaustive enumeration
            assert res.community.exact and res.community.passed is True
            chk = is_community(T, res.M, 0, R, delta, s, res.e_bound, mode,
                               exact_cap=10**7)
            assert chk.exact and chk.passed is True
        ok = time.time() - t0 < 600
        assert ok, "exceeded 10 minute budget"
    finally:
        _verdict(5, ok)


def test_criterion_06_community_observation_suites():
    ok = False
    try:
        # subset stability: removing ground vertices never adds bad subsets
        for n, seed in ((10, 3), (12, 5), (14, 7)):
            T = random_tournament(n, seed=seed)
            half = n // 2
            A, R = mask_of(range(half)), mask_of(range(half, n))
            e = Fraction(math.comb(half, 2))
            base = is_community(T, A, 0, R, 2, 1, e)
            assert base.exact and base.passed is True
            for drop in itertools.chain(
                itertools.combinations(range(half), 1),
                itertools.combinations(range(half), 2),
            ):
                sub = A & ~mask_of(drop)
                chk = is_community(T, sub, 0, R, 2, 1, e)
                assert chk.exact and chk.bad_count <= base.bad_count
        # extension families: e2 formula, exact membership recount, and the
        # count bound against the base community budget
        for n, seed in ((20, 4), (22, 9), (28, 6)):
            T = random_tournament(n, seed=seed)
            half = n // 2
            A, R = mask_of(range(half)), mask_of(range(half, n))
            delta1, delta2, s = 2, 1, 1
            dens = Fraction(1, 4)
            fam, e2 = extension_bad_family(T, A, 0, R, delta1, delta2, half, s, dens)
            assert e2 == dens * math.comb(half - delta1, delta2)
            bad_ext = 0
            for S in itertools.combinations(members_of(A), delta1):
                inner = is_community(T, A, mask_of(S), R, delta2, s, e2)
                assert inner.exact
                if inner.passed is not True:
                    bad_ext += 1
            assert fam.k_count_exact(delta1) == bad_ext
            # count bound: every bad extension S' forces more than e2 bad
            # (delta1+delta2)-subsets, each union splitting at most
            # C(delta1+delta2, delta1) ways, so a community hypothesis one
            # level up caps the family size
            probe = is_community(
                T, A, 0, R, delta1 + delta2, s,
                Fraction(math.comb(half, delta1 + delta2)),
            )
            e1 = Fraction(probe.bad_count)
            assert is_community(T, A, 0, R, delta1 + delta2, s, e1).passed is True
            assert bad_ext * e2 <= e1 * math.comb(delta1 + delta2, delta1)
        # upward density cascades on genuinely monotone families
        for size, thr, k_max in ((10, 2, 6), (12, 3, 6), (14, 4, 7)):
            ground = mask_of(range(size))
            fam = MonotoneFamily(ground, predicate=lambda S, t=thr: S.bit_count() >= t)
            good, ds = check_upward_density_cascade(fam, k_max)
            assert good and ds[0] == 0
            assert fam.check_monotone_exact(cap=10**5) is True
        gens = [mask_of([0, 2, 5]), mask_of([1, 3]), mask_of([4, 7, 9])]
        gfam = MonotoneFamily(mask_of(range(12)), generators=gens)
        good, _ = check_upward_density_cascade(gfam, 6)
        assert good and gfam.check_monotone_exact(cap=10**5) is True
        parity = MonotoneFamily(mask_of(range(12)),
                                predicate=lambda S: S.bit_count() % 2 == 1)
        bad, _ = check_upward_density_cascade(parity, 4)
        assert not bad and parity.check_monotone_exact(cap=10**5) is False
        ok = True
    finally:
        _verdict(6, ok)


def test_criterion_07_lll_layer_rounds_at_the_cap():
    t0 = time.time()
    ok = False
    try:
        # the shared builder pins every family density at the admissible cap;
        # verify the pin exactly once, then run 100 seeded rounds
        inst0 = capped_instance(0)
        a = inst0.A.bit_count()
        assert inst0.b == 32 * len(inst0.W1)
        for v in inst0.W2:
            d = len(inst0.in_nbrs[v])
            cap = inst0.density_cap(d)
            t = int(cap * math.comb(a, d))
            if d == 1:
                assert inst0.F[v].k_count_exact(1) == t
                assert inst0.F[v].k_density_exact(1) == Fraction(t, a) <= cap
            assert Fraction(t, math.comb(a, d)) <= cap < Fraction(t + 1, math.comb(a, d))
        for seed in range(100):
            inst = capped_instance(seed)
            assert inst.b == 32 * len(inst.W1)
            res = lll_embed_layer(inst, seed=1000 + seed)
            imgs = list(res.phi.values())
            assert len(set(imgs)) == len(imgs)  # injective
            for u in inst.W1:
                assert res.phi[u] in members_of(inst.f[u])  # candidate lists
            for v in inst.W2:
                m = mask_of(res.phi[u] for u in inst.in_nbrs[v])
                assert m not in inst.F[v]  # forbidden families all missed
        ok = time.time() - t0 < 600
        assert ok, "exceeded 10 minute budget"
    finally:
        _verdict(7, ok)


def test_criterion_08_desk_pipeline_and_big_integer_bounds():
    ok = False
    try:
        G, L = desk_guest()
        wins = 0
        for seed in range(1, 51):
            try:
                emb, T = run_desk_pipeline(seed)
            except (LayerFailed, StructureFailed, RetriesExhausted,
                    ResampleBudgetExhausted, PreconditionUnverified):
                continue
            assert emb.verified and verify_embedding(G, T, emb.mapping)
            wins += 1
        assert wins >= 40, f"only {wins}/50 desk seeds succeeded"
        # the paper-scale constants are validated purely as exact integers
        prof = degree_profile(G, L)
        rep = ramsey_bounds(prof, L, G.n)
        assert prof.max_degree == 4 and L.width == 1
        assert rep.main_bound == 3 ** (57 * 4 * 1) * 9
        H = hypercube_digraph(3)
        LH = compute_layering(H)
        repH = ramsey_bounds(degree_profile(H, LH), LH, H.n)
        assert repH.main_bound == 3 ** (57 * 3 * 1) * 8
        for dw in (2, 6):
            p = StructureParams.paper(2, dw // 2, 2, (4, 4), Fraction(1))
            assert p.c_m == 3 ** (30 * dw)
            assert p.m_int(1) == 4 * 3 ** (30 * dw)
            assert p.b_int(1) == 3 ** (6 * dw) * p.m_int(1)
            assert p.a_int(1) == 3 ** (10 * dw) * p.b_int(1) == 4 * 3 ** (46 * dw)
            assert p.n_required == sum(6 * p.a_int(i) for i in (1, 2))
        ok = True
    finally:
        _verdict(8, ok)


def test_criterion_09_hypercube_binomial_identity():
    ok = False
    try:
        for d in range(1, 21):
            total, closed = hypercube_bound_sum(d)
            assert total == closed == 4 * 17**d
            assert total == sum(math.comb(d, i) * 4 * 2 ** (4 * i) for i in range(d + 1))
        ok = True
    finally:
        _verdict(9, ok)


def test_criterion_10_lower_bound_toy_and_diagnostics():
    t0 = time.time()
    ok = False
    try:
        D0, R, prov = build_D0_and_R(2, 2, DESK_PROFILE, seed=11)
        assert prov["branch"] == "small" and R.n == 5
        assert len(D0.digraph.edges) == 4  # an oriented K_{2,2}
        G, L = build_height_h_guest(D0, 4)
        assert G.n == 8 and L.height == 4
        T, parts = build_lower_host(R, 1)
        rep = verify_no_embedding(G, T)
        assert rep.verdict == "exact-not-found" and rep.nodes > 0
        # every random total map trips the front-index diagnostic
        rng = np.random.default_rng(0)
        kinds = set()
        for _ in range(100):
            phi = {v: int(rng.integers(T.n)) for v in range(G.n)}
            diag = front_index_diagnostic(G, L, T, parts, phi)
            assert diag.violations
            kinds |= {k for k, _ in diag.violations}
        assert kinds == {"front", "monotonicity", "jump"}
        ok = time.time() - t0 < 300
        assert ok, "exceeded 5 minute budget"
    finally:
        _verdict(10, ok)


def test_criterion_11_host_checks_vs_continuous_oracle():
    ok = False
    try:
        hosts = [random_tournament(12, seed) for seed in (1, 2, 3)]
        hosts.append(transitive_tournament(12))
        for i, T in enumerate(hosts):
            rep = check_host_property(T, 4, mode="exact")
            assert rep.mode == "exact" and not rep.vacuous
            assert rep.pairs_checked == 228096
            w = host_W_oracle(T, 4)
            assert abs(float(rep.worst_W) - w) < 1e-6
            assert rep.passed is False  # every 12-host carries a heavy cut
            if i == 3:
                assert rep.worst_W == 16 == 4 * 4  # transitive: a full cut
        ok = True
    finally:
        _verdict(11, ok)
