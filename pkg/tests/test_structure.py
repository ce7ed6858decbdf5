import math
from fractions import Fraction

import pytest

from ramseylab.bitset import members_of
from ramseylab.errors import InfeasibleParams, StructureFailed
from ramseylab.profiles import (
    DESK_ORDER_MODE,
    desk_graded_params,
    desk_params,
    desk_tuning,
)
from ramseylab.structure import (
    SQRT_HALF_LOW,
    GradedParams,
    StepTuning,
    StructureParams,
    _ceil_root_mul,
    audit_graded_structure,
    audit_structure,
    build_graded_structure,
    build_structure,
    rename_structure,
    renamed_ground,
    structure_report,
)
from ramseylab.tournaments import random_tournament


def test_sqrt_half_bound_exact():
    # rational lower bound on 2^{-1/2}: q^2 < 1/2 and close
    q = SQRT_HALF_LOW
    assert q**2 < Fraction(1, 2)
    assert Fraction(1, 2) - q**2 < Fraction(1, 10**9)


def test_ceil_root_mul():
    # exact ceil(f * r^{1/d}) on values with known closed forms
    assert _ceil_root_mul(Fraction(10), Fraction(4), 2) == 20
    assert _ceil_root_mul(Fraction(10), Fraction(2), 2) == 15  # 10 sqrt 2
    assert _ceil_root_mul(Fraction(1), Fraction(8), 3) == 2
    assert _ceil_root_mul(Fraction(7), Fraction(1), 5) == 7


def test_paper_constants_big_integers():
    p = StructureParams.paper(2, 1, 2, (4, 4), Fraction(1))
    dw = 2
    assert p.c_m == 3 ** (30 * dw)
    assert p.m_int(1) == 4 * 3 ** (30 * dw)
    assert p.b_int(1) == 3 ** (6 * dw) * p.m_int(1)
    assert p.a_int(1) == 3 ** (10 * dw) * p.b_int(1)
    # the stacked factor has the advertised magnitude
    assert p.a_int(1) == 4 * 3 ** (46 * dw)
    assert len(str(p.a_int(1))) == len(str(4 * 3**92))
    assert p.n_required == sum(6 * p.a_int(i) for i in (1, 2))


def test_params_validation():
    with pytest.raises(InfeasibleParams):
        StructureParams(2, 1, 2, (4,), Fraction(1), 15, 4, 3, 2)
    with pytest.raises(InfeasibleParams):
        StructureParams(2, 1, 1, (4,), Fraction(2), 15, 4, 3, 2)
    with pytest.raises(InfeasibleParams):
        StructureParams(2, 1, 2, (2, 8), Fraction(1), 15, 4, 3, 2)  # ladder jump
    with pytest.raises(InfeasibleParams):
        StepTuning(k_in=2, delta_inner=Fraction(1, 2))


def test_desk_params_shape():
    p = desk_params()
    assert p.h == 5 and p.w == 1 and p.delta_comm == 2
    assert p.s == (10, 10, 12, 10, 10)
    assert [p.m_int(i) for i in range(1, 6)] == [150, 150, 180, 150, 150]
    assert [p.b_int(i) for i in range(1, 6)] == [600, 600, 720, 600, 600]
    assert [p.a_int(i) for i in range(1, 6)] == [1500, 1500, 1800, 1500, 1500]
    assert p.n_required == 46800
    # certificate budgets are exact rationals
    e1 = p.e_out(1)
    assert e1 == Fraction(1) * Fraction(10, 1200) ** 2 * math.comb(50, 2)


def test_desk_structure_build_and_audit():
    p = desk_params()
    T = random_tournament(p.n_required, seed=902)
    es = build_structure(T, p, desk_tuning(), seed=17, order_mode=DESK_ORDER_MODE)
    rep = structure_report(audit_structure(T, es))
    assert rep["passed"], [c for c in rep["checks"] if not c["ok"]]
    # deterministic rebuild
    es2 = build_structure(T, p, desk_tuning(), seed=17, order_mode=DESK_ORDER_MODE)
    assert es.layer_sets() == es2.layer_sets()


def test_rename_containment():
    p = desk_params()
    T = random_tournament(p.n_required, seed=903)
    es = build_structure(T, p, desk_tuning(), seed=5, order_mode=DESK_ORDER_MODE)
    H = p.h * p.w
    A = rename_structure(es, H)
    assert len(A) == H
    sizes = [a.bit_count() for a in A]
    assert sizes == [es.block(i).levels[1].bit_count() for i in range(1, p.h + 1)]
    # width 1: one rung per block, so consecutive layers live in distinct blocks
    for i in range(H):
        for j in range(i + 1, H):
            assert A[i] & A[j] == 0
    # the certificate ground of layer t contains the previous w layers
    for t in range(2, H + 1):
        g = renamed_ground(es, t)
        assert A[t - 2] & ~g == 0
    with pytest.raises(IndexError):
        rename_structure(es, H + 1)


def test_rename_rungs_nested_when_wide():
    # w = 2: rung j of block i lands at layer (i-1)w + j, rungs nest inside a
    # block, blocks stay disjoint.  Each inner peel halves the rung and the
    # interval certificate needs a >= 2^{k_in w} b, hence the wide constants.
    p = StructureParams(1, 2, 2, (6, 6), Fraction(1), Fraction(4),
                        Fraction(20), Fraction(6), Fraction(5))
    tune = StepTuning(k_in=1, delta_inner=Fraction(1, 8))
    T = random_tournament(p.n_required, seed=31)
    es = build_structure(T, p, tune, seed=8, order_mode="identity")
    A = rename_structure(es, 4)
    assert A[0] & ~A[1] == 0  # rung 1 of block 1 inside rung 2
    assert A[2] & ~A[3] == 0
    assert (A[0] | A[1]) & (A[2] | A[3]) == 0
    rep = structure_report(audit_structure(T, es))
    assert rep["passed"]


def test_graded_params_closed_form():
    gp = desk_graded_params()
    assert gp.height == 4
    assert gp.a == (256, 384, 448, 448)
    assert gp.b == (128, 192, 224, 224)
    assert gp.s == (48, 32, 24, 4)
    assert gp.delta_in == (1, 2, 3)
    # thresholds e_i = delta_i * C(b_i, din_i): the certificate ground is A_i
    for i in range(1, 4):
        want = gp.delta_list[i - 1] * math.comb(gp.b[i - 1], gp.delta_in[i - 1])
        assert gp.e_threshold(i) == want
    assert gp.n_required == 2 * gp.ell * sum(gp.a) == 18432


def test_graded_params_validation():
    with pytest.raises(InfeasibleParams):
        GradedParams(2, (1, 3), (0,), 3, 3, Fraction(2, 5), 6, (1,),
                     (8, 8), (4, 4), (2, 4), (Fraction(1, 8),))
    with pytest.raises(InfeasibleParams):
        GradedParams(2, (1, 3), (1,), 3, 3, Fraction(2, 5), 6, (1,),
                     (8, 8), (4, 4), (2, 2), (Fraction(1, 8),))  # s_H < |V_H|


def test_graded_build_and_audit():
    from ramseylab.profiles import desk_graded_guest

    G, L = desk_graded_guest()
    gp = desk_graded_params()
    T = random_tournament(gp.n_required, seed=904)
    gs = build_graded_structure(T, G, L, gp, seed=9, order_mode=DESK_ORDER_MODE)
    rep = structure_report(audit_graded_structure(T, gs))
    assert rep["passed"], [c for c in rep["checks"] if not c["ok"]]
    assert [a.bit_count() for a in gs.A] == list(gp.b)
    # layer sets sit in disjoint windows
    for i in range(4):
        for j in range(i + 1, 4):
            assert gs.A[i] & gs.A[j] == 0


def test_structure_roundtrip_dict():
    p = desk_params()
    assert StructureParams.from_dict(p.to_dict()) == p
    t = desk_tuning()
    assert StepTuning.from_dict(t.to_dict()) == t
