import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ramseylab.bitset import full_mask, mask_of, members_of
from ramseylab.tournaments import (
    Tournament,
    blowup,
    check_median_certificate,
    common_in_neighborhood,
    common_out_neighborhood,
    directed_density,
    forward_edges,
    identity_order,
    interval_density,
    layered_tournament,
    median_order_bruteforce,
    median_order_exact,
    median_order_local,
    parse_tourn,
    qr_tournament,
    random_tournament,
    rotational_tournament,
    transitive_tournament,
    write_tourn,
)


def test_constructor_rejects_broken_rows():
    with pytest.raises(ValueError):
        Tournament(3, [0b010, 0b010, 0b000])  # edge 1->1 missing, 0/1 doubled
    with pytest.raises(ValueError):
        Tournament(2, [0b01, 0b00])  # diagonal bit


def test_random_deterministic_and_valid():
    a = random_tournament(50, seed=3)
    b = random_tournament(50, seed=3)
    assert a.out_row(7) == b.out_row(7)
    for u, v in [(0, 1), (10, 40), (3, 3)]:
        if u != v:
            assert a.has_edge(u, v) != a.has_edge(v, u)


def test_rotational_and_qr():
    R = rotational_tournament(7)
    assert all(R.out_degree(v) == 3 for v in range(7))
    Q = qr_tournament(7)
    assert all(Q.out_degree(v) == 3 for v in range(7))
    # rotational out-sets are the +1..+(n-1)/2 shifts
    assert R.has_edge(0, 1) and R.has_edge(0, 3) and not R.has_edge(0, 4)


def test_forward_edges_transitive():
    T = transitive_tournament(6)
    assert forward_edges(T, range(6)) == 15
    assert forward_edges(T, range(5, -1, -1)) == 0


def test_median_local_certificate():
    for seed in range(5):
        T = random_tournament(60, seed=seed)
        mo = median_order_local(T, seed=seed)
        assert mo.certificate
        assert check_median_certificate(T, mo.order)
        assert sorted(mo.order) == list(range(60))


def test_median_exact_matches_bruteforce():
    for n, seed in [(5, 0), (6, 1), (7, 2), (8, 3)]:
        T = random_tournament(n, seed=seed)
        mo = median_order_exact(T)
        assert mo.forward_edges == median_order_bruteforce(T)
        assert check_median_certificate(T, mo.order)
        assert forward_edges(T, mo.order) == mo.forward_edges


def test_local_never_beats_exact():
    for seed in range(4):
        T = random_tournament(9, seed=seed)
        exact = median_order_exact(T)
        local = median_order_local(T, seed=seed)
        assert local.forward_edges <= exact.forward_edges


def test_certificate_fails_on_bad_order():
    # reversing a transitive order yields zero forward edges: no certificate
    T = transitive_tournament(8)
    assert not check_median_certificate(T, list(range(7, -1, -1)))


def test_interval_density_floor():
    # any interval of a median order beats the (k-1)/2k floor into a
    # following window
    for seed in range(3):
        T = random_tournament(40, seed=seed)
        mo = median_order_local(T, seed=seed)
        A = mask_of(mo.order[20:30])  # positions 21..30
        for k in (1, 2, 4):
            length = 10 * k  # interval [i, 21) of length 10k, split a=10
            i_start = 21 - length
            if i_start < 1:
                continue
            d = interval_density(T, mo, i_start, 21, A)
            assert d >= Fraction(k - 1, 2 * k)


def test_directed_density_brute():
    T = random_tournament(12, seed=9)
    X, Y = mask_of(range(6)), mask_of(range(6, 12))
    num = sum(
        1 for u in range(6) for v in range(6, 12) if T.has_edge(u, v)
    )
    assert directed_density(T, X, Y) == Fraction(num, 36)


def test_common_neighborhoods_brute():
    T = random_tournament(20, seed=4)
    S = mask_of([2, 5, 11])
    R = full_mask(20)
    out = {v for v in range(20) if all(T.has_edge(u, v) for u in (2, 5, 11))}
    inn = {v for v in range(20) if all(T.has_edge(v, u) for u in (2, 5, 11))}
    assert set(members_of(common_out_neighborhood(T, S, R))) == out
    assert set(members_of(common_in_neighborhood(T, S, R))) == inn
    assert common_out_neighborhood(T, 0, R) == R


def test_layered_tournament():
    R = rotational_tournament(5)
    T, parts = layered_tournament(R, 3)
    assert T.n == 15 and len(parts) == 3
    for p in range(2):
        for u in members_of(parts[p]):
            for v in members_of(parts[p + 1]):
                assert T.has_edge(u, v)
    # inside each part the pattern is R
    for u in range(5):
        for v in range(5):
            if u != v:
                assert T.has_edge(10 + u, 10 + v) == R.has_edge(u, v)


def test_blowup_parts_and_pattern():
    P = transitive_tournament(3)
    T, parts = blowup(P, 4, inner="transitive")
    assert T.n == 12 and [p.bit_count() for p in parts] == [4, 4, 4]
    assert T.has_edge(0, 5) and T.has_edge(1, 11) and not T.has_edge(9, 2)


def test_tourn_roundtrip():
    T = random_tournament(33, seed=8)
    T2 = parse_tourn(write_tourn(T))
    assert T2.n == T.n
    assert all(T2.out_row(v) == T.out_row(v) for v in range(33))


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 40), st.integers(0, 10_000))
def test_degrees_sum(n, seed):
    T = random_tournament(n, seed=seed)
    assert sum(T.out_degree(v) for v in range(n)) == n * (n - 1) // 2


def test_identity_order():
    T = transitive_tournament(10)
    mo = identity_order(T)
    assert mo.order == tuple(range(10))
    assert not mo.certificate  # not claimed until checked
    assert check_median_certificate(T, mo.order)
